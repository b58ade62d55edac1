"""Second-order cone primitives.

K = {(x1, x2) in R x R^{m-1} : x1 >= ||x2||}.  This module holds the point
type, spectral decomposition, region classification, the projections onto K
and its polar -K, and the small membership helpers the cone formulas are
assembled from.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from .errors import AmbiguousCase, DimensionMismatch, NotInOmega, SocError


class SocVector:
    """An immutable point (x1, x2) of R x R^{m-1}, m >= 2."""

    __slots__ = ("_data",)

    def __init__(self, data: Any):
        arr = np.array(data, dtype=float)
        if arr.ndim != 1:
            raise SocError(f"expected a flat vector, got shape {arr.shape}")
        if arr.size < 2:
            raise SocError(f"dimension m = {arr.size} is not supported (need m >= 2)")
        if not np.all(np.isfinite(arr)):
            raise SocError("vector entries must be finite")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def of(cls, x: "VectorLike") -> "SocVector":
        return x if isinstance(x, SocVector) else cls(x)

    @classmethod
    def from_parts(cls, x1: float, x2: Any) -> "SocVector":
        return cls(np.concatenate(([float(x1)], np.asarray(x2, dtype=float).reshape(-1))))

    @classmethod
    def zeros(cls, m: int) -> "SocVector":
        return cls(np.zeros(m))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def m(self) -> int:
        return self._data.size

    @property
    def x1(self) -> float:
        return float(self._data[0])

    @property
    def x2(self) -> np.ndarray:
        return self._data[1:]

    def norm(self) -> float:
        return float(np.linalg.norm(self._data))

    def tolist(self) -> list:
        return self._data.tolist()

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._data.copy() if copy else self._data
        return self._data.astype(dtype)

    def __len__(self) -> int:
        return self.m

    def __iter__(self):
        return iter(self._data.tolist())

    def __getitem__(self, i):
        return self._data[i]

    def __add__(self, other):
        return SocVector(self._data + np.asarray(other, dtype=float))

    __radd__ = __add__

    def __sub__(self, other):
        return SocVector(self._data - np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return SocVector(np.asarray(other, dtype=float) - self._data)

    def __neg__(self):
        return SocVector(-self._data)

    def __mul__(self, s):
        return SocVector(float(s) * self._data)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return SocVector(self._data / float(s))

    def __eq__(self, other):
        if not isinstance(other, SocVector):
            return NotImplemented
        return np.array_equal(self._data, other._data)

    __hash__ = None

    def __repr__(self):
        return f"SocVector({self.x1!r}, {self.x2.tolist()!r})"


VectorLike = Union[SocVector, np.ndarray, list, tuple]


class ConeRegion(str, enum.Enum):
    INT_K = "IntK"
    BD_K_NONZERO = "BdKNonzero"
    ZERO = "Zero"
    NEG_INT_K = "NegIntK"
    NEG_BD_K_NONZERO = "NegBdKNonzero"
    OUTSIDE = "Outside"

    @property
    def in_k(self) -> bool:
        return self in (ConeRegion.INT_K, ConeRegion.BD_K_NONZERO, ConeRegion.ZERO)


class CaseTag(str, enum.Enum):
    ZERO_INT = "ZeroInt"
    INT_ZERO = "IntZero"
    BD_BD = "BdBd"
    ZERO_BD = "ZeroBd"
    BD_ZERO = "BdZero"
    ZERO_ZERO = "ZeroZero"


class ConeKind(str, enum.Enum):
    PROXIMAL = "Proximal"
    REGULAR = "Regular"
    LIMITING = "Limiting"


class RayMode(str, enum.Enum):
    FULL_LINE = "FullLine"
    NEGATIVE_RAY = "NegativeRay"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    ``classify`` decides regions relative to the scale 1 + ||x||; ``member``
    bounds membership residuals; ``oracle`` is the slack of sampled
    inequality checks.
    """

    classify: float = 1e-9
    member: float = 1e-8
    oracle: float = 1e-6

    def __post_init__(self):
        if min(self.classify, self.member, self.oracle) <= 0:
            raise SocError("tolerances must be strictly positive")
        if self.classify > self.member:
            raise SocError("classify tolerance must not exceed member tolerance")

    @classmethod
    def uniform(cls, tol: float) -> "Tolerances":
        return cls(classify=tol, member=tol, oracle=tol)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class SpectralDecomp:
    lambda1: float
    lambda2: float
    c1: SocVector
    c2: SocVector
    tie_break_used: bool


@dataclass(frozen=True)
class OmegaPair:
    """A complementary pair (x, y) together with its case class."""

    x: SocVector
    y: SocVector
    case: CaseTag
    k: Optional[float] = None

    @property
    def m(self) -> int:
        return self.x.m

    @property
    def z(self) -> np.ndarray:
        """The projection argument x - y, from which the pair is recovered."""
        return self.x.data - self.y.data


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a set-membership test.

    ``branch`` names the satisfied disjunct (or, for a negative verdict, the
    disjunct with the smallest residual); ``certificate`` holds the named
    scalars and vectors that witness it.
    """

    member: bool
    branch: str
    certificate: dict = field(default_factory=dict)
    cone_kind: Optional[ConeKind] = None

    def __bool__(self) -> bool:
        return self.member

    @property
    def residual(self) -> float:
        return float(self.certificate.get("residual", 0.0))


def _as_array(x: VectorLike) -> np.ndarray:
    return SocVector.of(x).data


def reflect(x: VectorLike) -> SocVector:
    """(x1, x2) -> (x1, -x2)."""
    a = _as_array(x)
    return SocVector(np.concatenate(([a[0]], -a[1:])))


def spectral_decompose(x: VectorLike) -> SpectralDecomp:
    a = _as_array(x)
    n2 = float(np.linalg.norm(a[1:]))
    if n2 > 0.0:
        w = a[1:] / n2
        tie = False
    else:
        w = np.zeros(a.size - 1)
        w[0] = 1.0
        tie = True
    c1 = SocVector(0.5 * np.concatenate(([1.0], -w)))
    c2 = SocVector(0.5 * np.concatenate(([1.0], w)))
    return SpectralDecomp(a[0] - n2, a[0] + n2, c1, c2, tie)


def _region(a: np.ndarray, tol: float) -> ConeRegion:
    n2 = np.linalg.norm(a[1:])
    lam1, lam2 = a[0] - n2, a[0] + n2
    s = tol * (1.0 + np.linalg.norm(a))
    if lam1 > s:
        return ConeRegion.INT_K
    if lam2 < -s:
        return ConeRegion.NEG_INT_K
    if lam1 >= -s:
        return ConeRegion.BD_K_NONZERO if lam2 > s else ConeRegion.ZERO
    return ConeRegion.OUTSIDE if lam2 > s else ConeRegion.NEG_BD_K_NONZERO


def classify_point(x: VectorLike, tol: Tolerances = DEFAULT_TOL) -> ConeRegion:
    return _region(_as_array(x), tol.classify)


def project_batch(z: np.ndarray) -> np.ndarray:
    """Row-wise projection onto K of an (n, m) array."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    z1 = z[:, 0]
    n2 = np.linalg.norm(z[:, 1:], axis=1)
    out = np.zeros_like(z)
    inside = n2 <= z1
    out[inside] = z[inside]
    mixed = n2 > np.abs(z1)
    if np.any(mixed):
        # (lambda2)_+ c2 with lambda1 < 0 < lambda2
        a = 0.5 * (z1[mixed] + n2[mixed])
        out[mixed, 0] = a
        out[mixed, 1:] = (a / n2[mixed])[:, None] * z[mixed, 1:]
    return out


def project_soc(x: VectorLike) -> SocVector:
    """Metric projection onto K, (lambda1)_+ c1 + (lambda2)_+ c2."""
    return SocVector(project_batch(_as_array(x))[0])


def project_polar(x: VectorLike) -> SocVector:
    """Projection onto the polar cone -K, taken as the Moreau complement."""
    a = _as_array(x)
    return SocVector(a - project_batch(a)[0])


def ray_membership(
    a: VectorLike,
    b: VectorLike,
    mode: RayMode = RayMode.FULL_LINE,
    tol: Tolerances = DEFAULT_TOL,
) -> MembershipVerdict:
    """Decide a in R b (FULL_LINE) or a in R_- b (NEGATIVE_RAY)."""
    a_, b_ = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a_.shape != b_.shape:
        raise DimensionMismatch(f"shapes {a_.shape} and {b_.shape} differ")
    na = float(np.linalg.norm(a_))
    bb = float(b_ @ b_)
    if bb > 0.0:
        coef = float(a_ @ b_) / bb
        resid = float(np.linalg.norm(a_ - coef * b_))
        signed = coef * np.sqrt(bb)
    else:
        coef, resid, signed = 0.0, na, 0.0
    thresh = tol.member * (1.0 + na)
    ok = resid <= thresh
    if mode == RayMode.NEGATIVE_RAY:
        ok = ok and signed <= thresh
    return MembershipVerdict(
        member=bool(ok),
        branch=str(RayMode(mode).value),
        certificate={"coefficient": float(coef), "residual": float(resid)},
    )


def _pair_case(rx: ConeRegion, ry: ConeRegion) -> Optional[CaseTag]:
    R = ConeRegion
    table = {
        (R.ZERO, R.INT_K): CaseTag.ZERO_INT,
        (R.INT_K, R.ZERO): CaseTag.INT_ZERO,
        (R.BD_K_NONZERO, R.BD_K_NONZERO): CaseTag.BD_BD,
        (R.ZERO, R.BD_K_NONZERO): CaseTag.ZERO_BD,
        (R.BD_K_NONZERO, R.ZERO): CaseTag.BD_ZERO,
        (R.ZERO, R.ZERO): CaseTag.ZERO_ZERO,
    }
    return table.get((rx, ry))


def classify_pair(x: VectorLike, y: VectorLike, tol: Tolerances = DEFAULT_TOL) -> OmegaPair:
    """Certify (x, y) in Omega and tag its case.

    Classification is repeated at half and twice the tolerance; a pair whose
    tag is not stable across that band raises AmbiguousCase.
    """
    xv, yv = SocVector.of(x), SocVector.of(y)
    if xv.m != yv.m:
        raise DimensionMismatch(f"x has m={xv.m}, y has m={yv.m}")
    a, b = xv.data, yv.data
    t = tol.classify
    bands = [(_region(a, f * t), _region(b, f * t)) for f in (0.5, 1.0, 2.0)]
    if all(not rx.in_k for rx, _ in bands):
        raise NotInOmega(f"x = {a.tolist()} is not in K")
    if all(not ry.in_k for _, ry in bands):
        raise NotInOmega(f"y = {b.tolist()} is not in K")
    ip = float(a @ b)
    if abs(ip) > t * (1.0 + np.linalg.norm(a) * np.linalg.norm(b)):
        raise NotInOmega(f"<x, y> = {ip!r} is not zero")
    cases = {_pair_case(rx, ry) for rx, ry in bands}
    if len(cases) != 1 or None in cases:
        raise AmbiguousCase(
            "classification is unstable at the tolerance boundary: "
            + ", ".join(f"({rx.value}, {ry.value})" for rx, ry in bands)
        )
    case = cases.pop()
    k = float(b[0] / a[0]) if case == CaseTag.BD_BD else None
    return OmegaPair(xv, yv, case, k)
