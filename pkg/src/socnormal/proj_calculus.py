"""Differential objects of the projection onto K.

Directional derivatives in all six regions, Jacobians where they exist,
elements of the B-subdifferential at the origin, membership in the limiting
coderivative at the points needed by the limiting-cone formulas, and a
calmness probe for the first-order expansion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy.linalg import null_space

from .errors import DimensionMismatch, InvalidGrid, NotDifferentiable, UnsupportedRegion
from .soc_core import (
    DEFAULT_TOL,
    ConeRegion,
    MembershipVerdict,
    SocVector,
    Tolerances,
    VectorLike,
    _as_array,
    _region,
    project_batch,
)

R = ConeRegion


@dataclass(frozen=True)
class ProjJacobian:
    matrix: np.ndarray
    region: ConeRegion


class BKind(str, enum.Enum):
    ZERO_MATRIX = "ZeroMatrix"
    IDENTITY = "Identity"
    ALPHA_W = "AlphaW"


@dataclass(frozen=True)
class BSubdifElement:
    kind: BKind
    m: int
    alpha: Optional[float] = None
    w: Optional[np.ndarray] = None

    def matrix(self) -> np.ndarray:
        if self.kind == BKind.ZERO_MATRIX:
            return np.zeros((self.m, self.m))
        if self.kind == BKind.IDENTITY:
            return np.eye(self.m)
        return alpha_w_matrix(self.alpha, self.w)


@dataclass(frozen=True)
class CalmnessReport:
    scales: list
    ratios: list
    fitted_c: float


def alpha_w_matrix(alpha: float, w: np.ndarray) -> np.ndarray:
    """alpha*I + 1/2 [[1-2a, w^T], [w, (1-2a) w w^T]]."""
    w = np.asarray(w, dtype=float)
    m = w.size + 1
    b = 1.0 - 2.0 * alpha
    blk = np.empty((m, m))
    blk[0, 0] = b
    blk[0, 1:] = w
    blk[1:, 0] = w
    blk[1:, 1:] = b * np.outer(w, w)
    return alpha * np.eye(m) + 0.5 * blk


def _outside_jacobian(a: np.ndarray) -> np.ndarray:
    n2 = np.linalg.norm(a[1:])
    w = a[1:] / n2
    m = a.size
    j = np.empty((m, m))
    j[0, 0] = 1.0
    j[0, 1:] = w
    j[1:, 0] = w
    p = np.eye(m - 1) - np.outer(w, w)
    j[1:, 1:] = np.eye(m - 1) + (a[0] / n2) * p
    return 0.5 * j


def jacobian(x: VectorLike, tol: Tolerances = DEFAULT_TOL) -> ProjJacobian:
    a = _as_array(x)
    region = _region(a, tol.classify)
    if region == R.INT_K:
        mat = np.eye(a.size)
    elif region == R.NEG_INT_K:
        mat = np.zeros((a.size, a.size))
    elif region == R.OUTSIDE:
        mat = _outside_jacobian(a)
    else:
        raise NotDifferentiable(f"projection is not differentiable at {a.tolist()} ({region.value})")
    return ProjJacobian(mat, region)


def dir_derivative_batch(x: VectorLike, h: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Directional derivative of the projection at x along every row of h."""
    a = _as_array(x)
    h = np.atleast_2d(np.asarray(h, dtype=float))
    if h.shape[1] != a.size:
        raise DimensionMismatch(f"direction has m={h.shape[1]}, point has m={a.size}")
    region = _region(a, tol.classify)
    if region == R.INT_K:
        return h.copy()
    if region == R.NEG_INT_K:
        return np.zeros_like(h)
    if region == R.ZERO:
        return project_batch(h)
    if region == R.OUTSIDE:
        return h @ _outside_jacobian(a).T
    xbar = a[1:] / np.linalg.norm(a[1:])
    if region == R.BD_K_NONZERO:
        s = np.minimum(h[:, 0] - h[:, 1:] @ xbar, 0.0)
        d = np.concatenate(([1.0], -xbar))
        return h - 0.5 * s[:, None] * d
    # NEG_BD_K_NONZERO
    s = np.maximum(h[:, 0] + h[:, 1:] @ xbar, 0.0)
    d = np.concatenate(([1.0], xbar))
    return 0.5 * s[:, None] * d


def dir_derivative(x: VectorLike, h: VectorLike, tol: Tolerances = DEFAULT_TOL) -> SocVector:
    return SocVector(dir_derivative_batch(x, _as_array(h)[None, :], tol)[0])


def b_subdif_elements_at_zero(
    alpha_grid: Sequence[float], w_grid: Sequence[Sequence[float]]
) -> list:
    """O, I and one alpha-w element per grid pair, all in the B-subdifferential at 0."""
    alphas = [float(a) for a in alpha_grid]
    ws = [np.asarray(w, dtype=float).reshape(-1) for w in w_grid]
    if not alphas or not ws:
        raise InvalidGrid("alpha and w grids must be nonempty")
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise InvalidGrid("alpha values must lie in [0, 1]")
    if len({w.size for w in ws}) != 1:
        raise InvalidGrid("w vectors must share one dimension")
    if any(abs(np.linalg.norm(w) - 1.0) > 1e-12 for w in ws):
        raise InvalidGrid("w vectors must have unit norm")
    m = ws[0].size + 1
    out = [BSubdifElement(BKind.ZERO_MATRIX, m), BSubdifElement(BKind.IDENTITY, m)]
    for a in alphas:
        for w in ws:
            w.setflags(write=False)
            out.append(BSubdifElement(BKind.ALPHA_W, m, a, w))
    return out


def unit_vector_with(A: np.ndarray, b: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """A unit vector w with A w = b, or None when there is none.

    ``A`` has at most a handful of rows; the minimum-norm solution is padded
    with a null-space direction up to unit length.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[1]
    w0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ w0 - b) > tol * (1.0 + np.linalg.norm(b)):
        return None
    r0 = float(np.linalg.norm(w0))
    if r0 > 1.0 + tol:
        return None
    ns = null_space(A, rcond=1e-12) if np.any(A) else np.eye(n)
    if ns.shape[1] == 0:
        return w0 / r0 if abs(r0 - 1.0) <= tol else None
    # w0 lies in the row space, so the padded vector has unit norm
    w = w0 + np.sqrt(max(0.0, 1.0 - r0 * r0)) * ns[:, 0]
    return w / np.linalg.norm(w)


def _quadratic_roots(c2: float, c1: float, c0: float) -> list:
    scale = max(abs(c2), abs(c1), abs(c0))
    if scale == 0.0:
        return []
    if abs(c2) <= 1e-14 * scale:
        return [-c0 / c1] if abs(c1) > 1e-14 * scale else []
    out = [-c1 / (2.0 * c2)]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc >= 0.0:
        sq = np.sqrt(disc)
        q = -0.5 * (c1 + np.copysign(sq, c1))
        if q != 0.0:
            out += [q / c2, c0 / q]
    return out


def _linear_root(slope: float, intercept: float) -> list:
    return [-intercept / slope] if slope != 0.0 else []


def solve_alpha_w_image(w_star: np.ndarray, z_star: np.ndarray, tol: float):
    """Search (alpha, w) in [0,1] x S^{m-2} with M(alpha, w) w_star = z_star.

    Writing the tail equation as z2 - alpha*w2 = c(alpha) w, the unit-norm
    condition is a quadratic in alpha, so candidates are its roots plus the
    roots of the linear side conditions; each is verified on the realized
    matrix.  Returns (residual, alpha, w) of the best candidate or None.
    """
    w1, w2 = w_star[0], w_star[1:]
    z1, z2 = z_star[0], z_star[1:]
    s = 2.0 * z1 - w1  # required value of w^T w2
    # c(alpha) = 0.5*w1 + (0.5 - alpha)*s ; r(alpha) = z2 - alpha*w2
    c_slope, c_int = -s, 0.5 * w1 + 0.5 * s
    g2 = w2 @ w2 - c_slope**2
    g1 = -2.0 * (z2 @ w2) - 2.0 * c_slope * c_int
    g0 = z2 @ z2 - c_int**2
    # r(alpha)^T w2 - s*c(alpha) = 0
    l_slope, l_int = -(w2 @ w2) - s * c_slope, z2 @ w2 - s * c_int
    alphas = {0.0, 0.5, 1.0}
    alphas.update(_quadratic_roots(g2, g1, g0))
    alphas.update(_linear_root(l_slope, l_int))
    alphas.update(_linear_root(c_slope, c_int))
    best = None
    scale = 1.0 + np.linalg.norm(w_star) + np.linalg.norm(z_star)
    for a in sorted(alphas):
        if not np.isfinite(a) or a < -1e-9 or a > 1.0 + 1e-9:
            continue
        a = min(max(a, 0.0), 1.0)
        c = c_int + c_slope * a
        r = z2 - a * w2
        if abs(c) > tol * scale:
            w = r / c
            nw = np.linalg.norm(w)
            if nw == 0.0:
                continue
            w = w / nw
        else:
            w = unit_vector_with(w2[None, :], np.array([s]), tol)
            if w is None:
                continue
        res = float(np.linalg.norm(alpha_w_matrix(a, w) @ w_star - z_star))
        if best is None or res < best[0]:
            best = (res, a, w)
    return best


def _branch(name, member, residual, **cert):
    cert = {k: float(v) if isinstance(v, np.floating) else v for k, v in cert.items()}
    cert["residual"] = float(residual)
    return MembershipVerdict(member=bool(member), branch=name, certificate=cert)


def _in_k_residual(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - project_batch(a)[0]))


def xi_from_boundary(d: np.ndarray):
    """For d in bd K \\ {0} return (xi, residual) with d in R_+ xi, xi in C.

    The residual is |d1 - ||d2|||; xi is None when d1 <= 0.
    """
    if d[0] <= 0.0:
        return None, float(np.linalg.norm(d))
    return d / d[0], float(abs(d[0] - np.linalg.norm(d[1:])))


def _xi_branch(ray_vec, other, tol, scale):
    """ray_vec in R_+ xi and <other, xi> >= 0 for some xi in C."""
    nr = np.linalg.norm(ray_vec)
    if nr <= tol * scale:
        # any xi in C works when it meets <other, xi> >= 0
        o1, o2 = other[0], other[1:]
        n2 = np.linalg.norm(o2)
        w = o2 / n2 if n2 > 0 else np.eye(o2.size)[0]
        xi = np.concatenate(([1.0], w))
        gap = max(0.0, -(o1 + n2))
        return gap <= tol * scale, max(nr, gap), xi
    xi, res = xi_from_boundary(ray_vec)
    if xi is None:
        return False, res, None
    gap = max(0.0, -float(other @ xi))
    return res <= tol * scale and gap <= tol * scale, max(res, gap), xi


def limiting_coderivative_contains(
    z: VectorLike, w_star: VectorLike, z_star: VectorLike, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """Decide z_star in D*Pi_K(z)(w_star)."""
    za, wa, ta = _as_array(z), _as_array(w_star), _as_array(z_star)
    if not za.size == wa.size == ta.size:
        raise DimensionMismatch("z, w_star and z_star must share one dimension")
    region = _region(za, tol.classify)
    scale = 1.0 + np.linalg.norm(wa) + np.linalg.norm(ta)
    eps = tol.member * scale
    if region in (R.INT_K, R.NEG_INT_K, R.OUTSIDE):
        res = np.linalg.norm(jacobian(za, tol).matrix @ wa - ta)
        return _branch("jacobian", res <= eps, res)
    if region == R.BD_K_NONZERO:
        raise UnsupportedRegion("limiting coderivative at bd K \\ {0} is not provided")
    tried = []
    if region == R.NEG_BD_K_NONZERO:
        zbar = za[1:] / np.linalg.norm(za[1:])
        e = np.concatenate(([1.0], zbar))
        c2 = 0.5 * e
        tried.append(_branch("O", np.linalg.norm(ta) <= eps, np.linalg.norm(ta)))
        rank_one = 0.5 * np.outer(e, e)
        res = np.linalg.norm(rank_one @ wa - ta)
        tried.append(_branch("rank-one", res <= eps, res))
        coef = float(ta @ c2) / float(c2 @ c2)
        line_res = np.linalg.norm(ta - coef * c2)
        gap = max(0.0, -float((wa - ta) @ c2))
        res = max(line_res, max(0.0, -coef) * np.linalg.norm(c2), gap)
        tried.append(_branch("ray", res <= eps, res, coefficient=coef))
    else:  # ZERO
        tried.append(_branch("B:O", np.linalg.norm(ta) <= eps, np.linalg.norm(ta)))
        res = np.linalg.norm(wa - ta)
        tried.append(_branch("B:I", res <= eps, res))
        found = solve_alpha_w_image(wa, ta, tol.member)
        if found is not None:
            res, a, w = found
            tried.append(_branch("B:alpha-w", res <= eps, res, alpha=a, w=w.tolist()))
        res = max(_in_k_residual(ta), _in_k_residual(wa - ta))
        tried.append(_branch("K-pair", res <= eps, res))
        ok, res, xi = _xi_branch(wa - ta, ta, tol.member, scale)
        tried.append(_branch("xi-difference", ok, res, xi=None if xi is None else xi.tolist()))
        ok, res, xi = _xi_branch(ta, wa - ta, tol.member, scale)
        tried.append(_branch("xi-ray", ok, res, xi=None if xi is None else xi.tolist()))
    for v in tried:
        if v.member:
            return v
    worst = min(tried, key=lambda v: v.residual)
    return MembershipVerdict(False, worst.branch, worst.certificate)


def _project_mp(v):
    n2 = mpmath.sqrt(mpmath.fsum(t * t for t in v[1:]))
    if n2 <= v[0]:
        return list(v)
    if n2 <= -v[0]:
        return [mpmath.mpf(0)] * len(v)
    a = (v[0] + n2) / 2
    return [a] + [a * t / n2 for t in v[1:]]


def _snap(xa: np.ndarray, region: ConeRegion) -> list:
    """High-precision copy of xa placed exactly on its classified stratum."""
    xm = [mpmath.mpf(float(t)) for t in xa]
    if region == R.ZERO:
        return [mpmath.mpf(0)] * len(xm)
    if region in (R.BD_K_NONZERO, R.NEG_BD_K_NONZERO):
        n2 = mpmath.sqrt(mpmath.fsum(t * t for t in xm[1:]))
        xm[0] = n2 if region == R.BD_K_NONZERO else -n2
    return xm


def calmness_report(
    x: VectorLike,
    h: VectorLike,
    scales: Sequence[float],
    tol: Tolerances = DEFAULT_TOL,
    dps: int = 50,
) -> CalmnessReport:
    """Remainder ||Pi(x+th) - Pi(x) - Pi'(x; th)|| / t^2 per scale t.

    The directional derivative is evaluated in double precision (it is the
    object under test); the two projections are evaluated with ``dps``
    decimal digits so that cancellation in their difference does not swamp
    an O(t^2) remainder at small t.  A point classified as lying on bd K,
    -bd K or at 0 is first moved exactly onto that set, so the remainder is
    measured where the derivative formula applies.
    """
    xa, ha = _as_array(x), _as_array(h)
    ts = [float(t) for t in scales]
    if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("scales must be positive and strictly decreasing")
    d = dir_derivative(xa, ha, tol).data
    ratios = []
    with mpmath.workdps(dps):
        xm = _snap(xa, _region(xa, tol.classify))
        hm = [mpmath.mpf(float(t)) for t in ha]
        px = _project_mp(xm)
        for t in ts:
            tm = mpmath.mpf(t)
            pxt = _project_mp([a + tm * b for a, b in zip(xm, hm)])
            res = [p - q - tm * mpmath.mpf(float(di)) for p, q, di in zip(pxt, px, d)]
            nrm = mpmath.sqrt(mpmath.fsum(r * r for r in res))
            ratios.append(float(nrm / (tm * tm)))
    return CalmnessReport(ts, ratios, max(ratios) if ratios else 0.0)
