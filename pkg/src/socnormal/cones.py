"""Membership engines for the normal cones of Omega.

Omega = {(x, y) : x in K, y in K, <x, y> = 0}.  Each test normalizes the
candidate (u, v) to unit length, evaluates the closed-form row for the
pair's case and returns a verdict whose certificate names the satisfied
disjunct and the scalars that witness it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.linalg import null_space, orth

from .errors import DimensionMismatch, SocError, WrongCase
from .proj_calculus import _linear_root, _quadratic_roots, unit_vector_with, xi_from_boundary
from .soc_core import (
    DEFAULT_TOL,
    CaseTag,
    ConeKind,
    MembershipVerdict,
    OmegaPair,
    SocVector,
    Tolerances,
    VectorLike,
    classify_pair,
    project_batch,
)

C = CaseTag


class Branch:
    """Names of the disjuncts reported in certificates."""

    V_ZERO = "v=0"
    U_ZERO = "u=0"
    BD_BD = "u⊥x, v⊥y, x1û+y1v∈ℝx"
    ZERO_BD = "u∈ŷ°, v∈ℝ₋ŷ"
    BD_ZERO = "u∈ℝ₋x̂, v∈x̂°"
    NEG_K = "u∈−K, v∈−K"
    ZB_LINE = "u⊥ŷ, v∈ℝŷ"
    ZB_RAY = "⟨u,ŷ⟩≤0, v∈ℝ₋ŷ"
    BZ_LINE = "u∈ℝx̂, v⊥x̂"
    BZ_RAY = "u∈ℝ₋x̂, ⟨v,x̂⟩≤0"
    XI_U_RAY = "u∈ℝ₋ξ, v∈ξ°"
    XI_V_RAY = "u∈ξ°, v∈ℝ₋ξ"
    ORIGIN = "u⊥ξ, v⊥ξ̂, αû+(1−α)v∈ℝξ"
    SYSTEM = "linear system"


@dataclass(frozen=True)
class NormalCandidate:
    u: SocVector
    v: SocVector

    @classmethod
    def of(cls, u: VectorLike, v: VectorLike) -> "NormalCandidate":
        return cls(SocVector.of(u), SocVector.of(v))

    @property
    def data(self) -> np.ndarray:
        return np.concatenate((self.u.data, self.v.data))

    def scaled(self, t: float) -> "NormalCandidate":
        return NormalCandidate(self.u * t, self.v * t)

    def swapped(self) -> "NormalCandidate":
        return NormalCandidate(self.v, self.u)


CandidateLike = Union[NormalCandidate, tuple]


@dataclass(frozen=True)
class OmegaSample:
    pairs: list
    seed: int
    radius: float


@dataclass(frozen=True)
class OriginCertificate:
    xi: np.ndarray
    alpha: float
    eta: float
    residual: float


def as_candidate(cand: CandidateLike) -> NormalCandidate:
    if isinstance(cand, NormalCandidate):
        return cand
    u, v = cand
    return NormalCandidate.of(u, v)


def _hat(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[1:] = -out[1:]
    return out


def _unit(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a)


def _line_res(a, n):
    """(distance of a to R n, signed coefficient) for unit n."""
    c = float(a @ n)
    return float(np.linalg.norm(a - c * n)), c


def _neg_ray_res(a, n):
    r, c = _line_res(a, n)
    return max(r, c), c


def _neg_k_res(a):
    return float(np.linalg.norm(project_batch(a)[0]))


def _prepare(pair: OmegaPair, cand: CandidateLike):
    cand = as_candidate(cand)
    if cand.u.m != pair.m or cand.v.m != pair.m:
        raise DimensionMismatch(f"candidate has m=({cand.u.m}, {cand.v.m}), pair has m={pair.m}")
    s = float(np.linalg.norm(cand.data))
    if s == 0.0:
        return cand.u.data.copy(), cand.v.data.copy(), 0.0
    return cand.u.data / s, cand.v.data / s, s


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _verdict(kind, tried, eps):
    """First satisfied branch, else the branch of smallest residual."""
    for name, res, cert in tried:
        if res <= eps:
            cert = {k: _plain(v) for k, v in cert.items()}
            return MembershipVerdict(True, name, {**cert, "residual": float(res)}, kind)
    name, res, cert = min(tried, key=lambda t: t[1])
    cert = {k: _plain(v) for k, v in cert.items()}
    return MembershipVerdict(False, name, {**cert, "residual": float(res), "min_residual": float(res)}, kind)


def _bdbd_row(pair, u, v, s):
    x, y = pair.x.data, pair.y.data
    xn = _unit(x)
    r_u = abs(float(u @ xn))
    r_v = abs(float(v @ _unit(y)))
    x1, y1 = x[0], y[0]
    a = (x1 * _hat(u) + y1 * v) / (x1 + y1)
    r_line, c = _line_res(a, xn)
    # x1*û + y1*v = beta' x  and  u + k*v̂ = beta x̂ with beta = beta'/x1
    beta_prime = c * (x1 + y1) / np.linalg.norm(x) * s
    cert = {"k": pair.k, "beta": beta_prime / x1, "beta_prime": beta_prime}
    return Branch.BD_BD, max(r_u, r_v, r_line), cert


def _regular_rows(pair, u, v, s):
    case = pair.case
    if case == C.ZERO_INT:
        return [(Branch.V_ZERO, float(np.linalg.norm(v)), {})]
    if case == C.INT_ZERO:
        return [(Branch.U_ZERO, float(np.linalg.norm(u)), {})]
    if case == C.BD_BD:
        return [_bdbd_row(pair, u, v, s)]
    if case == C.ZERO_BD:
        n = _unit(_hat(pair.y.data))
        r_v, c = _neg_ray_res(v, n)
        t = c * s / np.linalg.norm(pair.y.data)
        return [(Branch.ZERO_BD, max(max(0.0, float(u @ n)), r_v), {"t": t})]
    if case == C.BD_ZERO:
        n = _unit(_hat(pair.x.data))
        r_u, c = _neg_ray_res(u, n)
        t = c * s / np.linalg.norm(pair.x.data)
        return [(Branch.BD_ZERO, max(r_u, max(0.0, float(v @ n))), {"t": t})]
    return [(Branch.NEG_K, max(_neg_k_res(u), _neg_k_res(v)), {})]


def _eps(tol, u, v):
    return tol.member * (1.0 + np.linalg.norm(u) + np.linalg.norm(v))


def regular_normal_contains(
    pair: OmegaPair, cand: CandidateLike, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """Closed-form test of (u, v) in the regular normal cone of Omega at (x, y)."""
    u, v, s = _prepare(pair, cand)
    return _verdict(ConeKind.REGULAR, _regular_rows(pair, u, v, s), _eps(tol, u, v))


def proximal_normal_contains(
    pair: OmegaPair, cand: CandidateLike, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """Proximal and regular normal cones of Omega coincide."""
    v = regular_normal_contains(pair, cand, tol)
    return MembershipVerdict(v.member, v.branch, v.certificate, ConeKind.PROXIMAL)


def regular_normal_contains_via_system(
    pair: OmegaPair, cand: CandidateLike, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """BdBd only: the coderivative equations at the Jacobian of Pi_K(x - y)."""
    if pair.case != C.BD_BD:
        raise WrongCase(f"linear-system test needs a BdBd pair, got {pair.case.value}")
    u, v, _ = _prepare(pair, cand)
    k = pair.k
    x2 = pair.x.x2
    xb = x2 / np.linalg.norm(x2)
    t = float(xb @ (u[1:] + v[1:]))
    e1 = u[0] + t - v[0]
    e2 = ((1 + k) * (u[0] + v[0]) - (1 - k) * t) * xb - 2 * k * v[1:] + 2 * u[1:]
    res = max(abs(e1), float(np.linalg.norm(e2)) / (1 + k))
    return _verdict(ConeKind.REGULAR, [(Branch.SYSTEM, res, {"k": k, "eq1": e1, "eq2": float(np.linalg.norm(e2))})], _eps(tol, u, v))


def solve_origin_branch(
    u: VectorLike, v: VectorLike, tol: Tolerances = DEFAULT_TOL
) -> Optional[OriginCertificate]:
    """Find xi = (1, w) in C and alpha in [0, 1] with u ⊥ xi, v ⊥ xî and
    alpha*û + (1 - alpha)*v = eta*xi.

    With eta(a) = a*u1 + (1-a)*v1 and tail t(a) = (1-a)*v2 - a*u2, the line
    condition forces w = t(a)/eta(a); ||w|| = 1 is the quadratic
    g(a) = ||t(a)||^2 - eta(a)^2 = 0 and both orthogonality conditions are
    linear in a.  Every root of these, plus the zeros of eta where w is only
    constrained by the orthogonality equations, is checked directly.
    """
    ua, va = SocVector.of(u).data, SocVector.of(v).data
    if ua.size != va.size:
        raise DimensionMismatch("u and v must share one dimension")
    s = float(np.linalg.norm(np.concatenate((ua, va))))
    e1 = np.eye(ua.size - 1)[0]
    if s <= tol.member:
        return OriginCertificate(np.concatenate(([1.0], e1)), 0.5, 0.0, s)
    ua, va = ua / s, va / s
    u1, u2, v1, v2 = ua[0], ua[1:], va[0], va[1:]
    d = u2 + v2
    e = u1 - v1
    # eta(a) = v1 + a*e ; t(a) = v2 - a*d
    g = (d @ d - e * e, -2.0 * (v2 @ d) - 2.0 * v1 * e, v2 @ v2 - v1 * v1)
    # p(a) = u1*eta + u2.t ; q(a) = v1*eta - v2.t
    p = (u1 * e - u2 @ d, u1 * v1 + u2 @ v2)
    q = (v1 * e + v2 @ d, v1 * v1 - v2 @ v2)
    alphas = {0.0, 0.5, 1.0}
    alphas.update(_quadratic_roots(*g))
    alphas.update(_linear_root(*p))
    alphas.update(_linear_root(*q))
    alphas.update(_linear_root(e, v1))
    A = np.vstack((u2, v2))
    rhs = np.array([-u1, v1])
    best = None
    for a in sorted(alphas):
        if not np.isfinite(a) or a < -1e-9 or a > 1 + 1e-9:
            continue
        a = min(max(a, 0.0), 1.0)
        eta = v1 + a * e
        t = v2 - a * d
        if abs(eta) > tol.member:
            w = t / eta
            nw = np.linalg.norm(w)
            if nw == 0.0:
                continue
            w = w / nw
        else:
            w = unit_vector_with(A, rhs, tol.member)
            if w is None:
                continue
        xi = np.concatenate(([1.0], w))
        line = a * _hat(ua) + (1 - a) * va - eta * xi
        res = max(abs(float(ua @ xi)), abs(float(va @ _hat(xi))), float(np.linalg.norm(line)))
        if best is None or res < best[0] - 1e-15:
            best = (res, a, xi, eta)
    if best is None or best[0] > tol.member * (1.0 + np.linalg.norm(ua) + np.linalg.norm(va)):
        return None
    res, a, xi, eta = best
    return OriginCertificate(xi, float(a), float(eta * s), float(res))


def _xi_ray_rows(ray, other, tol, name):
    """ray in R_- xi and other in xi° for some xi in C."""
    eps = tol.member
    if np.linalg.norm(ray) <= eps:
        gap = max(0.0, other[0] - np.linalg.norm(other[1:])) / np.sqrt(2.0)
        n2 = np.linalg.norm(other[1:])
        w = -other[1:] / n2 if n2 > 0 else np.eye(other.size - 1)[0]
        return name, max(float(np.linalg.norm(ray)), gap), {"xi": np.concatenate(([1.0], w)).tolist()}
    xi, res = xi_from_boundary(-ray)
    if xi is None:
        return name, res, {}
    gap = max(0.0, float(other @ xi) / np.linalg.norm(xi))
    return name, max(res, gap), {"xi": xi.tolist()}


def limiting_normal_contains(
    pair: OmegaPair, cand: CandidateLike, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """Closed-form test of (u, v) in the limiting normal cone of Omega at (x, y)."""
    u, v, s = _prepare(pair, cand)
    case = pair.case
    if case in (C.ZERO_INT, C.INT_ZERO, C.BD_BD):
        tried = _regular_rows(pair, u, v, s)
    elif case == C.ZERO_BD:
        n = _unit(_hat(pair.y.data))
        r_line, c = _line_res(v, n)
        r_ray, _ = _neg_ray_res(v, n)
        un = float(u @ n)
        t = c * s / np.linalg.norm(pair.y.data)
        tried = [
            (Branch.V_ZERO, float(np.linalg.norm(v)), {}),
            (Branch.ZB_LINE, max(abs(un), r_line), {"t": t}),
            (Branch.ZB_RAY, max(max(0.0, un), r_ray), {"t": t}),
        ]
    elif case == C.BD_ZERO:
        n = _unit(_hat(pair.x.data))
        r_line, c = _line_res(u, n)
        r_ray, _ = _neg_ray_res(u, n)
        vn = float(v @ n)
        t = c * s / np.linalg.norm(pair.x.data)
        tried = [
            (Branch.U_ZERO, float(np.linalg.norm(u)), {}),
            (Branch.BZ_LINE, max(r_line, abs(vn)), {"t": t}),
            (Branch.BZ_RAY, max(r_ray, max(0.0, vn)), {"t": t}),
        ]
    else:
        tried = [
            (Branch.NEG_K, max(_neg_k_res(u), _neg_k_res(v)), {}),
            (Branch.V_ZERO, float(np.linalg.norm(v)), {}),
            (Branch.U_ZERO, float(np.linalg.norm(u)), {}),
            _xi_ray_rows(u, v, tol, Branch.XI_U_RAY),
            _xi_ray_rows(v, u, tol, Branch.XI_V_RAY),
        ]
        eps = _eps(tol, u, v)
        if all(res > eps for _, res, _ in tried):
            cert = solve_origin_branch(u, v, tol)
            if cert is not None:
                tried.append(
                    (Branch.ORIGIN, cert.residual, {"xi": cert.xi.tolist(), "alpha": cert.alpha, "eta": cert.eta * s})
                )
    return _verdict(ConeKind.LIMITING, tried, _eps(tol, u, v))


def cone_kind(kind: Union[ConeKind, str]) -> ConeKind:
    if isinstance(kind, ConeKind):
        return kind
    for k in ConeKind:
        if k.value.lower() == str(kind).lower():
            return k
    raise SocError(f"unknown cone kind {kind!r}")


def normal_contains(
    pair: OmegaPair, cand: CandidateLike, kind: Union[ConeKind, str], tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    kind = cone_kind(kind)
    if kind == ConeKind.PROXIMAL:
        return proximal_normal_contains(pair, cand, tol)
    if kind == ConeKind.REGULAR:
        return regular_normal_contains(pair, cand, tol)
    return limiting_normal_contains(pair, cand, tol)


def graph_normal_contains(
    x: VectorLike, y: VectorLike, cand: CandidateLike, kind=ConeKind.LIMITING, tol: Tolerances = DEFAULT_TOL
) -> MembershipVerdict:
    """Normal cone of gph N_K at (x, y), via (u, v) -> (u, -v) at (x, -y) in Omega."""
    c = as_candidate(cand)
    return normal_contains(classify_pair(x, -SocVector.of(y), tol), NormalCandidate(c.u, -c.v), kind, tol)


def _bdbd_constraints(pair: OmegaPair) -> np.ndarray:
    """Rows whose joint kernel in (u, v) is the BdBd regular normal cone."""
    x, y = pair.x.data, pair.y.data
    m = x.size
    xn = _unit(x)
    proj = np.eye(m) - np.outer(xn, xn)
    refl = np.diag(np.concatenate(([1.0], -np.ones(m - 1))))
    top = np.zeros((2, 2 * m))
    top[0, :m] = xn
    top[1, m:] = _unit(y)
    line = np.hstack((x[0] * proj @ refl, y[0] * proj)) / (x[0] + y[0])
    return np.vstack((top, line))


def distance_to_regular_cone(pair: OmegaPair, cand: CandidateLike) -> float:
    """Euclidean distance from (u, v) to the regular normal cone at the pair."""
    cand = as_candidate(cand)
    if cand.u.m != pair.m or cand.v.m != pair.m:
        raise DimensionMismatch("candidate and pair dimensions differ")
    u, v = cand.u.data, cand.v.data
    case = pair.case
    if case == C.ZERO_INT:
        return float(np.linalg.norm(v))
    if case == C.INT_ZERO:
        return float(np.linalg.norm(u))
    if case == C.BD_BD:
        q = orth(_bdbd_constraints(pair).T)
        return float(np.linalg.norm(q.T @ cand.data))
    if case == C.ZERO_BD:
        n = _unit(_hat(pair.y.data))
        du = max(0.0, float(u @ n))
        r, c = _line_res(v, n)
        dv = r if c <= 0 else float(np.linalg.norm(v))
        return float(np.hypot(du, dv))
    if case == C.BD_ZERO:
        n = _unit(_hat(pair.x.data))
        dv = max(0.0, float(v @ n))
        r, c = _line_res(u, n)
        du = r if c <= 0 else float(np.linalg.norm(u))
        return float(np.hypot(du, dv))
    return float(np.hypot(_neg_k_res(u), _neg_k_res(v)))


def _random_unit(rng, n):
    g = rng.standard_normal(n)
    return g / np.linalg.norm(g)


def sample_regular_normal(pair: OmegaPair, seed: int, n: int) -> list:
    """Candidates drawn from the regular normal cone at the pair."""
    rng = np.random.default_rng(seed)
    m = pair.m
    case = pair.case
    out = []
    basis = null_space(_bdbd_constraints(pair)) if case == C.BD_BD else None
    for _ in range(n):
        if case == C.ZERO_INT:
            u, v = rng.standard_normal(m), np.zeros(m)
        elif case == C.INT_ZERO:
            u, v = np.zeros(m), rng.standard_normal(m)
        elif case == C.BD_BD:
            z = basis @ rng.standard_normal(basis.shape[1])
            u, v = z[:m], z[m:]
        elif case == C.ZERO_BD:
            nvec = _unit(_hat(pair.y.data))
            g = rng.standard_normal(m)
            u = g - (g @ nvec + abs(rng.standard_normal())) * nvec
            v = -abs(rng.standard_normal()) * nvec
        elif case == C.BD_ZERO:
            nvec = _unit(_hat(pair.x.data))
            g = rng.standard_normal(m)
            u = -abs(rng.standard_normal()) * nvec
            v = g - (g @ nvec + abs(rng.standard_normal())) * nvec
        else:
            u = -project_batch(rng.standard_normal(m))[0]
            v = -project_batch(rng.standard_normal(m))[0]
        out.append(NormalCandidate(SocVector(u), SocVector(v)))
    return out


def _random_xi(rng, m):
    return np.concatenate(([1.0], _random_unit(rng, m - 1)))


def sample_limiting_normal(pair: OmegaPair, seed: int, n: int) -> list:
    """Candidates drawn branch by branch from the limiting normal cone."""
    case = pair.case
    if case in (C.ZERO_INT, C.INT_ZERO, C.BD_BD):
        return sample_regular_normal(pair, seed, n)
    rng = np.random.default_rng(seed)
    m = pair.m
    regular = iter(sample_regular_normal(pair, seed + 1, n))
    out = []
    for i in range(n):
        if case in (C.ZERO_BD, C.BD_ZERO):
            anchor = pair.y.data if case == C.ZERO_BD else pair.x.data
            nvec = _unit(_hat(anchor))
            j = i % 3
            if j == 0:
                free, fixed = rng.standard_normal(m), np.zeros(m)
            elif j == 1:
                g = rng.standard_normal(m)
                free, fixed = g - (g @ nvec) * nvec, rng.standard_normal() * nvec
            else:
                c = next(regular)
                out.append(c)
                continue
            # in BdZero the roles of u and v are swapped
            if case == C.ZERO_BD:
                u, v = free, fixed
            else:
                u, v = fixed, free
        else:
            j = i % 6
            xi = _random_xi(rng, m)
            if j == 0:
                out.append(next(regular))
                continue
            if j == 1:
                u, v = rng.standard_normal(m), np.zeros(m)
            elif j == 2:
                u, v = np.zeros(m), rng.standard_normal(m)
            elif j in (3, 4):
                g = rng.standard_normal(m)
                ray = -abs(rng.standard_normal()) * xi
                half = g - (g @ xi + abs(rng.standard_normal())) * xi / (xi @ xi)
                u, v = (ray, half) if j == 3 else (half, ray)
            else:
                u, v = _origin_branch_sample(rng, xi)
        out.append(NormalCandidate(SocVector(u), SocVector(v)))
    return out


def _origin_branch_sample(rng, xi):
    """(u, v) with u ⊥ xi, v ⊥ xî and a*û + (1-a)*v in R xi."""
    m = xi.size
    a = rng.uniform(0.05, 0.95)
    g = rng.standard_normal(m)
    u = g - (g @ xi) / (xi @ xi) * xi
    eta = rng.standard_normal()
    # v ⊥ xî holds automatically: <xi, xî> = 0 and <û, xî> = <u, xi> = 0
    v = (eta * xi - a * _hat(u)) / (1 - a)
    return u, v


def omega_pair_from(z: VectorLike, tol: Tolerances = DEFAULT_TOL) -> OmegaPair:
    """(Pi_K(z), Pi_K(-z)), the point of Omega whose difference x - y is z."""
    za = SocVector.of(z).data
    x = project_batch(za)[0]
    y = project_batch(-za)[0]
    return classify_pair(x, y, tol)


def sample_omega_near(
    pair: OmegaPair, radius: float, seed: int, n: int, tol: Tolerances = DEFAULT_TOL
) -> OmegaSample:
    """Points of Omega whose difference x - y is within ``radius`` of the anchor's."""
    if radius <= 0:
        raise SocError("radius must be positive")
    rng = np.random.default_rng(seed)
    m = pair.m
    z0 = pair.z
    pairs = []
    attempts = 0
    while len(pairs) < n and attempts < 20 * max(n, 1):
        attempts += 1
        p = _random_unit(rng, m) * radius * rng.uniform() ** (1.0 / m)
        try:
            pairs.append(omega_pair_from(z0 + p, tol))
        except SocError:
            continue
    return OmegaSample(pairs, seed, radius)


def sample_anchor(case: Union[CaseTag, str], m: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> OmegaPair:
    """A random pair of Omega in the requested case class."""
    case = CaseTag(case)
    rng = np.random.default_rng(seed)
    zero = np.zeros(m)

    def interior():
        w = _random_unit(rng, m - 1) * rng.uniform(0.0, 0.8)
        return rng.uniform(0.5, 2.0) * np.concatenate(([1.0], w))

    def boundary(w):
        return rng.uniform(0.5, 2.0) * np.concatenate(([1.0], w))

    w = _random_unit(rng, m - 1)
    if case == C.ZERO_INT:
        x, y = zero, interior()
    elif case == C.INT_ZERO:
        x, y = interior(), zero
    elif case == C.BD_BD:
        x, y = boundary(w), boundary(-w)
    elif case == C.ZERO_BD:
        x, y = zero, boundary(w)
    elif case == C.BD_ZERO:
        x, y = boundary(w), zero
    else:
        x, y = zero, zero
    return classify_pair(x, y, tol)
