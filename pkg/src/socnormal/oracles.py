"""Brute-force checks of the closed-form cone tests.

The oracles only use the definitions: Omega is sampled near the anchor
through z -> (Pi_K(z), Pi_K(-z)), and the defining inequality (proximal,
regular) or the defining limit (limiting) is probed along a ladder of
shrinking radii.  A sampled test can fail to falsify but cannot prove, so
``Inconclusive`` is a legitimate outcome.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from .cones import (
    CandidateLike,
    NormalCandidate,
    as_candidate,
    limiting_normal_contains,
    omega_pair_from,
    proximal_normal_contains,
    regular_normal_contains,
    sample_anchor,
    sample_limiting_normal,
    sample_regular_normal,
)
from .errors import SocError
from .proj_calculus import dir_derivative_batch
from .soc_core import DEFAULT_TOL, CaseTag, OmegaPair, Tolerances, project_batch

C = CaseTag


@dataclass(frozen=True)
class OracleConfig:
    n_samples: int = 256
    radii: tuple = (1e-2, 2.5e-3, 6.25e-4)
    seed: int = 0
    slack: float = 1e-6

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if self.n_samples < 1:
            raise SocError("n_samples must be at least 1")
        if not radii or any(r <= 0 for r in radii):
            raise SocError("radii must be positive")
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise SocError("radii must be strictly decreasing")
        if self.slack <= 0:
            raise SocError("slack must be positive")


class OracleVerdict(str, enum.Enum):
    CONSISTENT_MEMBER = "ConsistentMember"
    CERTIFIED_NON_MEMBER = "CertifiedNonMember"
    INCONCLUSIVE = "Inconclusive"


V = OracleVerdict


@dataclass(frozen=True)
class OracleReport:
    """``worst_ratio`` is the statistic at the smallest radius; ``profile``
    holds it for every radius."""

    verdict: OracleVerdict
    worst_ratio: float
    witness: Optional[dict] = None
    profile: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "worstRatio": self.worst_ratio,
            "profile": list(self.profile),
            "witness": self.witness,
        }


# ---------------------------------------------------------------- sampling


def _unit_rows(a: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(a)
    n = np.linalg.norm(a, axis=1)
    return a[n > 1e-12] / n[n > 1e-12, None]


def _hat(a):
    out = np.array(a, dtype=float)
    out[..., 1:] *= -1
    return out


def _structured_directions(pair: OmegaPair, rng) -> np.ndarray:
    """Coordinate rays and the test curves through the anchor."""
    m = pair.m
    x, y = pair.x.data, pair.y.data
    rows = [np.eye(m), x[None], y[None], _hat(x)[None], _hat(y)[None]]
    if pair.case == C.BD_BD:
        # x' on bd K with y' = k * reflect(x'): z moves along ((1-k) d1, (1+k) d2)
        k = pair.k
        xb = x[1:] / np.linalg.norm(x[1:])
        d2 = rng.standard_normal((8, m - 1))
        d1 = d2 @ xb
        rows.append(np.column_stack(((1 - k) * d1, (1 + k) * d2)))
    dirs = _unit_rows(np.vstack(rows))
    return np.vstack((dirs, -dirs))


def _candidate_directions(pair: OmegaPair, zeta: np.ndarray) -> np.ndarray:
    m = pair.m
    u, v = zeta[:m], zeta[m:]
    # z = Pi(u) puts x' on the side where <u, x'> > 0; z = -Pi(v) does so for y'
    pu = project_batch(u)[0]
    pv = project_batch(v)[0]
    dirs = _unit_rows(np.vstack((u, v, u - v, u + v, pu, pv)))
    return np.vstack((dirs, -dirs))


def _directions(pair: OmegaPair, cfg: OracleConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    g = _unit_rows(rng.standard_normal((cfg.n_samples, pair.m)))
    return np.vstack((g, _structured_directions(pair, rng)))


def _omega_displacements(pair: OmegaPair, z: np.ndarray):
    """Points (x', y') of Omega with x' - y' = z and their offsets from the anchor."""
    xs = project_batch(z)
    ys = xs - z
    delta = np.hstack((xs - pair.x.data, ys - pair.y.data))
    return xs, ys, delta


def _unit_candidate(cand: CandidateLike) -> np.ndarray:
    zeta = as_candidate(cand).data
    s = np.linalg.norm(zeta)
    return zeta / s if s > 0 else zeta


def oracle_ratio(pair: OmegaPair, cand: CandidateLike, x: Sequence[float], y: Sequence[float], power: int = 1) -> float:
    """<(u, v), (x', y') - (x, y)> / ||(x', y') - (x, y)||^power for the unit-normalized candidate."""
    zeta = _unit_candidate(cand)
    delta = np.concatenate((np.asarray(x, float) - pair.x.data, np.asarray(y, float) - pair.y.data))
    return float(delta @ zeta) / float(np.linalg.norm(delta)) ** power


class _OmegaProbe:
    """Omega points at each radius of the ladder, shared by many candidates."""

    def __init__(self, pair: OmegaPair, cfg: OracleConfig):
        self.pair = pair
        self.cfg = cfg
        self.dirs = _directions(pair, cfg)
        self.levels = []
        z0 = pair.z
        for r in cfg.radii:
            xs, ys, delta = _omega_displacements(pair, z0 + r * self.dirs)
            self.levels.append(self._keep(xs, ys, delta))

    @staticmethod
    def _keep(xs, ys, delta):
        norm = np.linalg.norm(delta, axis=1)
        ok = norm > 0
        return xs[ok], ys[ok], delta[ok], norm[ok]

    def ratios(self, cand: CandidateLike, power: int):
        """Per radius: (max ratio, x', y') over shared and candidate-specific rays."""
        zeta = _unit_candidate(cand)
        extra = _candidate_directions(self.pair, zeta) if np.any(zeta) else np.zeros((0, self.pair.m))
        out = []
        for r, (xs, ys, delta, norm) in zip(self.cfg.radii, self.levels):
            if extra.size:
                ex, ey, ed, en = self._keep(*_omega_displacements(self.pair, self.pair.z + r * extra))
                xs, ys = np.vstack((xs, ex)), np.vstack((ys, ey))
                delta, norm = np.vstack((delta, ed)), np.concatenate((norm, en))
            vals = (delta @ zeta) / norm**power
            i = int(np.argmax(vals))
            out.append((float(vals[i]), xs[i], ys[i], r))
        return out


def _witness(best, power):
    val, x, y, r = best
    return {"x": x.tolist(), "y": y.tolist(), "radius": r, "ratio": val, "power": power}


def _regular_verdict(rho: list, slack: float) -> OracleVerdict:
    if rho[-1] <= slack:
        return V.CONSISTENT_MEMBER
    steps = list(zip(rho, rho[1:]))
    # o(||Delta||) behaviour: the sup shrinks with the radius
    if steps and all(b <= 0.3 * a for a, b in steps):
        return V.CONSISTENT_MEMBER
    if all(r > slack for r in rho) and all(b >= 0.5 * a for a, b in steps):
        return V.CERTIFIED_NON_MEMBER
    return V.INCONCLUSIVE


def _proximal_verdict(rho: list, slack: float) -> OracleVerdict:
    if rho[-1] <= rho[0] + slack:
        return V.CONSISTENT_MEMBER
    steps = list(zip(rho, rho[1:]))
    # increments that shrink geometrically sum to a finite bound
    inc = [b - a for a, b in steps]
    if len(inc) >= 2 and all(0 <= b <= 0.5 * a for a, b in zip(inc, inc[1:])):
        return V.CONSISTENT_MEMBER
    if len(rho) >= 3 and rho[0] > slack and all(b >= 2.0 * a for a, b in steps):
        return V.CERTIFIED_NON_MEMBER
    return V.INCONCLUSIVE


def _ratio_report(probe: _OmegaProbe, cand, power: int, rule) -> OracleReport:
    levels = probe.ratios(cand, power)
    rho = [lv[0] for lv in levels]
    verdict = rule(rho, probe.cfg.slack)
    return OracleReport(verdict, rho[-1], _witness(levels[-1], power), rho)


def proximal_oracle(pair: OmegaPair, cand: CandidateLike, cfg: OracleConfig = OracleConfig()) -> OracleReport:
    """Sampled test of <zeta, Delta> <= M ||Delta||^2; ``worst_ratio`` is the fitted M."""
    return _ratio_report(_OmegaProbe(pair, cfg), cand, 2, _proximal_verdict)


def regular_oracle(pair: OmegaPair, cand: CandidateLike, cfg: OracleConfig = OracleConfig()) -> OracleReport:
    """Sampled test of limsup <zeta, Delta> / ||Delta|| <= 0."""
    return _ratio_report(_OmegaProbe(pair, cfg), cand, 1, _regular_verdict)


# ---------------------------------------------------------------- limiting


def _to_bd(z: np.ndarray) -> np.ndarray:
    """Nearest-ish point of bd K: Pi_K(z) for z outside K, radial push otherwise."""
    z = np.atleast_2d(z)
    n = np.linalg.norm(z[:, 1:], axis=1)
    safe = np.where(n > 0, n, 1.0)
    a = np.maximum(0.5 * (z[:, 0] + n), 0.0)
    return np.column_stack((a, (a / safe)[:, None] * z[:, 1:]))


def _to_neg_bd(z):
    return -_to_bd(-np.atleast_2d(z))


_STRATA = {"free": lambda z: np.atleast_2d(z), "bd": _to_bd, "negbd": _to_neg_bd}


def _case_of(zs: np.ndarray, tol: float) -> np.ndarray:
    """Case tag of (Pi_K(z), Pi_K(-z)) read off the region of z, row-wise."""
    n = np.linalg.norm(zs[:, 1:], axis=1)
    lam1, lam2 = zs[:, 0] - n, zs[:, 0] + n
    s = tol * (1.0 + np.linalg.norm(zs, axis=1))
    return np.select(
        [lam1 > s, lam2 < -s, (lam1 >= -s) & (lam2 > s), lam1 >= -s, lam2 > s],
        [C.INT_ZERO.value, C.ZERO_INT.value, C.BD_ZERO.value, C.ZERO_ZERO.value, C.BD_BD.value],
        C.ZERO_BD.value,
    )


def _bdbd_bases(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the row spaces of the BdBd constraint matrices."""
    count, m = xs.shape
    xn = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    yn = ys / np.linalg.norm(ys, axis=1, keepdims=True)
    proj = np.eye(m)[None] - xn[:, :, None] * xn[:, None, :]
    refl = np.concatenate(([1.0], -np.ones(m - 1)))
    x1, y1 = xs[:, 0], ys[:, 0]
    rows = np.zeros((count, m + 2, 2 * m))
    rows[:, 0, :m] = xn
    rows[:, 1, m:] = yn
    w = (x1 + y1)[:, None, None]
    rows[:, 2:, :m] = x1[:, None, None] * proj * refl[None, None, :] / w
    rows[:, 2:, m:] = y1[:, None, None] * proj / w
    q, sv, _ = np.linalg.svd(np.transpose(rows, (0, 2, 1)), full_matrices=False)
    # rank-revealing: drop directions of negligible singular value
    keep = sv > 1e-10 * sv[:, :1]
    return q * keep[:, None, :]


@dataclass
class _Nearby:
    """Nearby pairs of one case, arranged for batched distances."""

    case: CaseTag
    xs: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    strata: np.ndarray
    data: Optional[np.ndarray] = None


def _group(zs: np.ndarray, strata: np.ndarray, tol: float) -> list:
    xs = project_batch(zs)
    ys = xs - zs
    cases = _case_of(zs, tol)
    out = []
    for case in CaseTag:
        sel = cases == case.value
        if not np.any(sel):
            continue
        g = _Nearby(case, xs[sel], ys[sel], zs[sel], strata[sel])
        if case == C.BD_BD:
            g.data = _bdbd_bases(g.xs, g.ys)
        elif case == C.ZERO_BD:
            g.data = _unit_rows(_hat(g.ys))
        elif case == C.BD_ZERO:
            g.data = _unit_rows(_hat(g.xs))
        out.append(g)
    return out


def _ray_split(vecs, n):
    """Distance of vec to R_- n, row-wise, for unit rows n."""
    c = np.sum(vecs * n, axis=1)
    perp = np.linalg.norm(vecs - c[:, None] * n, axis=1)
    return np.where(c <= 0, perp, np.linalg.norm(vecs, axis=1))


def _distances(group: _Nearby, zeta: np.ndarray) -> np.ndarray:
    m = group.xs.shape[1]
    u, v = zeta[:m], zeta[m:]
    count = group.xs.shape[0]
    if group.case == C.ZERO_INT:
        return np.full(count, np.linalg.norm(v))
    if group.case == C.INT_ZERO:
        return np.full(count, np.linalg.norm(u))
    if group.case == C.BD_BD:
        return np.linalg.norm(np.einsum("nij,i->nj", group.data, zeta), axis=1)
    if group.case == C.ZERO_BD:
        n = group.data
        return np.hypot(np.maximum(0.0, n @ u), _ray_split(np.broadcast_to(v, n.shape), n))
    if group.case == C.BD_ZERO:
        n = group.data
        return np.hypot(_ray_split(np.broadcast_to(u, n.shape), n), np.maximum(0.0, n @ v))
    # only the origin itself: -K x -K
    d = np.hypot(np.linalg.norm(project_batch(u)), np.linalg.norm(project_batch(v)))
    return np.full(count, d)


_ONE = np.array(["free"])


class _LimitingProbe:
    """Nearby pairs of Omega in every stratum, at every radius."""

    def __init__(self, pair: OmegaPair, cfg: OracleConfig, tol: Tolerances = DEFAULT_TOL):
        self.pair = pair
        self.cfg = cfg
        self.tol = tol
        z0 = pair.z
        m = pair.m
        dirs = _directions(pair, cfg)
        self.levels = []
        for r in cfg.radii:
            zs, names = [z0[None]], [np.array(["free"])]
            if np.linalg.norm(z0) <= 2 * r:
                zs.append(np.zeros((1, m)))
                names.append(np.array(["free"]))
            for name, stratum in _STRATA.items():
                pts = stratum(z0 + r * dirs)
                pts = pts[np.linalg.norm(pts - z0, axis=1) <= 2 * r]
                zs.append(pts)
                names.append(np.full(len(pts), name))
            self.levels.append(_group(np.vstack(zs), np.concatenate(names), tol.classify))

    def _pair(self, z):
        try:
            return omega_pair_from(z, self.tol)
        except SocError:
            return None

    def _polish(self, zeta, r, seeds):
        """Local minimization of the squared distance within each seed's stratum."""
        z0 = self.pair.z
        m = self.pair.m
        best = (np.inf, None)
        for name, z_start in seeds:
            stratum = _STRATA[name]

            def point(p):
                p = np.asarray(p)
                return stratum(z0 + r * (p / max(1.0, np.linalg.norm(p))))[0]

            def f(p):
                z = point(p)
                if np.linalg.norm(z - z0) > 2 * r:
                    return 10.0
                return _distances(_group(z[None], _ONE, self.tol.classify)[0], zeta)[0] ** 2

            res = minimize(f, (z_start - z0) / r, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-20, "maxiter": 400 * m, "maxfev": 600 * m})
            if res.fun < best[0]:
                best = (float(res.fun), point(res.x))
        if best[1] is None:
            return np.inf, None
        return float(np.sqrt(best[0])), best[1]

    def distance_profile(self, cand: CandidateLike, polish: bool = True):
        """Per radius: (min distance, x', y', case, radius)."""
        zeta = _unit_candidate(cand)
        thr = self.cfg.slack * 2.0
        out = []
        # at the origin everything is invariant under scaling, so one radius suffices
        at_origin = not np.any(self.pair.z)
        for r, groups in zip(self.cfg.radii, self.levels):
            if at_origin and out:
                d, x, y, case, r0 = out[0]
                f = r / r0
                out.append((d, None if x is None else f * x, None if y is None else f * y, case, r))
                continue
            best = (np.inf, None, None, None)
            ranked = []
            for g in groups:
                d = _distances(g, zeta)
                i = int(np.argmin(d))
                if d[i] < best[0]:
                    best = (float(d[i]), g.xs[i], g.ys[i], g.case)
                ranked += [(float(d[j]), g.strata[j], g.zs[j]) for j in np.argsort(d)[:3]]
            if polish and best[0] > thr and ranked:
                ranked.sort(key=lambda t: t[0])
                d, z = self._polish(zeta, r, [(name, z) for _, name, z in ranked[:4]])
                q = self._pair(z) if z is not None else None
                if q is not None and d < best[0]:
                    best = (d, q.x.data, q.y.data, q.case)
            out.append((*best, r))
        return out


def _limiting_verdict(d: list, slack: float) -> OracleVerdict:
    thr = slack * 2.0
    if d[-1] <= thr:
        return V.CONSISTENT_MEMBER
    steps = list(zip(d, d[1:]))
    if steps and all(b <= 0.5 * a for a, b in steps):
        return V.CONSISTENT_MEMBER
    if d[-1] > thr and d[-1] >= 0.5 * d[0]:
        return V.CERTIFIED_NON_MEMBER
    return V.INCONCLUSIVE


def _limiting_report(probe: _LimitingProbe, cand) -> OracleReport:
    levels = probe.distance_profile(cand)
    d = [lv[0] for lv in levels]
    verdict = _limiting_verdict(d, probe.cfg.slack)
    dist, x, y, case, r = levels[-1]
    witness = None
    if x is not None:
        witness = {"x": x.tolist(), "y": y.tolist(), "case": case.value, "radius": r, "ratio": dist}
    return OracleReport(verdict, d[-1], witness, d)


def limiting_oracle(
    pair: OmegaPair, cand: CandidateLike, cfg: OracleConfig = OracleConfig(), tol: Tolerances = DEFAULT_TOL
) -> OracleReport:
    """Distance from the unit-normalized candidate to regular cones at nearby pairs."""
    return _limiting_report(_LimitingProbe(pair, cfg, tol), cand)


# ---------------------------------------------------------------- VI check


class _VIProbe:
    """Sampled sup over unit h of <u + v, Pi'(z; h)> - <v, h>."""

    def __init__(self, pair: OmegaPair, h_samples: int, seed: int, tol: Tolerances = DEFAULT_TOL):
        if h_samples < 1:
            raise SocError("h_samples must be at least 1")
        self.pair = pair
        self.tol = tol
        self.rng_seed = seed
        rng = np.random.default_rng(seed)
        m = pair.m
        x, y = pair.x.data, pair.y.data
        base = [rng.standard_normal((h_samples, m)), np.eye(m), x[None], y[None], _hat(x)[None], _hat(y)[None]]
        h = _unit_rows(np.vstack(base))
        self.h = np.vstack((h, -h))
        self.dh = dir_derivative_batch(pair.z, self.h, tol)

    def phi(self, h, zeta):
        m = self.pair.m
        u, v = zeta[:m], zeta[m:]
        return dir_derivative_batch(self.pair.z, h, self.tol) @ (u + v) - h @ v

    def sup(self, cand: CandidateLike):
        m = self.pair.m
        zeta = _unit_candidate(cand)
        u, v = zeta[:m], zeta[m:]
        vals = self.dh @ (u + v) - self.h @ v
        extra = _candidate_directions(self.pair, zeta) if np.any(zeta) else np.zeros((0, m))
        if extra.size:
            h = np.vstack((self.h, extra))
            vals = np.concatenate((vals, self.phi(extra, zeta)))
        else:
            h = self.h
        # local random search from the best few directions
        rng = np.random.default_rng(self.rng_seed + 1)
        top = h[np.argsort(vals)[-8:]]
        best_v, best_h = float(np.max(vals)), h[int(np.argmax(vals))]
        sigma = 0.3
        for _ in range(25):
            trial = _unit_rows((top[:, None, :] + sigma * rng.standard_normal((top.shape[0], 12, m))).reshape(-1, m))
            tv = self.phi(trial, zeta)
            i = int(np.argmax(tv))
            if tv[i] > best_v:
                best_v, best_h = float(tv[i]), trial[i]
            pool = np.vstack((top, trial))
            pv = np.concatenate((self.phi(top, zeta), tv))
            top = pool[np.argsort(pv)[-8:]]
            sigma *= 0.7
        return best_v, best_h


def variational_inequality_sup(
    pair: OmegaPair,
    cand: CandidateLike,
    h_samples: int = 10_000,
    seed: int = 0,
    return_witness: bool = False,
    tol: Tolerances = DEFAULT_TOL,
):
    """Sampled max over unit h of <u + v, Pi'_K(x - y; h)> - <v, h>, with (u, v) unit-normalized.

    Members give a value <= 0 up to rounding; a positive value exhibits a
    violating direction h, returned when ``return_witness`` is set.
    """
    val, h = _VIProbe(pair, h_samples, seed, tol).sup(cand)
    return (val, h) if return_witness else val


# ---------------------------------------------------------------- sweep


@dataclass
class SweepReport:
    case: CaseTag
    n_pairs: int
    n_candidates: int
    members: int = 0
    non_members: int = 0
    regular_inconclusive: int = 0
    regular_inconclusive_non_members: int = 0
    limiting_checked: int = 0
    limiting_inconclusive: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def inconclusive_rate(self) -> float:
        """Share of Inconclusive regular-oracle verdicts among non-members."""
        return self.regular_inconclusive_non_members / max(1, self.non_members)

    @property
    def limiting_inconclusive_rate(self) -> float:
        return self.limiting_inconclusive / max(1, self.limiting_checked)

    def to_dict(self) -> dict:
        return {
            "caseTag": self.case.value,
            "pairs": self.n_pairs,
            "candidates": self.n_candidates,
            "members": self.members,
            "nonMembers": self.non_members,
            "regularInconclusive": self.regular_inconclusive,
            "inconclusiveRate": self.inconclusive_rate,
            "limitingChecked": self.limiting_checked,
            "limitingInconclusive": self.limiting_inconclusive,
            "disagreements": len(self.disagreements),
            "disagreementInstances": self.disagreements,
        }


def _record(report, pair, cand, what, **info):
    report.disagreements.append(
        {
            "check": what,
            "x": pair.x.tolist(),
            "y": pair.y.tolist(),
            "u": cand.u.tolist(),
            "v": cand.v.tolist(),
            **info,
        }
    )


def equivalence_sweep(
    case: Union[CaseTag, str],
    n_pairs: int,
    n_cands: int,
    cfg: OracleConfig = OracleConfig(),
    *,
    limiting: bool = True,
    dims: Sequence[int] = (2, 3, 4, 5),
    h_samples: int = 10_000,
    tol: Tolerances = DEFAULT_TOL,
) -> SweepReport:
    """Agreement audit of the closed forms against each other and the oracles.

    For every anchor, half the candidates come from the regular cone and the
    rest are Gaussian.  With ``limiting`` set, candidates drawn from the
    limiting cone are added and the limiting test is checked against its
    oracle as well.
    """
    if n_pairs < 1 or n_cands < 1:
        raise SocError("counts must be at least 1")
    case = CaseTag(case)
    seeds = np.random.SeedSequence([cfg.seed, list(CaseTag).index(case)]).generate_state(n_pairs)
    report = SweepReport(case, n_pairs, n_cands)
    for i in range(n_pairs):
        seed = int(seeds[i])
        m = dims[i % len(dims)]
        pair = sample_anchor(case, m, seed, tol)
        rng = np.random.default_rng(seed + 1)
        n_in = n_cands // 2
        cands = sample_regular_normal(pair, seed + 2, n_in) if n_in else []
        cands += [NormalCandidate.of(rng.standard_normal(m), rng.standard_normal(m)) for _ in range(n_cands - n_in)]
        probe = _OmegaProbe(pair, OracleConfig(cfg.n_samples, cfg.radii, seed, cfg.slack))
        vi = _VIProbe(pair, h_samples, seed, tol)
        lprobe = _LimitingProbe(pair, OracleConfig(cfg.n_samples, cfg.radii, seed, cfg.slack), tol) if limiting else None
        for cand in cands:
            reg = regular_normal_contains(pair, cand, tol).member
            prox = proximal_normal_contains(pair, cand, tol).member
            lim = limiting_normal_contains(pair, cand, tol).member
            sup, h = vi.sup(cand)
            orc = _ratio_report(probe, cand, 1, _regular_verdict)
            report.members += reg
            report.non_members += not reg
            if orc.verdict == V.INCONCLUSIVE:
                report.regular_inconclusive += 1
                report.regular_inconclusive_non_members += not reg
            if prox != reg:
                _record(report, pair, cand, "proximal", regular=reg, proximal=prox)
            if (sup <= cfg.slack) != reg:
                _record(report, pair, cand, "variational", regular=reg, sup=sup, h=h.tolist())
            if (orc.verdict == V.CONSISTENT_MEMBER and not reg) or (orc.verdict == V.CERTIFIED_NON_MEMBER and reg):
                _record(report, pair, cand, "regular_oracle", regular=reg, oracle=orc.to_dict())
            if reg and not lim:
                _record(report, pair, cand, "inclusion", regular=reg, limiting=lim)
        if limiting:
            extra = sample_limiting_normal(pair, seed + 3, max(1, n_in // 2))
            for cand in cands + extra:
                lim = limiting_normal_contains(pair, cand, tol).member
                orc = _limiting_report(lprobe, cand)
                report.limiting_checked += 1
                if orc.verdict == V.INCONCLUSIVE:
                    report.limiting_inconclusive += 1
                elif (orc.verdict == V.CONSISTENT_MEMBER) != lim:
                    _record(report, pair, cand, "limiting_oracle", limiting=lim, oracle=orc.to_dict())
    return report
