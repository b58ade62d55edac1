"""Shared helpers: independent reference computations and random generators."""

import numpy as np
import pytest
from scipy.optimize import minimize

from socnormal import ConeRegion

R2 = np.sqrt(2.0)

# worked example with x, y on bd K and y = 2 * reflect(x)
EX31_X = np.array([1.0, 1 / R2, 1 / R2])
EX31_Y = np.array([2.0, -R2, -R2])
EX31_U = np.array([1 / R2, -1.0, 0.0])
EX31_V = np.array([1 / (2 * R2), 0.0, 0.5])
EX31_J = np.array(
    [
        [0.5, 1 / (2 * R2), 1 / (2 * R2)],
        [1 / (2 * R2), 5 / 12, 1 / 12],
        [1 / (2 * R2), 1 / 12, 5 / 12],
    ]
)


def in_k(a, tol=1e-12):
    a = np.asarray(a, float)
    return a[0] >= np.linalg.norm(a[1:]) - tol * (1 + np.linalg.norm(a))


def hat(a):
    a = np.array(a, float)
    a[..., 1:] *= -1
    return a


def projection_reference(z):
    """Pi_K(z) by direct minimization of ||p - z||^2 over K.

    Parametrize p = (s, q) and minimize over a coarse grid of the cone
    first, then polish with a constrained solver.
    """
    z = np.asarray(z, float)
    m = z.size
    rad = np.linalg.norm(z) + 1.0
    rng = np.random.default_rng(0)
    dirs = rng.standard_normal((500, m - 1))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    s = np.linspace(0, rad, 41)[:, None, None, None]
    rho = np.linspace(0, 1, 11)[None, :, None, None]
    tail = s * rho * dirs[None, None]
    head = np.broadcast_to(s, tail.shape[:-1] + (1,))
    grid = np.concatenate((head, tail), axis=-1).reshape(-1, m)
    best = grid[np.argmin(np.linalg.norm(grid - z, axis=1))]
    cons = {"type": "ineq", "fun": lambda p: p[0] - np.sqrt(p[1:] @ p[1:] + 1e-300)}
    res = minimize(lambda p: (p - z) @ (p - z), best, constraints=[cons], method="SLSQP",
                   options={"ftol": 1e-15, "maxiter": 500})
    return res.x


def richardson_derivative(f, x, h, t):
    """Two-point Richardson extrapolation of the one-sided difference quotient."""
    x, h = np.asarray(x, float), np.asarray(h, float)
    fx = f(x)
    d1 = (f(x + t * h) - fx) / t
    d2 = (f(x + 0.5 * t * h) - fx) / (0.5 * t)
    return 2 * d2 - d1


def random_in_region(region, m, rng):
    """A random point of the requested region."""
    w = rng.standard_normal(m - 1)
    w /= np.linalg.norm(w)
    s = rng.uniform(0.5, 2.0)
    if region == ConeRegion.INT_K:
        return s * np.concatenate(([1.0], rng.uniform(0, 0.8) * w))
    if region == ConeRegion.NEG_INT_K:
        return -s * np.concatenate(([1.0], rng.uniform(0, 0.8) * w))
    if region == ConeRegion.BD_K_NONZERO:
        return s * np.concatenate(([1.0], w))
    if region == ConeRegion.NEG_BD_K_NONZERO:
        return -s * np.concatenate(([1.0], w))
    if region == ConeRegion.ZERO:
        return np.zeros(m)
    return s * np.concatenate(([rng.uniform(-0.8, 0.8)], w))


# ---- the earlier published formulas, kept as negative anchors


def prior_bdbd_conditions(x, y, u, v, tol=1e-9):
    """u in R x̂ and v in R ŷ (each returned separately)."""

    def on_line(a, n):
        n = n / np.linalg.norm(n)
        return np.linalg.norm(a - (a @ n) * n) <= tol

    return on_line(np.asarray(u, float), hat(x)), on_line(np.asarray(v, float), hat(y))


def prior_zerobd_v_condition(y, v, tol=1e-9):
    """v in R_- ŷ."""
    n = hat(y) / np.linalg.norm(hat(y))
    v = np.asarray(v, float)
    c = v @ n
    return np.linalg.norm(v - c * n) <= tol and c <= tol


def prior_origin_disjuncts(u, v, n_w=20000, tol=1e-6):
    """Truth values of the six disjuncts of the earlier origin formula.

    The xi-dependent disjuncts are searched over a dense sample of C.
    """
    u, v = np.asarray(u, float), np.asarray(v, float)
    m = u.size

    def neg_k(a):
        return -a[0] >= np.linalg.norm(a[1:]) - tol

    rng = np.random.default_rng(1)
    w = rng.standard_normal((n_w, m - 1))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    xi = np.hstack((np.ones((n_w, 1)), w))
    xin = xi / np.linalg.norm(xi, axis=1, keepdims=True)

    def on_ray(a, neg):
        c = xin @ a
        r = np.linalg.norm(a[None] - c[:, None] * xin, axis=1)
        return (r <= tol) & ((c <= tol) if neg else True)

    u_ray, v_ray = on_ray(u, True), on_ray(v, True)
    u_polar, v_polar = xin @ u <= tol, xin @ v <= tol
    xh = hat(xin)
    u_line_hat = np.linalg.norm(u[None] - (xh @ u)[:, None] * xh, axis=1) <= tol
    v_line = on_ray(v, False)
    return [
        neg_k(u) and neg_k(v),
        np.linalg.norm(v) <= tol,
        np.linalg.norm(u) <= tol,
        bool(np.any(u_ray & v_polar)),
        bool(np.any(u_polar & v_ray)),
        bool(np.any(u_line_hat & v_line)),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
