import numpy as np
import pytest
from conftest import EX31_J, EX31_X, EX31_Y, R2, random_in_region, richardson_derivative
from hypothesis import given, settings
from hypothesis import strategies as st

from socnormal import (
    BKind,
    ConeRegion,
    DimensionMismatch,
    InvalidGrid,
    NotDifferentiable,
    UnsupportedRegion,
    alpha_w_matrix,
    b_subdif_elements_at_zero,
    calmness_report,
    dir_derivative,
    jacobian,
    limiting_coderivative_contains,
    project_soc,
)

ALL_REGIONS = list(ConeRegion)
SCALES = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5]


def proj(a):
    return project_soc(a).data


# ---- directional derivative


def test_dir_derivative_interior():
    h = np.array([0.3, -1.0, 2.0])
    assert np.array_equal(dir_derivative([2, 1, 0], h).data, h)


def test_dir_derivative_origin():
    h = np.array([-3.0, 1.0])
    assert np.array_equal(dir_derivative([0, 0], h).data, proj(h))
    assert np.array_equal(proj(h), [0.0, 0.0])


def test_dir_derivative_boundary_matches_finite_differences():
    d = dir_derivative([1, 1], [0, 1]).data
    assert np.allclose(d, [0.5, 0.5], atol=1e-15)
    fd = richardson_derivative(proj, [1, 1], [0, 1], 1e-4)
    assert np.allclose(fd, d, atol=1e-8)


def test_dir_derivative_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dir_derivative([1, 0], [1, 0, 0])


@pytest.mark.parametrize("region", ALL_REGIONS)
@pytest.mark.parametrize("m", [2, 3, 5])
def test_finite_difference_consistency(region, m, rng):
    for _ in range(20):
        x = random_in_region(region, m, rng)
        h = rng.standard_normal(m)
        d = dir_derivative(x, h).data
        nh = np.linalg.norm(h)
        for t, tol in ((1e-4, 1e-3), (1e-6, 1e-5)):
            fd = (proj(x + t * h) - proj(x)) / t
            assert np.linalg.norm(fd - d) <= tol * nh


@pytest.mark.parametrize("region", ALL_REGIONS)
def test_richardson_agrees(region, rng):
    for _ in range(10):
        x = random_in_region(region, 4, rng)
        h = rng.standard_normal(4)
        fd = richardson_derivative(proj, x, h, 1e-4)
        assert np.linalg.norm(fd - dir_derivative(x, h).data) <= 1e-6 * np.linalg.norm(h)


@pytest.mark.parametrize("region", ALL_REGIONS)
def test_dir_derivative_homogeneous(region, rng):
    x = random_in_region(region, 3, rng)
    h = rng.standard_normal(3)
    for s in (0.5, 2.0, 8.0):
        assert np.allclose(dir_derivative(x, s * h).data, s * dir_derivative(x, h).data,
                           rtol=0, atol=1e-15 * s * np.linalg.norm(h) * 10)


# ---- Jacobian


def test_jacobian_example_outside():
    j = jacobian(EX31_X - EX31_Y)
    assert j.region == ConeRegion.OUTSIDE
    assert np.allclose(j.matrix, EX31_J, atol=1e-15)


def test_jacobian_k_form():
    # closed form in k for x - y with y = k * reflect(x)
    k = 2.0
    xb = EX31_X[1:] / np.linalg.norm(EX31_X[1:])
    c = -(1 - k) / (1 + k)
    blk = np.block([[np.array([[c]]), xb[None, :]], [xb[:, None], c * np.outer(xb, xb)]])
    expected = np.eye(3) / (1 + k) + 0.5 * blk
    assert np.allclose(jacobian(EX31_X - EX31_Y).matrix, expected, atol=1e-15)


def test_jacobian_smooth_regions():
    assert np.array_equal(jacobian([2, 1, 0]).matrix, np.eye(3))
    assert np.array_equal(jacobian([-2, 1, 0]).matrix, np.zeros((3, 3)))


@pytest.mark.parametrize("x", [[1, 1], [-1, 1, 0], [0, 0, 0]])
def test_jacobian_not_differentiable(x):
    with pytest.raises(NotDifferentiable):
        jacobian(x)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_jacobian_symmetric_with_spectrum_in_unit_interval(m, rng):
    for _ in range(50):
        x = random_in_region(ConeRegion.OUTSIDE, m, rng)
        j = jacobian(x).matrix
        assert np.abs(j - j.T).max() <= 1e-12
        ev = np.linalg.eigvalsh(j)
        assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
        h = rng.standard_normal(m)
        assert np.array_equal(dir_derivative(x, h).data, (h[None, :] @ j.T)[0])


# ---- B-subdifferential at 0


def test_b_subdif_example():
    els = b_subdif_elements_at_zero([0.5], [[1.0, 0.0]])
    assert [e.kind for e in els] == [BKind.ZERO_MATRIX, BKind.IDENTITY, BKind.ALPHA_W]
    w = np.array([1.0, 0.0])
    expected = 0.5 * np.block([[np.ones((1, 1)), w[None, :]], [w[:, None], np.eye(2)]])
    assert np.allclose(els[2].matrix(), expected, atol=1e-15)


def test_b_subdif_alpha_zero_direct_assembly():
    e1 = np.array([1.0, 0.0])
    m = b_subdif_elements_at_zero([0.0], [e1])[2].matrix()
    expected = 0.5 * np.block([[np.ones((1, 1)), e1[None, :]], [e1[:, None], np.outer(e1, e1)]])
    assert np.array_equal(m, expected)


@pytest.mark.parametrize(
    "alphas, ws",
    [([], [[1.0]]), ([0.5], []), ([1.5], [[1.0]]), ([0.5], [[2.0]]), ([0.5], [[1.0], [1.0, 0.0]])],
)
def test_b_subdif_invalid(alphas, ws):
    with pytest.raises(InvalidGrid):
        b_subdif_elements_at_zero(alphas, ws)


@settings(max_examples=40)
@given(st.floats(0.01, 0.99), st.integers(0, 2**31), st.sampled_from([2, 3, 5]))
def test_alpha_w_is_limit_of_jacobians(alpha, seed, m):
    # the Jacobian is constant along rays, so the limit is attained on the ray itself
    w = np.random.default_rng(seed).standard_normal(m - 1)
    w /= np.linalg.norm(w)
    target = alpha_w_matrix(alpha, w)
    for t in (1.0, 1e-2, 1e-4):
        z = t * np.concatenate(([2 * alpha - 1], w))
        assert np.abs(jacobian(z).matrix - target).max() <= 1e-6


def test_alpha_w_endpoints():
    w = np.array([0.6, 0.8])
    ws = np.concatenate(([1.0], w))
    # (1, w) is fixed at both endpoints; (1, -w) is annihilated at alpha = 0
    m1 = alpha_w_matrix(1.0, w)
    assert np.allclose(m1 @ ws, ws)
    m0 = alpha_w_matrix(0.0, w)
    assert np.allclose(m0 @ ws, ws)
    assert np.allclose(m0 @ np.concatenate(([1.0], -w)), 0.0)


# ---- limiting coderivative


def test_coderivative_neg_boundary_example():
    v = limiting_coderivative_contains([-1, -1], [-3, 1], [-2, 2])
    assert v.member and v.branch == "rank-one"
    assert np.allclose(0.5 * np.array([[1, -1], [-1, 1]]) @ [-3, 1], [-2, 2])


def test_coderivative_identity_at_interior():
    w = np.array([0.3, -0.2, 1.0])
    assert limiting_coderivative_contains([2, 1, 0], w, w).member
    assert not limiting_coderivative_contains([2, 1, 0], w, w + 1e-3).member


def test_coderivative_zero_element_at_origin():
    assert limiting_coderivative_contains([0, 0, 0], [5, -1, 2], [0, 0, 0]).member


def test_coderivative_half_w_at_origin():
    # alpha = 1/2, w = (1, 0) image of a generic w_star
    w = np.array([1.0, 0.0])
    ws = np.array([1.0, 1.0, 1.0])
    zs = alpha_w_matrix(0.5, w) @ ws
    v = limiting_coderivative_contains([0, 0, 0], ws, zs)
    assert v.member


def test_coderivative_outside_uses_jacobian():
    z = EX31_X - EX31_Y
    ws = np.array([1.0, 2.0, -1.0])
    assert limiting_coderivative_contains(z, ws, EX31_J @ ws).member
    assert not limiting_coderivative_contains(z, ws, ws).member


def test_coderivative_unsupported_region():
    with pytest.raises(UnsupportedRegion):
        limiting_coderivative_contains([1, 1], [0, 0], [0, 0])


def test_coderivative_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        limiting_coderivative_contains([0, 0], [0, 0, 0], [0, 0])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_coderivative_contains_every_b_image(m, rng):
    ws = rng.standard_normal((10, m))
    w = rng.standard_normal(m - 1)
    w /= np.linalg.norm(w)
    for e in b_subdif_elements_at_zero([0.0, 0.3, 0.5, 1.0], [w]):
        for a in ws:
            assert limiting_coderivative_contains(np.zeros(m), a, e.matrix() @ a).member


# ---- calmness


def test_calmness_interior_zero():
    r = calmness_report([2, 1, 0], [1, -3, 2], SCALES)
    assert r.ratios == [0.0] * 5 and r.fitted_c == 0.0


def test_calmness_origin_zero():
    # exact up to the rounding of the double-precision derivative
    h = np.array([1.0, -3.0, 2.0])
    r = calmness_report([0, 0, 0], h, SCALES)
    for t, q in zip(r.scales, r.ratios):
        assert q * t <= 1e-15 * np.linalg.norm(h)


def test_calmness_boundary_bounded():
    r = calmness_report([1, 1], [0, 1], SCALES)
    assert r.ratios[-1] <= 10 * r.ratios[0] + 1e-8
    assert all(q <= r.fitted_c * (1 + 1e-6) for q in r.ratios)


def test_calmness_rejects_bad_scales():
    with pytest.raises(ValueError):
        calmness_report([1, 1], [0, 1], [1e-2, 1e-1])
    with pytest.raises(ValueError):
        calmness_report([1, 1], [0, 1], [1e-1, -1e-2])


def test_calmness_example_outside():
    r = calmness_report(EX31_X - EX31_Y, [1.0, -R2, 0.5], SCALES)
    assert r.ratios[-1] <= 10 * r.ratios[0] + 1e-8
