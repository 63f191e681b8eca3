import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_distort.errors import DegenerateTriangleError, DomainError
from sphere_distort.projection import (
    ORACLE_CHECKS,
    ProjectionContext,
    affine_lipschitz_bound,
    angle_ratio_bounds,
    chord_triangle,
    eta,
    eta_derivative,
    eta_oracle,
    gamma_of_t,
    lemma_3_5_bounds,
    oracle_residuals,
    spherical_angles_from_chart_arr,
    unit_slope_angle,
)
from sphere_distort.spherical_trig import (
    TETRA_SIDE,
    EuclideanTriangle,
    SphericalTriangle,
    TriangleParams,
    chd,
    embed,
    triangle_from_params,
)

HALF_PI = 0.5 * math.pi


def random_params(rng, R_lo=0.02, R_hi=1.5, margin=0.02):
    R = rng.uniform(R_lo, R_hi)
    phi = rng.uniform(margin, HALF_PI - margin)
    t = rng.uniform(phi + margin, math.pi - phi - margin)
    return TriangleParams(R, phi, t)


# eta -----------------------------------------------------------------------

@pytest.mark.parametrize("R", [0.0, 0.3, 1.0, 1.5])
def test_eta_fixed_at_right_angle(R):
    assert eta(HALF_PI, R) == pytest.approx(HALF_PI, abs=1e-15)


@pytest.mark.parametrize("tau", [0.1, 1.0, 2.5])
def test_eta_identity_at_zero_radius(tau):
    assert eta(tau, 0.0) == pytest.approx(tau, abs=1e-15)


def test_eta_example_against_oracle():
    expect = math.atan2(1.0, 2.0)
    assert expect == pytest.approx(0.463648, abs=1e-6)
    assert eta(math.pi / 4, math.pi / 3) == pytest.approx(expect, abs=1e-15)
    assert eta_oracle(math.pi / 4, math.pi / 3) == pytest.approx(expect, abs=1e-12)


@given(st.floats(1e-3, math.pi - 1e-3), st.floats(0.0, HALF_PI - 1e-3))
def test_eta_reflection_and_range(tau, R):
    e = eta(tau, R)
    assert 0.0 < e < math.pi
    # the reflected argument is rounded, then amplified by the slope sec R
    assert eta(math.pi - tau, R) == pytest.approx(math.pi - e, abs=1e-15 / math.cos(R) + 1e-14)


def test_eta_domain():
    with pytest.raises(DomainError):
        eta(0.0, 0.5)
    with pytest.raises(DomainError):
        eta(1.0, HALF_PI)


@pytest.mark.parametrize("R", [0.2, 0.9, 1.4])
def test_eta_derivative_endpoints_and_range(R):
    assert eta_derivative(0.0, R) == pytest.approx(math.cos(R), rel=1e-15)
    assert eta_derivative(HALF_PI, R) == pytest.approx(1.0 / math.cos(R), rel=1e-15)
    taus = np.linspace(0.0, HALF_PI, 200)
    d = [eta_derivative(t, R) for t in taus]
    assert np.all(np.diff(d) > 0)


@given(st.floats(0.05, math.pi - 0.05), st.floats(0.0, 1.5))
def test_eta_derivative_matches_difference(tau, R):
    h = 1e-5
    fd = (eta(tau + h, R) - eta(tau - h, R)) / (2 * h)
    assert eta_derivative(tau, R) == pytest.approx(fd, abs=1e-7)


@pytest.mark.parametrize("R", [0.1, 0.8, 1.5])
def test_unit_slope_angle(R):
    assert eta_derivative(unit_slope_angle(R), R) == pytest.approx(1.0, abs=1e-13)


# gamma_of_t ----------------------------------------------------------------

@given(st.floats(0.01, 1.5), st.floats(0.02, HALF_PI - 0.02), st.floats(0.01, 0.99))
@settings(max_examples=200)
def test_gamma_matches_solver(R, phi, u):
    t = phi + 1e-3 + u * (math.pi - 2 * phi - 2e-3)
    tri = triangle_from_params(TriangleParams(R, phi, t))
    assert gamma_of_t(R, phi, t) == pytest.approx(tri.angles[2], abs=1e-10)
    chart = spherical_angles_from_chart_arr(R, phi, t)
    assert np.allclose(chart, tri.angles, atol=1e-10)


@pytest.mark.parametrize("R, phi", [(0.5, 0.2), (1.2, 0.7), (1.5, 1.3)])
def test_gamma_isosceles_closed_form(R, phi):
    expect = math.pi - 2 * math.atan(math.cos(R) * math.tan(HALF_PI - phi))
    assert gamma_of_t(R, phi, HALF_PI) == pytest.approx(expect, abs=1e-14)


def test_gamma_flat_limit_is_inscribed_angle():
    assert gamma_of_t(1e-9, 0.4, 1.1) == pytest.approx(0.8, abs=1e-15)


@given(st.floats(0.01, 1.5), st.floats(0.02, 1.5), st.floats(0.0, 1.0))
def test_gamma_symmetric(R, phi, u):
    t = phi + 1e-3 + u * (HALF_PI - phi - 1e-3)
    if t >= math.pi - phi:
        return
    assert gamma_of_t(R, phi, t) == pytest.approx(gamma_of_t(R, phi, math.pi - t), abs=1e-12)


@pytest.mark.parametrize("R, phi", [(0.3, 0.2), (1.0, 0.5), (1.5, 1.0)])
def test_gamma_increasing_towards_isosceles(R, phi):
    ts = np.linspace(phi + 1e-3, HALF_PI, 300)
    g = [gamma_of_t(R, phi, t) for t in ts]
    assert np.all(np.diff(g) > 0)


# projection context --------------------------------------------------------

def test_context_bilipschitz_and_plane():
    p = TriangleParams(1.1, 0.4, 1.3)
    emb = embed(p)
    ctx = ProjectionContext.from_embedded(emb)
    assert ctx.R == pytest.approx(1.1, abs=1e-12)
    assert ctx.bilipschitz == pytest.approx(1 / math.cos(1.1), rel=1e-12)
    assert ctx.offset == pytest.approx(math.cos(1.1), abs=1e-12)
    proj = ctx.project(np.vstack(emb.vertices))
    assert np.allclose(proj, np.vstack(emb.vertices), atol=1e-14)


def test_projection_length_distortion():
    rng = np.random.default_rng(5)
    worst_lo, worst_hi = math.inf, 0.0
    for _ in range(100):
        p = random_params(rng, R_hi=1.4)
        emb = embed(p)
        ctx = ProjectionContext.from_embedded(emb)
        x, y = emb.sample_points(100, rng), emb.sample_points(100, rng)
        r = ctx.length_ratios(x, y)
        worst_lo = min(worst_lo, float(np.min(r / math.cos(p.R))))
        worst_hi = max(worst_hi, float(np.max(r * math.cos(p.R))))
    assert worst_lo >= 1.0 - 1e-12 and worst_hi <= 1.0 + 1e-12


def test_chord_triangle_sides():
    tri = SphericalTriangle(0.5, 0.7, 0.9)
    assert chord_triangle(tri).sides == tuple(chd(s) for s in tri.sides)


# angle ratio bounds --------------------------------------------------------

def test_angle_ratios_equilateral():
    tri = triangle_from_params(TriangleParams(1.0, math.pi / 6, HALF_PI))
    ratios, (lo, hi) = angle_ratio_bounds(tri)
    # chord angles are pi/3; spherical angles from the isosceles closed form
    gam = math.pi - 2 * math.atan(math.cos(1.0) * math.tan(math.pi / 3))
    assert ratios == pytest.approx(((math.pi / 3) / gam,) * 3, abs=1e-12)
    assert lo <= min(ratios) and max(ratios) <= hi


def test_angle_ratios_tend_to_one():
    tri = triangle_from_params(TriangleParams(1e-5, 0.3, 1.0))
    ratios, _ = angle_ratio_bounds(tri)
    assert ratios == pytest.approx((1.0,) * 3, abs=1e-9)


def test_angle_ratio_sweep():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        p = random_params(rng, margin=1e-3)
        ratios, (lo, hi) = angle_ratio_bounds(triangle_from_params(p))
        assert lo - 1e-12 <= min(ratios) and max(ratios) <= hi + 1e-12


# small-triangle bounds -----------------------------------------------------

def test_lemma_3_5_tetrahedral_face():
    b = lemma_3_5_bounds(SphericalTriangle.equilateral(TETRA_SIDE))
    assert b.sandwich
    assert b.angle_sum == pytest.approx(4 * math.pi / 3, abs=1e-12)
    assert not b.hypothesis


def test_lemma_3_5_tiny_triangle_comparison():
    # three nearby points on a fixed circle: sides ~1e-4, R = 1
    phi = 2.5e-5
    tiny = triangle_from_params(TriangleParams(1.0, phi, math.pi - phi - 1e-5))
    assert max(tiny.sides) < 2e-4
    b = lemma_3_5_bounds(tiny)
    assert b.hypothesis and b.alpha_ok and b.beta_ok and b.sandwich


def test_lemma_3_5_scaled_family():
    base = triangle_from_params(TriangleParams(0.9, 0.2, 1.0))
    for s in (1.0, 0.5, 0.1, 0.01):
        tri = base.scaled(s)
        b = lemma_3_5_bounds(tri)
        assert b.sandwich
        R = tri.circumradius
        # the bounds pinch alpha + beta between fixed multiples of chd d / R
        cd = 2.0 * b.lower * math.tan(R)
        ratio = b.angle_sum / (cd / R)
        assert 0.5 * R / math.tan(R) <= ratio <= 4 * R / math.sin(2 * R)


def test_lemma_3_5_sweep():
    rng = np.random.default_rng(3)
    hyp = 0
    for _ in range(2000):
        p = random_params(rng, R_lo=1e-3, margin=1e-3)
        b = lemma_3_5_bounds(triangle_from_params(p))
        assert b.sandwich and b.comparison
        hyp += b.hypothesis
    assert hyp > 0


def test_lemma_3_5_rejects_wide_triangle():
    tri = SphericalTriangle(2.0, 2.0, 2.0)
    assert tri.circumradius < HALF_PI
    lemma_3_5_bounds(tri)


# affine Lipschitz ----------------------------------------------------------

def test_affine_identity():
    tri = EuclideanTriangle(3.0, 4.0, 5.0)
    res = affine_lipschitz_bound(tri, tri)
    assert res.L_true == pytest.approx(1.0, abs=1e-14)
    assert res.l == 1.0
    assert res.bound >= 1.0 and res.holds


def test_affine_scaling():
    tri = EuclideanTriangle(2.0, 2.5, 3.0)
    res = affine_lipschitz_bound(tri, tri.scaled(3.5))
    assert res.L_true == pytest.approx(3.5, rel=1e-13)
    assert res.l == pytest.approx(3.5, rel=1e-15)


def test_affine_degenerate():
    with pytest.raises(DegenerateTriangleError):
        affine_lipschitz_bound(EuclideanTriangle(1.0, 1e-13, 1.0), EuclideanTriangle(1, 1, 1))


def _random_euclid(rng):
    a, b = rng.uniform(0.1, 10.0, 2)
    c = abs(a - b) + (a + b - abs(a - b)) * rng.uniform(0.02, 0.98)
    return EuclideanTriangle(a, b, c)


def test_affine_sweep():
    rng = np.random.default_rng(9)
    for _ in range(10_000):
        res = affine_lipschitz_bound(_random_euclid(rng), _random_euclid(rng))
        assert res.holds
        assert res.l <= res.L_true * (1 + 1e-12)


# 3D cross-checks -----------------------------------------------------------

def test_oracle_residuals_small():
    worst = oracle_residuals(n=500, seed=1)
    assert set(worst) == set(ORACLE_CHECKS)
    assert all(v < 1e-9 for v in worst.values()), worst


def test_oracle_deterministic():
    assert oracle_residuals(n=50, seed=2) == oracle_residuals(n=50, seed=2)
