import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphere_distort.errors import DegenerateTriangleError, DomainError
from sphere_distort.spherical_trig import (
    B0,
    R0,
    TETRA_SIDE,
    EuclideanTriangle,
    SphericalTriangle,
    TriangleParams,
    chd,
    chd_inv,
    circumscribed_radius,
    embed,
    euclidean_angles,
    half_angle_side,
    law_of_sines_ratios,
    napier_delambre_mollweide_check,
    params_from_triangle,
    sampled_diameter,
    spherical_angles,
    spherical_angles_cosine_rule,
    spherical_area,
    spherical_diameter,
    triangle_from_params,
)

OCTANT = SphericalTriangle(0.5 * math.pi, 0.5 * math.pi, 0.5 * math.pi)
TETRA = SphericalTriangle.equilateral(TETRA_SIDE)


@st.composite
def chart_points(draw, margin=0.02):
    R = draw(st.floats(0.05, 0.5 * math.pi - 0.05))
    phi = draw(st.floats(margin, 0.5 * math.pi - margin))
    t = draw(st.floats(phi + margin, math.pi - phi - margin))
    return TriangleParams(R, phi, t)


# chd ---------------------------------------------------------------------

def test_chd_endpoints():
    assert chd(0.0) == 0.0
    assert chd(math.pi) == pytest.approx(2.0, abs=1e-15)


def test_chd_at_b0_from_half_angle_identity():
    # sin^2(b0/2) = (1 - 1/3)/2 = 1/3
    assert chd(B0) == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-15)


def test_chd_inv_values():
    assert chd_inv(0.0) == 0.0
    assert chd_inv(2.0) == pytest.approx(math.pi, abs=1e-15)
    assert chd_inv(1.0) == pytest.approx(math.pi / 3.0, abs=1e-15)


@pytest.mark.parametrize("bad", [-1e-9, math.pi + 1e-9, math.nan])
def test_chd_domain(bad):
    with pytest.raises(DomainError):
        chd(bad)


@pytest.mark.parametrize("bad", [-1e-9, 2.0 + 1e-9])
def test_chd_inv_domain(bad):
    with pytest.raises(DomainError):
        chd_inv(bad)


@given(st.floats(0.0, 2.0))
def test_chd_round_trip(x):
    assert abs(chd(chd_inv(x)) - x) <= 1e-12


def test_chd_increasing_and_concave():
    t = np.linspace(0.0, math.pi, 2001)
    y = chd(t)
    assert np.all(np.diff(y) > 0)
    assert np.all(np.diff(y, 2) <= 1e-15)


# angles --------------------------------------------------------------------

def test_tetrahedral_face_angles():
    assert TETRA.angles == pytest.approx((2 * math.pi / 3,) * 3, abs=1e-14)


def test_tiny_equilateral_is_nearly_euclidean():
    assert SphericalTriangle.equilateral(1e-4).angles == pytest.approx((math.pi / 3,) * 3, abs=1e-6)


def test_octant_angles():
    assert spherical_angles(OCTANT) == pytest.approx((0.5 * math.pi,) * 3, abs=1e-15)


@given(chart_points())
@settings(max_examples=200)
def test_half_angle_and_cosine_rule_agree(p):
    tri = triangle_from_params(p)
    assert spherical_angles(tri) == pytest.approx(spherical_angles_cosine_rule(tri), abs=1e-9)


@given(chart_points())
@settings(max_examples=200)
def test_angle_order_matches_side_order(p):
    tri = triangle_from_params(p)
    assert np.argsort(tri.sides, kind="stable").tolist() == np.argsort(tri.angles, kind="stable").tolist() \
        or len(set(np.round(tri.sides, 12))) < 3


@given(chart_points())
@settings(max_examples=200)
def test_law_of_sines(p):
    r = law_of_sines_ratios(triangle_from_params(p))
    assert max(r) - min(r) <= 1e-10 * max(1.0, max(r))


def test_cosine_rule_refuses_large_overshoot():
    # sides violating the spherical triangle inequality by a visible margin
    class Fake:
        sides = (3.0, 0.1, 0.1)
    with pytest.raises(DegenerateTriangleError):
        spherical_angles_cosine_rule(Fake())


@pytest.mark.parametrize("sides", [(1.0, 1.0, 2.5), (0.0, 1.0, 1.0), (3.2, 1.0, 3.0), (2.5, 2.5, 2.5)])
def test_invalid_spherical_triangles(sides):
    with pytest.raises(DegenerateTriangleError):
        SphericalTriangle(*sides)


# area ----------------------------------------------------------------------

def test_area_examples():
    assert spherical_area(OCTANT) == pytest.approx(0.5 * math.pi, abs=1e-14)
    assert spherical_area(TETRA) == pytest.approx(math.pi, abs=1e-14)


@given(chart_points())
@settings(max_examples=200)
def test_area_is_angle_excess(p):
    tri = triangle_from_params(p)
    assert spherical_area(tri) == pytest.approx(sum(tri.angles) - math.pi, abs=1e-10)
    assert spherical_area(tri) > 0


@pytest.mark.parametrize("s", [1e-1, 1e-2, 1e-3])
def test_area_euclidean_limit(s):
    # the relative gap to Heron's area on the chords shrinks like s^2
    tri = SphericalTriangle(s, 1.3 * s, 1.7 * s)
    heron = EuclideanTriangle(*(chd(x) for x in tri.sides)).area
    rel = abs(spherical_area(tri) / heron - 1.0)
    assert rel < 0.5 * s * s


# params --------------------------------------------------------------------

def test_equilateral_from_params():
    R = 0.9
    tri = triangle_from_params(TriangleParams(R, math.pi / 6, 0.5 * math.pi))
    for x in tri.sides:
        assert chd(x) == pytest.approx(math.sqrt(3.0) * math.sin(R), abs=1e-14)


def test_isosceles_from_params():
    R, phi = 1.1, 0.4
    tri = triangle_from_params(TriangleParams(R, phi, 0.5 * math.pi))
    assert chd(tri.a) == pytest.approx(2 * math.sin(R) * math.cos(phi), abs=1e-14)
    assert chd(tri.b) == pytest.approx(2 * math.sin(R) * math.cos(phi), abs=1e-14)


def test_equilateral_at_b0_is_tetrahedral():
    tri = triangle_from_params(TriangleParams(B0, math.pi / 6, 0.5 * math.pi))
    assert tri.sides == pytest.approx((TETRA_SIDE,) * 3, abs=1e-14)
    assert TETRA_SIDE == pytest.approx(1.910633236249019, abs=1e-14)


def test_params_validation():
    with pytest.raises(DomainError):
        TriangleParams(0.5 * math.pi, 0.3, 1.0)
    with pytest.raises(DomainError):
        TriangleParams(0.5, 0.3, 0.2)


def test_chord_floor():
    with pytest.raises(DegenerateTriangleError):
        triangle_from_params(TriangleParams(1e-14, 0.3, 1.0))


@given(chart_points())
@settings(max_examples=300)
def test_circumradius_round_trip(p):
    assert abs(circumscribed_radius(triangle_from_params(p)) - p.R) <= 1e-9


def test_circumradius_round_trip_bulk():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(2000):
        R = rng.uniform(0.01, 1.55)
        phi = rng.uniform(0.01, 1.56)
        t = rng.uniform(phi + 0.005, math.pi - phi - 0.005)
        p = TriangleParams(R, phi, t)
        worst = max(worst, abs(triangle_from_params(p).circumradius - R))
    assert worst < 1e-9


@given(chart_points())
@settings(max_examples=100)
def test_params_from_triangle_round_trip(p):
    tri = triangle_from_params(p)
    q = params_from_triangle(tri)
    assert triangle_from_params(q).sides == pytest.approx(tri.sides, abs=1e-9)


def test_canonical_reflection():
    p = TriangleParams(0.8, 0.3, 2.2)
    q = p.canonical()
    assert q.t == pytest.approx(math.pi - 2.2)
    assert sorted(triangle_from_params(p).sides) == pytest.approx(sorted(triangle_from_params(q).sides))


# circumradius --------------------------------------------------------------

def test_circumradius_of_tetrahedral_face_is_b0():
    assert circumscribed_radius(TETRA) == pytest.approx(B0, abs=1e-12)
    assert B0 == pytest.approx(1.230959417340775, abs=1e-14)


def test_circumradius_of_right_right_obtuse_triangle_is_r0():
    # angles (pi/2, pi/2, 2 pi/3): two quarter circles meeting at a pole at angle 2 pi/3
    tri = SphericalTriangle(0.5 * math.pi, 0.5 * math.pi, 2 * math.pi / 3)
    assert tri.angles == pytest.approx((0.5 * math.pi, 0.5 * math.pi, 2 * math.pi / 3), abs=1e-14)
    assert circumscribed_radius(tri) == pytest.approx(R0, abs=1e-12)


@pytest.mark.parametrize("s", [1e-2, 1e-3])
def test_circumradius_tiny_equilateral(s):
    assert circumscribed_radius(SphericalTriangle.equilateral(s)) == pytest.approx(s / math.sqrt(3), abs=s ** 3)


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.floats(0.01, 0.99))
def test_circumradius_stays_below_quarter_turn(a, b, u):
    # the triangle sits in the smaller cap cut off by its circumcircle
    lo, hi = abs(a - b), min(a + b, 2 * math.pi - a - b, math.pi)
    if hi - lo < 1e-3:
        return
    c = lo + u * (hi - lo)
    try:
        tri = SphericalTriangle(a, b, c)
    except DegenerateTriangleError:
        return
    assert 0.0 < tri.circumradius < 0.5 * math.pi
    assert tri.admissible


def test_circumradius_tends_to_quarter_turn_as_perimeter_fills():
    gaps = []
    for e in (1e-2, 1e-4, 1e-6):
        s = 2 * math.pi / 3 - e
        gaps.append(0.5 * math.pi - SphericalTriangle(s, s, s).circumradius)
    assert gaps[0] > gaps[1] > gaps[2] > 0


# diameter ------------------------------------------------------------------

def test_diameter_examples():
    assert spherical_diameter(SphericalTriangle.equilateral(0.7)) == 0.7
    assert spherical_diameter(SphericalTriangle(0.1, 0.2, 0.25)) == 0.25
    assert spherical_diameter(OCTANT) == 0.5 * math.pi


def test_sampled_pairs_never_exceed_diameter():
    rng = np.random.default_rng(11)
    for _ in range(200):
        R = rng.uniform(0.05, 1.5)
        phi = rng.uniform(0.02, 1.55)
        t = rng.uniform(phi + 0.01, math.pi - phi - 0.01)
        p = TriangleParams(R, phi, t)
        assert sampled_diameter(p, 1000, rng) <= spherical_diameter(triangle_from_params(p)) + 1e-12


def test_longest_side_is_diameter_when_sides_are_short():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 100:
        R = rng.uniform(0.05, 1.5)
        phi = rng.uniform(0.02, 1.55)
        t = rng.uniform(phi + 0.01, math.pi - phi - 0.01)
        p = TriangleParams(R, phi, t)
        tri = triangle_from_params(p)
        if max(tri.sides) > 0.5 * math.pi:
            continue
        checked += 1
        assert sampled_diameter(p, 1000, rng) <= max(tri.sides) + 1e-12


def test_long_sides_can_make_the_diameter_exceed_the_longest_side():
    p = TriangleParams(1.119956133870602, 0.5547710623868801, 1.518361194131956)
    tri = triangle_from_params(p)
    d = spherical_diameter(tri)
    assert d > max(tri.sides) + 0.1
    # brute force: vertex A against points of the opposite side
    emb = embed(p)
    s = np.linspace(0.0, 1.0, 200001)[:, None]
    pts = (1 - s) * emb.vB + s * emb.vC
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    brute = np.max(np.arccos(np.clip(pts @ emb.vA, -1, 1)))
    assert d == pytest.approx(brute, abs=1e-9)


# identities ----------------------------------------------------------------

@pytest.mark.parametrize("tri", [TETRA, OCTANT])
def test_identities_exact_cases(tri):
    rep = napier_delambre_mollweide_check(tri, tol=1e-12)
    assert rep.ok, rep.residuals


def test_napier_equilateral_is_zero_on_both_sides():
    rep = napier_delambre_mollweide_check(SphericalTriangle.equilateral(0.9))
    assert rep.residuals["napier"] == 0.0


@given(chart_points())
@settings(max_examples=200)
def test_identities_random(p):
    assert napier_delambre_mollweide_check(triangle_from_params(p), tol=1e-10).ok


def test_identity_report_names_failures():
    rep = napier_delambre_mollweide_check(TETRA, tol=0.0)
    assert set(rep.failed) <= {"napier", "delambre", "cosines_for_angles"}


# embedding -----------------------------------------------------------------

def test_embed_equilateral():
    emb = embed(TriangleParams(math.pi / 3, math.pi / 6, 0.5 * math.pi))
    s = emb.sides()
    assert max(s) - min(s) < 1e-14
    for v in emb.vertices:
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)


@given(chart_points())
@settings(max_examples=200)
def test_embedding_oracle_agrees(p):
    tri = triangle_from_params(p)
    emb = embed(p)
    assert emb.sides() == pytest.approx(tri.sides, abs=1e-10)
    assert emb.angles() == pytest.approx(tri.angles, abs=1e-9)
    assert emb.circumradius() == pytest.approx(tri.circumradius, abs=1e-9)
    assert emb.plane_distance() == pytest.approx(math.cos(p.R), abs=1e-10)
    A, B, C = emb.vertices
    assert (float(B @ C), float(C @ A), float(A @ B)) == pytest.approx(tuple(np.cos(tri.sides)), abs=1e-12)


def test_embed_reflection_is_congruent():
    p = TriangleParams(1.0, 0.4, 1.2)
    q = TriangleParams(1.0, 0.4, math.pi - 1.2)
    assert sorted(embed(p).sides()) == pytest.approx(sorted(embed(q).sides()), abs=1e-14)


def test_embedding_needs_unit_vectors():
    from sphere_distort.spherical_trig import EmbeddedTriangle
    with pytest.raises(DomainError):
        EmbeddedTriangle(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.1]))


# Euclidean -----------------------------------------------------------------

def test_euclidean_examples():
    assert euclidean_angles(EuclideanTriangle(1, 1, 1)) == pytest.approx((math.pi / 3,) * 3, abs=1e-15)
    assert euclidean_angles(EuclideanTriangle(3, 4, 5)) == pytest.approx(
        (math.asin(0.6), math.asin(0.8), 0.5 * math.pi), abs=1e-15)
    assert euclidean_angles(EuclideanTriangle(1, 1, math.sqrt(3))) == pytest.approx(
        (math.pi / 6, math.pi / 6, 2 * math.pi / 3), abs=1e-14)


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 0.99))
def test_euclidean_angle_sum(a, b, u):
    lo, hi = abs(a - b), a + b
    c = lo + u * (hi - lo)
    if min(c - lo, hi - c) < 1e-6 * hi:
        return
    assert sum(euclidean_angles(EuclideanTriangle(a, b, c))) == pytest.approx(math.pi, abs=1e-12)


def test_euclidean_rejects_bad_sides():
    with pytest.raises(DegenerateTriangleError):
        EuclideanTriangle(1, 2, 3)


def test_half_angle_side_examples():
    assert half_angle_side(1, 1, math.pi / 3) == pytest.approx(1.0, abs=1e-15)
    assert half_angle_side(1, 1, math.pi) == pytest.approx(2.0, abs=1e-15)
    assert half_angle_side(3, 4, 0.5 * math.pi) == pytest.approx(5.0, abs=1e-14)
    with pytest.raises(DomainError):
        half_angle_side(-1, 1, 1.0)


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, math.pi - 0.01))
def test_half_angle_side_matches_cosine_law(a, b, g):
    c = math.sqrt(a * a + b * b - 2 * a * b * math.cos(g))
    assert half_angle_side(a, b, g) == pytest.approx(c, rel=1e-12, abs=1e-12)
