"""Central projection of a spherical triangle onto the plane of its circumcircle.

The projection ``Pi`` sends a spherical triangle of circumradius ``R < pi/2``
onto its chord triangle.  A direction at a vertex making angle ``tau`` with
the circumscribed circle in the plane corresponds to a spherical direction
at angle ``eta(tau, R) = arccot(sec R cot tau)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangleError, DomainError
from .spherical_trig import (
    EmbeddedTriangle,
    EuclideanTriangle,
    SphericalTriangle,
    TriangleParams,
    chd,
    circumscribed_radius,
    embed,
    euclidean_angles_arr,
    napier_delambre_mollweide_check,
    spherical_diameter,
    triangle_from_params,
)


def _check_R(R):
    if not 0.0 <= R < 0.5 * math.pi:
        raise DomainError(f"R={R!r} outside [0, pi/2)")


def eta_arr(tau, R):
    # arccot with range (0, pi), written as atan2 to stay continuous at tau = pi/2
    tau = np.asarray(tau, dtype=float)
    return np.arctan2(np.sin(tau) * np.cos(R), np.cos(tau))


def eta(tau, R):
    """Spherical angle to the circle corresponding to planar angle ``tau``."""
    _check_R(R)
    if not 0.0 < tau < math.pi:
        raise DomainError(f"tau={tau!r} outside (0, pi)")
    return float(eta_arr(tau, R))


def eta_derivative(tau, R):
    """``d eta / d tau = cos R / (cos^2 tau + cos^2 R sin^2 tau)``."""
    _check_R(R)
    if not 0.0 <= tau <= math.pi:
        raise DomainError(f"tau={tau!r} outside [0, pi]")
    cR = math.cos(R)
    return cR / (math.cos(tau) ** 2 + cR * cR * math.sin(tau) ** 2)


def unit_slope_angle(R):
    """The ``tau`` in ``[0, pi/2]`` where ``d eta / d tau = 1``."""
    _check_R(R)
    return math.asin(2.0 ** -0.5 / math.cos(0.5 * R))


def gamma_of_t(R, phi, t):
    """Spherical angle at the marked vertex: ``eta(t + phi) - eta(t - phi)``."""
    p = TriangleParams(R, phi, t)
    return float(eta_arr(p.t + p.phi, p.R) - eta_arr(p.t - p.phi, p.R))


def mu(tau, R):
    """Integrand of ``gamma_of_t``; the derivative of ``eta``."""
    cR = np.cos(R)
    return cR / (np.cos(tau) ** 2 + cR * cR * np.sin(tau) ** 2)


def spherical_angles_from_chart_arr(R, phi, t):
    """Spherical angles opposite ``a, b, c`` from chart coordinates.

    At each vertex the two sides meet the circle at angles equal to the chord
    triangle's other two angles, so ``angle = pi - eta(x') - eta(y')``.
    """
    ap, bp, gp = t - phi, np.pi - t - phi, 2.0 * phi
    ea, eb, eg = eta_arr(ap, R), eta_arr(bp, R), eta_arr(gp, R)
    return np.pi - eb - eg, np.pi - ea - eg, np.pi - ea - eb


# ---------------------------------------------------------------------------
# 3D oracle for eta
# ---------------------------------------------------------------------------

def eta_oracle(tau, R, h=0.25):
    """Measure ``eta`` with vectors: lift a planar ray at angle ``tau`` to the sphere.

    The vertex is ``O = (sin R, 0, cos R)`` on the circle ``z = cos R``.  The
    planar ray leaves ``O`` at angle ``tau`` from the circle tangent towards
    the inside.  Central projection maps great circles to lines, so the great
    circle through ``O`` and the lifted point ``Q/|Q|`` has the lifted
    direction for every step ``h``.
    """
    sR, cR = math.sin(R), math.cos(R)
    O = np.array([sR, 0.0, cR])
    tangent = np.array([0.0, 1.0, 0.0])
    inward_plane = np.array([-1.0, 0.0, 0.0])
    inward_sphere = np.array([-cR, 0.0, sR])
    Q = O + h * (math.cos(tau) * tangent + math.sin(tau) * inward_plane)
    u = Q - np.dot(Q, O) * O
    return math.atan2(float(np.dot(u, inward_sphere)), float(np.dot(u, tangent)))


# ---------------------------------------------------------------------------
# projection context and distortion bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectionContext:
    """Plane of the circumcircle of an embedded triangle.

    ``plane_tilt`` below is the angle between the tangent plane at a point
    and this plane; it is not a triangle angle.
    """

    R: float
    normal: np.ndarray
    offset: float

    @classmethod
    def from_embedded(cls, emb: EmbeddedTriangle):
        n = emb.center()
        return cls(emb.circumradius(), n, float(np.dot(n, emb.vA)))

    @property
    def bilipschitz(self):
        return 1.0 / math.cos(self.R)

    def project(self, pts):
        pts = np.atleast_2d(pts)
        return pts * (self.offset / (pts @ self.normal))[:, None]

    def plane_tilt(self, pts):
        pts = np.atleast_2d(pts)
        return np.arccos(np.clip(pts @ self.normal, -1.0, 1.0))

    def length_ratios(self, x, y):
        """Planar over spherical distance for point pairs of the triangle."""
        px, py = self.project(x), self.project(y)
        planar = np.linalg.norm(px - py, axis=1)
        sph = np.arctan2(np.linalg.norm(np.cross(x, y), axis=1), np.einsum("ij,ij->i", x, y))
        return planar / sph


def chord_triangle(tri: SphericalTriangle):
    """``Pi(tri)`` as a Euclidean triangle (sides are the chords)."""
    return EuclideanTriangle(*(chd(s) for s in tri.sides))


def angle_ratio_bounds(tri: SphericalTriangle):
    """Per-vertex ratios of the chord-triangle angles to the spherical angles.

    Returns ``(ratios, (cos R, sec R))``.
    """
    R = tri.circumradius
    if R >= 0.5 * math.pi:
        raise DomainError("needs R < pi/2")
    chord_angles = euclidean_angles_arr(*(chd(s) for s in tri.sides))
    ratios = tuple(float(p / s) for p, s in zip(chord_angles, tri.angles))
    return ratios, (math.cos(R), 1.0 / math.cos(R))


@dataclass(frozen=True)
class SmallTriangleBounds:
    lower: float
    angle_sum: float
    upper: float
    hypothesis: bool      # chd d <= 2^{-1/2} sin(R/2)
    alpha_ok: bool        # alpha <= alpha'
    beta_ok: bool         # beta <= beta'

    @property
    def sandwich(self):
        return self.lower <= self.angle_sum <= self.upper

    @property
    def comparison(self):
        """The chord-angle comparison; vacuously True when the hypothesis fails."""
        return (not self.hypothesis) or (self.alpha_ok and self.beta_ok)


def lemma_3_5_bounds(tri: SphericalTriangle, slack=1e-12):
    """``(1/2) chd d cot R <= alpha + beta <= 4 chd d csc 2R`` plus the small-triangle comparison.

    ``alpha <= beta`` are the two smaller spherical angles and ``alpha'``,
    ``beta'`` the chord-triangle angles at the same vertices.
    """
    R = tri.circumradius
    if R >= 0.5 * math.pi:
        raise DomainError("needs R < pi/2")
    cd = chd(spherical_diameter(tri))
    ang = np.asarray(tri.angles)
    chord_ang = np.asarray(euclidean_angles_arr(*(chd(s) for s in tri.sides)))
    order = np.argsort(ang, kind="stable")
    i, j = order[0], order[1]
    hyp = cd <= 2.0 ** -0.5 * math.sin(0.5 * R)
    return SmallTriangleBounds(
        lower=0.5 * cd / math.tan(R),
        angle_sum=float(ang[i] + ang[j]),
        upper=4.0 * cd / math.sin(2.0 * R),
        hypothesis=bool(hyp),
        alpha_ok=bool(ang[i] <= chord_ang[i] + slack),
        beta_ok=bool(ang[j] <= chord_ang[j] + slack),
    )


def _vertices(tri: EuclideanTriangle):
    """Plane coordinates for ``A, B, C`` with ``|BC| = a`` etc."""
    a, b, c = tri.sides
    A = np.zeros(2)
    B = np.array([c, 0.0])
    x = (b * b + c * c - a * a) / (2.0 * c)
    y = math.sqrt(max(b * b - x * x, 0.0))
    return A, B, np.array([x, y])


@dataclass(frozen=True)
class AffineLipschitz:
    L_true: float
    l: float
    beta: float

    @property
    def bound(self):
        return self.l * math.pi ** 2 / self.beta ** 2

    @property
    def holds(self):
        return self.L_true <= self.bound * (1.0 + 1e-12)


def affine_lipschitz_bound(src: EuclideanTriangle, dst: EuclideanTriangle):
    """Lipschitz constant of the vertex-to-vertex affine map ``src -> dst``.

    ``L_true`` is the largest singular value of the linear part, ``l`` the
    largest side-length ratio (an affine map stretches each side uniformly)
    and ``beta`` the middle angle of ``src``.
    """
    A, B, C = _vertices(src)
    A2, B2, C2 = _vertices(dst)
    M = np.column_stack([B - A, C - A])
    if abs(np.linalg.det(M)) < 1e-300 or min(src.angles) < 1e-12:
        raise DegenerateTriangleError("source triangle is near-collinear")
    lin = np.column_stack([B2 - A2, C2 - A2]) @ np.linalg.inv(M)
    L_true = float(np.linalg.svd(lin, compute_uv=False)[0])
    l = max(d / s for d, s in zip(dst.sides, src.sides))
    beta = sorted(src.angles)[1]
    return AffineLipschitz(L_true, l, beta)


# ---------------------------------------------------------------------------
# cross-validation against 3D measurements
# ---------------------------------------------------------------------------

ORACLE_CHECKS = ("eta", "eta_slope", "sides", "angles", "circumradius", "chords", "identities")


def oracle_residuals(n=10_000, seed=0, h=1e-4):
    """Largest residual of each formula against its vector-geometry counterpart.

    Triangles are drawn in chart coordinates away from degeneracy; ``eta``
    is compared with :func:`eta_oracle` and its slope at ``0`` and ``pi/2``
    with Richardson-extrapolated central differences of the oracle.
    """
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(ORACLE_CHECKS, 0.0)

    def bump(key, val):
        worst[key] = max(worst[key], float(abs(val)))

    for _ in range(n):
        R = rng.uniform(0.05, 1.5)
        tau = rng.uniform(0.01, math.pi - 0.01)
        bump("eta", eta(tau, R) - eta_oracle(tau, R))
        for t0, expect in ((0.0, math.cos(R)), (0.5 * math.pi, 1.0 / math.cos(R))):
            d1 = (eta_oracle(t0 + h, R) - eta_oracle(t0 - h, R)) / (2.0 * h)
            d2 = (eta_oracle(t0 + 0.5 * h, R) - eta_oracle(t0 - 0.5 * h, R)) / h
            fd = (4.0 * d2 - d1) / 3.0
            bump("eta_slope", fd - expect)
        phi = rng.uniform(0.05, 0.5 * math.pi - 0.05)
        t = rng.uniform(phi + 0.05, math.pi - phi - 0.05)
        p = TriangleParams(R, phi, t)
        tri = triangle_from_params(p)
        emb = embed(p)
        for x, y in zip(tri.sides, emb.sides()):
            bump("sides", x - y)
        for x, y in zip(tri.angles, emb.angles()):
            bump("angles", x - y)
        bump("circumradius", circumscribed_radius(tri) - emb.circumradius())
        planar = (np.linalg.norm(emb.vB - emb.vC), np.linalg.norm(emb.vC - emb.vA),
                  np.linalg.norm(emb.vA - emb.vB))
        for x, y in zip(p.chords, planar):
            bump("chords", x - y)
        for v in napier_delambre_mollweide_check(tri).residuals.values():
            bump("identities", v)
    return worst
