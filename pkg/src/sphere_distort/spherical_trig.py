"""Spherical and Euclidean triangle solvers.

Triangles are stored by their side lengths only; angles, areas and radii are
always recomputed from the sides.  Most solvers have an array twin (suffix
``_arr``) that works elementwise on numpy arrays and skips validation; the
scan and sweep code paths use those.

The ``(R, phi, t)`` chart describes a spherical triangle with a marked vertex
``C``: ``R`` is the spherical circumradius, ``2*phi`` the angle at ``C`` of the
chord triangle, and ``t`` the angle between the bisector of that angle and the
circumscribed circle.  With ``r = sin R`` the chords are::

    chd a = 2 r sin(t - phi),  chd b = 2 r sin(t + phi),  chd c = 2 r sin(2 phi)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateTriangleError, DomainError

B0 = math.atan(math.sqrt(8.0))
R0 = math.atan(2.0)
TETRA_SIDE = math.acos(-1.0 / 3.0)

CLAMP_GUARD = 1e-9
DEGENERACY_FLOOR = 1e-12
UNIT_TOL = 1e-12
WIDE_TOL = 1e-12

__all__ = [
    "B0", "R0", "TETRA_SIDE",
    "chd", "chd_inv",
    "SphericalTriangle", "EuclideanTriangle", "TriangleParams", "EmbeddedTriangle",
    "spherical_angles", "spherical_area", "circumscribed_radius", "spherical_diameter",
    "triangle_from_params", "params_from_triangle", "embed",
    "napier_delambre_mollweide_check", "IdentityReport",
    "euclidean_angles", "half_angle_side",
]


def _check_range(x, lo, hi, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"{name} outside [{lo}, {hi}]: {x!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def chd(t):
    """Chord length ``2 sin(t/2)`` of a unit-sphere arc of length ``t`` in [0, pi]."""
    arr = _check_range(t, 0.0, math.pi, "arc length")
    return _out(2.0 * np.sin(0.5 * arr))


def chd_inv(x):
    """Arc length whose chord is ``x``; inverse of :func:`chd` on [0, 2]."""
    arr = _check_range(x, 0.0, 2.0, "chord length")
    return _out(2.0 * np.arcsin(0.5 * arr))


def clamp_cos(x, guard=CLAMP_GUARD):
    """Clip a computed cosine into [-1, 1], refusing overshoots beyond ``guard``."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > 1.0 + guard):
        raise DegenerateTriangleError(f"cosine {np.max(np.abs(arr))!r} exceeds 1 + {guard}")
    return _out(np.clip(arr, -1.0, 1.0))


# ---------------------------------------------------------------------------
# array kernels (no validation)
# ---------------------------------------------------------------------------

def spherical_angles_arr(a, b, c):
    """Angles opposite ``a, b, c`` by the half-angle formulas."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    s = 0.5 * (a + b + c)
    # rounding can push a flat triangle's excesses just below zero
    sa = np.maximum(0.5 * (b + c - a), 0.0)
    sb = np.maximum(0.5 * (a + c - b), 0.0)
    sc = np.maximum(0.5 * (a + b - c), 0.0)
    ss, sna, snb, snc = np.sin(s), np.sin(sa), np.sin(sb), np.sin(sc)
    alpha = 2.0 * np.arctan2(np.sqrt(snb * snc), np.sqrt(ss * sna))
    beta = 2.0 * np.arctan2(np.sqrt(sna * snc), np.sqrt(ss * snb))
    gamma = 2.0 * np.arctan2(np.sqrt(sna * snb), np.sqrt(ss * snc))
    return alpha, beta, gamma


def euclidean_angles_arr(a, b, c):
    """Angles opposite ``a, b, c`` of a plane triangle (half-angle formulas)."""
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    s = 0.5 * (a + b + c)
    sa = np.maximum(0.5 * (b + c - a), 0.0)
    sb = np.maximum(0.5 * (a + c - b), 0.0)
    sc = np.maximum(0.5 * (a + b - c), 0.0)
    alpha = 2.0 * np.arctan2(np.sqrt(sb * sc), np.sqrt(s * sa))
    beta = 2.0 * np.arctan2(np.sqrt(sa * sc), np.sqrt(s * sb))
    gamma = 2.0 * np.arctan2(np.sqrt(sa * sb), np.sqrt(s * sc))
    return alpha, beta, gamma


def circumradius_arr(a, b, c):
    """Spherical circumradius from the sides.

    ``tan R = 2 sin(a/2) sin(b/2) sin(c/2) / sqrt(sin s sin(s-a) sin(s-b) sin(s-c))``
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    s = 0.5 * (a + b + c)
    num = 2.0 * np.sin(0.5 * a) * np.sin(0.5 * b) * np.sin(0.5 * c)
    den = np.sqrt(np.sin(s) * np.sin(0.5 * (b + c - a)) * np.sin(0.5 * (a + c - b))
                  * np.sin(0.5 * (a + b - c)))
    return np.arctan2(num, den)


def chords_from_params_arr(R, phi, t):
    r = np.sin(R)
    return (2.0 * r * np.sin(t - phi), 2.0 * r * np.sin(t + phi), 2.0 * r * np.sin(2.0 * phi))


def sides_from_params_arr(R, phi, t):
    """Spherical sides ``(a, b, c)`` for chart coordinates (no validation)."""
    ca, cb, cc = chords_from_params_arr(R, phi, t)
    return (2.0 * np.arcsin(0.5 * ca), 2.0 * np.arcsin(0.5 * cb), 2.0 * np.arcsin(0.5 * cc))


# ---------------------------------------------------------------------------
# triangle types
# ---------------------------------------------------------------------------

def _check_sides(a, b, c, floor):
    for name, v in (("a", a), ("b", b), ("c", c)):
        if not math.isfinite(v) or v < floor:
            raise DegenerateTriangleError(f"side {name}={v!r} below degeneracy floor {floor}")
    if not (a < b + c and b < a + c and c < a + b):
        raise DegenerateTriangleError(f"sides ({a!r}, {b!r}, {c!r}) violate the triangle inequality")


@dataclass(frozen=True)
class SphericalTriangle:
    """Triangle on the unit sphere given by its three side lengths (radians).

    Construction rejects sides outside ``(0, pi)``, perimeters of ``2 pi`` or
    more and violations of the strict triangle inequality.  The circumradius
    is not required to be below ``pi/2`` here; :attr:`admissible` flags it.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        _check_sides(a, b, c, DEGENERACY_FLOOR)
        if max(a, b, c) >= math.pi:
            raise DegenerateTriangleError("spherical sides must be shorter than pi")
        if a + b + c >= 2.0 * math.pi:
            raise DegenerateTriangleError("spherical perimeter must be below 2 pi")
        if min(self.angles) < DEGENERACY_FLOOR:
            raise DegenerateTriangleError("an angle is below the degeneracy floor")

    @property
    def sides(self):
        return (self.a, self.b, self.c)

    @property
    def angles(self):
        return tuple(float(x) for x in spherical_angles_arr(self.a, self.b, self.c))

    @property
    def circumradius(self):
        return float(circumradius_arr(self.a, self.b, self.c))

    @property
    def admissible(self):
        """True when the circumradius is safely below pi/2."""
        return self.circumradius < 0.5 * math.pi - WIDE_TOL

    def scaled(self, s):
        return SphericalTriangle(s * self.a, s * self.b, s * self.c)

    @classmethod
    def equilateral(cls, side):
        return cls(side, side, side)


@dataclass(frozen=True)
class EuclideanTriangle:
    """Plane triangle given by three positive side lengths."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        _check_sides(a, b, c, DEGENERACY_FLOOR * min(1.0, max(a, b, c)))

    @property
    def sides(self):
        return (self.a, self.b, self.c)

    @property
    def angles(self):
        return euclidean_angles(self)

    @property
    def area(self):
        s = 0.5 * (self.a + self.b + self.c)
        return math.sqrt(s * (s - self.a) * (s - self.b) * (s - self.c))

    @property
    def circumradius(self):
        return self.a * self.b * self.c / (4.0 * self.area)

    def scaled(self, s):
        return EuclideanTriangle(s * self.a, s * self.b, s * self.c)


@dataclass(frozen=True)
class TriangleParams:
    """Chart coordinates ``(R, phi, t)`` of a spherical triangle with marked vertex.

    ``t`` may range over ``(phi, pi - phi)``; ``t`` and ``pi - t`` give
    congruent triangles and :meth:`canonical` folds ``t`` into ``(phi, pi/2]``.
    """

    R: float
    phi: float
    t: float

    def __post_init__(self):
        R, phi, t = float(self.R), float(self.phi), float(self.t)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "t", t)
        if not 0.0 < R < 0.5 * math.pi:
            raise DomainError(f"R={R!r} outside (0, pi/2)")
        if not 0.0 < phi < 0.5 * math.pi:
            raise DomainError(f"phi={phi!r} outside (0, pi/2)")
        if not phi < t < math.pi - phi:
            raise DomainError(f"t={t!r} outside (phi, pi - phi)")

    @property
    def chords(self):
        return tuple(float(x) for x in chords_from_params_arr(self.R, self.phi, self.t))

    @property
    def chord_angles(self):
        """Angles of the chord triangle opposite ``a, b, c``."""
        return (self.t - self.phi, math.pi - self.t - self.phi, 2.0 * self.phi)

    def canonical(self):
        if self.t <= 0.5 * math.pi:
            return self
        return TriangleParams(self.R, self.phi, math.pi - self.t)


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def spherical_angles(tri):
    """Angles ``(alpha, beta, gamma)`` opposite the sides of a spherical triangle."""
    return tri.angles


def spherical_angles_cosine_rule(tri, guard=CLAMP_GUARD):
    """Same angles from the side Law of Cosines, clamped; an independent route."""
    a, b, c = tri.sides
    out = []
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        cosx = (math.cos(x) - math.cos(y) * math.cos(z)) / (math.sin(y) * math.sin(z))
        out.append(math.acos(clamp_cos(cosx, guard)))
    return tuple(out)


def law_of_sines_ratios(tri):
    """The three ratios ``sin(side) / sin(opposite angle)``; equal for a valid triangle."""
    return tuple(math.sin(s) / math.sin(x) for s, x in zip(tri.sides, tri.angles))


def spherical_area(tri):
    """Area of a spherical triangle (L'Huilier's formula; equals the angle excess)."""
    a, b, c = tri.sides
    s = 0.5 * (a + b + c)
    q = (math.tan(0.5 * s) * math.tan(0.5 * (s - a)) * math.tan(0.5 * (s - b))
         * math.tan(0.5 * (s - c)))
    return 4.0 * math.atan(math.sqrt(q))


def circumscribed_radius(tri):
    """Spherical circumradius of ``tri``.  Check :attr:`SphericalTriangle.admissible`
    for the ``R < pi/2`` requirement; no exception is raised here."""
    return tri.circumradius


def _vertices_from_sides(tri):
    """Unit vectors ``A, B, C`` realising the sides of ``tri``."""
    a, b, c = tri.sides
    alpha = tri.angles[0]
    A = np.array([0.0, 0.0, 1.0])
    B = np.array([math.sin(c), 0.0, math.cos(c)])
    C = np.array([math.sin(b) * math.cos(alpha), math.sin(b) * math.sin(alpha), math.cos(b)])
    return A, B, C


def _cross(u, v):
    # np.cross has a large fixed overhead on small arrays
    u, v = np.asarray(u), np.asarray(v)
    return np.stack([u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
                     u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
                     u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]], axis=-1)


def _arcs(u, v):
    return np.arctan2(np.linalg.norm(_cross(u, v), axis=-1), np.sum(u * v, axis=-1))


def _farthest_on_arc(X, Q, S):
    """Largest distance from each row of ``X`` to the minor arc ``QS``.

    Along a great circle the distance from ``X`` has a single interior
    maximum, at the point opposite the projection of ``X``; otherwise the
    maximum is at an endpoint.
    """
    X = np.atleast_2d(X)
    best = np.maximum(_arcs(X, Q), _arcs(X, S))
    n = _cross(Q, S)
    n = n / np.linalg.norm(n)
    proj = X - np.outer(X @ n, n)
    m = np.linalg.norm(proj, axis=1)
    F = -proj / np.where(m > 1e-15, m, 1.0)[:, None]
    inside = (m > 1e-15) & (_cross(Q, F) @ n > 0) & (_cross(F, S) @ n > 0)
    return np.where(inside, np.maximum(best, _arcs(X, F)), best)


def spherical_diameter(tri, n_grid=257):
    """Largest distance between two points of the triangle.

    When every side is at most ``pi/2`` all vertex dot products are
    non-negative, which forces the diameter onto a pair of vertices: it is the
    longest side.  Longer sides can let an interior point of a side lie
    farther from the opposite vertex than any side is long, so in that case
    the boundary is searched (a grid over one side, the exact farthest point
    on the other, then a bounded scalar refinement).  The farthest distance
    is 1-Lipschitz along the gridded side, so the refinement is skipped when
    the grid step cannot hide a larger value.
    """
    longest = max(tri.sides)
    if longest <= 0.5 * math.pi:
        return longest
    V = _vertices_from_sides(tri)
    edges = [(V[1], V[2]), (V[2], V[0]), (V[0], V[1])]
    grid = np.linspace(0.0, 1.0, n_grid)
    h = grid[1]
    best = longest
    # the pair problem is symmetric, so each unordered pair of sides is enough
    for i, j in ((0, 1), (0, 2), (1, 2)):
        Q, S = edges[i]
        Q2, S2 = edges[j]
        pts = np.outer(1.0 - grid, Q) + np.outer(grid, S)
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        vals = _farthest_on_arc(pts, Q2, S2)
        k = int(np.argmax(vals))
        best = max(best, float(vals[k]))
        step = float(np.max(_arcs(pts[:-1], pts[1:])))
        if k in (0, n_grid - 1) or vals[k] + step <= best:
            continue

        def neg(s, Q=Q, S=S, Q2=Q2, S2=S2):
            x = (1.0 - s) * Q + s * S
            return -float(_farthest_on_arc(x / np.linalg.norm(x), Q2, S2)[0])

        res = minimize_scalar(neg, bounds=(grid[k] - h, grid[k] + h), method="bounded",
                              options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best


def sampled_diameter(p, n_pairs, rng):
    """Largest great-circle distance over ``n_pairs`` random point pairs of ``embed(p)``."""
    emb = embed(p)
    x = emb.sample_points(n_pairs, rng)
    y = emb.sample_points(n_pairs, rng)
    cross = np.linalg.norm(np.cross(x, y), axis=1)
    dots = np.einsum("ij,ij->i", x, y)
    return float(np.max(np.arctan2(cross, dots)))


def triangle_from_params(p, floor=DEGENERACY_FLOOR):
    """The spherical triangle with chart coordinates ``p``."""
    chords = p.chords
    if min(chords) < floor:
        raise DegenerateTriangleError(f"chord {min(chords)!r} below floor {floor}")
    return SphericalTriangle(*(chd_inv(min(x, 2.0)) for x in chords))


def params_from_triangle(tri):
    """Chart coordinates of ``tri`` with the vertex opposite side ``c`` marked."""
    alpha_p, _, gamma_p = euclidean_angles_arr(*(chd(s) for s in tri.sides))
    phi = 0.5 * float(gamma_p)
    return TriangleParams(tri.circumradius, phi, float(alpha_p) + phi)


def euclidean_angles(tri, guard=CLAMP_GUARD):
    """Angles of a plane triangle.

    Raises :class:`DegenerateTriangleError` if the Law of Cosines would need
    a cosine beyond ``1 + guard`` (near-collinear input).
    """
    a, b, c = tri.sides
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        clamp_cos((y * y + z * z - x * x) / (2.0 * y * z), guard)
    return tuple(float(v) for v in euclidean_angles_arr(a, b, c))


def half_angle_side(a, b, gamma):
    """Third side from two sides and their included angle, ``sqrt((a+b)^2 - 4ab cos^2(gamma/2))``."""
    if a <= 0 or b <= 0:
        raise DomainError("sides must be positive")
    if not 0.0 < gamma <= math.pi:
        raise DomainError("gamma must lie in (0, pi]")
    ch = math.cos(0.5 * gamma)
    return math.sqrt(max((a + b) ** 2 - 4.0 * a * b * ch * ch, 0.0))


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict
    tol: float

    @property
    def failed(self):
        return [k for k, v in self.residuals.items() if not abs(v) < self.tol]

    @property
    def ok(self):
        return not self.failed


def napier_delambre_mollweide_check(tri, tol=1e-10):
    """Residuals of Napier's analogy, Delambre's formula and the angle cosine law.

    Each identity is written as ``lhs - rhs``; Napier's analogy in
    cross-multiplied form so that isosceles input is not a 0/0.
    """
    a, b, c = tri.sides
    al, be, ga = tri.angles
    napier = (math.tan(0.5 * (c - b)) * math.sin(0.5 * (ga + be))
              - math.tan(0.5 * a) * math.sin(0.5 * (ga - be)))
    delambre = (math.cos(0.5 * ga) * math.cos(0.5 * (a - b))
                - math.cos(0.5 * c) * math.sin(0.5 * (al + be)))
    # the side in the angle cosine law is the one opposite gamma
    cos_angles = (math.cos(ga) - (-math.cos(al) * math.cos(be)
                                  + math.sin(al) * math.sin(be) * math.cos(c)))
    return IdentityReport({"napier": napier, "delambre": delambre,
                           "cosines_for_angles": cos_angles}, tol)


# ---------------------------------------------------------------------------
# 3D embedding oracle
# ---------------------------------------------------------------------------

def _unit(v):
    return v / np.linalg.norm(v)


@dataclass(frozen=True, eq=False)
class EmbeddedTriangle:
    """Vertices ``vA, vB, vC`` on the unit sphere; side ``a`` joins ``vB`` and ``vC``."""

    vA: np.ndarray
    vB: np.ndarray
    vC: np.ndarray

    def __post_init__(self):
        for v in self.vertices:
            if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
                raise DomainError("embedded vertices must be unit vectors")

    @property
    def vertices(self):
        return (self.vA, self.vB, self.vC)

    @staticmethod
    def arc(u, v):
        return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v))))

    def sides(self):
        return (self.arc(self.vB, self.vC), self.arc(self.vC, self.vA), self.arc(self.vA, self.vB))

    @staticmethod
    def vertex_angle(v, w1, w2):
        """Angle at ``v`` between the great-circle initial velocities towards ``w1``, ``w2``."""
        t1 = w1 - np.dot(w1, v) * v
        t2 = w2 - np.dot(w2, v) * v
        return float(math.atan2(np.linalg.norm(np.cross(t1, t2)), float(np.dot(t1, t2))))

    def angles(self):
        A, B, C = self.vertices
        return (self.vertex_angle(A, B, C), self.vertex_angle(B, C, A), self.vertex_angle(C, A, B))

    def normal(self):
        return _unit(np.cross(self.vB - self.vA, self.vC - self.vA))

    def plane_distance(self):
        return abs(float(np.dot(self.normal(), self.vA)))

    def circumradius(self):
        n = np.cross(self.vB - self.vA, self.vC - self.vA)
        return float(math.atan2(np.linalg.norm(np.cross(n, self.vA)), abs(float(np.dot(n, self.vA)))))

    def center(self):
        """Spherical center of the circumscribed cap."""
        n = self.normal()
        return n if np.dot(n, self.vA) > 0 else -n

    def sample_points(self, n, rng):
        """``n`` points of the spherical triangle (centrally projected plane samples)."""
        w = rng.dirichlet(np.ones(3), size=n)
        pts = w @ np.vstack(self.vertices)
        return pts / np.linalg.norm(pts, axis=1)[:, None]


def embed(p):
    """Place the chart triangle ``p`` on the unit sphere.

    The circumscribed circle is the circle of radius ``sin R`` in the plane
    ``z = cos R``; ``C`` sits at circle angle 0, ``B`` at ``2(t - phi)`` and
    ``A`` at ``2(t + phi)``.
    """
    s, c = math.sin(p.R), math.cos(p.R)

    def at(theta):
        return np.array([s * math.cos(theta), s * math.sin(theta), c])

    return EmbeddedTriangle(at(2.0 * (p.t + p.phi)), at(2.0 * (p.t - p.phi)), at(0.0))
