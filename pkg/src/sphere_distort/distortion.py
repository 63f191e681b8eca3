"""Side-distortion families and the angle distortion of transformed triangles.

A side-distortion function ``F`` turns a triangle with sides ``a, b, c`` into
the Euclidean triangle ``F·Δ`` with sides ``F(a), F(b), F(c)``.  The angle
distortion ``D(F, Δ)`` is the smallest of the three ratios of a transformed
angle to the corresponding original angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DegenerateTriangleError, DomainError, InvariantError
from .spherical_trig import (
    EuclideanTriangle,
    SphericalTriangle,
    chd_inv,
    euclidean_angles_arr,
    spherical_angles_arr,
    triangle_from_params,
    TriangleParams,
)

_SPHERICAL_TAGS = ("chd", "finf", "fk", "fkstar")
_PLANAR_TAGS = ("gk", "gkstar", "ginf", "identity")
_NEEDS_K = ("fk", "fkstar", "gk", "gkstar")

TRIANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class DistortionFamily:
    """One member of the side-distortion families.

    ``tag`` is one of ``chd, finf, fk, fkstar`` (arguments are spherical arc
    lengths in ``[0, pi]``) or ``gk, gkstar, ginf, identity`` (arguments in
    ``[0, inf)``).  ``k`` is required for the four cut-off families.
    """

    tag: str
    k: float | None = None

    def __post_init__(self):
        if self.tag not in _SPHERICAL_TAGS + _PLANAR_TAGS:
            raise ValueError(f"unknown distortion family {self.tag!r}")
        if self.tag in _NEEDS_K:
            if self.k is None or not (self.k > 0 and math.isfinite(self.k)):
                raise ValueError(f"family {self.tag} needs a positive finite k")
            object.__setattr__(self, "k", float(self.k))
        elif self.k is not None:
            raise ValueError(f"family {self.tag} takes no k")

    # every member of these families is increasing, concave, F(0)=0
    monotone = True
    concave = True
    subadditive = True

    @property
    def spherical(self):
        return self.tag in _SPHERICAL_TAGS

    @property
    def domain(self):
        return (0.0, math.pi) if self.spherical else (0.0, math.inf)

    @property
    def derivative_at_zero(self):
        if self.tag in ("finf", "ginf"):
            return math.inf
        if self.tag in ("chd", "identity"):
            return 1.0
        return self.k

    @property
    def name(self):
        label = {"chd": "chd", "finf": "F_inf", "fk": "F_k", "fkstar": "F_k*",
                 "gk": "G_k", "gkstar": "G_k*", "ginf": "G_inf", "identity": "id"}[self.tag]
        return f"{label}(k={self.k:g})" if self.k is not None else label

    @property
    def threshold(self):
        """Distortion bound the family is certified against (1/3 for the cut-at-1 families)."""
        return 1.0 / 3.0 if self.tag in ("fkstar", "gkstar") else 0.5

    def chord_crossover(self):
        """Argument of the inner function (chord for F families) where the min switches branch."""
        if self.tag in ("fk", "gk"):
            return 1.0 / self.k ** 2
        if self.tag in ("fkstar", "gkstar"):
            return 1.0 / self.k
        return None

    def crossover(self):
        """Side length at which the two branches of the min meet, or None."""
        x = self.chord_crossover()
        if x is None:
            return None
        if self.spherical:
            return chd_inv(x) if x <= 2.0 else None
        return x

    def inner(self, x):
        """Apply the planar part to a chord (F families) or to a length (G families)."""
        x = np.asarray(x, dtype=float)
        tag, k = self.tag, self.k
        if tag in ("chd", "identity"):
            return x
        if tag in ("finf", "ginf"):
            return np.sqrt(x)
        if tag in ("fk", "gk"):
            return np.minimum(k * x, np.sqrt(x))
        return np.minimum(k * x, 1.0)

    def subadditivity_gap(self, x, y):
        """``inner(x) + inner(y) - inner(x + y)`` without cancellation (always >= 0)."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        x, y = np.minimum(x, y), np.maximum(x, y)
        z = x + y
        tag, k = self.tag, self.k
        if tag in ("chd", "identity"):
            return np.zeros_like(z)
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        root_gap = 2.0 * sx * sy / (sx + sy + sz)
        if tag in ("finf", "ginf"):
            return root_gap
        if tag in ("fk", "gk"):
            xs = 1.0 / (k * k)
            with np.errstate(invalid="ignore", divide="ignore"):
                mixed = x * (k - 1.0 / (sz + sy))
                below = sz * (k * k * z - 1.0) / (k * sz + 1.0)
            return np.where(z <= xs, 0.0,
                            np.where(x >= xs, root_gap, np.where(y >= xs, mixed, below)))
        xs = 1.0 / k
        return np.where(z <= xs, 0.0,
                        np.where(x >= xs, 1.0, np.where(y >= xs, k * x, k * z - 1.0)))

    def drop(self, z, w, e):
        """``inner(z) - inner(w)`` for ``w = z - e`` with ``0 <= e <= z``, without cancellation."""
        z, w, e = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z, w, e)))
        tag, k = self.tag, self.k
        if tag in ("chd", "identity"):
            return e.copy()
        with np.errstate(invalid="ignore", divide="ignore"):
            root = e / (np.sqrt(z) + np.sqrt(np.maximum(w, 0.0)))
        if tag in ("finf", "ginf"):
            return root
        if tag in ("fk", "gk"):
            xs = 1.0 / (k * k)
            rs = 1.0 / k
            straddle = (z - xs) / (np.sqrt(z) + rs) + k * (xs - w)
            return np.where(w >= xs, root, np.where(z <= xs, k * e, straddle))
        xs = 1.0 / k
        return np.where(w >= xs, 0.0, np.where(z <= xs, k * e, k * (xs - w)))

    def eval_arr(self, t):
        """Elementwise evaluation without domain checks."""
        t = np.asarray(t, dtype=float)
        if self.spherical:
            return self.inner(2.0 * np.sin(0.5 * t))
        return self.inner(t)

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(~(arr >= lo)) or np.any(arr > hi):
            raise DomainError(f"{self.name} evaluated outside [{lo}, {hi}]")
        out = self.eval_arr(arr)
        return float(out) if out.ndim == 0 else out


def chd_family():
    return DistortionFamily("chd")


def f_inf():
    return DistortionFamily("finf")


def f_k(k):
    return DistortionFamily("fk", k)


def f_k_star(k):
    return DistortionFamily("fkstar", k)


def g_k(k):
    return DistortionFamily("gk", k)


def g_k_star(k):
    return DistortionFamily("gkstar", k)


def g_1():
    return DistortionFamily("gk", 1.0)


def g_1_star():
    return DistortionFamily("gkstar", 1.0)


def g_inf():
    return DistortionFamily("ginf")


def identity():
    return DistortionFamily("identity")


def family_from_name(name, k=None):
    """Parse a command-line family selector such as ``finf`` or ``fk``."""
    aliases = {"g1": ("gk", 1.0), "g1star": ("gkstar", 1.0), "id": ("identity", None)}
    tag, default_k = aliases.get(name, (name, None))
    if tag in _NEEDS_K:
        return DistortionFamily(tag, default_k if k is None else k)
    return DistortionFamily(tag)


# ---------------------------------------------------------------------------
# transforms and distortion
# ---------------------------------------------------------------------------

def _input_angles(tri):
    if isinstance(tri, SphericalTriangle):
        return tri.angles
    return tuple(float(x) for x in euclidean_angles_arr(*tri.sides))


def transform(F, tri):
    """The Euclidean triangle with sides ``F(a), F(b), F(c)``."""
    fa, fb, fc = (float(F(s)) for s in tri.sides)
    worst = max(fa - fb - fc, fb - fa - fc, fc - fa - fb)
    if worst > TRIANGLE_SLACK * max(fa, fb, fc):
        raise InvariantError(f"{F.name} broke the triangle inequality on {tri.sides}")
    try:
        return EuclideanTriangle(fa, fb, fc)
    except DegenerateTriangleError as exc:
        raise DegenerateTriangleError(f"{F.name}·Δ is degenerate: {exc}") from exc


@dataclass(frozen=True)
class DistortionReport:
    family: DistortionFamily
    source: object
    transformed: EuclideanTriangle
    angles: tuple
    transformed_angles: tuple
    ratios: tuple = field(init=False)
    D: float = field(init=False)

    def __post_init__(self):
        ratios = tuple(t / s for t, s in zip(self.transformed_angles, self.angles))
        object.__setattr__(self, "ratios", ratios)
        object.__setattr__(self, "D", min(ratios))

    @property
    def order_preserved(self):
        """Larger original angles stay opposite larger transformed angles."""
        src = np.argsort(self.angles, kind="stable")
        return bool(np.all(np.diff(np.asarray(self.transformed_angles)[src]) >= -1e-12))


def angle_distortion(F, tri):
    """Report ``D(F, tri)`` together with the per-vertex ratios."""
    if isinstance(tri, SphericalTriangle) and not tri.admissible:
        raise DomainError("spherical triangle must have circumradius below pi/2")
    out = transform(F, tri)
    return DistortionReport(F, tri, out, _input_angles(tri),
                            tuple(float(x) for x in euclidean_angles_arr(*out.sides)))


def distortion_components_arr(F, a, b, c, spherical=True):
    """Vectorised ``(angles, transformed_angles, D)`` for arrays of sides."""
    if spherical:
        ang = spherical_angles_arr(a, b, c)
    else:
        ang = euclidean_angles_arr(a, b, c)
    tang = euclidean_angles_arr(F.eval_arr(a), F.eval_arr(b), F.eval_arr(c))
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.minimum(np.minimum(tang[0] / ang[0], tang[1] / ang[1]), tang[2] / ang[2])
    return ang, tang, D


def distortion_arr(F, a, b, c, spherical=True):
    return distortion_components_arr(F, a, b, c, spherical)[2]


def _inner_mp(F, x):
    tag, k = F.tag, F.k
    if tag in ("chd", "identity"):
        return x
    if tag in ("finf", "ginf"):
        return mpmath.sqrt(x)
    if tag in ("fk", "gk"):
        return min(k * x, mpmath.sqrt(x))
    return min(k * x, mpmath.mpf(1))


def distortion_at_params(F, R, phi, t, dps=50):
    """``D(F, Δ)`` for the chart point ``(R, phi, t)`` in extended precision.

    Sides come from the chords, angles from the cosine rules in both
    geometries.  Float inputs are taken as exact, so the result does not
    depend on how nearly degenerate the triangle is.
    """
    if not F.spherical:
        raise DomainError("chart points describe spherical triangles")
    with mpmath.workdps(dps):
        R, phi, t = (mpmath.mpf(float(v)) for v in (R, phi, t))
        sR = mpmath.sin(R)
        chords = [2 * sR * mpmath.sin(x) for x in (t - phi, mpmath.pi - t - phi, 2 * phi)]
        sides = [2 * mpmath.asin(ch / 2) for ch in chords]
        img = [_inner_mp(F, ch) for ch in chords]
        D = None
        for i in range(3):
            a, b, c = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
            A, B, C = img[i], img[(i + 1) % 3], img[(i + 2) % 3]
            ang = mpmath.acos((mpmath.cos(a) - mpmath.cos(b) * mpmath.cos(c))
                              / (mpmath.sin(b) * mpmath.sin(c)))
            tang = mpmath.acos((B * B + C * C - A * A) / (2 * B * C))
            r = tang / ang
            D = r if D is None else min(D, r)
        return float(D)


# ---------------------------------------------------------------------------
# planar conditions and the isosceles closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    worst: float
    witness: tuple | None


def g_conditions_check(G, grid, rtol=1e-12):
    """Check subadditivity, superadditivity of ``G**2`` and ``G(x^2) = G(x)^2`` on ``grid``.

    Returns a dict keyed ``subadditive``, ``square_superadditive`` and
    ``square_commuting``.  ``worst`` is the largest violation (positive means
    the condition failed beyond ``rtol``) and ``witness`` the ``(x, y)`` or
    ``(x,)`` attaining it.
    """
    if G.spherical:
        raise DomainError("conditions apply to the planar families")
    x = np.asarray(grid, dtype=float)
    X, Y = np.meshgrid(x, x, indexing="ij")
    g = G.eval_arr
    sub = g(X + Y) - (g(X) + g(Y))
    sup = (g(X) ** 2 + g(Y) ** 2) - g(X + Y) ** 2
    com = np.abs(g(x ** 2) - g(x) ** 2)
    out = {}
    for key, viol, scale, args in (
        ("subadditive", sub, g(X) + g(Y), (X, Y)),
        ("square_superadditive", sup, g(X + Y) ** 2, (X, Y)),
        ("square_commuting", com, g(x) ** 2, (x,)),
    ):
        rel = viol - rtol * np.maximum(scale, 1.0)
        i = np.unravel_index(int(np.argmax(rel)), rel.shape)
        worst = float(viol[i])
        passed = bool(rel[i] <= 0)
        out[key] = ConditionResult(passed, worst, None if passed else tuple(float(a[i]) for a in args))
    return out


def _isosceles_half_chord(R, phi):
    """``sin(a/2)`` of the isosceles triangle at ``t = pi/2``; equals ``sin R cos phi``."""
    if not (0.0 < R < 0.5 * math.pi and 0.0 < phi < 0.5 * math.pi):
        raise DomainError("need 0 < R < pi/2 and 0 < phi < pi/2")
    a = chd_inv(min(2.0 * math.sin(R) * math.cos(phi), 2.0))
    return a, math.sin(0.5 * a)


def isosceles_gamma_tilde(R, phi):
    """``cos`` of the apex angle of ``F_inf·Δ`` for the isosceles chart triangle ``(R, phi, pi/2)``."""
    _, s = _isosceles_half_chord(R, phi)
    ratio = s / math.sin(R)
    return 1.0 - math.sqrt(max(1.0 - ratio * ratio, 0.0))


def isosceles_base_identity_residual(R, phi):
    """``sin(c/2) - 2 sin(a/2) sqrt(1 - sin^2(a/2)/sin^2 R)`` on the isosceles triangle."""
    a, s = _isosceles_half_chord(R, phi)
    tri = triangle_from_params(TriangleParams(R, phi, 0.5 * math.pi))
    ratio = s / math.sin(R)
    return math.sin(0.5 * tri.c) - 2.0 * s * math.sqrt(max(1.0 - ratio * ratio, 0.0))


def isosceles_gamma_half(R, phi):
    """``cos(gamma/2) = tan(a/2) / tan R`` for the isosceles chart triangle."""
    a, _ = _isosceles_half_chord(R, phi)
    return math.tan(0.5 * a) / math.tan(R)


def quadratic_margin(T, t):
    return t * t - T * t + 2.0


def lemma_3_4_margin(R, phi):
    """``t^2 - T t + 2`` with ``t = tan(a/2)``, ``T = tan R``.

    Positive exactly when the isosceles triangle's apex angle more than
    halves under ``F_inf``; positive for every ``phi`` once ``tan R < sqrt 8``.
    """
    a, _ = _isosceles_half_chord(R, phi)
    return quadratic_margin(math.tan(R), math.tan(0.5 * a))
