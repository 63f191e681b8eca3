"""Triangle complexes, cone angles and the hyperbolic cone density.

A complex is stored combinatorially: a list of triangles given by side
lengths together with side gluings.  Side ``i`` of a triangle is opposite
corner ``i`` and runs from corner ``(i+1) % 3`` to corner ``(i+2) % 3``.
A ``reversed`` gluing identifies the start of one side with the end of the
other (the orientable convention); ``preserved`` matches start with start.

Fixture grammar (one record per line, ``#`` starts a comment)::

    geometry spherical|euclidean
    triangle <id> <a> <b> <c>
    glue <id>:<side> <id>:<side> [reversed|preserved]
    vertex <id>:<corner> <id>:<corner> ...

``vertex`` records are optional; when present each must list exactly one
vertex class of the gluing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .distortion import transform
from .errors import DomainError, FixtureSyntaxError, GluingError, InvariantError
from .spherical_trig import (
    B0,
    TETRA_SIDE,
    EuclideanTriangle,
    SphericalTriangle,
    chd_inv,
    spherical_area,
)

GLUE_TOL = 1e-9
ANGLE_TOL = 1e-10
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Gluing:
    t1: int
    s1: int
    t2: int
    s2: int
    reversed: bool = True

    def corner_pairs(self):
        """The two corner identifications made by this gluing."""
        p1, q1 = (self.s1 + 1) % 3, (self.s1 + 2) % 3
        p2, q2 = (self.s2 + 1) % 3, (self.s2 + 2) % 3
        if self.reversed:
            return ((self.t1, p1), (self.t2, q2)), ((self.t1, q1), (self.t2, p2))
        return ((self.t1, p1), (self.t2, p2)), ((self.t1, q1), (self.t2, q2))


@dataclass(frozen=True)
class Vertex:
    corners: tuple
    interior: bool


@dataclass(eq=False)
class TriangleComplex:
    """Triangles glued along sides of equal length.

    ``declared_vertices`` optionally lists corner classes that must agree
    with the classes generated by the gluings.
    """

    geometry: str
    triangles: list
    gluings: list
    declared_vertices: list = field(default_factory=list)
    vertices: tuple = field(init=False)

    def __post_init__(self):
        if self.geometry not in ("spherical", "euclidean"):
            raise DomainError(f"unknown geometry {self.geometry!r}")
        kind = SphericalTriangle if self.geometry == "spherical" else EuclideanTriangle
        for tri in self.triangles:
            if not isinstance(tri, kind):
                raise DomainError(f"{self.geometry} complex holds a {type(tri).__name__}")
        self._partner = {}
        for g in self.gluings:
            for t, s in ((g.t1, g.s1), (g.t2, g.s2)):
                if not (0 <= t < len(self.triangles) and 0 <= s < 3):
                    raise GluingError(f"gluing {g} refers to a missing side")
                if (t, s) in self._partner:
                    raise GluingError(f"side {t}:{s} glued twice")
            if (g.t1, g.s1) == (g.t2, g.s2):
                raise GluingError(f"side {g.t1}:{g.s1} glued to itself")
            self._partner[(g.t1, g.s1)] = g
            self._partner[(g.t2, g.s2)] = g
            l1 = self.triangles[g.t1].sides[g.s1]
            l2 = self.triangles[g.t2].sides[g.s2]
            if abs(l1 - l2) > GLUE_TOL * max(1.0, l1):
                raise GluingError(f"sides {g.t1}:{g.s1} and {g.t2}:{g.s2} differ in length ({l1!r} vs {l2!r})")
        self.vertices = self._vertex_classes()
        self._check_declared()

    def _vertex_classes(self):
        ds = DisjointSet((t, c) for t in range(len(self.triangles)) for c in range(3))
        for g in self.gluings:
            for u, v in g.corner_pairs():
                ds.merge(u, v)
        out = []
        for subset in sorted((sorted(s) for s in ds.subsets()), key=lambda s: s[0]):
            interior = all((t, s) in self._partner for t, c in subset
                           for s in ((c + 1) % 3, (c + 2) % 3))
            out.append(Vertex(tuple(subset), interior))
        return tuple(out)

    def _check_declared(self):
        classes = {frozenset(v.corners) for v in self.vertices}
        for decl in self.declared_vertices:
            if frozenset(decl) not in classes:
                raise GluingError(f"declared vertex {sorted(decl)} is not a class of the gluing")

    # -- combinatorics --------------------------------------------------

    @property
    def closed(self):
        return len(self._partner) == 3 * len(self.triangles)

    @property
    def V(self):
        return len(self.vertices)

    @property
    def E(self):
        return 3 * len(self.triangles) - len(self.gluings)

    @property
    def F(self):
        return len(self.triangles)

    @property
    def euler_characteristic(self):
        return self.V - self.E + self.F

    def vertex_of(self, corner):
        for i, v in enumerate(self.vertices):
            if corner in v.corners:
                return i
        raise KeyError(corner)

    def _across(self, t, c, s):
        """Corner reached from corner ``(t, c)`` by crossing its side ``s``."""
        g = self._partner.get((t, s))
        if g is None:
            return None
        for u, v in g.corner_pairs():
            if u == (t, c):
                return v
            if v == (t, c):
                return u
        raise InvariantError("gluing does not touch the corner it was reached from")

    def link_walk(self, vertex):
        """Corners of an interior vertex in cyclic order, starting from its first corner."""
        v = self.vertices[vertex]
        if not v.interior:
            raise DomainError("link walk needs an interior vertex")
        start = v.corners[0]
        t, c = start
        s = (c + 1) % 3
        order = [start]
        for _ in range(3 * len(self.triangles)):
            g = self._partner[(t, s)]
            s_in = g.s2 if (g.t1, g.s1) == (t, s) else g.s1
            t, c = self._across(t, c, s)
            if (t, c) == start:
                return tuple(order)
            order.append((t, c))
            # leave through the corner's other side
            s = (c + 1) % 3 if s_in == (c + 2) % 3 else (c + 2) % 3
        raise InvariantError("link walk did not close")

    # -- geometry --------------------------------------------------------

    def corner_angles(self):
        return [tri.angles for tri in self.triangles]

    def total_angle(self, vertex):
        ang = self.corner_angles()
        return math.fsum(ang[t][c] for t, c in self.vertices[vertex].corners)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeAngleReport:
    totals: tuple
    interior: tuple
    transformed: tuple | None = None

    @property
    def excess(self):
        return tuple(x - TWO_PI for x in self.totals)

    @property
    def transformed_excess(self):
        if self.transformed is None:
            return None
        return tuple(x - TWO_PI for x in self.transformed)

    def min_excess(self, transformed=False):
        vals = self.transformed_excess if transformed else self.excess
        inner = [e for e, i in zip(vals, self.interior) if i]
        return min(inner) if inner else None

    @property
    def boundary_vertices(self):
        return tuple(i for i, flag in enumerate(self.interior) if not flag)


def total_angles(C: TriangleComplex):
    totals = tuple(C.total_angle(i) for i in range(C.V))
    return ConeAngleReport(totals, tuple(v.interior for v in C.vertices))


@dataclass(frozen=True)
class HypothesisCheck:
    passed: bool
    radius_ok: bool
    angle_ok: bool
    radius_witness: tuple | None   # (triangle index, circumradius)
    angle_witness: tuple | None    # (vertex index, total angle)
    reason: str = ""


def check_theorem_1_4_hypotheses(C: TriangleComplex, eps, variant="i"):
    """Radius cap and minimum cone angle for the two covering variants.

    Variant ``i`` asks for ``R <= b0 - eps`` and total angles at least
    ``4 pi``; variant ``ii`` for ``R <= pi/2 - eps`` and at least ``6 pi``.
    The first violating triangle and vertex are returned as witnesses.
    """
    if C.geometry != "spherical":
        raise DomainError("hypotheses concern spherical complexes")
    if not eps > 0:
        raise DomainError("eps must be positive")
    if variant == "i":
        cap, need = B0 - eps, 4.0 * math.pi
    elif variant == "ii":
        cap, need = 0.5 * math.pi - eps, 6.0 * math.pi
    else:
        raise DomainError(f"variant must be 'i' or 'ii', got {variant!r}")
    r_wit = None
    for i, tri in enumerate(C.triangles):
        R = tri.circumradius
        if R > cap:
            r_wit = (i, R)
            break
    a_wit = None
    for i in range(C.V):
        theta = C.total_angle(i)
        if theta < need - ANGLE_TOL:
            a_wit = (i, theta)
            break
    reason = "" if C.closed else "complex has boundary"
    ok = r_wit is None and a_wit is None and C.closed
    return HypothesisCheck(ok, r_wit is None, a_wit is None, r_wit, a_wit, reason)


def transform_complex(F, C: TriangleComplex):
    """Apply ``F`` to every side; same gluing graph, flat triangles.

    Returns ``(flat_complex, report)`` where the report carries original
    and transformed total angles.
    """
    if C.geometry != "spherical" and F.spherical:
        raise DomainError(f"{F.name} acts on spherical lengths")
    flat = [transform(F, tri) for tri in C.triangles]
    for g in C.gluings:
        l1, l2 = flat[g.t1].sides[g.s1], flat[g.t2].sides[g.s2]
        if abs(l1 - l2) > GLUE_TOL * max(1.0, l1):
            raise InvariantError("transformed gluing lengths disagree")
    out = TriangleComplex("euclidean", flat, list(C.gluings))
    if [v.corners for v in out.vertices] != [v.corners for v in C.vertices]:
        raise InvariantError("transform changed the vertex classes")
    before = total_angles(C)
    after = total_angles(out)
    return out, ConeAngleReport(before.totals, before.interior, after.totals)


@dataclass(frozen=True)
class GaussBonnet:
    face_term: float
    vertex_term: float
    chi: int

    @property
    def residual(self):
        return self.face_term + self.vertex_term - TWO_PI * self.chi


def discrete_gauss_bonnet(C: TriangleComplex):
    """Face curvature (spherical area, zero if flat) plus vertex defects versus ``2 pi chi``."""
    if not C.closed:
        raise DomainError("Gauss-Bonnet needs a closed complex")
    if C.geometry == "spherical":
        face = math.fsum(spherical_area(t) for t in C.triangles)
    else:
        face = 0.0
    vert = math.fsum(TWO_PI - C.total_angle(i) for i in range(C.V))
    return GaussBonnet(face, vert, C.euler_characteristic)


# ---------------------------------------------------------------------------
# builtin complexes
# ---------------------------------------------------------------------------

def _glue_by_keys(side_keys):
    """Pair sides sharing an edge key.

    ``side_keys[t][s] = (key, sign)`` where ``sign`` is +1 when side ``s``
    runs along the key's direction and -1 otherwise.
    """
    seen = {}
    for t, sides in enumerate(side_keys):
        for s, (key, sign) in enumerate(sides):
            seen.setdefault(key, []).append((t, s, sign))
    gluings = []
    for key in sorted(seen, key=repr):
        occ = seen[key]
        if len(occ) != 2:
            raise GluingError(f"edge {key!r} has {len(occ)} sides")
        (t1, s1, g1), (t2, s2, g2) = occ
        gluings.append(Gluing(t1, s1, t2, s2, reversed=(g1 != g2)))
    return gluings


def _faces_to_keys(faces):
    """Edge keys for faces listed by vertex labels (no multiple edges)."""
    out = []
    for f in faces:
        sides = []
        for s in range(3):
            u, v = f[(s + 1) % 3], f[(s + 2) % 3]
            sides.append(((min(u, v), max(u, v)), 1 if u < v else -1))
        out.append(sides)
    return out


def _torus_keys():
    """Side keys of the triangulated torus ``Z^2 / 2 Z^2`` (two triangles per square)."""
    def mod(p):
        return (p[0] % 2, p[1] % 2)

    keys, labels = [], []
    for i, j in itertools.product(range(2), repeat=2):
        P, Q, S, U = (i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)
        keys.append([((mod(Q), "d"), 1), ((mod(P), "e2"), -1), ((mod(P), "e1"), 1)])
        labels.append((mod(P), mod(Q), mod(S)))
        keys.append([((mod(S), "e1"), -1), ((mod(Q), "d"), -1), ((mod(Q), "e2"), 1)])
        labels.append((mod(Q), mod(U), mod(S)))
    return keys, labels


def weierstrass_complex():
    """Eight equilateral triangles with angles ``2 pi/3`` forming a torus.

    The pullback of the tetrahedral triangulation of the sphere under a
    degree-2 elliptic function: ``V = 4``, ``E = 12``, ``F = 8`` and every
    vertex has total angle ``4 pi``.
    """
    keys, _ = _torus_keys()
    tri = SphericalTriangle.equilateral(TETRA_SIDE)
    return TriangleComplex("spherical", [tri] * len(keys), _glue_by_keys(keys))


def torus_vertex_labels():
    """Lattice point (mod 2) at each corner of :func:`weierstrass_complex`."""
    return _torus_keys()[1]


def tetrahedron_complex():
    """Radial projection of a regular tetrahedron: four faces, vertex angles ``2 pi``."""
    faces = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    tri = SphericalTriangle.equilateral(TETRA_SIDE)
    return TriangleComplex("spherical", [tri] * 4, _glue_by_keys(_faces_to_keys(faces)))


def double_triangle(tri):
    """Two copies of ``tri`` glued along all three sides (a pillow).

    The second copy is the mirror image, so corner ``i`` meets corner ``i``.
    """
    geom = "spherical" if isinstance(tri, SphericalTriangle) else "euclidean"
    return TriangleComplex(geom, [tri, tri], [Gluing(0, s, 1, s, reversed=False) for s in range(3)])


def single_triangle(tri):
    geom = "spherical" if isinstance(tri, SphericalTriangle) else "euclidean"
    return TriangleComplex(geom, [tri], [])


def _odd_cocycle(keys, labels):
    """An edge 2-colouring whose sum around every vertex is odd (brute force)."""
    edges = sorted({k for sides in keys for k, _ in sides}, key=repr)
    incident = {}
    for sides, lab in zip(keys, labels):
        for s, (k, _) in enumerate(sides):
            for corner in ((s + 1) % 3, (s + 2) % 3):
                incident.setdefault(lab[corner], set()).add(k)
    for bits in itertools.product((0, 1), repeat=len(edges)):
        c = dict(zip(edges, bits))
        if all(sum(c[e] for e in es) % 2 == 1 for es in incident.values()):
            return c
    raise GluingError("no odd cocycle")


def branched_double_cover(R):
    """Double cover of the torus complex branched over its four vertices.

    Each sheet uses equilateral spherical triangles of circumradius ``R``.
    The cover has four vertices of twelve corners each, 16 faces, 24 edges
    and Euler characteristic -4.
    """
    if not 0.0 < R < 0.5 * math.pi:
        raise DomainError("R must lie in (0, pi/2)")
    keys, labels = _torus_keys()
    cocycle = _odd_cocycle(keys, labels)
    # a side running along its edge keeps its sheet, the opposite one switches by the cocycle
    lifted = []
    for sheet in (0, 1):
        for sides in keys:
            lifted.append([((k, sheet if sg > 0 else sheet ^ cocycle[k]), sg) for k, sg in sides])
    tri = SphericalTriangle.equilateral(chd_inv(math.sqrt(3.0) * math.sin(R)))
    return TriangleComplex("spherical", [tri] * len(lifted), _glue_by_keys(lifted))


def shrunken_fixture():
    """Branched double cover built from triangles of circumradius ``b0 - 0.1``."""
    return branched_double_cover(B0 - 0.1)


# ---------------------------------------------------------------------------
# fixture text format
# ---------------------------------------------------------------------------

def _parse_ref(tok, ids, lineno, what):
    name, sep, idx = tok.rpartition(":")
    if not sep or name not in ids:
        raise FixtureSyntaxError(lineno, f"bad {what} reference {tok!r}")
    try:
        i = int(idx)
    except ValueError:
        raise FixtureSyntaxError(lineno, f"bad {what} index in {tok!r}") from None
    if not 0 <= i < 3:
        raise FixtureSyntaxError(lineno, f"{what} index {i} outside 0..2")
    return ids[name], i


def parse_fixture(text):
    """Build a :class:`TriangleComplex` from fixture text."""
    geometry = None
    ids, sides, gluings, glue_lines, decls = {}, [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "geometry":
            if len(rest) != 1 or rest[0] not in ("spherical", "euclidean"):
                raise FixtureSyntaxError(lineno, "geometry must be 'spherical' or 'euclidean'")
            if geometry is not None:
                raise FixtureSyntaxError(lineno, "geometry given twice")
            geometry = rest[0]
        elif head == "triangle":
            if len(rest) != 4:
                raise FixtureSyntaxError(lineno, "triangle needs an id and three side lengths")
            if rest[0] in ids:
                raise FixtureSyntaxError(lineno, f"duplicate triangle id {rest[0]!r}")
            try:
                abc = tuple(float(x) for x in rest[1:])
            except ValueError:
                raise FixtureSyntaxError(lineno, "side lengths must be numbers") from None
            if not all(math.isfinite(x) for x in abc):
                raise FixtureSyntaxError(lineno, "side lengths must be finite")
            ids[rest[0]] = len(sides)
            sides.append((lineno, abc))
        elif head == "glue":
            if len(rest) not in (2, 3):
                raise FixtureSyntaxError(lineno, "glue needs two side references")
            t1, s1 = _parse_ref(rest[0], ids, lineno, "side")
            t2, s2 = _parse_ref(rest[1], ids, lineno, "side")
            mode = rest[2] if len(rest) == 3 else "reversed"
            if mode not in ("reversed", "preserved"):
                raise FixtureSyntaxError(lineno, f"unknown orientation {mode!r}")
            gluings.append(Gluing(t1, s1, t2, s2, mode == "reversed"))
            glue_lines.append(lineno)
        elif head == "vertex":
            if not rest:
                raise FixtureSyntaxError(lineno, "vertex needs at least one corner")
            decls.append((lineno, [_parse_ref(tok, ids, lineno, "corner") for tok in rest]))
        else:
            raise FixtureSyntaxError(lineno, f"unknown record {head!r}")
    if geometry is None:
        raise FixtureSyntaxError(0, "missing geometry record")
    kind = SphericalTriangle if geometry == "spherical" else EuclideanTriangle
    tris = []
    for lineno, abc in sides:
        try:
            tris.append(kind(*abc))
        except ValueError as exc:
            raise FixtureSyntaxError(lineno, str(exc)) from None
    try:
        TriangleComplex(geometry, tris, gluings)
    except GluingError as exc:
        bad = _first_bad_gluing(geometry, tris, gluings, glue_lines)
        raise FixtureSyntaxError(bad, str(exc)) from None
    for lineno, corners in decls:
        try:
            TriangleComplex(geometry, tris, gluings, [corners])
        except GluingError as exc:
            raise FixtureSyntaxError(lineno, str(exc)) from None
    return TriangleComplex(geometry, tris, gluings, [c for _, c in decls])


def _first_bad_gluing(geometry, tris, gluings, lines):
    for n in range(1, len(gluings) + 1):
        try:
            TriangleComplex(geometry, tris, gluings[:n])
        except GluingError:
            return lines[n - 1]
    return 0


def dump_fixture(C: TriangleComplex, vertices=True):
    """Fixture text that :func:`parse_fixture` turns back into ``C``."""
    lines = [f"geometry {C.geometry}"]
    for i, tri in enumerate(C.triangles):
        lines.append(f"triangle T{i} {tri.a!r} {tri.b!r} {tri.c!r}")
    for g in C.gluings:
        mode = "reversed" if g.reversed else "preserved"
        lines.append(f"glue T{g.t1}:{g.s1} T{g.t2}:{g.s2} {mode}")
    if vertices:
        for v in C.vertices:
            lines.append("vertex " + " ".join(f"T{t}:{c}" for t, c in v.corners))
    return "\n".join(lines) + "\n"


def load_complex(name_or_path):
    """A builtin complex by name or a fixture file."""
    builtins = {
        "weierstrass": weierstrass_complex,
        "tetrahedron": tetrahedron_complex,
        "shrunken": shrunken_fixture,
    }
    if name_or_path in builtins:
        return builtins[name_or_path]()
    with open(name_or_path, encoding="utf-8") as fh:
        return parse_fixture(fh.read())


# ---------------------------------------------------------------------------
# cone density
# ---------------------------------------------------------------------------

def _check_q(q):
    if not 0.0 < q < 1.0:
        raise DomainError(f"q={q!r} outside (0, 1)")


def cone_radius(q):
    """``R(q) = sqrt 2 ((1+q)/(1-q))^{1/(2q)}``."""
    _check_q(q)
    return math.sqrt(2.0) * ((1.0 + q) / (1.0 - q)) ** (0.5 / q)


@dataclass(frozen=True)
class ConeMetricDensity:
    """Density ``2 q R^q r^{q-1} / (R^{2q} - r^{2q})`` of curvature -1 on the punctured disc."""

    q: float

    def __post_init__(self):
        _check_q(self.q)

    @property
    def R(self):
        return cone_radius(self.q)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        q, R = self.q, self.R
        return 2.0 * q * R ** q * r ** (q - 1.0) / (R ** (2.0 * q) - r ** (2.0 * q))

    def log_density(self, x, y):
        r = np.hypot(x, y)
        return np.log(self(r))

    @property
    def boundary_value(self):
        return math.sqrt(0.5 * (1.0 - self.q * self.q))


def cone_density(q, r):
    if not 0.0 < r < math.sqrt(2.0):
        raise DomainError(f"r={r!r} outside (0, sqrt 2)")
    return float(ConeMetricDensity(q)(r))


def cone_density_limit(q):
    """Value approached as ``r -> sqrt 2``: ``sqrt((1 - q^2)/2)``."""
    return ConeMetricDensity(q).boundary_value


def _log_density_step(lam, r2, d):
    """``log lambda`` at squared radius ``r2 + d`` minus its value at ``r2``.

    Written with ``log1p``/``expm1`` so the increment keeps full relative
    precision even though it is tiny next to ``log lambda`` itself.
    """
    q, R2q = lam.q, lam.R ** (2.0 * lam.q)
    rel = np.log1p(d / r2)
    r2q = r2 ** q
    return 0.5 * (q - 1.0) * rel - np.log1p(-r2q * np.expm1(q * rel) / (R2q - r2q))


def _laplacian_log(lam, x, y, r2, h):
    hh = h * h
    return (_log_density_step(lam, r2, 2.0 * x * h + hh) + _log_density_step(lam, r2, -2.0 * x * h + hh)
            + _log_density_step(lam, r2, 2.0 * y * h + hh) + _log_density_step(lam, r2, -2.0 * y * h + hh)) / hh


def curvature_fd(q, x, y, h=1e-4, richardson=True):
    """``-(Laplacian log lambda) / lambda^2`` by the five-point stencil.

    The plain stencil's truncation error grows like ``h^2 / r^4`` near the
    puncture; Richardson extrapolation over ``h`` and ``h/2`` removes the
    leading term, keeping the error below ``1e-9`` down to ``r = 0.01``.
    """
    lam = ConeMetricDensity(q)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    r2 = x * x + y * y
    lap = _laplacian_log(lam, x, y, r2, h)
    if richardson:
        lap = (4.0 * _laplacian_log(lam, x, y, r2, 0.5 * h) - lap) / 3.0
    return -lap / lam(np.sqrt(r2)) ** 2


def alpha_q_holds(alphas, q):
    return all(a * q > 1.0 for a in alphas)


def cone_alphas(C: TriangleComplex):
    """Total angles divided by ``2 pi`` at the interior vertices."""
    return tuple(C.total_angle(i) / TWO_PI for i, v in enumerate(C.vertices) if v.interior)


def alpha_q_check(C_flat: TriangleComplex, q):
    """True when every cone point satisfies ``alpha q > 1``."""
    _check_q(q)
    return alpha_q_holds(cone_alphas(C_flat), q)


# ---------------------------------------------------------------------------
# Bloch-radius bounds
# ---------------------------------------------------------------------------

def minda_bound(m):
    """``2 arctan sqrt(m/(m+2))``; ``m = inf`` gives ``pi/2``."""
    if m == math.inf:
        return 0.5 * math.pi
    if m < 1 or int(m) != m:
        raise DomainError("m must be a positive integer or inf")
    return 2.0 * math.atan(math.sqrt(m / (m + 2.0)))


def _cos_pi(x):
    # exact zeros at odd multiples of 1/2
    if (2.0 * x) % 2.0 == 1.0:
        return 0.0
    return math.cos(math.pi * x)


@dataclass(frozen=True)
class RemarkRadius:
    q: float
    literal: float
    limit: float


def remark_radius(q):
    """``arctan sqrt(-cos(pi q/2) / cos^3(pi q/6))`` for ``q`` in ``(1, 3]``.

    At ``q = 3`` numerator and denominator vanish; ``literal`` is then NaN and
    ``limit`` is the one-sided limit ``pi/2``.
    """
    if not 1.0 < q <= 3.0:
        raise DomainError(f"q={q!r} outside (1, 3]")
    num = -_cos_pi(0.5 * q)
    den = _cos_pi(q / 6.0) ** 3
    if den == 0.0:
        return RemarkRadius(q, math.nan if num == 0.0 else 0.5 * math.pi, 0.5 * math.pi)
    val = math.atan(math.sqrt(num / den))
    return RemarkRadius(q, val, val)
