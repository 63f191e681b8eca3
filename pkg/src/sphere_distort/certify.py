"""Grid-and-refine certification of the angle-distortion bounds.

The objective ``D(F, Δ)`` is scanned over chart coordinates ``(R, phi, t)``
with ``t`` folded into ``(phi, pi/2]`` and written as
``t = phi + floor + u (pi/2 - phi - floor)`` for ``u`` in ``[0, 1]``, so every
angle of the chord triangle stays at least ``floor``.  Grids are log-densified near the degenerate
corners and always contain the branch-crossover surfaces of the family.
The best grid points seed a bounded Nelder-Mead refinement.  All results
are empirical: they bound nothing rigorously.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats.sampling import NumericalInversePolynomial

from .distortion import (
    DistortionFamily,
    distortion_arr,
    distortion_at_params,
    distortion_components_arr,
    f_inf,
    f_k,
    f_k_star,
)
from .errors import BudgetExhausted, DomainError
from .projection import spherical_angles_from_chart_arr
from .spherical_trig import (
    B0,
    TriangleParams,
    chords_from_params_arr,
    euclidean_angles_arr,
    sides_from_params_arr,
)

HALF_PI = 0.5 * math.pi
_HALF_PI_LO = 6.123233995736766e-17   # pi/2 - HALF_PI
DELTA_FLOOR = 1e-4
K_CAP = 2 ** 16
PHI_FLOOR = 1e-6
R_GUARD = 1e-9
WITNESS_TOL = 1e-12
CASE_CUTS = (0.1, 0.1, 0.1)

SCAN_COLUMNS = ("R", "phi", "t", "a", "b", "c", "alpha", "beta", "gamma",
                "alpha_t", "beta_t", "gamma_t", "D", "case")
CONSTANTS_COLUMNS = ("epsilon", "variant", "k", "delta_emp")


# ---------------------------------------------------------------------------
# chart evaluation
# ---------------------------------------------------------------------------

def _chord_angle_terms(phi, psi, ap):
    """Sines, cosines and half-angle sines of the chord-triangle angles.

    The chart point is given by ``phi``, ``psi = pi/2 - phi`` and ``ap = t - phi``.
    Each quantity is computed from whichever of an angle or its supplement is
    small, so flat and needle-like chord triangles keep full relative accuracy.
    """
    bp = 2.0 * psi - ap          # pi - t - phi
    bp_sup = 2.0 * phi + ap      # pi - bp
    gp, gp_sup = 2.0 * phi, 2.0 * psi
    sin_ = (np.sin(ap),
            np.where(bp <= HALF_PI, np.sin(bp), np.sin(bp_sup)),
            np.where(gp <= HALF_PI, np.sin(gp), np.sin(gp_sup)))
    cos_ = (np.cos(ap), -np.cos(bp_sup), np.cos(gp))
    half_sin = (np.sin(0.5 * ap), np.sin(0.5 * bp), np.sin(phi))
    half_cos = (np.cos(0.5 * ap), np.sin(0.5 * bp_sup), np.sin(psi))
    return sin_, cos_, half_sin, half_cos


def _chart_core(F, R, phi, psi, ap):
    """Chords, spherical angles, transformed angles and ``D`` at chart points."""
    R, phi, psi, ap = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (R, phi, psi, ap)))
    sR, cR = np.sin(R), np.cos(R)
    sn, cs, hs, hc = _chord_angle_terms(phi, psi, ap)
    chords = tuple(2.0 * sR * x for x in sn)
    ang = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        ang.append(np.arctan2(cR * sn[i], cR * cR * sn[j] * sn[k] - cs[j] * cs[k]))
    # excess b + c - a of the chord triangle, and cyclically
    excess = tuple(8.0 * sR * hs[(i + 1) % 3] * hs[(i + 2) % 3] * hc[i] for i in range(3))
    tsides = tuple(F.inner(ch) for ch in chords)
    texcess = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        texcess.append(F.subadditivity_gap(chords[j], chords[k])
                       + F.drop(chords[j] + chords[k], chords[i], excess[i]))
    perim = tsides[0] + tsides[1] + tsides[2]
    tang = tuple(2.0 * np.arctan2(np.sqrt(texcess[(i + 1) % 3] * texcess[(i + 2) % 3]),
                                  np.sqrt(perim * texcess[i])) for i in range(3))
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.minimum(np.minimum(tang[0] / ang[0], tang[1] / ang[1]), tang[2] / ang[2])
    return chords, tuple(ang), tang, D


def _psi(phi):
    # pi/2 - phi to full relative accuracy near pi/2
    return (HALF_PI - phi) + _HALF_PI_LO


def chart_components(F, R, phi, t):
    """Sides, spherical angles, transformed angles and ``D`` on chart arrays."""
    phi = np.asarray(phi, dtype=float)
    return _chart_core(F, R, phi, _psi(phi), np.asarray(t, dtype=float) - phi)


def _chart_u(F, R, phi, u, floor):
    """``D`` at scan coordinates ``(R, phi, u)``, evaluated at the stored ``t``."""
    phi = np.asarray(phi, dtype=float)
    return chart_components(F, R, phi, _t_of(phi, u, floor))[3]


def chart_distortion(F, R, phi, t):
    return chart_components(F, R, phi, t)[3]


def case_classify(d, R, k, cuts=CASE_CUTS):
    """Bucket a triangle by ``d``, ``d/R`` and ``k^2 d/R``.

    ``k = None`` or ``inf`` stands for the limit family.  Works elementwise.
    """
    d, R = np.asarray(d, dtype=float), np.asarray(R, dtype=float)
    kk = math.inf if k is None else float(k)
    ratio = d / R
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.where(np.isinf(kk), np.inf, kk * kk * ratio)
    out = np.where(d >= cuts[0], 1, np.where(ratio >= cuts[1], 2, np.where(scaled < cuts[2], 3, 4)))
    return int(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# scan specification and result
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanSpec:
    """Everything that determines a scan; equal specs give identical results."""

    family: DistortionFamily
    R_max: float
    n_R: int = 64
    n_phi: int = 128
    n_t: int = 128
    refine_points: int = 100
    refine_maxfev: int = 300
    n_random: int = 4096
    floor: float = PHI_FLOOR
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not self.family.spherical:
            raise DomainError("scans run over spherical families")
        if not 0.0 < self.R_max < HALF_PI:
            raise DomainError(f"R_max={self.R_max!r} outside (0, pi/2)")
        if min(self.n_R, self.n_phi, self.n_t) < 2:
            raise DomainError("grid needs at least two nodes on every axis")
        if self.refine_points < 0 or self.refine_maxfev < 0 or self.n_random < 0:
            raise DomainError("budgets must be non-negative")
        if not 0.0 < self.floor < 0.01:
            raise DomainError("degeneracy floor must lie in (0, 0.01)")
        if self.threads < 1:
            raise DomainError("threads must be at least 1")

    @property
    def R_hi(self):
        return self.R_max - R_GUARD

    @property
    def R_lo(self):
        k = self.family.k
        lo = 1e-3 if k is None else min(1e-3, 1e-2 / (k * k))
        return min(lo, 0.5 * self.R_hi)

    def config(self):
        """Flat, ordered description used in output headers."""
        return {
            "family": self.family.tag,
            "k": "" if self.family.k is None else repr(self.family.k),
            "R_max": repr(self.R_max),
            "n_R": self.n_R, "n_phi": self.n_phi, "n_t": self.n_t,
            "refine_points": self.refine_points, "refine_maxfev": self.refine_maxfev,
            "n_random": self.n_random, "floor": repr(self.floor), "seed": self.seed,
        }


@dataclass(frozen=True)
class ScanRow:
    R: float
    phi: float
    t: float
    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float
    alpha_t: float
    beta_t: float
    gamma_t: float
    D: float
    case: int


@dataclass(frozen=True)
class CertificationResult:
    spec: ScanSpec
    infimum: float
    argmin: TriangleParams
    threshold: float
    grid_min: float
    n_evaluated: int
    n_refine_evals: int
    case_minima: dict
    witness_D: float
    rows: tuple = field(repr=False)

    @property
    def margin(self):
        return self.infimum - self.threshold

    @property
    def sound(self):
        """The reported infimum is reproduced by the distortion module."""
        return abs(self.witness_D - self.infimum) <= WITNESS_TOL * max(1.0, abs(self.infimum))


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def _geo_lin(lo, split, hi, n):
    """``n`` increasing nodes: geometric on ``[lo, split]``, linear on ``(split, hi]``."""
    n_geo = n // 2
    geo = np.geomspace(lo, split, n_geo, endpoint=False) if n_geo else np.empty(0)
    lin = np.linspace(split, hi, n - n_geo)
    return np.concatenate([geo, lin])


def _axes(spec):
    R = _geo_lin(spec.R_lo, max(0.1 * spec.R_hi, spec.R_lo), spec.R_hi, spec.n_R)
    fl = spec.floor
    n4 = spec.n_phi // 4
    low = np.geomspace(fl, 0.05, n4, endpoint=False)
    high = HALF_PI - np.geomspace(fl, 0.05, n4, endpoint=False)
    mid = np.linspace(0.05, HALF_PI - 0.05, spec.n_phi - 2 * n4)
    # the equilateral shape is always a node
    phi = np.unique(np.concatenate([low, mid, high, [math.pi / 6.0]]))
    u = np.concatenate([[0.0], _geo_lin(fl, 0.05, 1.0, spec.n_t - 1)])
    return np.unique(R), phi, np.unique(u)


def _crossover_samples(spec, R_ax, phi_ax, u_ax):
    """Extra points on the surfaces where some side's chord equals the family's crossover."""
    x = spec.family.chord_crossover()
    if x is None:
        return np.empty((0, 3))
    pts = []
    for R in R_ax:
        v = x / (2.0 * math.sin(R))
        if v >= 1.0:
            continue
        s = math.asin(v)
        # side c: sin 2 phi = v
        for ph in (0.5 * s, 0.5 * (math.pi - s)):
            if spec.floor <= ph <= HALF_PI - spec.floor:
                pts.append(np.column_stack([np.full(u_ax.size, R), np.full(u_ax.size, ph), u_ax]))
        # sides a and b: sin(t -+ phi) = v
        for sign_a, base in ((1.0, s), (1.0, math.pi - s), (-1.0, s), (-1.0, math.pi - s)):
            t = base + sign_a * phi_ax
            u = _u_of(phi_ax, t, spec.floor)
            ok = (u >= 0.0) & (u <= 1.0)
            if np.any(ok):
                pts.append(np.column_stack([np.full(ok.sum(), R), phi_ax[ok], u[ok]]))
    return np.concatenate(pts) if pts else np.empty((0, 3))


def _random_samples(spec):
    if spec.n_random == 0:
        return np.empty((0, 3))
    rng = np.random.default_rng(spec.seed)
    R = spec.R_lo + (spec.R_hi - spec.R_lo) * rng.random(spec.n_random)
    phi = spec.floor + (HALF_PI - 2.0 * spec.floor) * rng.random(spec.n_random)
    u = rng.random(spec.n_random)
    return np.column_stack([R, phi, u])


def scan_points(spec):
    """All sample points ``(R, phi, u)`` of a scan, in a fixed order."""
    R_ax, phi_ax, u_ax = _axes(spec)
    Rg, Pg, Ug = np.meshgrid(R_ax, phi_ax, u_ax, indexing="ij")
    grid = np.column_stack([Rg.ravel(), Pg.ravel(), Ug.ravel()])
    return np.concatenate([grid, _crossover_samples(spec, R_ax, phi_ax, u_ax), _random_samples(spec)])


def _t_of(phi, u, floor=PHI_FLOOR):
    phi = np.asarray(phi, dtype=float)
    return np.minimum(phi + (floor + u * (_psi(phi) - floor)), HALF_PI)


def _u_of(phi, t, floor=PHI_FLOOR):
    with np.errstate(divide="ignore", invalid="ignore"):
        return (t - phi - floor) / (HALF_PI - phi - floor)


def _evaluate(F, pts, threads, floor):
    def work(chunk):
        return _chart_u(F, chunk[:, 0], chunk[:, 1], chunk[:, 2], floor)

    if threads == 1 or len(pts) < 2 * threads:
        return work(pts)
    chunks = np.array_split(pts, threads)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return np.concatenate(list(ex.map(work, chunks)))


def _order(D, pts, floor):
    """Indices sorted by ``D`` then lexicographically by ``(R, phi, t)``."""
    t = _t_of(pts[:, 1], pts[:, 2], floor)
    return np.lexsort((t, pts[:, 1], pts[:, 0], D))


def make_row(F, R, phi, t):
    chords, ang, tang, D = chart_components(F, R, phi, t)
    sides = [float(2.0 * math.asin(0.5 * float(ch))) for ch in chords]
    case = case_classify(max(sides), R, F.k)
    return ScanRow(float(R), float(phi), float(t), *sides, *(float(x) for x in ang),
                   *(float(x) for x in tang), float(D), int(case))


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def scan_infimum(spec: ScanSpec, n_rows=100):
    """Grid scan plus Nelder-Mead refinement of ``D(F, Δ)`` for ``R <= R_max``."""
    F = spec.family
    pts = scan_points(spec)
    D = _evaluate(F, pts, spec.threads, spec.floor)
    D = np.where(np.isnan(D), np.inf, D)
    fl = spec.floor
    order = _order(D, pts, fl)
    grid_min = float(D[order[0]])

    lo = np.array([spec.R_lo, spec.floor, 0.0])
    hi = np.array([spec.R_hi, HALF_PI - spec.floor, 1.0])

    def objective(x):
        x = np.clip(x, lo, hi)
        val = float(_chart_u(F, x[0], x[1], x[2], fl))
        return math.inf if math.isnan(val) else val

    refined, n_fev = [], 0
    for idx in order[: spec.refine_points]:
        if spec.refine_maxfev == 0:
            break
        res = minimize(objective, pts[idx], method="Nelder-Mead",
                       bounds=list(zip(lo, hi)),
                       options={"maxfev": spec.refine_maxfev, "xatol": 1e-12, "fatol": 1e-15})
        n_fev += res.nfev
        refined.append(np.clip(res.x, lo, hi))
    if refined:
        rpts = np.array(refined)
        rD = _chart_u(F, rpts[:, 0], rpts[:, 1], rpts[:, 2], fl)
        rD = np.where(np.isnan(rD), np.inf, rD)
        all_pts = np.concatenate([pts[order[: max(n_rows, 1)]], rpts])
        all_D = np.concatenate([D[order[: max(n_rows, 1)]], rD])
    else:
        all_pts, all_D = pts[order[: max(n_rows, 1)]], D[order[: max(n_rows, 1)]]
    best = _order(all_D, all_pts, fl)
    b = all_pts[best[0]]
    argmin = TriangleParams(b[0], b[1], _t_of(b[1], b[2], fl))
    infimum = float(all_D[best[0]])

    # per-case minima over the grid
    ch = chords_from_params_arr(pts[:, 0], pts[:, 1], _t_of(pts[:, 1], pts[:, 2], fl))
    d = 2.0 * np.arcsin(0.5 * np.maximum(np.maximum(ch[0], ch[1]), ch[2]))
    cases = case_classify(d, pts[:, 0], F.k)
    case_minima = {}
    for c in (1, 2, 3, 4):
        sel = np.flatnonzero(cases == c)
        if sel.size:
            j = sel[_order(D[sel], pts[sel], fl)[0]]
            p = pts[j]
            case_minima[c] = (float(D[j]), (float(p[0]), float(p[1]), float(_t_of(p[1], p[2], fl))))

    witness = distortion_at_params(F, argmin.R, argmin.phi, argmin.t)
    rows = tuple(make_row(F, p[0], p[1], _t_of(p[1], p[2], fl)) for p in all_pts[best[:n_rows]])
    return CertificationResult(spec, infimum, argmin, F.threshold, grid_min, len(pts), n_fev,
                               case_minima, witness, rows)


# ---------------------------------------------------------------------------
# certification of the two theorems
# ---------------------------------------------------------------------------

def theorem_setup(eps, variant):
    """``(R_max, family constructor)`` for variant ``1.5`` or ``1.6``."""
    variant = str(variant)
    if variant == "1.5":
        if not 0.0 < eps < B0:
            raise DomainError(f"eps={eps!r} outside (0, b0)")
        return B0 - eps, f_k
    if variant == "1.6":
        if not 0.0 < eps < HALF_PI:
            raise DomainError(f"eps={eps!r} outside (0, pi/2)")
        return HALF_PI - eps, f_k_star
    raise DomainError(f"variant must be 1.5 or 1.6, got {variant!r}")


@dataclass(frozen=True)
class KSearchResult:
    epsilon: float
    variant: str
    k: float
    delta_emp: float
    result: CertificationResult
    history: tuple


def k_search(eps, variant="1.5", delta_floor=DELTA_FLOOR, k_cap=K_CAP, k_start=1.0, **scan_kw):
    """Double ``k`` until the scan margin exceeds ``delta_floor``.

    Raises :class:`BudgetExhausted` (with ``history``) past ``k_cap``.
    """
    R_max, make = theorem_setup(eps, variant)
    history = []
    k = float(k_start)
    while k <= k_cap:
        res = scan_infimum(ScanSpec(make(k), R_max, **scan_kw))
        history.append((k, res.margin))
        if res.margin > delta_floor:
            return KSearchResult(eps, str(variant), k, res.margin, res, tuple(history))
        k *= 2.0
    err = BudgetExhausted(f"no k <= {k_cap:g} certified eps={eps} (variant {variant})")
    err.history = tuple(history)
    raise err


@dataclass(frozen=True)
class SweepResult:
    n: int
    min_D: float
    violations: int
    witness: tuple


def _sweep_min(D, sides, threshold):
    i = int(np.argmin(D))
    return float(D[i]), int(np.count_nonzero(D <= threshold)), tuple(float(s[i]) for s in sides)


def random_chart_params(n, R_max, rng, R_min=0.0):
    """Chart coordinates with ``R`` uniform in ``(R_min, R_max]`` and ``t`` in ``(phi, pi - phi)``."""
    R = R_max - (R_max - R_min) * rng.random(n)
    phi = HALF_PI * (1.0 - rng.random(n))
    t = phi + (math.pi - 2.0 * phi) * (1.0 - rng.random(n))
    keep = (R > 0) & (phi < HALF_PI) & (t < math.pi - phi)
    return R[keep], phi[keep], t[keep]


def spherical_sweep(F, R_max, n, seed=0, chunk=200_000):
    """Random triangles with circumradius at most ``R_max``, evaluated in chart coordinates."""
    rng = np.random.default_rng(seed)
    done, best, viol = 0, (math.inf, None), 0
    while done < n:
        m = min(chunk, n - done)
        R, phi, t = random_chart_params(m, R_max, rng)
        sides = sides_from_params_arr(R, phi, t)
        D = chart_distortion(F, R, phi, t)
        ok = np.isfinite(D)
        d, v, w = _sweep_min(D[ok], [s[ok] for s in sides], F.threshold)
        viol += v + int(np.count_nonzero(~ok))
        if d < best[0]:
            best = (d, w)
        done += len(R)
    return SweepResult(done, best[0], viol, best[1])


class _SmallestRatioLaw:
    """Density of ``x = log(s_min / s_max)`` for log-uniform sides on a box of log-width ``L``
    conditioned on the triangle inequality."""

    def __init__(self, L):
        self.L = L

    def pdf(self, x):
        # the middle side's log-ratio y ranges over [max(x, log(1 - e^x)), 0]
        with np.errstate(divide="ignore"):
            width = -np.maximum(x, np.log1p(-np.exp(x)))
        return (self.L + x) * width


def random_euclidean_sides(n, rng, lo=1e-6, hi=1e6):
    """``n`` triangles with i.i.d. log-uniform sides in ``[lo, hi]`` conditioned on the
    triangle inequality.

    This is the law of rejection sampling, drawn directly: the smallest-to-largest
    log-ratio by numerical inversion of its marginal density, the middle ratio
    uniformly given it, the largest side uniformly over the admissible range
    and finally a random assignment of the three sides.
    """
    llo, lhi = math.log(lo), math.log(hi)
    L = lhi - llo
    gen = NumericalInversePolynomial(_SmallestRatioLaw(L), domain=(-L, 0.0), random_state=rng)
    x = np.atleast_1d(gen.rvs(n))
    with np.errstate(divide="ignore"):
        y_lo = np.maximum(x, np.log1p(-np.exp(x)))
    y = y_lo - y_lo * rng.random(n)
    w = (llo - x) + (L + x) * rng.random(n)
    sides = np.exp(np.column_stack([w + x, w + y, w]))
    sides = np.clip(sides, lo, hi)
    sides = rng.permuted(sides, axis=1)
    return sides[:, 0], sides[:, 1], sides[:, 2]


def euclidean_sweep(G, n, seed=0, lo=1e-6, hi=1e6):
    rng = np.random.default_rng(seed)
    a, b, c = random_euclidean_sides(n, rng, lo, hi)
    D = distortion_components_arr(G, a, b, c, spherical=False)[2]
    d, v, w = _sweep_min(D, (a, b, c), G.threshold)
    return SweepResult(len(a), d, v + int(np.count_nonzero(~np.isfinite(D))), w)


@dataclass(frozen=True)
class CertifyOutcome:
    status: str            # "ok", "violation" or "exhausted"
    search: KSearchResult | None
    precheck_margin: float | None
    sweep: SweepResult | None
    message: str


def certify_theorem(eps, variant="1.5", delta_floor=DELTA_FLOOR, k_cap=K_CAP, sweep_n=100_000,
                    seed=0, **scan_kw):
    """Run the full certification for one ``eps``.

    For variant 1.5 the ``F_inf`` scan must clear 1/2 first.  After the
    ``k`` search a random sweep at the certified ``k`` looks for samples at
    or below the threshold; finding one is reported as a violation.
    """
    R_max, make = theorem_setup(eps, variant)
    pre = None
    if str(variant) == "1.5":
        pre_res = scan_infimum(ScanSpec(f_inf(), R_max, seed=seed, **scan_kw))
        pre = pre_res.margin
        if not pre > 0:
            return CertifyOutcome("violation", None, pre, None,
                                  f"F_inf scan reached {pre_res.infimum!r} at {pre_res.argmin}")
    try:
        ks = k_search(eps, variant, delta_floor, k_cap, seed=seed, **scan_kw)
    except BudgetExhausted as exc:
        return CertifyOutcome("exhausted", None, pre, None, str(exc))
    sweep = spherical_sweep(make(ks.k), R_max, sweep_n, seed=seed)
    res = ks.result
    if sweep.violations or res.witness_D <= res.threshold:
        return CertifyOutcome("violation", ks, pre, sweep, "sample at or below the threshold")
    return CertifyOutcome("ok", ks, pre, sweep, "")


# ---------------------------------------------------------------------------
# Euclidean moduli and asymptotics
# ---------------------------------------------------------------------------

def triangles_from_angles(alpha, beta, c=1.0):
    """Euclidean sides with angles ``alpha, beta`` and ``gamma = pi - alpha - beta`` opposite side ``c``."""
    alpha, beta, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (alpha, beta, c)))
    sg = np.sin(alpha + beta)
    return c * np.sin(alpha) / sg, c * np.sin(beta) / sg, c


def empirical_modulus(G, mu_grid, n_sigma=96, n_rho=48, n_scale=97, scale_range=(1e-6, 1e6)):
    """``inf {D(G, Δ) - threshold : α + β >= μ}`` over a shape-and-scale grid.

    Shapes run over ``σ = α + β`` in ``(0, 2π/3]`` and ``ρ = α/β`` in
    ``(0, 1]`` subject to ``β <= γ``; the equilateral shape is included.
    Returns a list of ``(μ, g_emp)``.
    """
    if G.spherical:
        raise DomainError("the modulus is defined for planar families")
    sig = np.unique(np.concatenate([np.geomspace(1e-4, 2.0 * math.pi / 3.0, n_sigma), [2.0 * math.pi / 3.0]]))
    rho = np.unique(np.concatenate([np.geomspace(1e-3, 1.0, n_rho), [1.0]]))
    S, P = np.meshgrid(sig, rho, indexing="ij")
    beta = S / (1.0 + P)
    alpha = S - beta
    ok = beta <= math.pi - S + 1e-15
    alpha, beta, S = alpha[ok], beta[ok], S[ok]
    scales = np.geomspace(*scale_range, n_scale)
    worst = np.full(S.shape, np.inf)
    for c in scales:
        a, b, cc = triangles_from_angles(alpha, beta, c)
        D = distortion_components_arr(G, a, b, cc, spherical=False)[2]
        worst = np.minimum(worst, D)
    order = np.argsort(S, kind="stable")
    sig_sorted = S[order]
    suffix = np.minimum.accumulate(worst[order][::-1])[::-1]
    out = []
    for mu in mu_grid:
        i = int(np.searchsorted(sig_sorted, mu - 1e-12, side="left"))
        g = float(suffix[i] - G.threshold) if i < len(suffix) else math.nan
        out.append((float(mu), g))
    return out


def lemma_5_3_components(k, sigma, rho, scale):
    """``(π/2 - γ̃)/(α + β)^2`` and the side case for ``G_k`` on a shape/scale grid."""
    S, P, C = np.meshgrid(sigma, rho, scale, indexing="ij")
    beta = S / (1.0 + P)
    alpha = S - beta
    a, b, c = triangles_from_angles(alpha, beta, C)
    G = DistortionFamily("gk", k)
    tang = euclidean_angles_arr(G.eval_arr(a), G.eval_arr(b), G.eval_arr(c))
    val = (HALF_PI - tang[2]) / S ** 2
    ks = k * k
    case = np.where(c * ks <= 1.0, 1, np.where(b * ks <= 1.0, 2, np.where(a * ks <= 1.0, 3, 4)))
    return val, case


@dataclass(frozen=True)
class AsymptoticFit:
    C: float
    per_case: dict
    n: int


def lemma_5_3_asymptotic(n=24, k_exponents=range(0, 11), sigma_range=(1e-4, 1e-1), scale_range=(1e-7, 1e3)):
    """Largest ``(π/2 - γ̃)/(α + β)^2`` over ``α + β`` in ``sigma_range`` and ``k = 2^j``."""
    sigma = np.geomspace(*sigma_range, n)
    rho = np.geomspace(1e-3, 1.0, n)
    scale = np.geomspace(*scale_range, 4 * n)
    best = -math.inf
    per_case = {}
    for j in k_exponents:
        val, case = lemma_5_3_components(2.0 ** j, sigma, rho, scale)
        best = max(best, float(val.max()))
        for c in (1, 2, 3, 4):
            sel = case == c
            if np.any(sel):
                per_case[c] = max(per_case.get(c, -math.inf), float(val[sel].max()))
    return AsymptoticFit(best, per_case, n)


def case4_closed_form(beta, leg=4.0):
    """``(sin(π/2 - γ̃), 2 sin^2(β/2))`` for the isosceles triangle with base angles ``β``.

    The legs are long enough that ``G_1`` acts as the square root on every side.
    """
    c = 2.0 * leg * math.cos(beta)
    if min(leg, c) <= 1.0:
        raise DomainError("all sides must exceed 1")
    G = DistortionFamily("gk", 1.0)
    gt = float(euclidean_angles_arr(G.eval_arr(leg), G.eval_arr(leg), G.eval_arr(c))[2])
    return math.sin(HALF_PI - gt), 2.0 * math.sin(0.5 * beta) ** 2


def lemma_7_4_check(a, b, c, k=1.0, tol=1e-12):
    """Transformed angle at the largest original angle is at least ``π/3`` under ``G_k^*``."""
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    G = DistortionFamily("gkstar", k)
    ang = np.stack(euclidean_angles_arr(a, b, c))
    tang = np.stack(euclidean_angles_arr(G.eval_arr(a), G.eval_arr(b), G.eval_arr(c)))
    idx = np.argmax(ang, axis=0)
    gt = np.take_along_axis(tang, idx[None, :], axis=0)[0] if tang.ndim == 2 else tang[idx]
    worst = float(np.min(gt))
    return worst >= math.pi / 3.0 - tol, worst


@dataclass(frozen=True)
class LargestAngleCheck:
    n: int
    max_ratio: float


def largest_angle_asymptotic(result: CertificationResult):
    """``|γ - (π - α - β)| / (α + β)^2`` over the case-4 rows of a scan."""
    vals = []
    for r in result.rows:
        if r.case != 4:
            continue
        ang = sorted((r.alpha, r.beta, r.gamma))
        s = ang[0] + ang[1]
        vals.append(abs(ang[2] - (math.pi - s)) / (s * s))
    return LargestAngleCheck(len(vals), max(vals) if vals else math.nan)


# ---------------------------------------------------------------------------
# degenerate sequences
# ---------------------------------------------------------------------------

_KINDS = {
    # kind: (geometry, statistic, default family tag)
    "L4.1": ("spherical", "ratios", "fk"),
    "L4.2": ("euclidean", "ratios", "gk"),
    "L4.3": ("spherical", "D", "fk"),
    "L7.1": ("spherical", "D", "fkstar"),
}


@dataclass(frozen=True)
class DegenerateResult:
    kind: str
    geometry: str
    threshold: float
    table: tuple          # (j, k, a, ratio_small, ratio_mid, ratio_large, D)
    tail_min: float
    margin: float

    @property
    def passed(self):
        return self.tail_min - self.threshold >= self.margin


def _sas_spherical(a, c, beta):
    """Angles opposite ``a`` and ``c`` plus the third side, for sides ``a, c`` enclosing ``beta``."""
    A = math.atan2(math.sin(a) * math.sin(beta), math.sin(c) * math.cos(a) - math.cos(c) * math.sin(a) * math.cos(beta))
    C = math.atan2(math.sin(c) * math.sin(beta), math.sin(a) * math.cos(c) - math.cos(a) * math.sin(c) * math.cos(beta))
    hav = math.sin(0.5 * (c - a)) ** 2 + math.sin(a) * math.sin(c) * math.sin(0.5 * beta) ** 2
    return A, C, 2.0 * math.asin(math.sqrt(hav))


def _sas_euclidean(a, c, beta):
    A = math.atan2(a * math.sin(beta), c - a * math.cos(beta))
    C = math.atan2(c * math.sin(beta), a - c * math.cos(beta))
    b = math.sqrt((c - a) ** 2 + 4.0 * a * c * math.sin(0.5 * beta) ** 2)
    return A, C, b


def degenerate_family_test(kind, beta0=math.pi / 3.0, L=1.0, x=1.0, j_max=20, tail=6,
                           margin=1e-3, geometry=None, family=None):
    """Evaluate a degenerating sequence and compare its tail with the threshold.

    The triangle has sides ``c = L`` and ``a_j`` enclosing the fixed angle
    ``beta0``.  Spherical sequences use ``a_j = x 4^{-j}`` with ``k_j = 2^j``
    so that ``k^2 chd a`` stays near the crossover; Euclidean ones keep the
    function fixed and use ``a_j = x 2^{-j}``.  ``ratios`` kinds track the
    two smaller angles, ``D`` kinds the full distortion; the tail minimum
    over the last ``tail`` terms is the finite stand-in for a lower limit.
    """
    if kind not in _KINDS:
        raise DomainError(f"unknown sequence kind {kind!r}")
    geom, stat, tag = _KINDS[kind]
    geom = geometry or geom
    if family is not None:
        tag = family
    if geom == "euclidean" and tag in ("fk", "fkstar"):
        tag = {"fk": "gk", "fkstar": "gkstar"}[tag]
    if geom == "spherical" and tag in ("gk", "gkstar"):
        tag = {"gk": "fk", "gkstar": "fkstar"}[tag]
    if not 0.0 < beta0 < math.pi:
        raise DomainError("beta0 must lie in (0, pi)")
    rows = []
    for j in range(1, j_max + 1):
        if geom == "spherical":
            k = 2.0 ** j
            a = x * 4.0 ** (-j)
            A, C, b = _sas_spherical(a, L, beta0)
        else:
            k = 1.0
            a = x * 2.0 ** (-j)
            A, C, b = _sas_euclidean(a, L, beta0)
        F = DistortionFamily(tag, k)
        ang = np.array([A, beta0, C])
        tang = np.array(euclidean_angles_arr(F.eval_arr(a), F.eval_arr(b), F.eval_arr(L)), dtype=float)
        ratios = tang / ang
        o = np.argsort(ang, kind="stable")
        rows.append((j, k, a, float(ratios[o[0]]), float(ratios[o[1]]), float(ratios[o[2]]), float(ratios.min())))
    threshold = 1.0 / 3.0 if tag in ("fkstar", "gkstar") else 0.5
    tail_rows = rows[-tail:]
    if stat == "ratios":
        tail_min = min(min(r[3], r[4]) for r in tail_rows)
    else:
        tail_min = min(r[6] for r in tail_rows)
    return DegenerateResult(kind, geom, threshold, tuple(rows), tail_min, margin)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_header(config):
    return "".join(f"# {k}={_fmt(v)}\n" for k, v in config.items())


def scan_csv(result: CertificationResult, extra_config=None, degrees=False):
    """CSV text: config header, column names and the best rows of the scan."""
    cfg = dict(result.spec.config())
    if extra_config:
        cfg.update(extra_config)
    cfg["degrees"] = bool(degrees)
    cfg["infimum"] = result.infimum
    cfg["margin"] = result.margin
    buf = io.StringIO()
    buf.write(format_header(cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    conv = math.degrees if degrees else (lambda v: v)
    angular = {"alpha", "beta", "gamma", "alpha_t", "beta_t", "gamma_t", "phi", "t"}
    for row in result.rows:
        d = asdict(row)
        w.writerow([_fmt(conv(d[c]) if c in angular else d[c]) for c in SCAN_COLUMNS])
    return buf.getvalue()


def constants_csv(entries, config=None):
    """``entries`` are ``(epsilon, variant, k, delta_emp)`` tuples."""
    buf = io.StringIO()
    if config:
        buf.write(format_header(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONSTANTS_COLUMNS)
    for e in entries:
        w.writerow([_fmt(float(e[0])), str(e[1]), _fmt(float(e[2])), _fmt(float(e[3]))])
    return buf.getvalue()
