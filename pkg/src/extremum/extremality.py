"""Critical sets, collinearity classes and the extremality decision.

For a rearranged modulus ``mu* = mu o omega`` the critical set ``E1`` holds the
points ``t`` where

    liminf_{u, v -> t, u < v}  (mu*(u) - mu*(v)) / (mu*(v) |omega(v) - omega(u)|) = 0,

and ``E2`` those where the same quotient divided by
``max(|omega(u) - omega(t)|, |omega(v) - omega(t)|)`` has liminf zero.

A grid cannot evaluate a liminf.  The quotient is minimised over pairs taken
from dyadic windows of half-width ``2*pi*2^-k`` around each cell, for ``k``
from ``config.k_min`` up to ``log2(N) - 2``; each window is sampled at nine
equally spaced cells.  A cell is declared critical when the finest-level
minimum is below ``config.eps_crit`` and has dropped by at least a factor
``config.rho`` over the last three levels.  Critical cells closer than three
cells are merged into one component; the number of components stands in for
the cardinality of the set.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytic import (BlaschkePoint, BoundaryTrace, blaschke_boundary, blaschke_product,
                       outer_from_modulus, trace_product)
from .config import AnalysisConfig, thread_count
from .errors import PreconditionError
from .grid import TWO_PI, Gauge, GridSpec, Role, SampledFunction
from .norms import lorentz_norm
from .perturbation import NORM_CHECK_TOL, Witness, flattest_index, hint_angle, scan_witness
from .rearrangement import RearrangementResult, decreasing_rearrangement

CLUSTER_RADIUS = 2
_OFFSETS = np.arange(-4, 5)
_PI, _PJ = (np.array(x) for x in zip(*itertools.combinations(range(9), 2)))

RULES = (
    "inner-constant-modulus", "outer-thmC", "corollary-6.9-i", "corollary-6.9-ii",
    "corollary-6.9-iii-collinear", "corollary-6.9-iii-generic", "corollary-6.5",
    "theorem-6.6", "unknown-gap",
)


def xi1(u, v, xi) -> np.ndarray:
    """``|sin((xi(u) - xi(v)) / 2)|`` for index arrays ``u`` and ``v``."""
    xi = np.asarray(xi)
    return np.abs(np.sin(0.5 * (xi[np.asarray(u)] - xi[np.asarray(v)])))


def xi2(u, v, gamma, xi) -> np.ndarray:
    """``|sin((xi(u) + xi(v)) / 2 - gamma)|`` for index arrays ``u`` and ``v``."""
    xi = np.asarray(xi)
    return np.abs(np.sin(0.5 * (xi[np.asarray(u)] + xi[np.asarray(v)]) - gamma))


def window_levels(n: int, k_min: int = 3) -> list[int]:
    k_max = int(math.log2(n)) - 2
    levels = list(range(k_min, k_max + 1))
    if len(levels) < 3:
        raise PreconditionError(
            f"grid of {n} cells gives fewer than three window levels from k_min={k_min}")
    return levels


def _window_pairs(n: int, k: int):
    """Pairs ``u < v`` sampled from the level-``k`` window around every cell."""
    stride = max((n >> k) // 4, 1)
    idx = np.arange(n)[:, None] + stride * _OFFSETS[None, :]
    valid = (idx >= 0) & (idx < n)
    idx = np.clip(idx, 0, n - 1)
    return idx[:, _PI], idx[:, _PJ], valid[:, _PI] & valid[:, _PJ]


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        r = num / den
    r = np.where(num <= 0, 0.0, r)
    return np.where(np.isnan(r), np.inf, r)


def _profiles(ms: np.ndarray, omega: np.ndarray, levels, step: float, kind: int) -> np.ndarray:
    n = ms.size
    out = np.empty((len(levels), n))
    t = np.arange(n)[:, None]
    for row, k in enumerate(levels):
        u, v, ok = _window_pairs(n, k)
        num = ms[u] - ms[v]
        den = ms[v] * np.abs(omega[v] - omega[u]) * step
        if kind == 2:
            den = den * np.maximum(np.abs(omega[u] - omega[t]), np.abs(omega[v] - omega[t])) * step
        ratio = np.where(ok, _safe_ratio(num, den), np.inf)
        out[row] = ratio.min(axis=1)
    return out


def _flags(profiles: np.ndarray, config: AnalysisConfig) -> np.ndarray:
    fine, coarse = profiles[-1], profiles[-3]
    return (fine < config.eps_crit) & (fine <= config.rho * coarse)


def cluster(flags: np.ndarray, radius: int = CLUSTER_RADIUS) -> list[tuple[int, int]]:
    """Group flagged indices whose gaps are at most ``radius`` into ``(first, last)`` intervals."""
    idx = np.nonzero(flags)[0]
    if idx.size == 0:
        return []
    cuts = np.nonzero(np.diff(idx) > radius)[0]
    starts = np.concatenate([[idx[0]], idx[cuts + 1]])
    stops = np.concatenate([idx[cuts], [idx[-1]]])
    return [(int(a), int(b)) for a, b in zip(starts, stops)]


@dataclass(frozen=True, eq=False)
class CriticalSet:
    """Flagged cells (rearranged frame), their components and the ratio profiles."""

    flags: np.ndarray
    components: list
    representatives: list
    profiles: np.ndarray
    levels: list

    @property
    def card(self) -> int:
        return len(self.components)

    def points(self, grid: GridSpec) -> list[float]:
        """Cell-centre positions of the component representatives."""
        return [float(grid.nodes[i]) for i in self.representatives]


def _rearranged(mu) -> RearrangementResult:
    if isinstance(mu, RearrangementResult):
        return mu
    return decreasing_rearrangement(mu)


def _critical_set(mu, config: AnalysisConfig | None, kind: int) -> CriticalSet:
    config = config or AnalysisConfig()
    r = _rearranged(mu)
    ms = np.asarray(r.mu_star.values)
    if np.min(ms) <= 0:
        raise PreconditionError("critical sets need a strictly positive modulus")
    levels = window_levels(ms.size, config.k_min)
    prof = _profiles(ms, np.asarray(r.omega), levels, r.mu_star.grid.step, kind)
    flags = _flags(prof, config)
    if kind == 2:
        flags &= _flags(_profiles(ms, np.asarray(r.omega), levels, r.mu_star.grid.step, 1), config)
    comps = cluster(flags)
    reps = [flattest_index(ms, a, b) for a, b in comps]
    flags.setflags(write=False)
    return CriticalSet(flags, comps, reps, prof, levels)


def critical_set_E1(mu, config: AnalysisConfig | None = None) -> CriticalSet:
    """Discrete ``E1`` of a modulus (or of an existing rearrangement)."""
    return _critical_set(mu, config, 1)


def critical_set_E2(mu, config: AnalysisConfig | None = None) -> CriticalSet:
    """Discrete ``E2``; flagged cells are also flagged for ``E1``."""
    return _critical_set(mu, config, 2)


def component_angles(crit: CriticalSet, r: RearrangementResult, xi) -> list[float]:
    """Argument of the inner factor at each component representative."""
    xi_om = np.asarray(xi.arg_branch if isinstance(xi, BoundaryTrace) else xi)[r.omega]
    return [hint_angle(i, np.asarray(r.omega), xi_om) for i in crit.representatives]


def collinearity_classes(angles, tol_ang: float = 1e-2) -> tuple[np.ndarray, bool]:
    """Pairwise test ``angle_i - angle_j`` in ``pi * Z`` (within ``tol_ang``).

    Returns the boolean matrix and whether all representatives share one
    class, i.e. lie in a single ``R(t0)``.
    """
    a = np.asarray(angles, dtype=float)
    d = np.mod(a[:, None] - a[None, :], math.pi)
    close = np.minimum(d, math.pi - d) < tol_ang
    return close, bool(np.all(close))


@dataclass(frozen=True, eq=False)
class GammaScan:
    """For each ``gamma``: smallest finest-level ratio over ``t`` and whether it tends to zero."""

    gammas: np.ndarray
    min_ratio: np.ndarray
    attains_zero: np.ndarray

    @property
    def condition_holds(self) -> bool:
        """True when every ``gamma`` row reaches zero somewhere (no witness expected)."""
        return bool(np.all(self.attains_zero))


def gamma_scan(mu, xi, config: AnalysisConfig | None = None, hints=()) -> GammaScan:
    """Scan ``gamma`` for points where ``(mu*(u)-mu*(v)) / (mu*(v) xi1 xi2)`` tends to zero.

    ``gamma`` runs over ``config.gamma_steps`` angles in ``[0, pi)`` plus the
    ``hints`` (reduced modulo ``pi``); rows use the same window, smallness
    and decay tests as the critical sets.
    """
    config = config or AnalysisConfig()
    r = _rearranged(mu)
    ms = np.asarray(r.mu_star.values)
    xi_om = np.asarray(xi.arg_branch if isinstance(xi, BoundaryTrace) else xi)[r.omega]
    n = ms.size
    levels = window_levels(n, config.k_min)
    gammas = np.concatenate([np.mod(np.asarray(hints, dtype=float), math.pi),
                             math.pi * np.arange(config.gamma_steps) / config.gamma_steps])
    pieces = []
    for k in (levels[-3], levels[-1]):
        u, v, ok = _window_pairs(n, k)
        base = np.where(ok, _safe_ratio(ms[u] - ms[v], ms[v] * xi1(u, v, xi_om)), np.inf)
        half_sum = 0.5 * (xi_om[u] + xi_om[v])
        pieces.append((base, half_sum))

    def row_minima(g):
        out = []
        for base, half_sum in pieces:
            r_g = _safe_ratio(base, np.abs(np.sin(half_sum - g)))
            out.append(np.where(base == 0, 0.0, r_g).min(axis=1))
        return out

    workers = min(thread_count(), gammas.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row_minima, gammas))
    else:
        rows = [row_minima(g) for g in gammas]
    coarse = np.array([c for c, _ in rows])
    fine = np.array([f for _, f in rows])
    flagged = (fine < config.eps_crit) & (fine <= config.rho * coarse)
    return GammaScan(gammas, fine.min(axis=1), flagged.any(axis=1))


class Status(str, Enum):
    EXTREME = "Extreme"
    NOT_EXTREME = "NotExtreme"
    UNKNOWN = "Unknown"


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """``f = F * prod I_a`` with ``|F| = mu`` on the circle and ``arg F = C[ln mu] + lam``."""

    mu: SampledFunction
    inner: tuple = ()
    lam: float = 0.0

    def __post_init__(self):
        pts = tuple(p if isinstance(p, BlaschkePoint) else BlaschkePoint(p) for p in self.inner)
        object.__setattr__(self, "inner", pts)
        if self.mu.role is not Role.MODULUS:
            raise PreconditionError("mu must be a modulus")

    @property
    def is_outer(self) -> bool:
        return not self.inner


@dataclass(frozen=True, eq=False)
class CriticalSetReport:
    e1: CriticalSet
    e2: CriticalSet
    angles: list
    collinearity: np.ndarray
    exists_t0: bool

    @property
    def e1_components(self) -> list:
        return self.e1.components

    @property
    def e2_components(self) -> list:
        return self.e2.components

    @property
    def ratio_profiles(self) -> np.ndarray:
        return self.e1.profiles


@dataclass(frozen=True, eq=False)
class Verdict:
    status: Status
    rule: str
    witness: Witness | None
    report: CriticalSetReport | None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.status is Status.NOT_EXTREME and self.witness is None:
            raise ValueError("a NotExtreme verdict needs a witness")


def _report(r: RearrangementResult, xi, config: AnalysisConfig) -> CriticalSetReport:
    e1 = critical_set_E1(r, config)
    e2 = critical_set_E2(r, config)
    angles = component_angles(e1, r, xi)
    mat, exists = collinearity_classes(angles, config.tol_ang)
    return CriticalSetReport(e1, e2, angles, mat, exists)


def _split_inner(spec: FunctionSpec, subset: tuple, outer: BoundaryTrace, grid: GridSpec):
    chosen = [spec.inner[i] for i in subset]
    rest = [p for i, p in enumerate(spec.inner) if i not in subset]
    inner = blaschke_product(chosen, grid)
    cofactor = outer if not rest else trace_product([outer, blaschke_product(rest, grid)])
    return inner, cofactor


def _try_witness(spec, subset, r, report, outer, gauge, config, diagnostics):
    grid = spec.mu.grid
    inner, cofactor = _split_inner(spec, subset, outer, grid)
    hints = component_angles(report.e1, r, inner) if report.e1.card else None
    scan = scan_witness(spec.mu, inner, cofactor, gauge, config, hints, inner_subset=subset)
    diagnostics.setdefault("witness_attempts", []).append(
        {"inner_subset": list(subset), "candidates_tried": scan.candidates_tried,
         "best_beta_max": float(np.max(scan.beta_max, initial=0.0)),
         "best_stability": float(np.max(scan.stability, initial=0.0))})
    return scan.witness


def decide_extreme(spec: FunctionSpec, gauge: Gauge, config: AnalysisConfig | None = None) -> Verdict:
    """Classify ``f`` as Extreme, NotExtreme (with a verified witness) or Unknown."""
    config = config or AnalysisConfig()
    if not gauge.admissible:
        raise PreconditionError("gauge must be strictly increasing and strictly concave")
    mu = spec.mu
    if mu.grid.n_samples != gauge.grid.n_samples:
        raise PreconditionError("modulus and gauge live on different grids")
    norm = lorentz_norm(mu, gauge)
    if abs(norm - 1.0) > NORM_CHECK_TOL:
        raise PreconditionError(f"modulus has Lorentz norm {norm:.12g}; normalise it first")
    grid = mu.grid
    vals = np.asarray(mu.values)
    diagnostics: dict = {}

    r = decreasing_rearrangement(mu)
    first = blaschke_product(spec.inner[:1], grid)
    if np.max(vals) - np.min(vals) <= NORM_CHECK_TOL * np.max(vals):
        return Verdict(Status.EXTREME, "inner-constant-modulus", None,
                       _report(r, first, config), diagnostics)
    if spec.is_outer:
        return Verdict(Status.EXTREME, "outer-thmC", None, _report(r, first, config), diagnostics)

    outer = outer_from_modulus(mu, spec.lam, config.modulus_floor)

    if len(spec.inner) == 1:
        report = _report(r, first, config)
        c1 = report.e1.card
        if report.e2.card:
            rule, extreme = "corollary-6.9-i", True
        elif c1 >= 4:
            rule, extreme = "corollary-6.9-i", True
        elif c1 <= 1:
            rule, extreme = "corollary-6.9-ii", False
        elif c1 == 2:
            extreme = not report.exists_t0
            rule = "corollary-6.9-iii-generic" if extreme else "corollary-6.9-iii-collinear"
        else:
            rule, extreme = "theorem-6.6", not report.exists_t0
        if extreme:
            return Verdict(Status.EXTREME, rule, None, report, diagnostics)
        witness = _try_witness(spec, (0,), r, report, outer, gauge, config, diagnostics)
        if witness is None:
            diagnostics["intended_rule"] = rule
            diagnostics["reason"] = "critical sets allow a witness but the search found none"
            return Verdict(Status.UNKNOWN, "unknown-gap", None, report, diagnostics)
        return Verdict(Status.NOT_EXTREME, rule, witness, report, diagnostics)

    subsets = [(i,) for i in range(len(spec.inner))] + [tuple(range(len(spec.inner)))]
    reports = [_report(r, blaschke_product([spec.inner[i] for i in s], grid), config)
               for s in subsets]
    base = reports[0]
    if base.e1.card <= 1 and base.e2.card == 0:
        candidates = subsets
    elif base.e2.card == 0:
        candidates = [s for s, rep in zip(subsets, reports) if rep.exists_t0]
    else:
        candidates = []
    for s, rep in zip(subsets, reports):
        if s not in candidates:
            continue
        witness = _try_witness(spec, s, r, rep, outer, gauge, config, diagnostics)
        if witness is not None:
            diagnostics["necessary_conditions_fail_for"] = list(s)
            return Verdict(Status.NOT_EXTREME, "corollary-6.5", witness, rep, diagnostics)
    diagnostics["reason"] = ("necessary conditions for extremality hold for every candidate "
                             "inner divisor" if not candidates else
                             "no verified witness for any candidate inner divisor")
    return Verdict(Status.UNKNOWN, "unknown-gap", None, base, diagnostics)
