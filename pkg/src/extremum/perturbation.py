"""Real multipliers, companion functions and the witness search.

Given ``f = F * I`` with ``I`` inner and ``F`` analytic, the multiplier

    h(t) = alpha + beta * cos(xi(t) - theta),   |alpha| + |beta| <= 1,

has ``g = h f`` analytic, because ``g = (alpha I + w I^2 + conj(w)) F`` with
``w = (beta/2) e^{-i theta}``.  When ``|f|`` has unit Lorentz norm, ``f`` is
not an extreme point of the unit ball as soon as some such ``h`` keeps both
``mu*(1 + h o omega)`` and ``mu*(1 - h o omega)`` non-increasing and the
balance condition ``alpha = -beta * B(theta)`` holds, with

    B(theta) = sum_i mu*_i cos(xi(omega_i) - theta) dphi_i.

The search scans ``theta`` and halves ``beta``.  A grid can always admit a
tiny ``beta`` near a point where the modulus is flat only to grid accuracy,
so a candidate is accepted only if its largest admissible ``beta`` survives
coarsening: it must be at least ``config.stability`` times the value found
after averaging over blocks of ``config.stability_block`` cells.  A genuine
witness has an admissible range independent of the resolution; an artefact
shrinks proportionally to the cell width.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import BoundaryTrace, negative_residual
from .config import AnalysisConfig, thread_count
from .errors import PreconditionError
from .grid import TWO_PI, Gauge, Role, SampledFunction, require_same_grid
from .norms import lorentz_norm
from .rearrangement import decreasing_rearrangement

MIN_G_SUP = 1e-8
NORM_CHECK_TOL = 1e-9
_CHUNK = 32


@dataclass(frozen=True)
class PerturbationParams:
    """Parameters ``(alpha, beta, theta)`` of ``h = alpha + beta cos(xi - theta)``."""

    alpha: float
    beta: float
    theta: float

    def __post_init__(self):
        a, b, th = float(self.alpha), float(self.beta), float(self.theta)
        if not all(math.isfinite(v) for v in (a, b, th)):
            raise PreconditionError("perturbation parameters must be finite")
        if b == 0.0:
            raise PreconditionError("beta must be non-zero")
        if abs(a) + abs(b) > 1.0 + 1e-12:
            raise PreconditionError(f"|alpha| + |beta| = {abs(a) + abs(b):.6g} exceeds 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "theta", th % TWO_PI)

    @property
    def w(self) -> complex:
        return 0.5 * self.beta * complex(math.cos(self.theta), -math.sin(self.theta))


def _branch(xi) -> np.ndarray:
    return np.asarray(xi.arg_branch if isinstance(xi, BoundaryTrace) else xi, dtype=float)


def perturbation_h(p: PerturbationParams, xi, grid=None) -> SampledFunction:
    """Sample ``h`` along an argument branch (a trace or a plain array)."""
    xi_v = _branch(xi)
    if grid is None:
        if not isinstance(xi, BoundaryTrace):
            raise PreconditionError("pass a grid when xi is a plain array")
        grid = xi.grid
    vals = p.alpha + p.beta * np.cos(xi_v - p.theta)
    return SampledFunction(grid, np.clip(vals, -1.0, 1.0), Role.SIGNED)


def companion_g(p: PerturbationParams, inner: BoundaryTrace, outer: BoundaryTrace) -> SampledFunction:
    """Trace of ``(alpha I + w I^2 + conj(w)) F``, which equals ``h * I * F`` on the circle."""
    require_same_grid(inner.trace, outer.trace)
    iv = np.asarray(inner.values)
    w = p.w
    vals = (p.alpha * iv + w * iv * iv + np.conj(w)) * np.asarray(outer.values)
    return SampledFunction(inner.grid, vals, Role.TRACE)


def check_lf_membership(f_trace, h: SampledFunction, tol: float = 1e-6,
                        k_max: int | None = None, outer=None) -> bool:
    """Whether ``h`` is a non-constant real direction with ``|h| <= 1`` and ``h f`` analytic.

    ``h`` counts as constant when its range is narrower than ``tol``.  With
    ``outer`` given, the negative-frequency test is applied to ``h f / outer``.
    """
    hv = np.asarray(h.values, dtype=float)
    if np.max(np.abs(hv)) > 1 + 1e-12 or np.ptp(hv) <= tol:
        return False
    fv = np.asarray(f_trace.values if hasattr(f_trace, "values") else f_trace)
    return negative_residual(hv * fv, k_max, outer) < tol


def balance_integral(mu_star, xi_omega, theta: float, gauge: Gauge) -> float:
    """``B(theta) = sum_i mu*_i cos(xi(omega_i) - theta) dphi_i``."""
    ms = np.asarray(mu_star.values if isinstance(mu_star, SampledFunction) else mu_star)
    return float(np.dot(ms * np.cos(np.asarray(xi_omega) - theta), gauge.increments))


def monotone_check(mu_star, h_omega, slack: float = 1e-12) -> bool:
    """Both ``mu*(1 + h_omega)`` and ``mu*(1 - h_omega)`` are non-increasing within ``slack``."""
    ms = np.asarray(mu_star.values if isinstance(mu_star, SampledFunction) else mu_star, dtype=float)
    hv = np.asarray(h_omega.values if isinstance(h_omega, SampledFunction) else h_omega, dtype=float)
    if ms.shape != hv.shape:
        raise PreconditionError("mu_star and h_omega have different lengths")
    if np.any(np.diff(ms) > slack):
        raise PreconditionError("mu_star is not non-increasing")
    for sign in (1.0, -1.0):
        if np.any(np.diff(ms * (1.0 + sign * hv)) > slack):
            return False
    return True


@dataclass(frozen=True)
class WitnessCheck:
    norm_plus: float
    norm_minus: float
    residual: float
    raw_residual: float
    g_sup: float
    accepted: bool


def verify_witness(f_trace, g_trace, gauge: Gauge, tol: float = 1e-4,
                   fourier_tol: float = 1e-6, outer=None,
                   k_max: int | None = None) -> WitnessCheck:
    """Independent check of a candidate ``g``: both ``||f +- g||`` equal one and ``g`` is analytic.

    ``residual`` is the negative-frequency residual of ``g / outer`` when an
    outer trace is supplied (of ``g`` itself otherwise); ``raw_residual`` is
    always the residual of ``g`` and is reported for information.
    """
    fv = np.asarray(f_trace.values if hasattr(f_trace, "values") else f_trace)
    gv = np.asarray(g_trace.values if hasattr(g_trace, "values") else g_trace)
    if fv.shape != gv.shape or fv.shape != gauge.increments.shape:
        raise PreconditionError("f, g and the gauge must share a grid")
    n_plus = lorentz_norm(np.abs(fv + gv), gauge)
    n_minus = lorentz_norm(np.abs(fv - gv), gauge)
    raw = negative_residual(gv, k_max)
    res = raw if outer is None else negative_residual(gv, k_max, outer)
    sup = float(np.max(np.abs(gv)))
    top = max(n_plus, n_minus)
    ok = (n_plus <= 1 + tol and n_minus <= 1 + tol and top >= 1 - tol
          and res < fourier_tol and sup > MIN_G_SUP)
    return WitnessCheck(n_plus, n_minus, res, raw, sup, bool(ok))


@dataclass(frozen=True, eq=False)
class Witness:
    """A verified perturbation showing that ``f`` is not extreme."""

    params: PerturbationParams
    g_trace: SampledFunction
    norm_plus: float
    norm_minus: float
    neg_fourier_residual: float
    raw_fourier_residual: float
    balance: float
    beta_max: float
    stability: float
    theta_index: int
    from_hint: bool
    inner_subset: tuple = ()

    @property
    def balance_residual(self) -> float:
        """``|B(theta) + alpha/beta|``, zero up to rounding by construction."""
        return abs(self.balance + self.params.alpha / self.params.beta)


@dataclass(frozen=True, eq=False)
class ThetaScan:
    """Per-candidate diagnostics of a witness search."""

    thetas: np.ndarray
    from_hint: np.ndarray
    balance: np.ndarray
    beta_max: np.ndarray
    beta_max_coarse: np.ndarray
    witness: Witness | None = None
    candidates_tried: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def stability(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            s = self.beta_max / self.beta_max_coarse
        return np.where(np.isfinite(s), s, 0.0)


def admissible_beta(mu_star: np.ndarray, cos_table: np.ndarray, increments: np.ndarray,
                    slack: float) -> tuple[np.ndarray, np.ndarray]:
    """Largest ``beta`` keeping ``mu*(1 +- h)`` monotone, with ``alpha = -beta B``.

    ``cos_table[j, i] = cos(xi(omega_i) - theta_j)``.  Writing
    ``D_i = mu*_i (C_i - B)``, monotonicity of both sequences reads
    ``beta |D_i - D_{i+1}| <= mu*_i - mu*_{i+1} + slack``; the constraint
    ``|alpha| + beta <= 1`` adds ``beta <= 1 / (1 + |B|)``.
    Returns ``(beta_max, B)`` per row.
    """
    B = cos_table @ (mu_star * increments)
    D = mu_star[None, :] * (cos_table - B[:, None])
    dD = np.abs(D[:, :-1] - D[:, 1:])
    dm = (mu_star[:-1] - mu_star[1:])[None, :] + slack
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(dD > 0, dm / dD, np.inf)
    bmax = np.minimum(ratio.min(axis=1, initial=np.inf), 1.0 / (1.0 + np.abs(B)))
    return bmax, B


def _coarsen(a: np.ndarray, block: int) -> np.ndarray:
    return a.reshape(*a.shape[:-1], -1, block).mean(axis=-1)


def flattest_index(mu_star, lo: int = 0, hi: int | None = None) -> int:
    """Index ``i`` in ``[lo, hi]`` minimising the relative decrement ``(mu*_i - mu*_{i+1}) / mu*_{i+1}``."""
    ms = np.asarray(mu_star.values if isinstance(mu_star, SampledFunction) else mu_star)
    n = ms.size
    hi = n - 2 if hi is None else min(hi, n - 2)
    lo = max(0, min(lo, hi))
    r = (ms[lo:hi + 1] - ms[lo + 1:hi + 2]) / ms[lo + 1:hi + 2]
    return lo + int(np.argmin(r))


def hint_angle(i: int, omega: np.ndarray, xi_omega: np.ndarray) -> float:
    """Argument at the flat point between rearranged cells ``i`` and ``i + 1``."""
    if i + 1 < len(omega) and abs(int(omega[i + 1]) - int(omega[i])) == 1:
        return float(0.5 * (xi_omega[i] + xi_omega[i + 1]))
    return float(xi_omega[i])


def flat_hints(mu_star, omega, xi_omega, limit: int = 16, window: int = 8) -> list[float]:
    """Angles at pronounced local minima of the relative decrement of ``mu*``.

    A cell qualifies when its relative decrement is the smallest within
    ``window`` cells and at most a quarter of the largest there.  These are
    the places where ``theta`` has to be aligned with the argument for a
    witness to exist.
    """
    ms = np.asarray(mu_star.values if isinstance(mu_star, SampledFunction) else mu_star)
    r = (ms[:-1] - ms[1:]) / ms[1:]
    m = r.size
    pad_hi = np.concatenate([np.full(window, -np.inf), r, np.full(window, -np.inf)])
    pad_lo = np.concatenate([np.full(window, np.inf), r, np.full(window, np.inf)])
    view_hi = np.lib.stride_tricks.sliding_window_view(pad_hi, 2 * window + 1)
    view_lo = np.lib.stride_tricks.sliding_window_view(pad_lo, 2 * window + 1)
    local_max = view_hi.max(axis=1)
    local_min = view_lo.min(axis=1)
    cand = np.nonzero((r <= local_min) & (r <= 0.25 * local_max))[0]
    # keep one representative per run of equal minima
    keep = [i for k, i in enumerate(cand) if k == 0 or i - cand[k - 1] > window]
    keep.sort(key=lambda i: (r[i], i))
    return [hint_angle(int(i), np.asarray(omega), np.asarray(xi_omega)) % TWO_PI
            for i in keep[:limit]]


def _require_unit_norm(mu: SampledFunction, gauge: Gauge) -> None:
    if not gauge.admissible:
        raise PreconditionError("gauge must be strictly increasing and strictly concave")
    n = lorentz_norm(mu, gauge)
    if abs(n - 1.0) > NORM_CHECK_TOL:
        raise PreconditionError(f"modulus has Lorentz norm {n:.12g}; normalise it first")


def scan_witness(mu: SampledFunction, inner: BoundaryTrace, outer: BoundaryTrace,
                 gauge: Gauge, config: AnalysisConfig | None = None,
                 theta_hints=None, inner_subset: tuple = ()) -> ThetaScan:
    """Run the ``theta`` x ``beta`` search and keep per-candidate diagnostics.

    Candidates are the hint angles (the flat points of ``mu*`` when
    ``theta_hints`` is None) followed by the uniform grid of
    ``config.theta_steps`` angles; the first candidate that passes wins.
    """
    config = config or AnalysisConfig()
    require_same_grid(mu, inner.trace, outer.trace)
    _require_unit_norm(mu, gauge)
    r = decreasing_rearrangement(mu)
    ms = np.asarray(r.mu_star.values)
    xi_om = np.asarray(inner.arg_branch)[r.omega]
    if theta_hints is None:
        theta_hints = flat_hints(ms, r.omega, xi_om)
    hints = [float(t) % TWO_PI for t in theta_hints]
    uniform = TWO_PI * np.arange(config.theta_steps) / config.theta_steps
    thetas = np.concatenate([np.asarray(hints, dtype=float), uniform])
    from_hint = np.arange(thetas.size) < len(hints)

    inc = np.asarray(gauge.increments)
    block = config.stability_block
    n = ms.size
    if n % block or n // block < 4:
        raise PreconditionError("stability_block must divide the grid into at least 4 blocks")
    ms_c = _coarsen(ms, block)
    inc_c = inc.reshape(-1, block).sum(axis=1)

    def evaluate(chunk):
        cos_t = np.cos(xi_om[None, :] - chunk[:, None])
        bmax, B = admissible_beta(ms, cos_t, inc, config.monotone_slack)
        bmax_c, _ = admissible_beta(ms_c, _coarsen(cos_t, block), inc_c, config.monotone_slack)
        return bmax, B, bmax_c

    chunks = [thetas[i:i + _CHUNK] for i in range(0, thetas.size, _CHUNK)]
    workers = min(thread_count(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(c) for c in chunks]
    bmax = np.concatenate([p[0] for p in parts])
    B = np.concatenate([p[1] for p in parts])
    bmax_c = np.concatenate([p[2] for p in parts])

    beta_floor = config.beta0 * 2.0 ** (-config.max_halvings)
    with np.errstate(divide="ignore", invalid="ignore"):
        stab = np.where(bmax_c > 0, bmax / bmax_c, 0.0)
    f_vals = np.asarray(inner.values) * np.asarray(outer.values)
    tried = 0
    witness = None
    for j in np.nonzero((bmax >= beta_floor) & (stab >= config.stability))[0]:
        tried += 1
        theta = float(thetas[j])
        cos_j = np.cos(xi_om - theta)
        found = None
        for k in range(config.max_halvings + 1):
            beta = config.beta0 * 2.0 ** (-k)
            alpha = -beta * float(B[j])
            if abs(alpha) + beta > 1.0:
                continue
            if monotone_check(ms, alpha + beta * cos_j, config.monotone_slack):
                found = PerturbationParams(alpha, beta, theta)
                break
        if found is None:
            continue
        g = companion_g(found, inner, outer)
        chk = verify_witness(f_vals, g, gauge, config.norm_tol, config.fourier_tol, outer=outer)
        if not chk.accepted:
            continue
        witness = Witness(found, g, chk.norm_plus, chk.norm_minus, chk.residual,
                          chk.raw_residual, float(B[j]), float(bmax[j]), float(stab[j]),
                          int(j), bool(from_hint[j]), tuple(inner_subset))
        break
    return ThetaScan(thetas, from_hint, B, bmax, bmax_c, witness, tried)


def witness_search(mu: SampledFunction, inner: BoundaryTrace, outer: BoundaryTrace,
                   gauge: Gauge, config: AnalysisConfig | None = None,
                   theta_hints=None) -> Witness | None:
    """Search for a verified witness; ``None`` when the scan is exhausted."""
    return scan_witness(mu, inner, outer, gauge, config, theta_hints).witness
