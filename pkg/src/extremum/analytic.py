"""Boundary traces of Blaschke factors and outer functions.

A :class:`BoundaryTrace` stores complex cell-centre samples together with a
continuous branch ``xi`` of their argument.  For a Blaschke factor

    I_a(z) = (|a|/a) (a - z) / (1 - conj(a) z)      (I_0(z) = z)

the branch is available in closed form,

    xi_a(t) = arg(-|a|/a) + t + 2 Arg(1 - a e^{-it}),

which is continuous on the whole real line (``1 - a e^{-it}`` has positive
real part) and gains exactly ``2*pi`` per turn.  Outer functions are built
from their modulus with the spectral conjugate function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import PreconditionError
from .grid import TWO_PI, GridSpec, Role, SampledFunction, require_same_grid

MAX_MODULUS = 1.0 - 1e-9


@dataclass(frozen=True)
class BlaschkePoint:
    """A zero ``a`` of a Blaschke factor, with ``|a| <= 1 - 1e-9``."""

    a: complex

    def __post_init__(self):
        a = complex(self.a)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise PreconditionError("Blaschke zero must be finite")
        if abs(a) > MAX_MODULUS:
            raise PreconditionError(f"Blaschke zero {a} is not inside the disc (|a| <= 1 - 1e-9)")
        object.__setattr__(self, "a", a)

    @property
    def modulus(self) -> float:
        return abs(self.a)


def _as_point(a) -> BlaschkePoint:
    return a if isinstance(a, BlaschkePoint) else BlaschkePoint(a)


def blaschke_factor(a, z):
    """Evaluate ``I_a`` at points ``z`` of the closed disc."""
    a = _as_point(a).a
    z = np.asarray(z, dtype=complex)
    if a == 0:
        return z
    return (abs(a) / a) * (a - z) / (1 - np.conj(a) * z)


def blaschke_argument(a, t):
    """Continuous argument ``xi_a(t)`` of ``I_a(e^{it})`` for real ``t``."""
    a = _as_point(a).a
    t = np.asarray(t, dtype=float)
    if a == 0:
        return t.copy()
    shift = np.angle(-abs(a) / a)
    return shift + t + 2.0 * np.angle(1.0 - a * np.exp(-1j * t))


def lipschitz_constants(a) -> tuple[float, float]:
    """Constants ``(C_a, c_a)`` bounding ``|sin((xi(v) - xi(u))/2)|`` above and below.

    ``|sin((xi(v)-xi(u))/2)| <= C_a |v - u|`` for all real ``u, v`` and
    ``>= c_a |v - u|`` whenever ``|v - u| <= pi``.
    """
    r = _as_point(a).modulus
    return (1 + r) / (2 * (1 - r)), (1 - r) / (math.pi * (1 + r))


def sine_half_gap_values(a, u, v):
    """``|sin((xi_a(v) - xi_a(u))/2)|`` for real ``u`` and ``v``."""
    return np.abs(np.sin(0.5 * (blaschke_argument(a, v) - blaschke_argument(a, u))))


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Complex boundary samples plus a continuous branch of their argument."""

    trace: SampledFunction
    arg_branch: np.ndarray

    def __post_init__(self):
        if self.trace.role is not Role.TRACE:
            raise PreconditionError("a boundary trace must have role 'trace'")
        xi = np.array(self.arg_branch, dtype=float)
        if xi.shape != (self.trace.n_samples,):
            raise PreconditionError("argument branch must have one value per cell")
        xi.setflags(write=False)
        object.__setattr__(self, "arg_branch", xi)

    @property
    def grid(self) -> GridSpec:
        return self.trace.grid

    @property
    def values(self) -> np.ndarray:
        return self.trace.values

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.trace.values)

    def with_branch_offset(self, turns: int) -> "BoundaryTrace":
        """Same trace with the argument branch shifted by ``2*pi*turns``."""
        return BoundaryTrace(self.trace, self.arg_branch + TWO_PI * int(turns))


def blaschke_boundary(a, grid: GridSpec) -> BoundaryTrace:
    """Trace of ``I_a`` on the cell centres, branch chosen with ``xi`` at the first centre in ``(-pi, pi]``."""
    nodes = np.asarray(grid.nodes)
    xi = blaschke_argument(a, nodes)
    turns = math.ceil((xi[0] - math.pi) / TWO_PI)
    xi = xi - TWO_PI * turns
    vals = blaschke_factor(a, np.exp(1j * nodes))
    return BoundaryTrace(SampledFunction(grid, vals, Role.TRACE), xi)


def winding(tr: BoundaryTrace) -> float:
    """Change of the argument branch over one turn, ``xi(2*pi) - xi(0)``.

    Computed from the unwrapped phase of the samples followed by the first
    sample again, so it does not trust the stored branch.
    """
    vals = np.asarray(tr.values)
    phase = np.unwrap(np.angle(np.concatenate([vals, vals[:1]])))
    return float(phase[-1] - phase[0])


def sine_half_gap(u_idx, v_idx, tr: BoundaryTrace):
    """``|sin((xi(v) - xi(u))/2)|`` for cell indices ``u_idx`` and ``v_idx``."""
    xi = tr.arg_branch
    return np.abs(np.sin(0.5 * (xi[np.asarray(v_idx)] - xi[np.asarray(u_idx)])))


def trace_product(traces) -> BoundaryTrace:
    """Pointwise product of traces; argument branches add."""
    traces = list(traces)
    if not traces:
        raise PreconditionError("empty product")
    require_same_grid(*(t.trace for t in traces))
    vals = reduce(np.multiply, (np.asarray(t.values) for t in traces))
    xi = reduce(np.add, (np.asarray(t.arg_branch) for t in traces))
    return BoundaryTrace(SampledFunction(traces[0].grid, vals, Role.TRACE), xi)


def blaschke_product(points, grid: GridSpec) -> BoundaryTrace:
    """Trace of a finite Blaschke product (the constant 1 for an empty list)."""
    points = list(points)
    if not points:
        return BoundaryTrace(SampledFunction(grid, np.ones(grid.n_samples), Role.TRACE),
                             np.zeros(grid.n_samples))
    return trace_product(blaschke_boundary(a, grid) for a in points)


def conjugate_function(values) -> np.ndarray:
    """Spectral conjugate function: Fourier multiplier ``-i sgn(k)``.

    The mean and the Nyquist coefficient are dropped, so the result has
    zero mean.  The multiplier is diagonal in frequency, so the cell-centre
    offset of the samples needs no correction.
    """
    vals = np.asarray(values, dtype=float)
    n = vals.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = -1j * np.sign(k)
    mult[n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(vals) * mult).real


def outer_from_modulus(mu: SampledFunction, lam: float = 0.0,
                       floor: float = 1e-6) -> BoundaryTrace:
    """Boundary trace ``mu * exp(i (C[ln mu] + lam))`` of the outer function with modulus ``mu``."""
    vals = np.asarray(mu.values, dtype=float)
    if mu.role is Role.TRACE:
        raise PreconditionError("outer_from_modulus expects a modulus")
    if np.min(vals) < floor:
        raise PreconditionError(
            f"modulus drops to {np.min(vals):.3g}, below the floor {floor:g}; "
            "log-integrability cannot be certified"
        )
    arg = conjugate_function(np.log(vals)) + float(lam)
    return BoundaryTrace(SampledFunction(mu.grid, vals * np.exp(1j * arg), Role.TRACE), arg)


def _values(tr) -> np.ndarray:
    if isinstance(tr, BoundaryTrace):
        return np.asarray(tr.values)
    if isinstance(tr, SampledFunction):
        return np.asarray(tr.values)
    return np.asarray(tr)


def fourier_coefficients(tr, k_max: int) -> np.ndarray:
    """Coefficients ``c_{-k_max}, ..., c_{k_max}`` of the sampled function.

    ``c_k = (1/N) sum_i g(s_i) e^{-i k s_i}`` with ``s_i`` the cell centres, so
    trigonometric polynomials of degree below ``N/2`` are recovered exactly.
    """
    vals = _values(tr).astype(complex)
    n = vals.size
    if not 0 <= k_max <= n // 2 - 1:
        raise PreconditionError(f"k_max must lie in [0, {n // 2 - 1}]")
    ks = np.arange(-k_max, k_max + 1)
    spec = np.fft.fft(vals) / n
    return spec[ks % n] * np.exp(-1j * ks * (math.pi / n))


def negative_residual(tr, k_max: int | None = None, outer=None) -> float:
    """``max_{1<=k<=k_max} |c_{-k}|`` of the trace, optionally divided by ``outer``.

    Dividing by the trace of an outer function ``F`` tests analyticity of
    ``g/F``.  For ``|g| <= C|F|`` this is equivalent to analyticity of ``g``,
    and it avoids the aliasing floor that the slowly decaying coefficients
    of ``F`` itself impose on a finite grid.
    """
    vals = _values(tr).astype(complex)
    if outer is not None:
        vals = vals / _values(outer)
    n = vals.size
    k_max = n // 2 - 1 if k_max is None else int(k_max)
    c = fourier_coefficients(vals, k_max)
    return float(np.max(np.abs(c[:k_max]), initial=0.0))


@dataclass(frozen=True)
class AnalyticityCheck:
    ok: bool
    residual: float


def check_analytic(tr, tol: float = 1e-8, k_max: int | None = None,
                   outer=None) -> AnalyticityCheck:
    """True when all negative-index coefficients up to ``k_max`` are below ``tol``."""
    res = negative_residual(tr, k_max, outer)
    return AnalyticityCheck(res < tol, res)
