"""Lorentz and Marcinkiewicz norms on a grid.

For a modulus ``x`` with rearrangement ``x*`` the Lorentz norm is the
Stieltjes sum ``sum_i x*_i (phi(t_{i+1}) - phi(t_i))``.  The Marcinkiewicz
norm is ``max_k (h * sum_{i<k} x*_i) / phi(t_k)``.
"""
from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .grid import Gauge, Role, SampledFunction, require_same_grid


def _modulus_values(x) -> np.ndarray:
    if isinstance(x, SampledFunction):
        vals = np.asarray(x.values)
        return np.abs(vals) if x.role is not Role.MODULUS else vals
    return np.abs(np.asarray(x))


def _check_gauge(x, gauge: Gauge) -> None:
    if isinstance(x, SampledFunction) and x.grid.n_samples != gauge.grid.n_samples:
        raise PreconditionError("function and gauge live on different grids")


def lorentz_norm(x, gauge: Gauge) -> float:
    """Lorentz norm of the modulus of ``x`` (a sampled function or a value array)."""
    _check_gauge(x, gauge)
    vals = _modulus_values(x)
    if vals.shape != gauge.increments.shape:
        raise PreconditionError("function and gauge live on different grids")
    return float(np.dot(np.sort(vals)[::-1], gauge.increments))


def marcinkiewicz_norm(x, gauge: Gauge) -> float:
    """Dual (Marcinkiewicz) norm of the modulus of ``x``."""
    _check_gauge(x, gauge)
    vals = _modulus_values(x)
    if vals.shape != gauge.increments.shape:
        raise PreconditionError("function and gauge live on different grids")
    if not gauge.strictly_increasing:
        raise PreconditionError("the Marcinkiewicz norm needs a strictly increasing gauge")
    mass = np.cumsum(np.sort(vals)[::-1]) * gauge.grid.step
    phi = np.asarray(gauge.phi_values[1:])
    pos = phi > 0
    return float(np.max(mass[pos] / phi[pos]))


def normalize(x: SampledFunction, gauge: Gauge) -> tuple[SampledFunction, float]:
    """Scale ``x`` to unit Lorentz norm; returns the scaled function and the factor used."""
    n = lorentz_norm(x, gauge)
    if not n > 0:
        raise PreconditionError("cannot normalise a function of zero norm")
    return SampledFunction(x.grid, np.asarray(x.values) / n, x.role), n


def check_norm_equality_case(f: SampledFunction, g: SampledFunction, gauge: Gauge,
                             tol: float = 1e-9) -> tuple[bool, bool]:
    """Compare ``(|f|+|g|)* = |f|* + |g|*`` with ``||f+g|| = ||f|| + ||g||``.

    ``f`` and ``g`` are taken as moduli (their absolute values are used), so
    the second flag concerns ``| |f| + |g| |``.  For a strictly concave gauge
    the two flags agree.
    """
    require_same_grid(f, g)
    a = _modulus_values(f)
    b = _modulus_values(g)
    s = a + b
    rearr = bool(np.max(np.abs(np.sort(s)[::-1] - (np.sort(a)[::-1] + np.sort(b)[::-1]))) <= tol)
    norm = bool(abs(lorentz_norm(s, gauge) - lorentz_norm(a, gauge) - lorentz_norm(b, gauge)) <= tol)
    return rearr, norm
