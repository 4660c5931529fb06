"""Decreasing rearrangements, level-set families and the sign-perturbation test.

On a grid the decreasing rearrangement is a stable descending sort.  The sort
permutation ``omega`` plays the role of a measure-preserving map with
``x* = x o omega``; the superlevel family ``E_{t_k}`` is the set of the first
``k`` indices of ``omega``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PreconditionError
from .grid import Role, SampledFunction, require_same_grid


@dataclass(frozen=True, eq=False)
class RearrangementResult:
    """``mu_star = x[omega]`` is non-increasing; ``omega_inv`` undoes the sort."""

    mu_star: SampledFunction
    omega: np.ndarray
    omega_inv: np.ndarray

    def pull_back(self, values) -> np.ndarray:
        """Compose cell values with ``omega`` (``v o omega`` in the rearranged frame)."""
        return np.asarray(values)[self.omega]

    def push_forward(self, values) -> np.ndarray:
        """Inverse of :meth:`pull_back`."""
        return np.asarray(values)[self.omega_inv]

    @cached_property
    def levels(self) -> "LevelFamily":
        return LevelFamily(self)


def decreasing_rearrangement(x: SampledFunction) -> RearrangementResult:
    """Stable descending sort of a modulus; ties keep their original order."""
    if x.role is Role.TRACE:
        raise PreconditionError("rearrange the modulus, not the complex trace")
    vals = np.asarray(x.values)
    omega = np.argsort(-vals, kind="stable")
    omega_inv = np.empty_like(omega)
    omega_inv[omega] = np.arange(omega.size)
    omega.setflags(write=False)
    omega_inv.setflags(write=False)
    return RearrangementResult(SampledFunction(x.grid, vals[omega], x.role), omega, omega_inv)


def check_equimeasurable(x: SampledFunction, y: SampledFunction, tol: float = 0.0) -> bool:
    """True when the decreasing rearrangements agree within ``tol`` in every cell."""
    require_same_grid(x, y)
    xs = np.sort(np.asarray(x.values))[::-1]
    ys = np.sort(np.asarray(y.values))[::-1]
    return bool(np.max(np.abs(xs - ys)) <= tol)


class LevelFamily:
    """Nested superlevel sets ``E_{t_k} = omega[:k]`` of a rearrangement."""

    def __init__(self, r: RearrangementResult):
        self._r = r
        self.n_samples = r.mu_star.n_samples
        cells = np.concatenate([[0.0], np.cumsum(np.asarray(r.mu_star.values))])
        self._masses = cells * r.mu_star.grid.step

    def members(self, k: int) -> np.ndarray:
        """Indices in the original frame of the level set of measure ``k*h``."""
        if not 0 <= k <= self.n_samples:
            raise IndexError(k)
        return self._r.omega[:k]

    def indicator(self, k: int) -> np.ndarray:
        ind = np.zeros(self.n_samples, dtype=bool)
        ind[self.members(k)] = True
        return ind

    def mass(self, k: int) -> float:
        """Integral of the function over ``E_{t_k}``."""
        return float(self._masses[k])

    @property
    def masses(self) -> np.ndarray:
        return self._masses.copy()


def prefix_level_family(r: RearrangementResult) -> LevelFamily:
    return r.levels


@dataclass(frozen=True)
class Reduction4Report:
    """Flags for the equivalence between rearranging ``g(1 +- h)`` and monotonicity.

    ``flag_ii``: the rearrangement of ``g(1 +- h)`` equals ``g*(1 +- h o omega)``.
    ``flag_iii``: both sequences ``g*(1 +- h o omega)`` are non-increasing.
    """

    flag_ii: bool
    flag_iii: bool
    max_increase: float
    max_mismatch: float

    @property
    def equivalent(self) -> bool:
        return self.flag_ii == self.flag_iii


def verify_reduction4(g: SampledFunction, h: SampledFunction, r: RearrangementResult,
                      tol: float = 1e-9) -> Reduction4Report:
    """Check both sides of the rearrangement / monotonicity equivalence."""
    require_same_grid(g, h, r.mu_star)
    gv = np.asarray(g.values, dtype=float)
    if np.any(gv <= 0):
        raise PreconditionError("g must be strictly positive")
    hv = np.asarray(h.values, dtype=float)
    if np.any(np.abs(hv) > 1 + 1e-12):
        raise PreconditionError("h must satisfy |h| <= 1")
    gs = np.asarray(r.mu_star.values)
    if np.max(np.abs(gv[r.omega] - gs)) > tol:
        raise PreconditionError("r is not the rearrangement of g")
    h_om = hv[r.omega]

    increase = 0.0
    mismatch = 0.0
    for sign in (1.0, -1.0):
        eta = gs * (1.0 + sign * h_om)
        increase = max(increase, float(np.max(np.diff(eta), initial=0.0)))
        direct = np.sort(gv * (1.0 + sign * hv), kind="stable")[::-1]
        mismatch = max(mismatch, float(np.max(np.abs(direct - eta))))
    return Reduction4Report(
        flag_ii=mismatch <= tol,
        flag_iii=increase <= tol,
        max_increase=increase,
        max_mismatch=mismatch,
    )
