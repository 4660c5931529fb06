"""Analysis configuration shared by every stage of the pipeline."""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import PreconditionError

THREADS_ENV = "EXTREMUM_THREADS"


@dataclass(frozen=True)
class AnalysisConfig:
    """Numerical knobs for rearrangement, critical-set detection and witness search.

    Defaults reproduce the reference configuration.  ``stability`` and
    ``stability_block`` control the resolution check that separates genuine
    witnesses from grid artefacts: the largest admissible ``beta`` on the
    working grid must be at least ``stability`` times the one obtained after
    averaging over blocks of ``stability_block`` cells.
    """

    n_samples: int = 4096
    gauge_p: float = 2.0
    eps_crit: float = 1e-3
    rho: float = 0.5
    tol_ang: float = 1e-2
    theta_steps: int = 256
    gamma_steps: int = 128
    beta0: float = 0.5
    max_halvings: int = 20
    norm_tol: float = 1e-4
    fourier_tol: float = 1e-6
    modulus_floor: float = 1e-6
    k_min: int = 3
    monotone_slack: float = 1e-12
    stability: float = 0.25
    stability_block: int = 8

    def __post_init__(self):
        n = self.n_samples
        if int(n) != n or n < 16 or n & (n - 1):
            raise PreconditionError(f"n_samples must be a power of two >= 16, got {n}")
        if not self.gauge_p > 1.0:
            raise PreconditionError(
                f"gauge exponent p={self.gauge_p} does not give a strictly concave gauge (need p > 1)"
            )
        for name in ("eps_crit", "rho", "tol_ang", "beta0", "norm_tol", "fourier_tol",
                     "modulus_floor", "stability"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        if not 0 < self.rho < 1:
            raise PreconditionError("rho must lie in (0, 1)")
        if self.beta0 > 1:
            raise PreconditionError("beta0 must not exceed 1")
        for name in ("theta_steps", "gamma_steps", "stability_block"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be at least 1")
        if self.max_halvings < 0 or self.monotone_slack < 0:
            raise PreconditionError("max_halvings and monotone_slack must be non-negative")
        if self.k_min < 1:
            raise PreconditionError("k_min must be at least 1")

    def replace(self, **changes) -> "AnalysisConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def thread_count() -> int:
    """Worker threads allowed by ``EXTREMUM_THREADS`` (default: CPU count, at most 8)."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))
