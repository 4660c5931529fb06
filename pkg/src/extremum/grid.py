"""Uniform grids on the circle, sampled functions and concave gauges.

The circle is parametrised by ``t`` in ``[0, 2*pi)``.  A grid with ``N`` cells
has edges ``t_i = 2*pi*i/N`` (``i = 0..N``) and every function is represented
by one value per cell, taken at the cell centre ``(t_i + t_{i+1})/2``.  With
this convention the Stieltjes sums used for Lorentz norms are midpoint rules,
which converge faster than left-endpoint sums for monotone profiles.

A gauge ``phi`` is stored through its values at the ``N + 1`` edges.
"""
from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DataError, PreconditionError

TWO_PI = 2.0 * math.pi
STRICT_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridSpec:
    """Uniform partition of ``[0, 2*pi]`` into ``n_samples`` cells."""

    n_samples: int

    def __post_init__(self):
        n = self.n_samples
        if isinstance(n, bool) or int(n) != n:
            raise PreconditionError(f"n_samples must be an integer, got {n!r}")
        n = int(n)
        if n < 16 or n & (n - 1):
            raise PreconditionError(f"n_samples must be a power of two >= 16, got {n}")
        object.__setattr__(self, "n_samples", n)

    @property
    def step(self) -> float:
        return TWO_PI / self.n_samples

    @cached_property
    def edges(self) -> np.ndarray:
        """Cell boundaries ``t_0 = 0 < ... < t_N = 2*pi``."""
        e = TWO_PI * np.arange(self.n_samples + 1) / self.n_samples
        e[-1] = TWO_PI
        return _readonly(e)

    @cached_property
    def nodes(self) -> np.ndarray:
        """Cell centres, where functions are sampled."""
        return _readonly(TWO_PI * (np.arange(self.n_samples) + 0.5) / self.n_samples)

    def nearest_index(self, t) -> np.ndarray:
        """Index of the cell whose centre is closest to ``t`` (taken modulo ``2*pi``)."""
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        return np.floor(t / self.step).astype(int) % self.n_samples


def make_grid(n_samples: int) -> GridSpec:
    return GridSpec(n_samples)


class Role(str, Enum):
    MODULUS = "modulus"
    TRACE = "trace"
    SIGNED = "real-signed"


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Immutable cell-centre samples of a function on the circle.

    ``role`` records what the samples represent: a non-negative modulus, a
    complex boundary trace, or a real function bounded by one in absolute
    value (a perturbation).
    """

    grid: GridSpec
    values: np.ndarray
    role: Role = Role.MODULUS

    def __post_init__(self):
        role = Role(self.role)
        dtype = complex if role is Role.TRACE else float
        try:
            vals = np.asarray(self.values, dtype=dtype)
        except (TypeError, ValueError) as exc:
            raise PreconditionError(f"cannot interpret samples as {dtype.__name__}") from exc
        if vals.shape != (self.grid.n_samples,):
            raise PreconditionError(
                f"expected {self.grid.n_samples} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("samples must be finite")
        if role is Role.MODULUS and np.any(vals < 0):
            raise PreconditionError("a modulus must be non-negative")
        if role is Role.SIGNED and np.any(np.abs(vals) > 1 + STRICT_TOL):
            raise PreconditionError("a perturbation must satisfy |h| <= 1")
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def n_samples(self) -> int:
        return self.grid.n_samples

    def __len__(self) -> int:
        return self.grid.n_samples


def sample(grid: GridSpec, func: Callable[[np.ndarray], np.ndarray],
           role: Role = Role.MODULUS) -> SampledFunction:
    """Evaluate ``func`` at the cell centres of ``grid``."""
    return SampledFunction(grid, func(grid.nodes), role)


def require_same_grid(*funcs) -> GridSpec:
    grids = {f.grid.n_samples for f in funcs}
    if len(grids) != 1:
        raise PreconditionError(f"functions live on different grids: sizes {sorted(grids)}")
    return funcs[0].grid


@dataclass(frozen=True, eq=False)
class Gauge:
    """Gauge values ``phi(t_0), ..., phi(t_N)`` with precomputed strictness flags."""

    grid: GridSpec
    phi_values: np.ndarray
    strictly_increasing: bool
    strictly_concave: bool
    label: str = "custom"

    def __post_init__(self):
        phi = np.asarray(self.phi_values, dtype=float)
        if phi.shape != (self.grid.n_samples + 1,):
            raise PreconditionError("gauge needs one value per grid edge")
        if abs(phi[0]) > STRICT_TOL or abs(phi[-1] - 1.0) > STRICT_TOL:
            raise PreconditionError("gauge must satisfy phi(0) = 0 and phi(2*pi) = 1")
        object.__setattr__(self, "phi_values", _readonly(phi))

    @cached_property
    def increments(self) -> np.ndarray:
        """Cell weights ``phi(t_{i+1}) - phi(t_i)``."""
        return _readonly(np.diff(self.phi_values))

    @property
    def admissible(self) -> bool:
        return self.strictly_increasing and self.strictly_concave


@dataclass(frozen=True)
class GaugeReport:
    normalized: bool
    increasing: bool
    strictly_increasing: bool
    concave: bool
    strictly_concave: bool

    @property
    def admissible(self) -> bool:
        return self.normalized and self.strictly_increasing and self.strictly_concave


def _gauge_flags(phi: np.ndarray, tol: float = STRICT_TOL) -> GaugeReport:
    d1 = np.diff(phi)
    d2 = phi[:-2] - 2.0 * phi[1:-1] + phi[2:]
    return GaugeReport(
        normalized=bool(abs(phi[0]) <= tol and abs(phi[-1] - 1.0) <= tol),
        increasing=bool(np.all(d1 >= -tol)),
        strictly_increasing=bool(np.all(d1 > tol)),
        concave=bool(np.all(d2 <= tol)),
        strictly_concave=bool(np.all(d2 < -tol)),
    )


def validate_gauge(gauge: Gauge, tol: float = STRICT_TOL) -> GaugeReport:
    """Recompute monotonicity and concavity of the stored gauge values."""
    return _gauge_flags(np.asarray(gauge.phi_values), tol)


def make_gauge(phi, grid: GridSpec, label: str = "custom") -> Gauge:
    """Build a gauge from a callable on ``[0, 2*pi]`` or from edge values."""
    values = phi(np.asarray(grid.edges)) if callable(phi) else np.asarray(phi, dtype=float)
    values = np.array(values, dtype=float)
    if values.shape != (grid.n_samples + 1,):
        raise PreconditionError("gauge needs one value per grid edge")
    flags = _gauge_flags(values)
    if not flags.normalized:
        raise PreconditionError("gauge must satisfy phi(0) = 0 and phi(2*pi) = 1")
    values[0], values[-1] = 0.0, 1.0
    return Gauge(grid, values, flags.strictly_increasing, flags.strictly_concave, label)


def make_power_gauge(p: float, grid: GridSpec) -> Gauge:
    """The gauge ``phi(t) = (t / 2*pi)**(1/p)``, strictly concave for ``p > 1``."""
    p = float(p)
    if not p > 1.0 or not math.isfinite(p):
        raise PreconditionError(f"power gauge needs p > 1 to be strictly concave, got p={p}")
    values = (np.asarray(grid.edges) / TWO_PI) ** (1.0 / p)
    values[0], values[-1] = 0.0, 1.0
    return Gauge(grid, values, True, True, f"power:{p!r}")


# -- CSV input and output -------------------------------------------------------

def _open_text(path, mode: str):
    if path == "-":
        return (sys.stdin if "r" in mode else sys.stdout), False
    try:
        return open(path, mode, newline=""), True
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from exc


def read_csv(path, grid: GridSpec, role: Role = Role.MODULUS) -> SampledFunction:
    """Read ``t,value`` or ``t,re,im`` rows and resample them onto ``grid``.

    A header row is optional.  Each cell centre takes the value of the row
    whose ``t`` is nearest on the circle, so a file written by
    :func:`write_csv` on the same grid round-trips exactly.  ``path`` may be
    ``"-"`` for standard input or an already open text stream.
    """
    if hasattr(path, "read"):
        text = path.read()
    else:
        fh, close = _open_text(path, "r")
        try:
            text = fh.read()
        finally:
            if close:
                fh.close()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise DataError("no data rows found")
    width = {len(r) for r in rows}
    if len(width) != 1 or width.pop() not in (2, 3):
        raise DataError("expected rows of the form t,value or t,re,im")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise DataError(f"non-numeric entry: {exc}") from exc
    if not np.all(np.isfinite(data)):
        raise DataError("non-finite entry")
    t = np.mod(data[:, 0], TWO_PI)
    vals = data[:, 1] if data.shape[1] == 2 else data[:, 1] + 1j * data[:, 2]
    if role is not Role.TRACE and np.iscomplexobj(vals):
        raise DataError("complex samples supplied where real values were expected")

    order = np.argsort(t, kind="stable")
    t, vals = t[order], vals[order]
    nodes = np.asarray(grid.nodes)
    pos = np.searchsorted(t, nodes)
    left = (pos - 1) % len(t)
    right = pos % len(t)
    d_left = np.abs(nodes - t[left])
    d_right = np.abs(t[right] - nodes)
    d_left = np.minimum(d_left, TWO_PI - d_left)
    d_right = np.minimum(d_right, TWO_PI - d_right)
    idx = np.where(d_right < d_left, right, left)
    try:
        return SampledFunction(grid, vals[idx], role)
    except PreconditionError as exc:
        raise DataError(str(exc)) from exc


def write_csv(func: SampledFunction, path, header: bool = True) -> None:
    """Write cell-centre samples as ``t,value`` (or ``t,re,im`` for traces)."""
    fh, close = (path, False) if hasattr(path, "write") else _open_text(path, "w")
    try:
        w = csv.writer(fh, lineterminator="\n")
        nodes = func.grid.nodes
        if func.role is Role.TRACE:
            if header:
                w.writerow(["t", "re", "im"])
            for t, v in zip(nodes, func.values):
                w.writerow([format(t, ".17g"), format(v.real, ".17g"), format(v.imag, ".17g")])
        else:
            if header:
                w.writerow(["t", "value"])
            for t, v in zip(nodes, func.values):
                w.writerow([format(t, ".17g"), format(v, ".17g")])
    finally:
        if close:
            fh.close()
