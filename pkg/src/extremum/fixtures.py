"""Reference moduli with known extremality behaviour.

Flat fixtures are decreasing profiles ``mu(t) = A + int_t^{2 pi} s`` whose
slope ``s`` vanishes at prescribed points:

    s(t) = min_j min(1, |t - t_j| / w) ** order

``order = 1`` gives quadratic flats (``mu`` has derivative zero and finite
second derivative there), ``order = 2`` gives cubic flats.  The slope is a
polynomial between consecutive breakpoints, so the integral is evaluated
exactly with Gauss-Legendre quadrature on each piece.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analytic import blaschke_argument
from .errors import PreconditionError
from .grid import TWO_PI, Gauge, GridSpec, Role, SampledFunction
from .norms import normalize

FLAT_WIDTH = 0.6
FLAT_BASE = 5.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class FlatProfile:
    """Decreasing profile with flat points ``flats`` of the given ``order``."""

    flats: tuple
    order: int = 1
    width: float = FLAT_WIDTH
    base: float = FLAT_BASE

    def __post_init__(self):
        for t in self.flats:
            if not 0.0 < t < TWO_PI:
                raise PreconditionError(f"flat point {t} must lie in (0, 2*pi)")

    def slope(self, t):
        t = np.asarray(t, dtype=float)
        s = np.ones_like(t)
        for tj in self.flats:
            s = np.minimum(s, np.minimum(1.0, np.abs(t - tj) / self.width) ** self.order)
        return s

    def _breaks(self) -> np.ndarray:
        pts = [0.0, TWO_PI]
        fl = sorted(self.flats)
        for tj in fl:
            pts += [tj, tj - self.width, tj + self.width]
        pts += [0.5 * (a + b) for a, b in zip(fl, fl[1:])]
        pts = np.unique(np.clip(pts, 0.0, TWO_PI))
        return pts

    def _integral(self, a, b):
        """``int_a^b s`` for arrays with no breakpoint strictly inside ``(a, b)``."""
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid[..., None] + half[..., None] * _GL_X
        return half * (self.slope(nodes) @ _GL_W)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        br = self._breaks()
        full = self._integral(br[:-1], br[1:])
        tail = np.concatenate([np.cumsum(full[::-1])[::-1], [0.0]])
        piece = np.clip(np.searchsorted(br, t, side="right") - 1, 0, br.size - 2)
        right = br[piece + 1]
        return self.base + tail[piece + 1] + self._integral(t, right)


def _exponential(t):
    return np.exp(-np.asarray(t, dtype=float))


def _constant(t):
    return np.ones_like(np.asarray(t, dtype=float))


def collinear_partner(t1: float, a=0.0) -> float:
    """The point ``t2`` in ``(t1, t1 + 2*pi)`` with ``xi_a(t2) = xi_a(t1) + pi``."""
    target = blaschke_argument(a, t1) + math.pi
    t2 = brentq(lambda s: blaschke_argument(a, s) - target, t1, t1 + TWO_PI, xtol=1e-15)
    return float(t2 % TWO_PI)


@dataclass(frozen=True)
class Fixture:
    name: str
    profile: object
    flats: tuple
    order: int | None
    expected: str
    description: str


def _fixture_table(a) -> dict:
    col = (1.0, collinear_partner(1.0, a))
    return {
        "constant": Fixture("constant", _constant, (), None, "Extreme",
                            "constant modulus"),
        "exponential": Fixture("exponential", _exponential, (), None, "NotExtreme",
                               "exp(-t), strictly decreasing with no flat point"),
        "quad-flat-1": Fixture("quad-flat-1", FlatProfile((2.0,), 1), (2.0,), 2, "NotExtreme",
                               "one quadratic flat point"),
        "quad-flat-2-collinear": Fixture(
            "quad-flat-2-collinear", FlatProfile(col, 1), col, 2, "NotExtreme",
            "two quadratic flat points whose arguments differ by pi"),
        "quad-flat-2-generic": Fixture("quad-flat-2-generic", FlatProfile((1.0, 2.0), 1),
                                       (1.0, 2.0), 2, "Extreme",
                                       "two quadratic flat points one radian apart"),
        "quad-flat-4": Fixture("quad-flat-4", FlatProfile((1.0, 2.2, 3.4, 4.6), 1),
                               (1.0, 2.2, 3.4, 4.6), 2, "Extreme",
                               "four quadratic flat points"),
        "cubic-flat-1": Fixture("cubic-flat-1", FlatProfile((2.0,), 2), (2.0,), 3, "Extreme",
                                "one cubic flat point"),
    }


FIXTURE_NAMES = tuple(_fixture_table(0.0))


def get_fixture(name: str, a=0.0) -> Fixture:
    """Look up a fixture; ``a`` places the collinear pair for the factor ``I_a``."""
    table = _fixture_table(a)
    if name not in table:
        raise PreconditionError(f"unknown fixture {name!r}; choose from {', '.join(table)}")
    fx = table[name]
    if name == "quad-flat-2-collinear":
        t1, t2 = fx.flats
        w = FLAT_WIDTH
        if not (w <= t2 <= TWO_PI - w) or abs(t2 - t1) < 2 * w:
            raise PreconditionError(f"cannot place a collinear pair for a={complex(a)}")
    return fx


def make_fixture(name: str, grid: GridSpec, gauge: Gauge, a=0.0) -> tuple[SampledFunction, dict]:
    """Normalised samples of a fixture and a manifest describing it."""
    fx = get_fixture(name, a)
    raw = SampledFunction(grid, fx.profile(np.asarray(grid.nodes)), Role.MODULUS)
    mu, scale = normalize(raw, gauge)
    a = complex(a)
    manifest = {
        "fixture": fx.name,
        "description": fx.description,
        "flat_points": [float(t) for t in fx.flats],
        "flat_order": fx.order,
        "inner": [[a.real, a.imag]],
        "expected": fx.expected,
        "n_samples": grid.n_samples,
        "gauge": gauge.label,
        "scale": scale,
    }
    return mu, manifest
