"""Extreme points of the unit ball of Hardy-Lorentz spaces, on a grid.

Typical use::

    from extremum import GridSpec, make_power_gauge, make_fixture, FunctionSpec, decide_extreme

    grid = GridSpec(4096)
    gauge = make_power_gauge(2.0, grid)
    mu, _ = make_fixture("exponential", grid, gauge)
    verdict = decide_extreme(FunctionSpec(mu, (0.0,)), gauge)
"""
from .analytic import (BlaschkePoint, BoundaryTrace, blaschke_boundary, blaschke_product,
                       check_analytic, fourier_coefficients, outer_from_modulus)
from .config import AnalysisConfig
from .errors import DataError, ExtremumError, PreconditionError
from .extremality import FunctionSpec, Status, Verdict, decide_extreme, gamma_scan
from .fixtures import FIXTURE_NAMES, make_fixture
from .grid import Gauge, GridSpec, Role, SampledFunction, make_gauge, make_power_gauge, sample
from .norms import lorentz_norm, marcinkiewicz_norm, normalize
from .perturbation import PerturbationParams, Witness, companion_g, witness_search
from .rearrangement import decreasing_rearrangement

__all__ = [
    "AnalysisConfig", "BlaschkePoint", "BoundaryTrace", "DataError", "ExtremumError",
    "FIXTURE_NAMES", "FunctionSpec", "Gauge", "GridSpec", "PerturbationParams",
    "PreconditionError", "Role", "SampledFunction", "Status", "Verdict", "Witness",
    "blaschke_boundary", "blaschke_product", "check_analytic", "companion_g",
    "decide_extreme", "decreasing_rearrangement", "fourier_coefficients", "gamma_scan",
    "lorentz_norm", "make_fixture", "make_gauge", "make_power_gauge", "marcinkiewicz_norm",
    "normalize", "outer_from_modulus", "sample", "witness_search",
]
