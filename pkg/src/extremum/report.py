"""Deterministic JSON reports and independent re-verification of witnesses."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import blaschke_product, outer_from_modulus, trace_product
from .config import AnalysisConfig
from .errors import DataError, PreconditionError
from .extremality import CriticalSetReport, GammaScan, Verdict
from .grid import Gauge, GridSpec, Role, SampledFunction, make_power_gauge
from .norms import lorentz_norm, marcinkiewicz_norm
from .perturbation import (PerturbationParams, ThetaScan, Witness, WitnessCheck, balance_integral,
                           companion_g, verify_witness)
from .rearrangement import decreasing_rearrangement

SCHEMA = 1


def _encode_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch < " " or ch == "\x7f":
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _encode(obj, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return _encode_str(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode_str(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc) -> str:
    """Serialise with fixed key order and 17 significant digits for floats.

    Non-finite floats become ``null``.  Identical inputs give identical bytes.
    """
    return _encode(doc, 2, 0) + "\n"


def _complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def witness_dict(w: Witness | None) -> dict | None:
    if w is None:
        return None
    return {
        "alpha": w.params.alpha,
        "beta": w.params.beta,
        "theta": w.params.theta,
        "w": _complex_pair(w.params.w),
        "inner_subset": list(w.inner_subset),
        "norm_plus": w.norm_plus,
        "norm_minus": w.norm_minus,
        "neg_fourier_residual": w.neg_fourier_residual,
        "raw_fourier_residual": w.raw_fourier_residual,
        "balance": w.balance,
        "balance_residual": w.balance_residual,
        "beta_max": w.beta_max,
        "stability": w.stability,
        "theta_index": w.theta_index,
        "from_hint": w.from_hint,
    }


def critical_dict(rep: CriticalSetReport | None, grid: GridSpec) -> dict | None:
    if rep is None:
        return None
    return {
        "levels": list(rep.e1.levels),
        "e1_components": [list(c) for c in rep.e1.components],
        "e2_components": [list(c) for c in rep.e2.components],
        "e1_points": rep.e1.points(grid),
        "angles": list(rep.angles),
        "collinearity": [[bool(x) for x in row] for row in rep.collinearity],
        "exists_t0": rep.exists_t0,
        "profiles": {
            "e1_finest": rep.e1.profiles[-1],
            "e1_third_finest": rep.e1.profiles[-3],
            "e2_finest": rep.e2.profiles[-1],
        },
    }


def gamma_dict(scan: GammaScan | None) -> dict | None:
    if scan is None:
        return None
    return {
        "gamma": scan.gammas,
        "min_ratio": scan.min_ratio,
        "attains_zero": [bool(x) for x in scan.attains_zero],
        "condition_holds": scan.condition_holds,
    }


def theta_scan_dict(scan: ThetaScan) -> dict:
    return {
        "theta": scan.thetas,
        "from_hint": [bool(x) for x in scan.from_hint],
        "balance": scan.balance,
        "beta_max": scan.beta_max,
        "beta_max_coarse": scan.beta_max_coarse,
        "stability": scan.stability,
        "candidates_tried": scan.candidates_tried,
    }


def input_dict(source: str, mu: SampledFunction, inner, lam: float, config: AnalysisConfig,
               scale: float) -> dict:
    return {
        "source": source,
        "n_samples": mu.n_samples,
        "gauge": {"family": "power", "p": config.gauge_p},
        "inner": [_complex_pair(p.a if hasattr(p, "a") else p) for p in inner],
        "lambda": lam,
        "input_scale": scale,
        "mu": mu.values,
    }


def analysis_report(source: str, mu: SampledFunction, inner, lam: float, gauge: Gauge,
                    config: AnalysisConfig, scale: float, verdict: Verdict,
                    gamma: GammaScan | None) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "analysis",
        "input": input_dict(source, mu, inner, lam, config, scale),
        "config": config.as_dict(),
        "verdict": {"status": verdict.status.value, "rule": verdict.rule,
                    "diagnostics": verdict.diagnostics},
        "witness": witness_dict(verdict.witness),
        "critical_sets": critical_dict(verdict.report, mu.grid),
        "gamma_scan": gamma_dict(gamma),
        "norms": {"lorentz": lorentz_norm(mu, gauge),
                  "marcinkiewicz": marcinkiewicz_norm(mu, gauge)},
        "runtime": {"grid_cells": mu.n_samples,
                    "theta_candidates": config.theta_steps,
                    "gamma_rows": 0 if gamma is None else int(gamma.gammas.size)},
    }


@dataclass(frozen=True)
class ReverifyResult:
    check: WitnessCheck
    balance_residual: float
    norm: float

    @property
    def accepted(self) -> bool:
        return self.check.accepted and self.balance_residual < 1e-9


def _need(doc, *keys):
    cur = doc
    for k in keys:
        if not isinstance(cur, dict) or k not in cur:
            raise DataError(f"report is missing field {'.'.join(keys)}")
        cur = cur[k]
    return cur


def load_input(doc: dict):
    """Rebuild ``(mu, inner points, lambda, gauge, config)`` from a report."""
    if _need(doc, "schema") != SCHEMA:
        raise DataError(f"unsupported report schema {doc.get('schema')!r}")
    inp = _need(doc, "input")
    try:
        cfg_fields = {k: v for k, v in _need(doc, "config").items()
                      if k in AnalysisConfig.__dataclass_fields__}
        config = AnalysisConfig(**cfg_fields)
        grid = GridSpec(int(_need(inp, "n_samples")))
        mu = SampledFunction(grid, np.asarray(_need(inp, "mu"), dtype=float), Role.MODULUS)
        inner = [complex(re, im) for re, im in _need(inp, "inner")]
        lam = float(inp.get("lambda", 0.0))
        gauge = make_power_gauge(float(_need(inp, "gauge", "p")), grid)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise DataError(f"malformed report input: {exc}") from exc
    return mu, inner, lam, gauge, config


def reverify_report(doc: dict) -> ReverifyResult:
    """Check the witness of a report using only the data stored in it."""
    mu, inner, lam, gauge, config = load_input(doc)
    wd = _need(doc, "witness")
    if wd is None:
        raise DataError("report carries no witness")
    subset = [int(i) for i in wd["inner_subset"]]
    grid = mu.grid
    outer = outer_from_modulus(mu, lam, config.modulus_floor)
    chosen = blaschke_product([inner[i] for i in subset], grid)
    rest = [a for i, a in enumerate(inner) if i not in subset]
    cofactor = outer if not rest else trace_product([outer, blaschke_product(rest, grid)])
    params = PerturbationParams(wd["alpha"], wd["beta"], wd["theta"])
    g = companion_g(params, chosen, cofactor)
    f_vals = np.asarray(chosen.values) * np.asarray(cofactor.values)
    check = verify_witness(f_vals, g, gauge, config.norm_tol, config.fourier_tol, outer=cofactor)
    r = decreasing_rearrangement(mu)
    B = balance_integral(r.mu_star, np.asarray(chosen.arg_branch)[r.omega], params.theta, gauge)
    return ReverifyResult(check, abs(B + params.alpha / params.beta), lorentz_norm(mu, gauge))
