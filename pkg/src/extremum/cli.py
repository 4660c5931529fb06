"""Command line interface: ``extremum {fixtures,analyze,witness,plot}``.

Exit status: 0 on success, 1 for usage errors, 2 for unreadable or malformed
data, 3 when an input violates a mathematical precondition (for example a
gauge that is not strictly concave).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import report as rpt
from .analytic import blaschke_product, outer_from_modulus, trace_product
from .config import AnalysisConfig
from .errors import DataError, ExtremumError, PreconditionError
from .extremality import FunctionSpec, decide_extreme, gamma_scan
from .fixtures import FIXTURE_NAMES, make_fixture
from .grid import GridSpec, Role, make_power_gauge, read_csv, write_csv
from .norms import lorentz_norm, normalize
from .perturbation import PerturbationParams, perturbation_h, scan_witness
from .rearrangement import decreasing_rearrangement

EXIT_USAGE, EXIT_DATA, EXIT_PRECONDITION = 1, 2, 3
UNIT_NORM_TOL = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_complex(text: str) -> complex:
    """Parse ``0.3+0.4i``, ``0.3+0.4j``, ``-0.5`` or ``0.2i``."""
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _add_config(p: argparse.ArgumentParser) -> None:
    d = AnalysisConfig()
    g = p.add_argument_group("analysis configuration")
    g.add_argument("--n-samples", type=int, default=d.n_samples, help="grid size (power of two)")
    g.add_argument("--gauge-p", type=float, default=d.gauge_p,
                   help="exponent p of the gauge phi(t) = (t/2pi)^(1/p)")
    g.add_argument("--eps-crit", type=float, default=d.eps_crit)
    g.add_argument("--rho", type=float, default=d.rho)
    g.add_argument("--tol-ang", type=float, default=d.tol_ang)
    g.add_argument("--theta-steps", type=int, default=d.theta_steps)
    g.add_argument("--gamma-steps", type=int, default=d.gamma_steps)
    g.add_argument("--beta0", type=float, default=d.beta0)
    g.add_argument("--max-halvings", type=int, default=d.max_halvings)
    g.add_argument("--norm-tol", type=float, default=d.norm_tol)
    g.add_argument("--fourier-tol", type=float, default=d.fourier_tol)
    g.add_argument("--modulus-floor", type=float, default=d.modulus_floor)
    g.add_argument("--stability", type=float, default=d.stability,
                   help="minimum ratio of admissible beta between the grid and its coarsening")


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        n_samples=args.n_samples, gauge_p=args.gauge_p, eps_crit=args.eps_crit, rho=args.rho,
        tol_ang=args.tol_ang, theta_steps=args.theta_steps, gamma_steps=args.gamma_steps,
        beta0=args.beta0, max_halvings=args.max_halvings, norm_tol=args.norm_tol,
        fourier_tol=args.fourier_tol, modulus_floor=args.modulus_floor, stability=args.stability,
    )


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from exc


def _load_mu(args, config: AnalysisConfig):
    grid = GridSpec(config.n_samples)
    gauge = make_power_gauge(config.gauge_p, grid)
    raw = read_csv(args.mu_csv, grid, Role.MODULUS)
    norm = lorentz_norm(raw, gauge)
    if abs(norm - 1.0) <= UNIT_NORM_TOL:
        # already normalised (e.g. written by ``fixtures``): keep the samples bit for bit
        return raw, 1.0, gauge
    try:
        mu, scale = normalize(raw, gauge)
    except PreconditionError as exc:
        raise DataError(str(exc)) from exc
    return mu, scale, gauge


def cmd_fixtures(args) -> int:
    config = _config(args)
    grid = GridSpec(config.n_samples)
    gauge = make_power_gauge(config.gauge_p, grid)
    mu, manifest = make_fixture(args.name, grid, gauge, args.inner)
    out = args.out_dir
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out}: {exc.strerror}") from exc
    csv_path = os.path.join(out, f"{args.name}.csv")
    write_csv(mu, csv_path)
    manifest = {"schema": rpt.SCHEMA, **manifest, "csv": os.path.basename(csv_path)}
    _emit(rpt.dumps(manifest), os.path.join(out, f"{args.name}.manifest.json"))
    print(csv_path)
    return 0


def cmd_analyze(args) -> int:
    if args.outer and args.inner:
        raise UsageError("--outer cannot be combined with --inner")
    config = _config(args)
    t0 = time.perf_counter()
    mu, scale, gauge = _load_mu(args, config)
    inner = list(args.inner or [])
    spec = FunctionSpec(mu, tuple(inner), args.lam)
    verdict = decide_extreme(spec, gauge, config)
    gscan = None
    if inner and not args.no_gamma:
        xi = blaschke_product(spec.inner, mu.grid)
        hints = verdict.report.angles if verdict.report is not None else ()
        gscan = gamma_scan(mu, xi, config, hints)
    doc = rpt.analysis_report(args.mu_csv, mu, spec.inner, args.lam, gauge, config, scale,
                              verdict, gscan)
    _emit(rpt.dumps(doc), args.output)
    print(f"extremum: {verdict.status.value} ({verdict.rule}) in "
          f"{time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return 0


def cmd_witness(args) -> int:
    if not args.inner:
        raise UsageError("witness needs at least one --inner factor")
    config = _config(args)
    mu, scale, gauge = _load_mu(args, config)
    grid = mu.grid
    outer = outer_from_modulus(mu, args.lam, config.modulus_floor)
    inner = blaschke_product(args.inner[:1], grid)
    cofactor = outer if len(args.inner) == 1 else trace_product(
        [outer, blaschke_product(args.inner[1:], grid)])
    scan = scan_witness(mu, inner, cofactor, gauge, config, inner_subset=(0,))
    doc = {
        "schema": rpt.SCHEMA,
        "kind": "witness",
        "input": rpt.input_dict(args.mu_csv, mu, args.inner, args.lam, config, scale),
        "config": config.as_dict(),
        "witness": rpt.witness_dict(scan.witness),
        "theta_scan": rpt.theta_scan_dict(scan),
    }
    _emit(rpt.dumps(doc), args.output)
    return 0


def _series(path, header, columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format(float(x), ".17g") if not isinstance(x, str) else x
                              for x in row))
    _emit("\n".join(lines) + "\n", path)


def cmd_plot(args) -> int:
    try:
        with open(args.report) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {args.report}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.report} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not doc:
        raise DataError("empty report")
    mu, inner, _lam, gauge, _config_ = rpt.load_input(doc)
    grid = mu.grid
    os.makedirs(args.out_dir, exist_ok=True)
    t = np.asarray(grid.nodes)
    r = decreasing_rearrangement(mu)
    written = []

    def out(name):
        p = os.path.join(args.out_dir, name)
        written.append(p)
        return p

    _series(out("mu.csv"), ["t", "mu"], [t, mu.values])
    _series(out("mu_star.csv"), ["t", "mu_star"], [t, r.mu_star.values])

    crit = doc.get("critical_sets") or {}
    prof = crit.get("profiles") or {}
    rows = []
    for key in ("e1_finest", "e1_third_finest", "e2_finest"):
        vals = prof.get(key)
        if vals is not None:
            rows += [(key, "", float(x), np.nan if v is None else float(v))
                     for x, v in zip(t, vals)]
    gam = doc.get("gamma_scan")
    if gam:
        rows += [("gamma_min_ratio", "", float(g), np.nan if v is None else float(v))
                 for g, v in zip(gam["gamma"], gam["min_ratio"])]
    lines = ["kind,param,x,value"] + [f"{k},{p},{x:.17g},{v:.17g}" for k, p, x, v in rows]
    _emit("\n".join(lines) + "\n", out("profiles.csv"))

    wd = doc.get("witness")
    eta = None
    if wd:
        chosen = blaschke_product([inner[i] for i in wd["inner_subset"]], grid)
        params = PerturbationParams(wd["alpha"], wd["beta"], wd["theta"])
        h_om = np.asarray(perturbation_h(params, chosen).values)[r.omega]
        ms = np.asarray(r.mu_star.values)
        eta = (ms * (1 + h_om), ms * (1 - h_om))
        _series(out("eta.csv"), ["t", "eta_plus", "eta_minus"], [t, eta[0], eta[1]])

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3 if eta is not None else 2, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(t, mu.values, label="mu")
    axes[0].plot(t, r.mu_star.values, label="mu*")
    axes[0].legend()
    if eta is not None:
        axes[1].plot(t, eta[0], label="eta+")
        axes[1].plot(t, eta[1], label="eta-")
        axes[1].legend()
    ax = axes[-1]
    for key in ("e1_finest", "e2_finest"):
        vals = prof.get(key)
        if vals is not None:
            ax.semilogy(t, [np.nan if v is None else max(v, 1e-16) for v in vals], label=key)
    ax.axhline(doc.get("config", {}).get("eps_crit", 1e-3), color="k", lw=0.5, ls="--")
    ax.set_xlabel("t")
    ax.legend()
    verdict = (doc.get("verdict") or {}).get("status", "")
    fig.suptitle(f"{os.path.basename(str(doc['input'].get('source', '')))} {verdict}")
    fig.savefig(out("summary.svg"), format="svg", metadata={"Date": None})
    plt.close(fig)
    for p in written:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="extremum",
                     description="Extreme-point analysis for Hardy-Lorentz unit balls.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fixtures", help="write a reference modulus and its manifest")
    p.add_argument("name", choices=FIXTURE_NAMES)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--inner", type=parse_complex, default=0j,
                   help="Blaschke zero used to place collinear flats")
    _add_config(p)
    p.set_defaults(func=cmd_fixtures)

    for name, func, helptext in (("analyze", cmd_analyze, "classify f = F * prod I_a"),
                                 ("witness", cmd_witness, "search for a perturbation witness")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("mu_csv", help="CSV of t,value samples ('-' for stdin)")
        p.add_argument("--inner", type=parse_complex, action="append",
                       help="zero of a Blaschke factor (repeatable), e.g. 0.3+0.4i")
        p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                       help="constant added to the argument of the outer factor")
        p.add_argument("-o", "--output", default=None, help="report path (default stdout)")
        if name == "analyze":
            p.add_argument("--outer", action="store_true", help="f is outer (no inner factor)")
            p.add_argument("--no-gamma", action="store_true", help="skip the gamma scan")
        _add_config(p)
        p.set_defaults(func=func)

    p = sub.add_parser("plot", help="write plottable CSV series and an SVG summary")
    p.add_argument("report")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"extremum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"extremum: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DataError, ExtremumError) as exc:
        print(f"extremum: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        # downstream consumer closed the pipe (e.g. ``| head``)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
