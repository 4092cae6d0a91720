"""Batch command-line front end.

Subcommands
-----------
kappa      limiting-intensity estimates for a measure (closed form,
           quadrature, Monte Carlo, or all three with agreement checks)
crofton    chord-power integrals I(p, S) for a region, CSV to stdout
simulate   replicated smallest-triangle experiment from a JSON config
pi         joint small-area probability estimates at one threshold
verify     run the acceptance-criteria suite, PASS/FAIL table
plot       render SVG diagnostics from a simulation output directory

Exit codes: 0 success, 1 verification failure, 2 input error,
3 numeric non-convergence, 4 I/O failure.  Every run is a pure function
of its inputs and seeds; no emitted file depends on clock or locale.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional

from . import verify as verify_mod
from .errors import FormatError, NonConvergenceError, SamplingError
from .experiments import estimate_pi, run_simulation
from .io import (dumps_json, fmt, load_json, load_sim_config,
                 write_result_dir)
from .kappa import (KappaEstimate, crofton_integral, kappa_closed_form,
                    kappa_monte_carlo, kappa_quadrature)
from .measures import RngStream, measure_from_dict
from .geometry import region_from_dict
from .plots import PLOT_KINDS, write_plots

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

_METHOD_ORDER = ("closed", "quad", "mc")


def _estimate_dict(est: KappaEstimate) -> dict:
    out = {"kappa": est.value, "se": est.se, "method": est.method}
    if est.samples is not None:
        out["samples"] = est.samples
    return out


def _run_method(name: str, measure, args,
                raw_measure) -> Optional[KappaEstimate]:
    if name == "closed":
        return kappa_closed_form(measure)
    if name == "quad":
        return kappa_quadrature(measure, rel_tol=args.tol)
    return kappa_monte_carlo(measure, args.samples, RngStream(args.seed, 0))


def _agreement_rows(by_method: dict) -> list:
    """Pairwise consistency checks between whichever methods ran."""
    rows = []
    closed = by_method.get("closed")
    quad = by_method.get("quad")
    mc = by_method.get("mc")
    if closed and quad:
        diff = abs(closed.value - quad.value)
        tol = 1e-6 * max(abs(closed.value), abs(quad.value)) + quad.se
        rows.append({"pair": "closed_form/quadrature", "difference": diff,
                     "tolerance": tol, "ok": diff <= tol})
    if quad and mc:
        diff = abs(quad.value - mc.value)
        tol = 3.0 * mc.se + quad.se
        rows.append({"pair": "quadrature/monte_carlo", "difference": diff,
                     "tolerance": tol, "ok": diff <= tol})
    if closed and mc:
        diff = abs(closed.value - mc.value)
        tol = 3.0 * mc.se
        rows.append({"pair": "closed_form/monte_carlo", "difference": diff,
                     "tolerance": tol, "ok": diff <= tol})
    return rows


def cmd_kappa(args) -> int:
    raw = load_json(args.measure_file)
    measure = measure_from_dict(raw)
    if args.method != "all":
        est = _run_method(args.method, measure, args, raw)
        if est is None:
            print(f"error: no closed form is known for measure kind "
                  f"{raw.get('kind')!r}; use --method quad or mc",
                  file=sys.stderr)
            return EXIT_INPUT
        obj = dict(_estimate_dict(est))
        obj["measure"] = raw
        sys.stdout.write(dumps_json(obj))
        return EXIT_OK
    by_method = {}
    for name in _METHOD_ORDER:
        est = _run_method(name, measure, args, raw)
        if est is not None:
            by_method[name] = est
    obj = {
        "measure": raw,
        "results": [_estimate_dict(by_method[m]) for m in _METHOD_ORDER
                    if m in by_method],
        "agreement": _agreement_rows(by_method),
    }
    sys.stdout.write(dumps_json(obj))
    return EXIT_OK


def cmd_crofton(args) -> int:
    region = region_from_dict(load_json(args.region_file))
    try:
        powers = [float(tok) for tok in args.p.split(",") if tok.strip()]
    except ValueError as exc:
        raise FormatError("p", f"not a comma-separated float list: {exc}")
    if not powers:
        raise FormatError("p", "no powers given")
    for power in powers:
        if power <= 0:
            raise FormatError("p", f"powers must be positive, got {power:g}")
    lines = ["p,I"]
    for power in powers:
        value, _err = crofton_integral(region, power, rel_tol=args.tol)
        lines.append(f"{fmt(power)},{fmt(value)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_sim_config(args.config_file)
    if args.threads is not None:
        cfg = dataclasses.replace(cfg, threads=args.threads)
    result = run_simulation(cfg)
    closed = kappa_closed_form(cfg.measure)
    summary = result.summary(
        reference_rate=closed.value if closed is not None else None)
    write_result_dir(args.out, result, summary)
    tv_key = "tv_alpha2" if "tv_alpha2" in summary else \
        f"tv_alpha{cfg.alphas[-1]:g}"
    print(f"kappa_hat={fmt(summary['implied_kappa'])} "
          f"ks_D={fmt(summary['ks_D'])} "
          f"{tv_key}={fmt(summary[tv_key])}")
    print(f"wrote {args.out} in {result.elapsed_seconds:.2f}s",
          file=sys.stderr)
    return EXIT_OK


def cmd_pi(args) -> int:
    raw = load_json(args.measure_file)
    measure = measure_from_dict(raw)
    if args.beta <= 0:
        raise FormatError("beta", "threshold must be positive")
    if args.samples < 1:
        raise FormatError("samples", "need at least one quintuple")
    est = estimate_pi(measure, args.beta, args.samples,
                      RngStream(args.seed, 0))
    obj = {
        "measure": raw,
        "beta": est.beta,
        "samples": args.samples,
        "seed": args.seed,
    }
    for name in ("pi", "pi1", "pi2"):
        b = getattr(est, name)
        obj[name] = {"estimate": b.estimate, "se": b.se,
                     "hits": b.hits, "draws": b.draws}
    sys.stdout.write(dumps_json(obj))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify_mod.run_suite(args.suite, seed=args.seed,
                                   threads=args.threads)
    print(verify_mod.format_table(results,
                                  show_runtime=args.suite == "extended"))
    return verify_mod.exit_code(results)


def cmd_plot(args) -> int:
    kinds = list(PLOT_KINDS) if args.kind == "all" else [args.kind]
    written = []
    for kind in kinds:
        written.extend(write_plots(args.result_dir, kind))
    for path in written:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripois",
        description="Smallest-triangle Poisson-limit toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_kappa = sub.add_parser(
        "kappa", help="limiting-intensity estimates for a measure")
    p_kappa.add_argument("measure_file", help="measure JSON file")
    p_kappa.add_argument("--method", choices=("quad", "mc", "closed", "all"),
                         default="all")
    p_kappa.add_argument("--tol", type=float, default=1e-9,
                         help="quadrature relative tolerance")
    p_kappa.add_argument("--samples", type=int, default=1_000_000,
                         help="Monte Carlo pair count")
    p_kappa.add_argument("--seed", type=int, default=0)
    p_kappa.set_defaults(func=cmd_kappa)

    p_crofton = sub.add_parser(
        "crofton", help="chord-power integrals for a region")
    p_crofton.add_argument("region_file", help="region JSON file")
    p_crofton.add_argument("--p", default="1,3",
                           help="comma-separated positive powers")
    p_crofton.add_argument("--tol", type=float, default=1e-9)
    p_crofton.set_defaults(func=cmd_crofton)

    p_sim = sub.add_parser(
        "simulate", help="replicated smallest-triangle experiment")
    p_sim.add_argument("config_file", help="simulation config JSON file")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--threads", type=int, default=None,
                       help="worker cap (default: TRIPOIS_THREADS or 1)")
    p_sim.set_defaults(func=cmd_simulate)

    p_pi = sub.add_parser(
        "pi", help="joint small-area probabilities at one threshold")
    p_pi.add_argument("measure_file", help="measure JSON file")
    p_pi.add_argument("--beta", type=float, required=True,
                      help="area threshold")
    p_pi.add_argument("--samples", type=int, default=1_000_000,
                      help="quintuple count")
    p_pi.add_argument("--seed", type=int, default=0)
    p_pi.set_defaults(func=cmd_pi)

    p_verify = sub.add_parser(
        "verify", help="run the acceptance-criteria suite")
    p_verify.add_argument("--suite", choices=("core", "extended"),
                          default="core")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--threads", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_plot = sub.add_parser(
        "plot", help="render SVG diagnostics from simulation output")
    p_plot.add_argument("result_dir", help="directory written by simulate")
    p_plot.add_argument("--kind", choices=PLOT_KINDS + ("all",),
                        default="all")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except SamplingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
