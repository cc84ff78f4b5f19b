"""
Command-line interface.

Exit codes: 0 success, 1 oracle violation, 2 input error, 3 regime mismatch.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import mi_eval as mi
from . import oracle
from . import placement
from . import regimes as rg
from . import regions
from .channel_model import (DEFAULT_LAYOUT, NetworkParams, PHASE, DegenerateGeometry,
                            ScenarioError, fading_model, layout_from_dict,
                            params_from_dict)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_MISMATCH = 3

# Used by `verify` when no scenario is given.
_DEFAULT_VERIFY_PARAMS = NetworkParams(a11=0.42, a12=0.7, a21=0.7, a22=0.25, a31=0.26,
                                       a32=0.1, P1=10, P2=10, P3=10)


class InputError(Exception):
    pass


def _round(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj):
    """JSON with every float rounded to 12 significant digits."""
    return json.dumps(_round(obj), indent=2, sort_keys=False)


def _load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path}: {e}") from None


def _scenario(args):
    d = _load_json(args.scenario)
    try:
        return params_from_dict(d)
    except (ScenarioError, DegenerateGeometry) as e:
        raise InputError(str(e)) from None


def _settings(args):
    return rg.EvalSettings(n_samples=args.samples, seed=args.seed, tol=args.tol)


def _floats(text, n=None, what="values"):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse {what}: {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"expected {n} comma-separated {what}")
    return vals


# -- subcommands ------------------------------------------------------------------

def cmd_eval(args, out):
    params, model = _scenario(args)
    try:
        term = mi.parse_term(args.term)
    except (mi.UnsupportedTerm, ValueError) as e:
        raise InputError(str(e)) from None
    est = mi.evaluate(term, model, params, n=args.samples, seed=args.seed)
    out.write(dumps({"term": term.name, "model": model, **est.as_dict()}) + "\n")
    return EXIT_OK


def _config(name):
    try:
        return rg.feedback_config(name)
    except rg.UnsupportedConfig as e:
        raise InputError(str(e)) from None


def cmd_regime(args, out):
    params, model = _scenario(args)
    report = rg.regime_report(_config(args.config), model, params, _settings(args))
    out.write(dumps(report) + "\n")
    return EXIT_OK


def cmd_region(args, out):
    params, model = _scenario(args)
    settings = _settings(args)
    if args.emarc:
        region = regions.region_emarc(args.emarc, model, params, settings)
    elif args.txfb == "outer":
        region = regions.region_txfb_outer(model, params, settings)
    elif args.txfb == "inner":
        region = regions.region_txfb_inner(model, params, force=args.force,
                                           settings=settings)
    else:
        config = _config(args.config)
        regime = args.regime or rg.classify(config, model, params, settings)
        region = regions.build_region(config, regime, model, params, force=args.force,
                                      settings=settings)
    out.write(dumps(region.as_dict()) + "\n")
    if args.csv:
        Path(args.csv).write_text(region.vertices_csv())
    return EXIT_OK


def cmd_map(args, out):
    d = _load_json(args.scenario)
    try:
        powers = [float(p) for p in d["powers"]]
        model = fading_model(d.get("model", "phase"))
        layout = layout_from_dict(d["layout"]) if "layout" in d else DEFAULT_LAYOUT
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid map scenario: {e}") from None
    configs = [c for c in (args.configs or "").split(",") if c.strip()]
    if not configs:
        raise InputError("map needs a nonempty --configs list")
    configs = [_config(c.strip()) for c in configs]
    bbox = _floats(args.bbox, 4, "bbox values") if args.bbox else d.get("bbox")
    res = args.res if args.res is not None else int(d.get("resolution", 100))
    try:
        grid = placement.scan_placement(layout, powers, model, configs, args.kind, bbox,
                                        res, _settings(args), workers=args.workers)
    except ValueError as e:
        raise InputError(str(e)) from None
    prefix = Path(args.out)
    files = [str(prefix.with_name(prefix.name + ".csv"))]
    Path(files[0]).write_bytes(placement.export_map(grid, placement.CSV))
    for c, img in placement.export_map(grid, placement.PGM).items():
        name = str(prefix.with_name(f"{prefix.name}_{c}.pgm"))
        Path(name).write_bytes(img)
        files.append(name)
    summary = {"bbox": list(grid.bbox), "resolution": grid.resolution, "model": model,
               "kind": args.kind, "files": files,
               "counts": {c: {r: len(grid.cell_set(c, (r,))) for r in rg.REGIMES}
                          for c in grid.configs}}
    out.write(dumps(summary) + "\n")
    return EXIT_OK


def cmd_verify(args, out):
    n = args.n
    if args.scenario:
        params, model = _scenario(args)
    else:
        params, model = _DEFAULT_VERIFY_PARAMS, PHASE
    if args.model:
        model = fading_model(args.model)
    try:
        if args.suite == "psd":
            report = oracle.verify_psd_inequality(n or 100_000, args.seed)
        elif args.suite == "independence":
            report = oracle.verify_independence_optimal(
                model, params, n_cov=args.n_cov, n_draws=n or 10_000, seed=args.seed)
        elif args.suite == "crosscheck":
            report = oracle.crosscheck_closed_forms(model, params, n or 100_000, args.seed)
        else:
            report = oracle.verify_regime_nesting(n or 1000, args.seed, model,
                                                  _settings(args))
    except ValueError as e:
        raise InputError(str(e)) from None
    out.write(dumps(report) + "\n")
    return EXIT_OK if report["ok"] else EXIT_VIOLATION


def cmd_asymptote(args, out):
    snrs = _floats(args.snr, what="SNR values")
    try:
        rows = regions.sumrate_ratio_sweep(args.alpha12, args.alpha21, args.a, args.b, snrs)
    except ValueError as e:
        raise InputError(str(e)) from None
    out.write("snr,c_fb_tx,c_fb,ratio\n")
    for r in rows:
        out.write(",".join(f"{r[k]:.12g}" for k in ("snr", "c_fb_tx", "c_fb", "ratio"))
                  + "\n")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def _global_flags(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0),
                        help="random stream seed (default 0)")
    parser.add_argument("--samples", type=int, default=default(mi.DEFAULT_MC_SAMPLES),
                        help="Monte Carlo draws for sampled terms (default 1e5)")
    parser.add_argument("--tol", type=float, default=default(rg.DEFAULT_TOL),
                        help="margin tolerance in bits (default 1e-9)")
    parser.add_argument("--quiet", action="store_true", default=default(False),
                        help="suppress diagnostics on stderr")


def build_parser():
    p = argparse.ArgumentParser(
        prog="icrf",
        description="Rates, regimes and relay-placement maps for fading interference "
                    "channels with a relay and feedback.",
        epilog="Exit codes: 0 success, 1 oracle violation, 2 input error, "
               "3 regime mismatch.")
    _global_flags(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate one MI term")
    s.add_argument("--scenario", required=True)
    s.add_argument("--term", required=True, help="e.g. 'DesiredWithRelay(1)'")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("regime", parents=[common], help="regime-condition report")
    s.add_argument("--scenario", required=True)
    s.add_argument("--config", required=True, choices=rg.FEEDBACK_CONFIGS)
    s.set_defaults(func=cmd_regime)

    s = sub.add_parser("region", parents=[common], help="rate region polygon")
    s.add_argument("--scenario", required=True)
    s.add_argument("--config", default=rg.FULL_TO_RELAY, choices=rg.FEEDBACK_CONFIGS)
    s.add_argument("--regime", choices=(rg.VSI, rg.SI_NOT_VSI))
    s.add_argument("--force", action="store_true",
                   help="build the region even if the regime does not hold")
    s.add_argument("--emarc", choices=(regions.EMARC1, regions.EMARC2, regions.MARCF,
                                       regions.PEMARC))
    s.add_argument("--txfb", choices=("inner", "outer"))
    s.add_argument("--csv", help="also write the vertices to this CSV file")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("map", parents=[common], help="relay placement map")
    s.add_argument("--scenario", required=True)
    s.add_argument("--bbox", help="xmin,xmax,ymin,ymax")
    s.add_argument("--res", type=int)
    s.add_argument("--configs", required=True, help="comma-separated configurations")
    s.add_argument("--kind", default=rg.VSI, choices=(rg.VSI, "SI"))
    s.add_argument("--out", required=True, help="output path prefix")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("verify", parents=[common], help="run an oracle suite")
    s.add_argument("--suite", required=True,
                   choices=("independence", "psd", "crosscheck", "nesting"))
    s.add_argument("--n", type=int, help="draws (or scenarios for nesting)")
    s.add_argument("--n-cov", type=int, default=100)
    s.add_argument("--scenario")
    s.add_argument("--model", choices=("phase", "rayleigh"))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("asymptote", parents=[common], help="sum-rate ratio sweep")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--snr", required=True, help="comma-separated SNR values")
    s.add_argument("--alpha12", type=float, default=1.0)
    s.add_argument("--alpha21", type=float, default=1.0)
    s.set_defaults(func=cmd_asymptote)
    return p


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as e:
        if not args.quiet:
            err.write(f"icrf: error: {e}\n")
        return EXIT_INPUT
    except (regions.RegimeMismatch, regions.ConditionNotMet) as e:
        if not args.quiet:
            err.write(f"icrf: regime mismatch: {e}\n")
        return EXIT_MISMATCH


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
