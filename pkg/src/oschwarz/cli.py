"""Command-line front end.

Subcommands: optimize, spectrum, solve, sweep-h, sweep-J, fit-slope,
kconstants.  Problem data comes from a JSON config (see symbol module for
the schema); results go to --out or stdout.  Exit codes: 0 success,
2 configuration error, 3 solver divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import optimize as opt
from . import reporting, solver
from .symbol import (FAMILY_NAMES, frequency_grid, problem_from_json,
                     transmission_from_json, transmission_to_json)

CONFIG_ERROR = 2
DIVERGED = 3


class ConfigError(Exception):
    pass


def _fraction(text):
    """Mesh sizes as decimals or '1/200' literals."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _int_list(text):
    return [int(t) for t in text.split(",") if t]


def _fraction_list(text):
    return [_fraction(t) for t in text.split(",") if t]


def _load_problem(path):
    try:
        with open(path) as fh:
            return problem_from_json(fh.read())
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {path}") from exc
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc


def _scope(text, pp):
    text = text.lower()
    if text in ("2", "two"):
        return opt.OptimizationScope.two_subdomain()
    if text in ("j", "finite"):
        return opt.OptimizationScope.finite(pp.J)
    if text in ("inf", "infinite", "infinity"):
        return opt.OptimizationScope.infinite()
    raise ConfigError(f"unknown scope {text!r} (use 2, J, or inf)")


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params_dict(tp):
    return json.loads(transmission_to_json(tp))


def _choice_json(family, scope_text, choice):
    params = _params_dict(choice.params)
    params.pop("family", None)
    doc = {
        "family": family,
        "scope": scope_text,
        "delta": choice.delta,
        "params": params,
        "predicted_rho": choice.predicted_rho,
        "numeric_rho": choice.achieved_rho,
        "constant": choice.constant_used,
        "maxima": [{"k": k, "rho": r} for k, r in choice.maxima],
    }
    if choice.note:
        doc["note"] = choice.note
    if choice.stalled:
        doc["stalled"] = True
    return json.dumps(doc, indent=2) + "\n"


def cmd_optimize(args):
    pp = _load_problem(args.config)
    if args.delta is not None:
        pp = pp.with_delta(args.delta)
    scope = _scope(args.scope, pp)
    choice = opt.asymptotic_params(args.family, scope, pp, pp.delta)
    if args.numeric:
        if scope.kind != "finite":
            raise ConfigError("numeric optimization needs --scope J")
        grid = frequency_grid(pp, args.h if args.h else pp.delta / 2)
        choice = opt.numeric_minmax(args.family, pp, grid)
    else:
        grid = frequency_grid(pp, args.h if args.h else pp.delta / 2)
        maxima = opt.equioscillation_report(choice.params, pp, grid)
        choice = replace(choice, maxima=tuple(maxima))
    _emit(_choice_json(args.family, args.scope, choice), args.out)
    return 0


def cmd_spectrum(args):
    from .spectral import rho_highfreq, rho_values

    pp = _load_problem(args.config)
    if args.params:
        tp = transmission_from_json(args.params)
    else:
        scope = _scope(args.scope, pp)
        tp = opt.asymptotic_params(args.family, scope, pp, pp.delta).params
    grid = frequency_grid(pp, args.h if args.h else pp.delta / 2)
    ks = grid.samples
    rhos = rho_values(ks, pp, tp)
    rows = [{"k": float(k), "rho": float(r), "rho_hf": rho_highfreq(float(k), pp, tp)}
            for k, r in zip(ks, rhos)]
    _emit(reporting.rows_to_csv(rows, ["k", "rho", "rho_hf"]), args.out)
    return 0


SWEEP_COLUMNS = ["h", "J", "family", "iterations", "contraction",
                 "predicted_rho", "seconds"]


def _sweep_out(rows, out):
    _emit(reporting.rows_to_csv(rows, SWEEP_COLUMNS), out)
    if any(r.get("diverged") for r in rows):
        return DIVERGED
    return 0


def cmd_solve(args):
    pp = _load_problem(args.config)
    h = args.h if args.h else pp.delta / 2
    row = solver.run_case(pp, h, args.family, mode=args.mode,
                          params=args.params_mode, seed=args.seed)
    return _sweep_out([row], args.out)


def cmd_sweep_h(args):
    pp = _load_problem(args.config)
    rows = solver.sweep_mesh(pp, args.family, args.h, mode=args.mode,
                             params=args.params_mode, seed=args.seed)
    return _sweep_out(rows, args.out)


def cmd_sweep_J(args):
    pp = _load_problem(args.config)
    rows = solver.sweep_subdomains(pp, args.family, args.J, mode_geom=args.geometry,
                                   h=args.h, solver_mode=args.mode,
                                   params=args.params_mode, seed=args.seed)
    return _sweep_out(rows, args.out)


def cmd_fit_slope(args):
    with open(args.infile) as fh:
        rows = reporting.csv_to_rows(fh.read())
    try:
        pts = [(row[args.x], row[args.y]) for row in rows]
        fit = reporting.fit_slope(pts)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    doc = {"exponent": fit.exponent, "intercept": fit.intercept,
           "r_squared": fit.r_squared, "points_used": fit.points_used}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_kconstants(args):
    pp = _load_problem(args.config)
    kinf = opt.constant_Kinf(pp)
    rows = [{"J": J, "K_J": opt.constant_KJ(pp, J), "K_inf": kinf}
            for J in args.J]
    _emit(reporting.rows_to_csv(rows, ["J", "K_J", "K_inf"]), args.out)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="oschwarz",
                                 description="Optimized Schwarz methods for "
                                             "complex diffusion on strips")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, family=True):
        p.add_argument("--config", required=True, help="problem JSON")
        if family:
            p.add_argument("--family", required=True,
                           choices=list(FAMILY_NAMES) + ["ras"])
        p.add_argument("--out", default=None, help="output path (stdout otherwise)")
        p.add_argument("--seed", type=lambda s: int(s, 0),
                       default=solver.DEFAULT_SEED, help="RNG seed override")

    p = sub.add_parser("optimize", help="optimized transmission parameters")
    common(p)
    p.add_argument("--scope", default="J", help="2, J, or inf")
    p.add_argument("--numeric", action="store_true",
                   help="refine by the numeric min-max solve")
    p.add_argument("--delta", type=_fraction, default=None)
    p.add_argument("--h", type=_fraction, default=None,
                   help="mesh size defining the frequency grid (default delta/2)")
    p.set_defaults(func=cmd_optimize, allow_ras=False)

    p = sub.add_parser("spectrum", help="CSV k,rho,rho_hf over the analysis grid")
    common(p, family=False)
    p.add_argument("--family", default="robin1", choices=FAMILY_NAMES)
    p.add_argument("--scope", default="J")
    p.add_argument("--params", default=None,
                   help="explicit transmission JSON instead of optimized values")
    p.add_argument("--h", type=_fraction, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("solve", help="one discrete Schwarz solve")
    common(p)
    p.add_argument("--h", type=_fraction, default=None,
                   help="mesh size (default delta/2 from the config)")
    p.add_argument("--mode", default="stationary", choices=["stationary", "gmres"])
    p.add_argument("--params-mode", default="asymptotic",
                   choices=["asymptotic", "numeric"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep-h", help="mesh-refinement sweep (delta = 2h)")
    common(p)
    p.add_argument("--h", type=_fraction_list, required=True,
                   help="comma list, fractions allowed: 1/50,1/100")
    p.add_argument("--mode", default="stationary", choices=["stationary", "gmres"])
    p.add_argument("--params-mode", default="asymptotic",
                   choices=["asymptotic", "numeric"])
    p.set_defaults(func=cmd_sweep_h)

    p = sub.add_parser("sweep-J", help="subdomain-count sweep")
    common(p)
    p.add_argument("--J", type=_int_list, required=True)
    p.add_argument("--geometry", default="fixed_width",
                   choices=["fixed_width", "fixed_global"])
    p.add_argument("--h", type=_fraction, default=None)
    p.add_argument("--mode", default="stationary", choices=["stationary", "gmres"])
    p.add_argument("--params-mode", default="asymptotic",
                   choices=["asymptotic", "numeric"])
    p.set_defaults(func=cmd_sweep_J)

    p = sub.add_parser("fit-slope", help="log-log slope of CSV columns")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--x", default="h")
    p.add_argument("--y", default="iterations")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit_slope)

    p = sub.add_parser("kconstants", help="CSV J,K_J,K_inf")
    common(p, family=False)
    p.add_argument("--J", type=_int_list, required=True)
    p.set_defaults(func=cmd_kconstants)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
