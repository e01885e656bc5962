"""Command-line front end.

Subcommands: ``sample`` (write a point-set file), ``navigate`` (one run,
prints the path record as JSON), ``limits`` (constants and per-pair
predictions), ``experiment`` (full sweep from a JSON config), ``diagnose``
(navmax / maxball / r_min of a point-set file).

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .density import DensitySpec, Rect
from .errors import ConfigError, GeonavError
from .harness import ExperimentConfig, run_experiment, summarize
from .limits import constants, predict_cross, predict_straight
from .navigation import (CROSS_KINDS, DIRECTED_KINDS, NavKind, NavSpec,
                         record_to_dict, run, run_directed)
from .points import diagnose, load_points, sample_iid, sample_ppp, save_points


def _parse_point(text: str) -> complex:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected 'x,y', got {text!r}") from exc
    return complex(x, y)


def _parse_density(text: str, domain: str, inset: float) -> DensitySpec:
    try:
        x0, y0, x1, y1 = (float(v) for v in domain.split(","))
        rect = Rect(x0, y0, x1, y1)
        kind, _, rest = text.partition(":")
        params = tuple(float(v) for v in rest.split(",")) if rest else ()
        if kind == "constant":
            return DensitySpec.constant(*params, domain=rect, inset_a=inset)
        if kind == "affine":
            return DensitySpec.affine(*params, domain=rect, inset_a=inset)
        if kind == "bump":
            cx, cy, base, amp, rad = params
            return DensitySpec.radial_bump(complex(cx, cy), base, amp, rad,
                                           domain=rect, inset_a=inset)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad density spec {text!r}: {exc}") from exc
    raise ConfigError(f"unknown density kind in {text!r}")


def _nav_spec(args) -> NavSpec:
    kind = NavKind(args.kind)
    try:
        return NavSpec(kind=kind, theta=args.theta, p_theta=args.p_theta,
                       alpha=getattr(args, "alpha", 0.0),
                       north_seed=getattr(args, "north_seed", None))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _add_density_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--density", default="constant:1",
                   help="constant:c | affine:a,b,c | bump:cx,cy,base,amp,radius")
    p.add_argument("--domain", default="0,0,1,1", help="x0,y0,x1,y1")
    p.add_argument("--inset", type=float, default=0.05)


def _add_nav_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in NavKind])
    p.add_argument("--theta", type=float, help="sector angle (straight/directed kinds)")
    p.add_argument("--p-theta", dest="p_theta", type=int,
                   help="sector count (cross / random-north kinds)")
    p.add_argument("--alpha", type=float, default=0.0, help="directed axis angle")
    p.add_argument("--north-seed", dest="north_seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geonav", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a point set and write it to CSV")
    _add_density_args(p)
    p.add_argument("--model", choices=["ppp", "iid"], default="ppp")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("navigate", help="run one navigation, print the record as JSON")
    _add_density_args(p)
    _add_nav_args(p)
    p.add_argument("--points", help="point-set CSV (else sampled from --n/--seed)")
    p.add_argument("--n", type=float, default=1000.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", required=True, help="start 'x,y'")
    p.add_argument("--t", help="target 'x,y' (omit for directed kinds)")
    p.add_argument("--steps", type=int, default=None, help="directed step budget")
    p.add_argument("--svg", help="also draw the run to this SVG file")

    p = sub.add_parser("limits", help="print constants (and pair predictions) as JSON")
    _add_density_args(p)
    _add_nav_args(p)
    p.add_argument("--s", help="start 'x,y' for predictions")
    p.add_argument("--t", help="target 'x,y' for predictions")

    p = sub.add_parser("experiment", help="run a sweep from a JSON config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", dest="json_out", default=None)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("diagnose", help="navmax / maxball / r_min of a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--theta", type=float, default=math.pi / 3.0)
    p.add_argument("--grid-step", dest="grid_step", type=float, default=0.02)
    p.add_argument("--r", type=float, default=0.05, help="ball radius for maxball")
    return ap


def _cmd_sample(args) -> int:
    dens = _parse_density(args.density, args.domain, args.inset)
    if args.model == "ppp":
        ps = sample_ppp(dens, args.n, args.seed)
    else:
        ps = sample_iid(dens, int(args.n), args.seed)
    save_points(ps, args.out)
    print(f"wrote {len(ps)} points to {args.out}")
    return 0


def _get_points(args):
    if args.points:
        return load_points(args.points)
    dens = _parse_density(args.density, args.domain, args.inset)
    return sample_ppp(dens, args.n, args.seed)


def _cmd_navigate(args) -> int:
    spec = _nav_spec(args)
    ps = _get_points(args)
    s = _parse_point(args.s)
    if spec.kind in DIRECTED_KINDS:
        rec = run_directed(spec, s, ps, stop_after=args.steps)
    else:
        if args.t is None:
            raise ConfigError(f"{spec.kind.value} needs --t")
        rec = run(spec, s, _parse_point(args.t), ps)
    print(json.dumps(record_to_dict(rec), indent=2))
    if args.svg:
        from .harness import render_svg
        render_svg(args.svg, ps=ps, paths=[rec])
    return 0


def _cmd_limits(args) -> int:
    spec = _nav_spec(args)
    if spec.kind in DIRECTED_KINDS:
        raise ConfigError("constants tables cover targeted kinds; "
                          "directed laws are estimated by mc_constants")
    out = constants(spec.kind, spec.theta).as_dict()
    if args.s and args.t:
        dens = _parse_density(args.density, args.domain, args.inset)
        s = _parse_point(args.s)
        t = _parse_point(args.t)
        if spec.kind in CROSS_KINDS:
            length, nb, _ = predict_cross(spec.kind, spec.p_theta, s, t, dens)
        else:
            length, nb, _ = predict_straight(spec.kind, spec.theta, s, t, dens)
        out["pred_length"] = length
        out["pred_nb_over_sqrt_n"] = nb
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    updates = {}
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.csv:
        updates["csv_path"] = args.csv
    if args.json_out:
        updates["json_path"] = args.json_out
    if args.svg:
        updates["svg_path"] = args.svg
    if updates:
        from dataclasses import replace
        cfg = replace(cfg, **updates)
    rows = run_experiment(cfg, workers=args.workers)
    print(json.dumps(summarize(rows), indent=2, sort_keys=True))
    return 0


def _cmd_diagnose(args) -> int:
    ps = load_points(args.points)
    d = diagnose(ps, args.theta, args.grid_step, args.r)
    print(json.dumps({"navmax": d.navmax, "maxball": d.maxball,
                      "r_min": d.r_min, "grid_step": d.grid_step,
                      "directions": 64}, indent=2))
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "navigate": _cmd_navigate,
    "limits": _cmd_limits,
    "experiment": _cmd_experiment,
    "diagnose": _cmd_diagnose,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract here is 1
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GeonavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
