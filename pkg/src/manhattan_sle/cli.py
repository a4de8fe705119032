"""Command line front end.

Subcommands: hitting, passright, perc-passright, sle-curve, analyze.
Every simulation writes one CSV per curve plus a JSON sidecar carrying
the full run parameters, delta and n (midpoint convention), seed, sample
count and wall time.  Identical configuration and seed give byte
identical CSV output for any worker count.

A flat key=value config file can hold any long option; precedence is
flags > config file > built-in defaults.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import read_diff_curve, save_curve, write_curve_csv
from .estimators import (
    GRID_DEFAULT,
    ModelViolationError,
    ResourceLimitError,
    RunParams,
    analytic_curve,
    difference_curve,
    estimate_exponent,
    make_grid,
    rescale_curves,
    run_hitting,
    run_passright,
)
from .lattice import DOMAINS, RangeError, domain
from .sle import SleParams

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_MODEL = 4


def _read_config(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    cfg = _read_config(args.config)
    actions = list(parser._actions)
    for group in parser._subparsers._group_actions:
        sub = group.choices.get(args.command)
        if sub is not None:
            actions.extend(sub._actions)
    for key, raw in cfg.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is not None:
            continue  # flag wins
        action = next((a for a in actions if a.dest == key), None)
        cast = action.type if action and action.type else str
        setattr(args, key, cast(raw))


def _defaults(args: argparse.Namespace, **defaults) -> None:
    for key, val in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def _parse_f(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="manhattan-sle",
        description="Non-intersecting Manhattan-lattice walks vs SLE6 predictions",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, domains=True):
        if domains:
            p.add_argument("--domain", choices=sorted(DOMAINS), required=True)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--grid-size", dest="grid_size", type=int)
        p.add_argument("--out", required=True, help="output path base (no extension)")
        p.add_argument("--config", help="flat key=value config file")

    p = sub.add_parser("hitting", help="first-hit distribution Monte Carlo")
    p.add_argument("--R0", dest="R0", type=float)
    p.add_argument("--R1", dest="R1", type=float)
    common(p)

    for name, helptext in (
        ("passright", "pass-right Monte Carlo for a lattice domain"),
        ("perc-passright", "pass-right Monte Carlo for the percolation explorer"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--N0", dest="N0", type=int)
        p.add_argument("--f", type=_parse_f, help="usable fractions, e.g. 0.25,0.5,1")
        p.add_argument("--r-lo", dest="r_lo", type=float)
        p.add_argument("--r-hi", dest="r_hi", type=float)
        common(p, domains=(name == "passright"))

    p = sub.add_parser("sle-curve", help="analytic prediction curve")
    p.add_argument("--domain", choices=sorted(DOMAINS) + ["halfplane"], required=True)
    p.add_argument("--observable", choices=["hitting", "passright"], required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="flat key=value config file")

    p = sub.add_parser("analyze", help="difference-curve rescaling and exponent fit")
    p.add_argument("curves", nargs="+", help="curve CSVs written by the run commands")
    p.add_argument("--rescale", action="store_true")
    p.add_argument("--p", type=float, help="rescaling exponent")
    p.add_argument("--estimate-exponent", dest="estimate_exponent", action="store_true")
    p.add_argument("--out-suffix", default=".rescaled")
    return ap


def cmd_hitting(args) -> int:
    _defaults(args, samples=1_000_000, seed=1, workers=None, grid_size=GRID_DEFAULT)
    if args.R0 is None or args.R1 is None:
        print("hitting requires --R0 and --R1", file=sys.stderr)
        return EXIT_USAGE
    rp_check = args.R0 >= 10.0
    if not rp_check:
        print("R0 must be at least 10 (library calls allow smaller)", file=sys.stderr)
        return EXIT_USAGE
    curve = run_hitting(
        args.domain,
        args.R0,
        args.R1,
        args.samples,
        master_seed=args.seed,
        workers=args.workers,
        grid_size=args.grid_size,
    )
    save_curve(Path(args.out), curve)
    print(f"wrote {args.out}.csv ({args.grid_size} rows) and {args.out}.json")
    return 0


def cmd_passright(args, kind=None) -> int:
    _defaults(
        args,
        samples=1_000_000,
        seed=1,
        workers=None,
        grid_size=GRID_DEFAULT,
        N0=125_000,
        f=(1.0,),
        r_lo=0.05,
        r_hi=0.1,
    )
    rp = RunParams(
        N0=args.N0,
        f=args.f,
        r=(args.r_lo, args.r_hi),
        samples=args.samples,
        master_seed=args.seed,
    )
    curves = run_passright(
        kind or args.domain, rp, workers=args.workers, grid_size=args.grid_size
    )
    for c in curves:
        base = Path(f"{args.out}-f{c.meta['f']:g}")
        save_curve(base, c)
        print(f"wrote {base}.csv (n={c.meta['n']:.4g}, delta={c.meta['delta']:.4g})")
    return 0


def cmd_sle_curve(args) -> int:
    _defaults(args, grid_size=GRID_DEFAULT, kappa=6.0)
    d = domain(args.domain)
    grid = make_grid(d, args.grid_size)
    values = analytic_curve(d, args.observable, grid, SleParams(args.kappa))
    with open(f"{args.out}.csv", "w") as fh:
        fh.write("Theta,F_SLE\n")
        for t, v in zip(grid, values):
            fh.write(f"{t:.12g},{v:.12g}\n")
    print(f"wrote {args.out}.csv")
    return 0


def cmd_analyze(args) -> int:
    curves = [read_diff_curve(p) for p in args.curves]
    for path, c in zip(args.curves, curves):
        if c.meta.get("n") is None:
            print(f"{path} has no n value (hitting run?)", file=sys.stderr)
            return EXIT_USAGE
    if args.estimate_exponent:
        est = estimate_exponent(curves)
        flag = " (ill-conditioned)" if est.ill_conditioned else ""
        print(f"p_hat = {est.p_hat:.4f}  residual = {est.residual:.4g}{flag}")
        for n, norm in zip(est.ns, est.norms):
            print(f"  n = {n:8.3f}  ||diff||_2 = {norm:.6g}")
    if args.rescale:
        if args.p is None:
            print("--rescale requires --p", file=sys.stderr)
            return EXIT_USAGE
        rescaled = rescale_curves(curves, args.p)
        ordered = sorted(zip(args.curves, curves), key=lambda t: t[1].meta["n"])
        for (path, _), r in zip(ordered, rescaled):
            out = Path(path).with_suffix("") .as_posix() + args.out_suffix + ".csv"
            with open(out, "w") as fh:
                fh.write("Theta,diff_rescaled,stderr,factor\n")
                for t, v, s in zip(r.grid, r.value, r.stderr):
                    fh.write(f"{t:.12g},{v:.12g},{s:.12g},{r.meta['rescale_factor']:.12g}\n")
            print(f"wrote {out} (factor {r.meta['rescale_factor']:.6g})")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "config"):
        _apply_config(args, parser)
    try:
        if args.command == "hitting":
            return cmd_hitting(args)
        if args.command == "passright":
            return cmd_passright(args)
        if args.command == "perc-passright":
            return cmd_passright(args, kind="halfplane")
        if args.command == "sle-curve":
            return cmd_sle_curve(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        parser.error(f"unknown command {args.command!r}")
    except (RangeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ModelViolationError as exc:
        print(f"model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL
    return 0


if __name__ == "__main__":
    sys.exit(main())
