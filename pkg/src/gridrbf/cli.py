"""Command-line front end for running studies and tabulating constants."""

from __future__ import annotations

import argparse
import json
import sys

from . import constants as consts
from .bases import BasisFunction
from .harness import ExperimentConfig, emit_outputs, run_study
from .symbols import Symbol


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        cfg = ExperimentConfig.from_json(fh.read())
    if args.tol is not None:
        cfg.tol = args.tol
    result = run_study(cfg, jobs=args.jobs)
    paths = emit_outputs(result, cfg, args.out)
    print(f"study {cfg.study} [{cfg.digest()}]")
    if result.fit:
        print(f"  fitted rate: {result.fit.get('slope', float('nan')):.4f}"
              f"  (predicted {result.predicted_rate})")
    for name, verdict in result.verdicts.items():
        print(f"  {name}: {'pass' if verdict else 'FAIL'}")
    for kind, p in paths.items():
        print(f"  {kind}: {p}")
    return 0


def _cmd_constants(args) -> int:
    with open(args.basis) as fh:
        basis = BasisFunction.from_json(fh.read())
    symbol = None
    if args.symbol:
        with open(args.symbol) as fh:
            symbol = Symbol.from_json(fh.read())
    rep = consts.constants_report(
        basis, symbol=symbol,
        q_list=[max(symbol.order, 0.0)] if symbol else (),
        with_rho=basis.n == 1,
    )
    text = rep.to_json()
    if args.out:
        import os

        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "constants.json")
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(path)
    else:
        print(text)
    return 0


def _cmd_validate(args) -> int:
    with open(args.config) as fh:
        text = fh.read()
    try:
        cfg = ExperimentConfig.from_json(text)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {cfg.study} [{cfg.digest()}]")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="study",
        description="Grid RBF interpolation / evolution-scheme studies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a study config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="studies", help="output directory")
    p_run.add_argument("--tol", type=float, default=None, help="override tolerance")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel ladder points")
    p_run.set_defaults(func=_cmd_run)

    p_const = sub.add_parser("constants", help="tabulate constants for a basis")
    p_const.add_argument("basis")
    p_const.add_argument("--symbol", default=None)
    p_const.add_argument("--out", default=None)
    p_const.set_defaults(func=_cmd_constants)

    p_val = sub.add_parser("validate", help="validate a study config")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
