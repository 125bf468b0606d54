"""Command-line entry point: ``flowseek <scenario> [options]``."""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional

from . import config as config_mod
from .errors import FlowSeekError
from .scenarios import cmd_batch, cmd_characterize, cmd_replay, cmd_reorient, cmd_seek


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _count(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("trial count must be >= 0")
    return v


def _sigma(s: str) -> float:
    v = float(s)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError("noise sigma must be a finite value >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style config file (defaults used when omitted)")
    common.add_argument("--seed", type=_u64, help="master seed")
    common.add_argument("--trials", type=_count, help="number of batch trials")
    common.add_argument("--out", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write an SVG plot per seek trial")
    common.add_argument("--noise", type=_sigma, help="sensor noise sigma per channel, mT")

    p = argparse.ArgumentParser(prog="flowseek", description="Flow-sensor source-seeking simulator.")
    sub = p.add_subparsers(dest="scenario", required=True)
    sub.add_parser("characterize", parents=[common], help="in-place rotation at four on-axis distances")
    sub.add_parser("reorient", parents=[common], help="PD reorientation grid")
    sub.add_parser("seek", parents=[common], help="one seek trial")
    sub.add_parser("batch", parents=[common], help="seeded Monte Carlo seek trials")
    rp = sub.add_parser("replay", parents=[common], help="run the flow pipeline over a recorded stream")
    rp.add_argument("input", help="CSV with header t_s,bx_mT,by_mT")
    sub.add_parser("defaults", help="print the default configuration file")
    return p


def _num(v: Optional[float], fmt: str = ".3f") -> str:
    return "n/a" if v is None or (isinstance(v, float) and math.isnan(v)) else format(v, fmt)


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.scenario == "defaults":
        sys.stdout.write(config_mod.DEFAULT_CONFIG_TEXT)
        return 0
    try:
        cfg = config_mod.load(args.config).with_overrides(
            seed=args.seed, trials=args.trials, out=args.out, svg=args.svg, noise=args.noise
        )
        out = cfg.out_dir
        if args.scenario == "characterize":
            res = cmd_characterize(cfg, out)
            for r in res.runs:
                print(f"d={r.distance:g} m  speed={r.speed:.2f} m/s  rms={_num(r.rms_error)} deg  "
                      f"rms_instant={_num(r.rms_error_instant)} deg  max_mag={r.max_magnitude:.3f} mT")
        elif args.scenario == "reorient":
            res = cmd_reorient(cfg, out)
            for c in res.cells:
                print(f"d={c.distance:g} m  e0={c.initial_error:g} deg  settle={_num(c.settle_time)} s  "
                      f"final={c.final_error:.2f} deg")
            print(f"settled within 10 s: {res.settled_within(10.0)}/{len(res.cells)}; "
                  f"within 20 s: {res.settled_within(20.0)}/{len(res.cells)}")
        elif args.scenario == "seek":
            s = cmd_seek(cfg, out).summary
            print(f"{s.outcome.value}  t={s.completion_time:.3f} s  final_distance={s.final_distance:.3f} m  "
                  f"path={s.path_length:.3f} m")
        elif args.scenario == "batch":
            res = cmd_batch(cfg, out)
            sys.stdout.write(res.table())
            print(f"success rate: {res.success_rate:.3f}  median success time: "
                  f"{_num(res.median_success_time)} s")
        elif args.scenario == "replay":
            res = cmd_replay(args.input, cfg, out)
            print(f"bias=({res.bias.bias_x:.6g}, {res.bias.bias_y:.6g}) from {res.bias.sample_count} rows; "
                  f"{len(res.estimates)} estimates written")
    except FlowSeekError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
