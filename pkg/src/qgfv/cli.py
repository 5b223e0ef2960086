"""Command-line entry point.

Subcommands:
  run <config>     execute a run described by a key = value config file
  bench            run a double-gyre benchmark case on a coarse mesh
  convergence      manufactured-solution study for the elliptic operators
  munk             print the Munk scale for given Ro, Re
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import benchmark_case, parse_model
from .io import ConfigError, parse_config
from .solver import PhysicalParams, SimulationError, munk_scale, run
from .verification import filter_convergence, poisson_convergence

RATE_WINDOW = (1.8, 2.2)


def _parse_mesh(spec: str):
    try:
        nx, ny = spec.lower().split("x")
        return int(nx), int(ny)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"mesh must look like 16x32, got {spec!r}") from None


def _report(result, out_dir):
    record = result.record
    stats = result.solver_stats
    print(f"steps: {result.final_state.n}, wall: {result.wall_seconds:.1f} s")
    print(f"mean energy over window: {record.mean_energy():.6e}")
    for name, s in stats.items():
        if s["solves"]:
            print(f"{name}: {s['solves']} solves, mean {s['mean_iterations']:.1f} "
                  f"iterations, max {s['max_iterations']}")
    if out_dir is not None:
        print(f"outputs written to {out_dir}")


def _cmd_run(args) -> int:
    text = Path(args.config).read_text()
    config = parse_config(text)
    result = run(config)
    _report(result, config.output_dir)
    return 0


def _cmd_bench(args) -> int:
    case = {"case1": 1, "case2": 2}[args.case]
    config = benchmark_case(case, parse_model(args.model), nx=args.mesh[0],
                            ny=args.mesh[1], t_end=args.t_end,
                            avg_start=args.avg_start, dt=args.dt,
                            output_dir=args.out)
    print(f"case {case}: Ro={config.ro}, Re={config.re}, mesh {config.nx}x{config.ny}, "
          f"model {config.model.value}, alpha={config.resolved_alpha()}, "
          f"t_end={config.t_end}, averaging from {config.avg_start}")
    result = run(config)
    _report(result, config.output_dir)
    return 0


def _cmd_convergence(args) -> int:
    study = poisson_convergence() if args.operator == "poisson" else filter_convergence()
    print(study.table())
    lo, hi = RATE_WINDOW
    bad = [r for r in study.rates if not lo <= r <= hi]
    if bad:
        print(f"observed rates {bad} outside [{lo}, {hi}]", file=sys.stderr)
        return 1
    print(f"all rates within [{lo}, {hi}]")
    return 0


def _cmd_munk(args) -> int:
    delta = munk_scale(PhysicalParams(ro=args.ro, re=args.re, length=args.length))
    print(f"{delta!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgfv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run from a config file")
    p_run.add_argument("config", help="path to a key = value config file")
    p_run.set_defaults(fn=_cmd_run)

    p_bench = sub.add_parser("bench", help="run a double-gyre benchmark case")
    p_bench.add_argument("case", choices=["case1", "case2"])
    p_bench.add_argument("--mesh", type=_parse_mesh, default=(16, 32),
                         help="cells as NXxNY (default 16x32)")
    p_bench.add_argument("--model", choices=["qge", "bv", "bvnl"], default="bvnl")
    p_bench.add_argument("--t-end", type=float, default=100.0, dest="t_end")
    p_bench.add_argument("--avg-start", type=float, default=None, dest="avg_start",
                         help="averaging window start (default: 20 for t_end=100, "
                              "else t_end/2)")
    p_bench.add_argument("--dt", type=float, default=2.5e-5)
    p_bench.add_argument("--out", default="qgfv_out", help="output directory")
    p_bench.set_defaults(fn=_cmd_bench)

    p_conv = sub.add_parser("convergence", help="manufactured-solution study")
    p_conv.add_argument("operator", choices=["poisson", "filter"])
    p_conv.set_defaults(fn=_cmd_convergence)

    p_munk = sub.add_parser("munk", help="print the Munk scale")
    p_munk.add_argument("--ro", type=float, required=True)
    p_munk.add_argument("--re", type=float, required=True)
    p_munk.add_argument("--length", type=float, default=1.0)
    p_munk.set_defaults(fn=_cmd_munk)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, OSError, SimulationError) as err:
        print(f"qgfv: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
