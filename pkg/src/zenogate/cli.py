"""Command-line runner.

    zenogate zeno-curve --n-list 1,2,5,10 --out zeno.csv
    zenogate absorption-curve --tau-d-list 0.25,0.025 --out absorption.csv
    zenogate gate-check --config gate.json

Flags override the matching keys of a ``--config`` JSON file. Without
``--out`` files go to ``$ZENOGATE_OUTPUT_DIR`` (default: current directory).
Exit status: 0 all checks passed, 1 a check failed, 2 bad config or I/O.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, output_files, run_experiment


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenogate", description="Zeno-effect photonic gate experiments")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--out", help="output file (directory for curves)")
        p.add_argument("--n-list", type=_int_list, help="comma-separated measurement counts")
        p.add_argument("--tau-d-list", type=_float_list, help="comma-separated two-photon decay times")
        p.add_argument("--theta", type=float, help="total coupling angle")
        p.add_argument("--tolerance", type=float)
        p.add_argument("--quiet", action="store_true", help="do not print the summary")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if cfg.experiment != args.experiment:
            raise ConfigError(
                f"config key 'experiment' is {cfg.experiment!r} but subcommand is {args.experiment!r}"
            )
        raw = {"experiment": args.experiment, "parameters": dict(cfg.parameters), "output_path": cfg.output_path}
    else:
        raw = {"experiment": args.experiment, "parameters": {}, "output_path": None}
    overrides = {
        "n_list": args.n_list,
        "tau_d_list": args.tau_d_list,
        "theta": args.theta,
        "tolerance": args.tolerance,
    }
    for key, value in overrides.items():
        if value is not None:
            raw["parameters"][key] = value
    if args.out:
        raw["output_path"] = args.out
    return ExperimentConfig.from_dict(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        result = run_experiment(config)
    except ConfigError as exc:
        print(f"zenogate: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"zenogate: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(result.summary(), end="")
        for path in output_files(config.validated(), result):
            print(f"wrote {path}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
