"""Command-line interface.

Subcommands: ``generate`` (simulate a dataset), ``train`` (fit one surrogate
kind), ``evaluate`` (error reports for analytic and learned models on the
held-out front), ``pipeline`` (all three). Settings come from built-in scale
presets, then an optional ``--config`` file (key = value lines), then flags,
in increasing precedence.

Exit codes: 0 success, 2 invalid configuration or file format, 3 numerical
failure (integration, extraction, fitting or training).
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import build_config, parse_config_file
from .errors import (
    EvaluationError,
    ExtractionFailure,
    FitDiverged,
    FormatError,
    IntegrationFailure,
    InvalidInput,
    NoFrontCrossing,
    TrainingDiverged,
)
from .pipeline import KIND_ALIASES, run_evaluate, run_generate, run_pipeline, run_train

log = logging.getLogger("phasefront")

_CONFIG_ERRORS = (InvalidInput, FormatError, FileNotFoundError)
_NUMERICAL_ERRORS = (IntegrationFailure, ExtractionFailure, TrainingDiverged,
                     EvaluationError, FitDiverged, NoFrontCrossing)


def _add_common(parser):
    parser.add_argument("--config", help="config file with key = value lines")
    parser.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    parser.add_argument("--scale", choices=("paper", "ci"), help="resolution preset")
    parser.add_argument("--out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasefront",
        description="Learn 1D front equations from 2D phase-field simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate training and test trajectories")
    _add_common(p)
    p.add_argument("--workers", type=int, help="parallel simulations")

    p = sub.add_parser("train", help="train one surrogate kind on a dataset")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--kind", required=True, choices=tuple(KIND_ALIASES))

    p = sub.add_parser("evaluate", help="error reports on the test trajectory")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--model", action="append", default=[], metavar="KIND=PATH",
                   help="learned model to include (repeatable)")

    p = sub.add_parser("pipeline", help="generate, train all kinds, evaluate")
    _add_common(p)
    p.add_argument("--workers", type=int, help="parallel simulations")
    p.add_argument("--kind", action="append", choices=tuple(KIND_ALIASES),
                   help="restrict training to these kinds (repeatable)")

    return parser


def _config_from_args(args):
    file_values = parse_config_file(args.config) if args.config else None
    overrides = {"seed": args.seed, "scale": args.scale, "out": args.out}
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    return build_config(file_values, overrides)


def _parse_model_args(pairs):
    paths = {}
    for pair in pairs:
        if "=" not in pair:
            raise InvalidInput(f"--model expects KIND=PATH, got {pair!r}")
        kind, path = pair.split("=", 1)
        if kind not in KIND_ALIASES:
            raise InvalidInput(f"unknown model kind {kind!r}")
        if not Path(path).exists():
            raise InvalidInput(f"model file not found: {path}")
        paths[kind] = path
    return paths


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        base = Path(cfg.out_dir)
        if args.command == "generate":
            run_generate(cfg, args.out or base / "dataset")
        elif args.command == "train":
            run_train(args.data, args.kind, cfg, args.out or base / "models")
        elif args.command == "evaluate":
            reports, failures = run_evaluate(args.data, _parse_model_args(args.model),
                                             args.out or base / "eval")
            if not reports:
                log.error("every model failed to integrate")
                return 3
        elif args.command == "pipeline":
            kinds = tuple(dict.fromkeys(args.kind)) if args.kind else ("blackbox", "additive", "functional")
            run_pipeline(cfg, kinds)
    except _CONFIG_ERRORS as exc:
        log.error("%s", exc)
        return 2
    except _NUMERICAL_ERRORS as exc:
        log.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
