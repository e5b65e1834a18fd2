"""Command-line entry point: ``audiolog <verb> [options]``.

Exit codes: 0 success, 1 nothing could be analysed, 2 no inputs,
3 configuration or manifest error, 4 model error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ManifestMalformed, ModelFormatError, ModelMissing, NoInputs
from .pipeline import (
    feature_table,
    run_analyze,
    run_evaluate,
    run_train,
    write_feature_table,
    write_outputs,
)

EXIT_OK, EXIT_FAILED, EXIT_NO_INPUTS, EXIT_CONFIG, EXIT_MODEL = 0, 1, 2, 3, 4

VERBS = ("analyze", "train-tree", "train-mlp", "evaluate", "features")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="audiolog", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--config", type=Path, help="JSON pipeline configuration")
    p.add_argument("--input", type=Path, required=True,
                   help="clip directory (analyze, features) or manifest CSV (train-*, evaluate)")
    p.add_argument("--models", type=Path, default=Path("models"), help="model directory")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _run(args) -> int:
    cfg = load_config(args.config, mode=args.verb, seed=args.seed, jobs=args.jobs)
    if args.verb == "analyze":
        records, summary = run_analyze(args.input, cfg, args.models)
        write_outputs(records, summary, args.out)
        print(json.dumps(summary, indent=2, sort_keys=True))
        return EXIT_OK if summary["analyzed"] else EXIT_FAILED
    if args.verb in ("train-tree", "train-mlp"):
        result = run_train(args.verb, args.input, cfg)
        args.models.mkdir(parents=True, exist_ok=True)
        name = cfg.models.environment if args.verb == "train-tree" else cfg.models.mood
        result.model.save(args.models / name)
        args.out.mkdir(parents=True, exist_ok=True)
        doc = {"mode": args.verb, "n_train": result.n_train, "n_test": result.n_test, "skipped": result.skipped,
               "metrics": result.metrics.to_dict() if result.metrics else None}
        (args.out / f"metrics_{args.verb}.json").write_text(json.dumps(doc, indent=2))
        print(f"trained on {result.n_train} clips, model written to {args.models / name}")
        if result.metrics:
            print(result.metrics.table())
        return EXIT_OK
    if args.verb == "evaluate":
        metrics = run_evaluate(args.input, cfg, args.models)
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "metrics_evaluate.json").write_text(metrics.to_json())
        print(metrics.table())
        return EXIT_OK
    rows = feature_table(args.input, cfg)
    write_feature_table(rows, args.out)
    print(f"{len(rows)} clips written to {args.out}")
    return EXIT_OK if rows else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except NoInputs as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_INPUTS
    except (ConfigError, ManifestMalformed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelMissing, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
