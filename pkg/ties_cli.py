#!/usr/bin/env python3
"""
TIES - Command Line Interface
Feature extraction, standalone persistence / diagram distances, and the
train / eval harness.

Exit codes: 0 success, 1 fatal configuration or I/O error, 2 finished but
some documents or corpus records were skipped.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from ties.evaluation.harness import (
    SplitSpec,
    TrainConfig,
    evaluate,
    format_metrics,
    label_alphabet,
    load_model,
    save_model,
    split,
    train,
)
from ties.pipelines.extractor import EXIT_FATAL, EXIT_OK, BatchExtractor, summarize_stage_times
from ties.pipelines.feature_io import read_features
from ties.pipelines.smoothing import WindowKind, WindowMode, WindowSpec
from ties.pipelines.textprep import CorpusFormat
from ties.topology.diagram_metric import DiagramMetric, MetricName
from ties.topology.geometry import read_matrix_csv
from ties.topology.persistence import read_diagram_csv, rips_persistence, write_diagram_csv
from ties.utils.config_loader import ConfigLoader
from ties.utils.errors import TiesError
from ties.utils.logging_config import get_logger, setup_logging

logger = get_logger("cli")


class TiesCLI:
    """Dispatches the TIES subcommands; each ``cmd_*`` returns a process exit code."""

    def cmd_extract(self, args: argparse.Namespace) -> int:
        """corpus → feature file (+ optional run report and Φ dumps)."""
        loader = ConfigLoader(args.config)
        overrides: Dict[str, Any] = {
            "corpus.path": args.corpus,
            "corpus.format": args.format,
            "lexicon": args.lexicon,
            "tokenizer.lowercase": args.lowercase,
            "tokenizer.stopwords": args.stopwords,
            "window.kind": args.window_kind,
            "window.mode": args.window_mode,
            "metric.name": args.metric,
            "output.features": args.out,
            "output.format": args.out_format,
            "output.report": args.report,
            "output.phi_dir": args.dump_phi,
            "workers": args.workers,
            "log_level": args.log_level,
            "progress": False if args.no_progress else None,
        }
        if args.window:
            parsed = WindowSpec.parse(args.window)
            overrides["window.size"] = parsed.size
            if args.window_kind is None and parsed.kind is WindowKind.EXPONENTIAL:
                overrides["window.kind"] = parsed.kind.value
        loader.apply_overrides(overrides)
        config = loader.run_config()
        setup_logging(config.log_level)

        report = BatchExtractor(config).run()
        for line in summarize_stage_times(report):
            logger.info("stage %s", line)
        return report.exit_code

    def cmd_ph(self, args: argparse.Namespace) -> int:
        """Distance-matrix CSV → persistence diagram CSV."""
        matrix = read_matrix_csv(args.matrix)
        diagram = rips_persistence(matrix, max_hdim=args.max_hdim)
        write_diagram_csv(diagram, args.out or sys.stdout)
        return EXIT_OK

    def cmd_dist(self, args: argparse.Namespace) -> int:
        """Distance between the ``--hdim`` bars of two diagram CSVs."""
        a = read_diagram_csv(args.diagram_a)
        b = read_diagram_csv(args.diagram_b)
        value = DiagramMetric(MetricName(args.metric))(a, b, args.hdim)
        print(repr(value))
        return EXIT_OK

    def cmd_train(self, args: argparse.Namespace) -> int:
        rows = read_features(args.features)
        seed = args.seed if args.seed is not None else ConfigLoader(args.config).split_seed()
        spec = SplitSpec(train_fraction=args.train_fraction, seed=seed)
        train_rows, test_rows = split(rows, spec)
        logger.info("Split %d rows: %d train / %d test (seed %d)", len(rows), len(train_rows), len(test_rows), spec.seed)
        config = TrainConfig(l2=args.l2, max_epochs=args.epochs, learning_rate=args.learning_rate,
                             tolerance=args.tolerance)
        model = train(train_rows, config, labels=label_alphabet(rows), split_spec=spec)
        save_model(model, args.out)
        logger.info("Model with %d label(s) written to %s", len(model.labels), args.out)
        return EXIT_OK

    def cmd_eval(self, args: argparse.Namespace) -> int:
        rows = read_features(args.features)
        model = load_model(args.model)
        if args.all or model.split is None:
            test_rows = rows
        else:
            _, test_rows = split(rows, model.split)
        metrics = evaluate(model, test_rows, threshold=args.threshold)
        payload = metrics.to_json(indent=2)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(payload)
        if args.json:
            print(payload)
        else:
            print(format_metrics(metrics))
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ties",
        description="TIES: topological features of word-embedding dimensions for text classification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ties extract --corpus docs.jsonl --lexicon vectors.txt --window 3 --out features.csv
  ties ph phi.csv --out diagram.csv
  ties dist a.csv b.csv --hdim 1 --metric bottleneck
  ties train --features features.csv --seed 7 --out model.json
  ties eval --features features.csv --model model.json
        """
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (env TIES_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser("extract", parents=[common], help="Compute TIES features for a corpus")
    extract.add_argument("--config", help="YAML run configuration")
    extract.add_argument("--corpus", help="JSONL file or directory of .txt files")
    extract.add_argument("--format", choices=[f.value for f in CorpusFormat])
    extract.add_argument("--lexicon", help="Whitespace-separated embedding file")
    extract.add_argument("--window", help="Window size, optionally suffixed: 3, 7-exponential, 7e")
    extract.add_argument("--window-kind", choices=[k.value for k in WindowKind])
    extract.add_argument("--window-mode", choices=[m.value for m in WindowMode])
    extract.add_argument("--metric", choices=[m.value for m in MetricName])
    extract.add_argument("--lowercase", action=argparse.BooleanOptionalAction, default=None,
                         help="Case-fold tokens (--no-lowercase overrides the config file)")
    extract.add_argument("--stopwords", help="File with one stopword per line")
    extract.add_argument("--out", help="Feature file (.csv or .jsonl)")
    extract.add_argument("--out-format", choices=["csv", "jsonl"])
    extract.add_argument("--report", help="Run report JSON")
    extract.add_argument("--dump-phi", metavar="DIR", help="Write each document's Φ as CSV into DIR")
    extract.add_argument("--workers", type=int, help="Worker processes (env TIES_WORKERS)")
    extract.add_argument("--no-progress", action="store_true", help="Disable the progress bar")

    ph = sub.add_parser("ph", parents=[common], help="Persistence diagram of a distance-matrix CSV")
    ph.add_argument("matrix")
    ph.add_argument("--max-hdim", type=int, choices=[0, 1], default=1)
    ph.add_argument("--out", help="Diagram CSV (default: stdout)")

    dist = sub.add_parser("dist", parents=[common], help="Distance between two diagram CSVs")
    dist.add_argument("diagram_a")
    dist.add_argument("diagram_b")
    dist.add_argument("--hdim", type=int, choices=[0, 1], default=0)
    dist.add_argument("--metric", choices=[m.value for m in MetricName], default=MetricName.W1.value)

    train_cmd = sub.add_parser("train", parents=[common], help="Fit the logistic-regression baseline on a feature file")
    train_cmd.add_argument("--features", required=True)
    train_cmd.add_argument("--out", required=True, help="Model JSON")
    train_cmd.add_argument("--config", help="YAML run configuration; supplies the split seed")
    train_cmd.add_argument("--seed", type=int, help="Split seed (default: env TIES_SEED, then config seed, else 0)")
    train_cmd.add_argument("--train-fraction", type=float, default=2.0 / 3.0)
    train_cmd.add_argument("--l2", type=float, default=TrainConfig.l2)
    train_cmd.add_argument("--epochs", type=int, default=TrainConfig.max_epochs)
    train_cmd.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    train_cmd.add_argument("--tolerance", type=float, default=TrainConfig.tolerance)

    eval_cmd = sub.add_parser("eval", parents=[common], help="Score a model on the held-out rows of a feature file")
    eval_cmd.add_argument("--features", required=True)
    eval_cmd.add_argument("--model", required=True)
    eval_cmd.add_argument("--threshold", type=float, default=0.5)
    eval_cmd.add_argument("--all", action="store_true", help="Evaluate every row, not only the held-out split")
    eval_cmd.add_argument("--out", help="Write metrics JSON here")
    eval_cmd.add_argument("--json", action="store_true", help="Print metrics as JSON instead of a table")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns the exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or os.getenv("TIES_LOG_LEVEL") or "INFO")

    cli = TiesCLI()
    handler = getattr(cli, f"cmd_{args.command}")
    try:
        return handler(args)
    except TiesError as e:
        logger.error("%s", e)
        return EXIT_FATAL
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_FATAL
    except (ValueError, json.JSONDecodeError) as e:
        logger.error("Invalid input: %s", e)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
