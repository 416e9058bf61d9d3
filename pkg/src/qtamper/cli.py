"""Command-line front end.

Subcommands: synth, ingest, attack, run, report. Every command is
deterministic given its flags; exit codes are 0 on success, 1 for
usage/validation problems, 2 for IO/parse problems, 3 for numerical
failures.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import errors
from .attacks import AttackSpec, apply_attack, save_tampered_csv
from .config import ExperimentConfig, load_config
from .data import (
    load_features_csv,
    load_timeseries_csv,
    save_features_csv,
    synth_generate,
    windowed_features,
    TimeSeries,
)
from .evaluate import compare_methods, report_table_rows, report_to_json
from .preprocess import moving_average_downsample

USAGE_EXIT = 1
IO_EXIT = 2
NUMERIC_EXIT = 3

_USAGE_ERRORS = (
    errors.ConfigurationError,
    errors.EncodingError,
    errors.CircuitError,
    errors.AttackError,
    errors.EvaluationError,
    errors.PreprocessingError,
    errors.ExtractionError,
)
_IO_ERRORS = (errors.ParseError, OSError)
_NUMERIC_ERRORS = (
    errors.TrainingError,
    errors.InferenceError,
    errors.OracleError,
    FloatingPointError,
)


def cmd_synth(args) -> int:
    dataset = synth_generate(args.profile, args.n, d=args.d,
                             separation=args.separation, seed=args.seed)
    save_features_csv(dataset, args.out)
    print(f"wrote {dataset.n_samples} rows x {dataset.n_features} features to {args.out}")
    return 0


def cmd_ingest(args) -> int:
    ts = load_timeseries_csv(args.input)
    if args.downsample_w > 1:
        channels = {
            name: moving_average_downsample(series, args.downsample_w)
            for name, series in ts.channels.items()
        }
        ts = TimeSeries(channels, ts.sampling_rate_hz / args.downsample_w, ts.subject_id)
    dataset = windowed_features(ts, args.window_len, args.stride)
    save_features_csv(dataset, args.out)
    print(f"wrote {dataset.n_samples} rows x {dataset.n_features} features to {args.out}")
    return 0


def cmd_attack(args) -> int:
    clean = load_features_csv(args.input)
    spec = AttackSpec(
        kind=args.kind, rate=args.rate, epsilon=args.epsilon,
        magnitude=args.magnitude, source_class=args.source_class,
        target_class=args.target_class, seed=args.seed,
    )
    tampered = apply_attack(clean, spec)
    save_tampered_csv(tampered, args.out)
    print(f"tampered {int(tampered.tamper_mask.sum())} of {tampered.n_samples} rows -> {args.out}")
    return 0


def _write_table_csv(rows, path):
    columns = ["method", "dataset", "classes", "features", "attack_type", "detection_pct"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in columns) + "\n")


def _print_table(rows):
    columns = ["method", "dataset", "classes", "features", "attack_type", "detection_pct"]
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in columns}
    header = " | ".join(c.ljust(widths[c]) for c in columns)
    print(header)
    print("-+-".join("-" * widths[c] for c in columns))
    for row in rows:
        print(" | ".join(str(row[c]).ljust(widths[c]) for c in columns))


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.out is not None:
        config.output_dir = args.out
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = compare_methods(config)
    json_path = out_dir / "report.json"
    json_path.write_text(report_to_json(report), encoding="utf-8")
    rows = report_table_rows(report)
    _write_table_csv(rows, out_dir / "report.csv")
    _print_table(rows)
    delta = report["delta_accuracy"]
    print(f"quantum - classical detection accuracy: {delta:+.4f}")
    print(f"report written to {json_path}")
    return 0


def cmd_report(args) -> int:
    import json

    try:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"bad report JSON: {exc}", line=exc.lineno) from None
    for key in ("classical", "quantum", "dataset", "attack"):
        if key not in doc:
            raise errors.ParseError(f"report is missing the {key!r} block")
    if not doc["classical"]["per_fold"] or not doc["quantum"]["per_fold"]:
        raise errors.ParseError("report has no folds")
    rows = report_table_rows(doc)
    if args.out:
        _write_table_csv(rows, args.out)
    _print_table(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtamper",
        description="Tampering detection experiments with a quantum-fidelity-kernel one-class SVM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic feature CSV")
    p.add_argument("--profile", required=True, choices=["one_class", "two_class", "three_class"])
    p.add_argument("--n", type=int, default=100, help="samples per class")
    p.add_argument("--d", type=int, default=None, help="feature count (profile default if omitted)")
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="extract windowed features from a time-series CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window-len", type=int, default=64)
    p.add_argument("--stride", type=int, default=64)
    p.add_argument("--downsample-w", type=int, default=60,
                   help="moving-average window applied before feature extraction (1 disables)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("attack", help="tamper a feature CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", required=True,
                   choices=["label_flip", "targeted_poison", "adv_perturb", "inject_anomalies"])
    p.add_argument("--rate", type=float, default=0.3)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--magnitude", type=float, default=3.0)
    p.add_argument("--source-class", type=int, default=0)
    p.add_argument("--target-class", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("run", help="run the full paired detection experiment from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="override the config's output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="render a report JSON as a flat table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None, help="also write the table as CSV")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except _IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_EXIT
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())
