"""Command-line interface.

Commands: ``fit-codec``, ``transform``, ``decode``, ``experiment``.
Exit codes: 0 ok, 1 error, 2 completed with violations.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .baseline import run_baseline
from .bench import run_ablation, run_timing
from .codec import MODE_STRICT, MODE_UNIFORM, ClassIntervals, HybridLabelEncoder
from .data import LabeledDataset, generate_synthetic, load_labels_csv, split_class_balanced
from .errors import HybridLabelError
from .nets import TrainConfig
from .pipeline import run_consolidated

log = logging.getLogger("hybridlabel")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dataset", "out_dir"],
    "properties": {
        "seed": {"type": "integer"},
        "out_dir": {"type": "string"},
        "pipelines": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": ["consolidated", "baseline", "ablation", "timing"]},
        },
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "minProperties": 1,
            "maxProperties": 1,
            "properties": {
                "csv": {"type": "string"},
                "jsonl": {"type": "string"},
                "synthetic": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["n_classes", "per_class", "feature_dim",
                                 "separation", "property_intervals"],
                    "properties": {
                        "n_classes": {"type": "integer", "minimum": 2},
                        "per_class": {"type": "integer", "minimum": 10},
                        "feature_dim": {"type": "integer", "minimum": 2},
                        "separation": {"type": "number", "minimum": 0},
                        "noise_sd": {"type": "number", "minimum": 0},
                        "property_intervals": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                    },
                },
            },
        },
        "transform": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "u": {"type": "number"},
                "mode": {"enum": [MODE_UNIFORM, MODE_STRICT]},
                "centering": {"type": "boolean"},
            },
        },
        "train": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "weight_decay": {"type": "number", "minimum": 0},
                "scheduler_factor": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "scheduler_patience": {"type": "integer", "minimum": 1},
                "max_epochs": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "hidden_widths": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "integer", "minimum": 1},
                },
            },
        },
        "timing": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "repeats": {"type": "integer", "minimum": 1},
                "infer_rows": {"type": "integer", "minimum": 1},
            },
        },
    },
}


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")


# --- codec utility commands -------------------------------------------------

def cmd_fit_codec(args) -> int:
    dataset = load_labels_csv(args.labels)
    intervals = dataset.class_intervals()
    enc = HybridLabelEncoder(u=args.u, mode=args.mode, centering=args.centering)
    enc.fit_intervals(intervals)
    report = enc.validate_spacing()
    out = Path(args.out)
    enc.save(out)
    _write_json(out.with_suffix(out.suffix + ".spacing.json"), report.to_json_dict())
    log.info("codec written to %s", out)
    print(report.describe())
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def cmd_transform(args) -> int:
    dataset = load_labels_csv(args.labels)
    enc = HybridLabelEncoder.load(args.codec)
    inside = enc.intervals_.contains(dataset.class_indices, dataset.properties)
    hybrid = enc.transform(
        dataset.class_indices, dataset.properties, allow_out_of_range=True
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "hybrid_label"])
        for i in range(len(dataset)):
            if inside[i]:
                writer.writerow([dataset.ids[i], repr(float(hybrid[i]))])
    n_bad = int(np.count_nonzero(~inside))
    if n_bad:
        for i in np.flatnonzero(~inside):
            print(
                f"row id={dataset.ids[i]}: property {dataset.properties[i]!r} "
                f"outside class {dataset.class_indices[i]} interval",
                file=sys.stderr,
            )
        log.warning("%d row(s) outside their class interval were skipped", n_bad)
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_decode(args) -> int:
    with open(args.preds, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows or len(rows[0]) < 2 or rows[0][0].strip() != "id" or rows[0][1].strip() not in ("prediction", "hybrid_label"):
        print("expected CSV header id,prediction (or id,hybrid_label)", file=sys.stderr)
        return EXIT_ERROR
    enc = HybridLabelEncoder.load(args.codec)
    ids, values, bad = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            v = float(row[1])
        except ValueError:
            v = math.nan
        if math.isfinite(v):
            ids.append(row[0])
            values.append(v)
        else:
            bad.append((lineno, row[0], row[1]))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "class_index", "property", "clamped"])
        if values:
            cls, props, clamped = enc.inverse_transform(values)
            for i in range(len(ids)):
                writer.writerow(
                    [ids[i], int(cls[i]), repr(float(props[i])),
                     str(bool(clamped[i])).lower()]
                )
    for lineno, rid, raw in bad:
        print(f"line {lineno} id={rid}: non-finite prediction {raw!r}", file=sys.stderr)
    return EXIT_VIOLATIONS if bad else EXIT_OK


# --- experiment runner --------------------------------------------------------

def _load_dataset(cfg: dict, seed: int) -> LabeledDataset:
    src = cfg["dataset"]
    if "csv" in src:
        return load_labels_csv(src["csv"])
    if "jsonl" in src:
        return LabeledDataset.from_jsonl(src["jsonl"])
    syn = src["synthetic"]
    intervals = ClassIntervals.from_pairs(syn["property_intervals"])
    return generate_synthetic(
        n_classes=syn["n_classes"],
        per_class=syn["per_class"],
        feature_dim=syn["feature_dim"],
        separation=syn["separation"],
        property_intervals=intervals,
        noise_sd=syn.get("noise_sd", 0.1),
        seed=seed,
    )


def cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        print(f"config error at {exc.json_path}: {exc.message}", file=sys.stderr)
        return EXIT_ERROR

    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    out_dir = Path(args.out) if args.out else Path(cfg["out_dir"])
    pipelines = cfg.get("pipelines", ["consolidated", "baseline"])
    tcfg = dict(cfg.get("train", {}))
    train_config = TrainConfig(seed=seed + 2, **tcfg)
    transform = cfg.get("transform", {})
    u = transform.get("u", 1.5)
    mode = transform.get("mode", MODE_UNIFORM)
    centering = transform.get("centering", True)
    hidden = tuple(cfg.get("model", {}).get("hidden_widths", (64, 64)))

    dataset = _load_dataset(cfg, seed)
    splits = split_class_balanced(dataset, seed=seed + 1)
    log.info(
        "dataset: %d records, %d classes, %d features; splits %d/%d/%d",
        len(dataset), dataset.n_classes, dataset.feature_dim,
        len(splits.train), len(splits.val), len(splits.test),
    )

    resolved = dict(cfg)
    resolved["seed"] = seed
    resolved["out_dir"] = str(out_dir)
    _write_json(out_dir / "experiment.json", resolved)

    if "consolidated" in pipelines:
        res = run_consolidated(
            dataset, splits, train_config,
            u=u, mode=mode, centering=centering, hidden_widths=hidden,
        )
        res.encoder.save(out_dir / "codec.json")
        _write_json(out_dir / "spacing.json", res.spacing.to_json_dict())
        _write_json(out_dir / "consolidated_report.json", res.report.to_json_dict())
        res.net.save(out_dir / "consolidated_checkpoint.json")
        log.info(
            "consolidated: accuracy %.4f, mse %.6g, mape %.4f (spacing %s)",
            res.report.accuracy, res.report.mse, res.report.mape,
            "good" if res.spacing.ok else "bad",
        )
    if "baseline" in pipelines:
        base = run_baseline(dataset, splits, train_config, hidden_widths=hidden)
        _write_json(out_dir / "baseline_report.json", base.report.to_json_dict())
        base.net.save(out_dir / "baseline_checkpoint.json")
        log.info(
            "baseline: accuracy %.4f, mse %.6g, mape %.4f",
            base.report.accuracy, base.report.mse, base.report.mape,
        )
    if "ablation" in pipelines:
        table = run_ablation(
            dataset, splits, train_config, u=u, mode=mode, hidden_widths=hidden,
        )
        _write_json(out_dir / "ablation.json", table.to_json_dict())
        _write_text(out_dir / "ablation.txt", table.describe())
        log.info("ablation:\n%s", table.describe())
    if "timing" in pipelines:
        tim = cfg.get("timing", {})
        timing = run_timing(
            dataset, splits, train_config,
            u=u, mode=mode, centering=centering, hidden_widths=hidden,
            repeats=tim.get("repeats", 3), infer_rows=tim.get("infer_rows", 2048),
        )
        _write_json(out_dir / "timing.json", timing.to_json_dict())
        _write_text(out_dir / "timing.txt", timing.describe())
        log.info("timing:\n%s", timing.describe())
    log.info("reports written to %s", out_dir)
    return EXIT_OK


# --- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridlabel",
        description="Hybrid label codec and training/evaluation harness",
    )
    parser.add_argument("--quiet", action="store_true", help="only warnings and errors")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the experiment config seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-codec", help="fit a codec from a labels CSV")
    p.add_argument("--labels", required=True, help="CSV with header id,class,property")
    p.add_argument("--u", type=float, default=1.5, help="spacing multiplier")
    p.add_argument("--mode", choices=[MODE_UNIFORM, MODE_STRICT], default=MODE_UNIFORM)
    centering = p.add_mutually_exclusive_group()
    centering.add_argument("--centering", dest="centering", action="store_true", default=True)
    centering.add_argument("--no-centering", dest="centering", action="store_false")
    p.add_argument("--out", required=True, help="output codec JSON path")
    p.set_defaults(fn=cmd_fit_codec)

    p = sub.add_parser("transform", help="encode a labels CSV into hybrid labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--codec", required=True)
    p.add_argument("--out", required=True, help="output CSV (id,hybrid_label)")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("decode", help="decode scalar predictions")
    p.add_argument("--preds", required=True, help="CSV with header id,prediction")
    p.add_argument("--codec", required=True)
    p.add_argument("--out", required=True,
                   help="output CSV (id,class_index,property,clamped)")
    p.set_defaults(fn=cmd_decode)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True, help="experiment JSON config")
    p.add_argument("--out", default=None, help="override the config out_dir")
    p.set_defaults(fn=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.fn(args)
    except (HybridLabelError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
