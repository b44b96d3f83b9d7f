"""Ablation grid and timing harness.

The ablation reruns the consolidated pipeline over the four combinations
of {separated, overlapping} labels x {centering on, off} with a single
output neuron. Multi-output single-task cells are not applicable to the
codec design and are reported as such, with the two-head baseline
appended as the nearest meaningful multi-output comparison.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .baseline import BASELINE_TAG, predict_baseline, run_baseline
from .codec import make_overlapping_encoder
from .data import LabeledDataset, SplitAssignment
from .errors import NoOverlapError
from .nets import TrainConfig
from .pipeline import infer, run_consolidated

LABELS_SEPARATED = "separated"
LABELS_OVERLAPPING = "overlapping"


@dataclass
class AblationRow:
    labels: str       # "separated" / "overlapping" / "n/a (two heads)"
    centering: str    # "true" / "false" / "n/a"
    n_outputs: str    # "1" / ">1"
    seed: int
    accuracy: Optional[float] = None
    mse: Optional[float] = None
    mape: Optional[float] = None
    skipped: bool = False
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "labels": self.labels,
            "centering": self.centering,
            "n_outputs": self.n_outputs,
            "seed": self.seed,
            "accuracy_fraction": self.accuracy,
            "mse_raw": self.mse,
            "mape_fraction": self.mape,
            "skipped": self.skipped,
            "note": self.note,
        }


@dataclass
class AblationTable:
    n_classes: int
    rows: List[AblationRow] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "n_classes": self.n_classes,
            "rows": [r.to_json_dict() for r in self.rows],
        }

    def describe(self) -> str:
        header = f"{'outputs':>8} {'labels':>18} {'centering':>9} {'accuracy':>9} {'mse':>12} {'mape':>8}  note"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            if r.skipped or r.accuracy is None:
                lines.append(
                    f"{r.n_outputs:>8} {r.labels:>18} {r.centering:>9} "
                    f"{'-':>9} {'-':>12} {'-':>8}  {r.note}"
                )
            else:
                lines.append(
                    f"{r.n_outputs:>8} {r.labels:>18} {r.centering:>9} "
                    f"{r.accuracy:>9.4f} {r.mse:>12.6g} {r.mape:>8.4f}  {r.note}"
                )
        return "\n".join(lines)

    def find(self, labels: str, centering: str) -> AblationRow:
        for r in self.rows:
            if r.labels == labels and r.centering == centering:
                return r
        raise KeyError((labels, centering))


def run_ablation(
    dataset: LabeledDataset,
    splits: SplitAssignment,
    train_config: TrainConfig,
    *,
    u: float = 1.5,
    mode: str = "strict",
    hidden_widths: Sequence[int] = (64, 64),
) -> AblationTable:
    """2x2 grid of label quality x range centering, plus the two-head
    baseline as the multi-output comparison row. Every cell records the
    seed it ran with so it can be reproduced independently."""
    table = AblationTable(n_classes=dataset.n_classes)
    intervals = dataset.class_intervals(splits.train)
    for centering in (True, False):
        res = run_consolidated(
            dataset, splits, train_config,
            u=u, mode=mode, centering=centering, hidden_widths=hidden_widths,
        )
        table.rows.append(AblationRow(
            labels=LABELS_SEPARATED,
            centering=str(centering).lower(),
            n_outputs="1",
            seed=train_config.seed,
            accuracy=res.report.accuracy,
            mse=res.report.mse,
            mape=res.report.mape,
        ))
    for centering in (True, False):
        try:
            enc = make_overlapping_encoder(intervals, centering=centering)
        except NoOverlapError as exc:
            table.rows.append(AblationRow(
                labels=LABELS_OVERLAPPING,
                centering=str(centering).lower(),
                n_outputs="1",
                seed=train_config.seed,
                skipped=True,
                note=f"skipped: {exc}",
            ))
            continue
        res = run_consolidated(
            dataset, splits, train_config,
            hidden_widths=hidden_widths, encoder=enc,
        )
        table.rows.append(AblationRow(
            labels=LABELS_OVERLAPPING,
            centering=str(centering).lower(),
            n_outputs="1",
            seed=train_config.seed,
            accuracy=res.report.accuracy,
            mse=res.report.mse,
            mape=res.report.mape,
        ))
    base = run_baseline(
        dataset, splits, train_config, hidden_widths=hidden_widths
    )
    table.rows.append(AblationRow(
        labels="n/a (two heads)",
        centering="n/a",
        n_outputs=">1",
        seed=train_config.seed,
        accuracy=base.report.accuracy,
        mse=base.report.mse,
        mape=base.report.mape,
        note="single-task multi-output cells are not applicable; "
             f"{BASELINE_TAG} shown for comparison",
    ))
    return table


@dataclass
class TimingReport:
    repeats: int
    train_ms: dict
    infer_us_per_item: dict
    train_ms_median: dict
    infer_us_median: dict
    train_ratio: float          # baseline / consolidated, medians
    infer_ratio: float
    train_ratio_per_repeat: List[float]
    infer_ratio_per_repeat: List[float]
    train_ratio_variance: float
    infer_ratio_variance: float
    infer_batch_rows: int

    def to_json_dict(self) -> dict:
        return {
            "repeats": self.repeats,
            "infer_batch_rows": self.infer_batch_rows,
            "train_ms": self.train_ms,
            "train_ms_median": self.train_ms_median,
            "infer_us_per_item": self.infer_us_per_item,
            "infer_us_median": self.infer_us_median,
            "train_ratio_baseline_over_consolidated": self.train_ratio,
            "infer_ratio_baseline_over_consolidated": self.infer_ratio,
            "train_ratio_per_repeat": self.train_ratio_per_repeat,
            "infer_ratio_per_repeat": self.infer_ratio_per_repeat,
            "train_ratio_variance": self.train_ratio_variance,
            "infer_ratio_variance": self.infer_ratio_variance,
        }

    def describe(self) -> str:
        c_train = self.train_ms_median["consolidated"]
        b_train = self.train_ms_median["baseline"]
        c_inf = self.infer_us_median["consolidated"]
        b_inf = self.infer_us_median["baseline"]
        return "\n".join([
            f"train (median of {self.repeats}): consolidated {c_train:.1f} ms, "
            f"baseline {b_train:.1f} ms, ratio {self.train_ratio:.2f}x",
            f"inference per item (median of {self.repeats}): consolidated "
            f"{c_inf:.3f} us, baseline {b_inf:.3f} us, ratio {self.infer_ratio:.2f}x",
            f"per-repeat train ratios: {['%.2f' % r for r in self.train_ratio_per_repeat]} "
            f"(variance {self.train_ratio_variance:.4g})",
            f"per-repeat infer ratios: {['%.2f' % r for r in self.infer_ratio_per_repeat]} "
            f"(variance {self.infer_ratio_variance:.4g})",
        ])


def _median_pass_seconds(fn, passes: int = 5) -> float:
    times = []
    for _ in range(passes):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def run_timing(
    dataset: LabeledDataset,
    splits: SplitAssignment,
    train_config: TrainConfig,
    *,
    u: float = 1.5,
    mode: str = "strict",
    centering: bool = True,
    hidden_widths: Sequence[int] = (64, 64),
    repeats: int = 3,
    infer_rows: int = 2048,
) -> TimingReport:
    """Wall-clock comparison of the two pipelines on identical shared
    stacks: median-of-``repeats`` training durations and per-item
    inference latencies (measured on a tiled batch of test features so
    the forward pass dominates interpreter overhead). Runs sequentially;
    never parallelised, for timing fidelity."""
    X_test = dataset.features[splits.test]
    tiles = int(np.ceil(infer_rows / max(len(X_test), 1)))
    X_big = np.tile(X_test, (tiles, 1))[:infer_rows]

    train_ms = {"consolidated": [], "baseline": []}
    infer_us = {"consolidated": [], "baseline": []}
    for _ in range(repeats):
        res = run_consolidated(
            dataset, splits, train_config,
            u=u, mode=mode, centering=centering, hidden_widths=hidden_widths,
        )
        train_ms["consolidated"].append(res.report.wall_train_ms)
        sec = _median_pass_seconds(lambda: infer(res.encoder, res.net, X_big))
        infer_us["consolidated"].append(sec / len(X_big) * 1e6)

        base = run_baseline(
            dataset, splits, train_config, hidden_widths=hidden_widths
        )
        train_ms["baseline"].append(base.report.wall_train_ms)
        sec = _median_pass_seconds(lambda: predict_baseline(base.net, X_big))
        infer_us["baseline"].append(sec / len(X_big) * 1e6)

    train_med = {k: statistics.median(v) for k, v in train_ms.items()}
    infer_med = {k: statistics.median(v) for k, v in infer_us.items()}
    train_ratios = [
        b / c for b, c in zip(train_ms["baseline"], train_ms["consolidated"])
    ]
    infer_ratios = [
        b / c for b, c in zip(infer_us["baseline"], infer_us["consolidated"])
    ]
    return TimingReport(
        repeats=repeats,
        train_ms=train_ms,
        infer_us_per_item=infer_us,
        train_ms_median=train_med,
        infer_us_median=infer_med,
        train_ratio=train_med["baseline"] / train_med["consolidated"],
        infer_ratio=infer_med["baseline"] / infer_med["consolidated"],
        train_ratio_per_repeat=train_ratios,
        infer_ratio_per_repeat=infer_ratios,
        train_ratio_variance=statistics.pvariance(train_ratios),
        infer_ratio_variance=statistics.pvariance(infer_ratios),
        infer_batch_rows=len(X_big),
    )
