"""Dataset model, CSV/JSONL ingestion, synthetic task generation, splits."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .codec import ClassIntervals
from .errors import (
    ClassTooSmallError,
    DatasetError,
    EmptyFileError,
    IntervalCountMismatchError,
    MalformedRowError,
    MissingHeaderError,
    NonNumericPropertyError,
)

CSV_HEADER = ("id", "class", "property")
JSONL_FORMAT = "hybridlabel-dataset"
JSONL_VERSION = 1

# Within-cluster standard deviation of the synthetic feature clusters.
# Kept well below the minimum centre separation so class identity is
# cleanly recoverable and within-class feature variation is carried
# almost entirely by the property coordinate.
CLUSTER_SD = 0.1


@dataclass
class LabeledDataset:
    """Records of (feature vector, class index, property value).

    Class indices are dense 1..n; ``class_names[i-1]`` is the source name
    of class i (identical to the index string for synthetic data).
    Immutable by convention after construction.
    """

    features: np.ndarray       # (N, d) float64; d may be 0
    class_indices: np.ndarray  # (N,) int64 in 1..n
    properties: np.ndarray     # (N,) float64
    ids: List[str]
    class_names: List[str]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.class_indices = np.asarray(self.class_indices, dtype=np.int64)
        self.properties = np.asarray(self.properties, dtype=np.float64)
        n_rec = len(self.class_indices)
        if self.features.ndim != 2 or self.features.shape[0] != n_rec:
            raise DatasetError(
                f"features must be (n_records, d), got {self.features.shape} "
                f"for {n_rec} records"
            )
        if len(self.properties) != n_rec or len(self.ids) != n_rec:
            raise DatasetError("records have inconsistent lengths")
        if n_rec == 0:
            raise DatasetError("dataset must contain at least one record")
        n = len(self.class_names)
        present = np.unique(self.class_indices)
        if present[0] < 1 or present[-1] > n or len(present) != n:
            raise DatasetError(
                f"class indices must be dense 1..{n} with every class "
                f"represented, got {present.tolist()}"
            )

    def __len__(self) -> int:
        return len(self.class_indices)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def class_intervals(self, indices=None) -> ClassIntervals:
        """Per-class property min/max, optionally restricted to a subset of
        record indices (e.g. the training split). Every class must appear
        in the subset."""
        if indices is None:
            cls, props = self.class_indices, self.properties
        else:
            idx = np.asarray(indices)
            cls, props = self.class_indices[idx], self.properties[idx]
        pairs = np.empty((self.n_classes, 2))
        for i in range(1, self.n_classes + 1):
            sel = props[cls == i]
            if sel.size == 0:
                raise DatasetError(f"class {i} absent from the given subset")
            pairs[i - 1] = (sel.min(), sel.max())
        return ClassIntervals(pairs)

    # --- serialization ----------------------------------------------------

    def to_jsonl(self, path) -> None:
        header = {
            "format": JSONL_FORMAT,
            "version": JSONL_VERSION,
            "n_classes": self.n_classes,
            "feature_dim": self.feature_dim,
            "class_names": list(self.class_names),
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for i in range(len(self)):
                rec = {
                    "id": self.ids[i],
                    "class_index": int(self.class_indices[i]),
                    "property": float(self.properties[i]),
                    "features": self.features[i].tolist(),
                }
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def from_jsonl(cls, path) -> "LabeledDataset":
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if not lines:
            raise EmptyFileError(f"{path} is empty")
        header = json.loads(lines[0])
        if header.get("format") != JSONL_FORMAT:
            raise DatasetError(f"{path} is not a {JSONL_FORMAT} file")
        ids, classes, props, feats = [], [], [], []
        for ln in lines[1:]:
            rec = json.loads(ln)
            ids.append(str(rec["id"]))
            classes.append(int(rec["class_index"]))
            props.append(float(rec["property"]))
            feats.append(rec["features"])
        features = np.asarray(feats, dtype=np.float64)
        if features.ndim == 1:  # zero-dimensional features
            features = features.reshape(len(ids), 0)
        return cls(features, np.asarray(classes), np.asarray(props), ids,
                   list(header["class_names"]))


def load_labels_csv(path) -> LabeledDataset:
    """Load a dataset from CSV with header ``id,class,property`` plus any
    number of trailing numeric feature columns.

    Class values (names or integers) are mapped to dense indices 1..n in
    first-appearance order. Malformed rows are rejected with their line
    number; line 1 is the header.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyFileError(f"{path} is empty")
    header = tuple(h.strip() for h in rows[0])
    if header[:3] != CSV_HEADER:
        raise MissingHeaderError(
            f"expected header starting with {','.join(CSV_HEADER)}, got "
            f"{','.join(header) or '(blank)'}"
        )
    n_feat = len(header) - 3
    name_to_index: dict = {}
    ids, classes, props, feats = [], [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedRowError(
                f"expected {len(header)} columns, got {len(row)}", lineno
            )
        rec_id, cls_name, prop_str = row[0].strip(), row[1].strip(), row[2].strip()
        if not cls_name:
            raise MalformedRowError("empty class value", lineno)
        try:
            prop = float(prop_str)
        except ValueError:
            raise NonNumericPropertyError(
                f"property {prop_str!r} is not a number", lineno
            ) from None
        try:
            fvals = [float(v) for v in row[3:]]
        except ValueError:
            raise MalformedRowError("non-numeric feature value", lineno) from None
        if cls_name not in name_to_index:
            name_to_index[cls_name] = len(name_to_index) + 1
        ids.append(rec_id)
        classes.append(name_to_index[cls_name])
        props.append(prop)
        feats.append(fvals)
    if not ids:
        raise EmptyFileError(f"{path} has a header but no data rows")
    features = np.asarray(feats, dtype=np.float64).reshape(len(ids), n_feat)
    return LabeledDataset(features, np.asarray(classes), np.asarray(props),
                          ids, list(name_to_index))


def generate_synthetic(
    n_classes: int,
    per_class: int,
    feature_dim: int,
    separation: float,
    property_intervals: ClassIntervals,
    noise_sd: float = 0.1,
    seed: int = 0,
) -> LabeledDataset:
    """Clustered Gaussian features with a property embedded in the last
    coordinate.

    Each class gets a tight Gaussian cluster (sd :data:`CLUSTER_SD`) in
    the first ``feature_dim - 1`` coordinates, with pairwise centre
    distances of at least ``separation``. Properties are drawn uniformly
    from the class interval and written linearly into the final
    coordinate (scaled so the global property range spans about [-2, 2])
    plus N(0, noise_sd**2), so the property is learnable from features.
    Deterministic given seed.
    """
    if n_classes < 2:
        raise DatasetError("n_classes must be >= 2")
    if per_class < 10:
        raise DatasetError("per_class must be >= 10")
    if feature_dim < 2:
        raise DatasetError("feature_dim must be >= 2")
    if property_intervals.n != n_classes:
        raise IntervalCountMismatchError(
            f"{property_intervals.n} intervals for {n_classes} classes"
        )
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_classes, feature_dim - 1))
    diffs = centers[:, None, :] - centers[None, :, :]
    dists = np.sqrt((diffs**2).sum(-1))
    min_dist = dists[np.triu_indices(n_classes, k=1)].min()
    if separation <= 0.0:
        centers = np.zeros_like(centers)
    else:
        centers *= separation / min_dist

    bounds = property_intervals.bounds
    g_lo, g_hi = bounds[:, 0].min(), bounds[:, 1].max()
    scale = (g_hi - g_lo) / 4.0 if g_hi > g_lo else 1.0
    mid = 0.5 * (g_lo + g_hi)

    feats, classes, props, ids = [], [], [], []
    for i in range(n_classes):
        p = rng.uniform(bounds[i, 0], bounds[i, 1], size=per_class)
        cluster = centers[i] + CLUSTER_SD * rng.normal(size=(per_class, feature_dim - 1))
        prop_coord = (p - mid) / scale + rng.normal(0.0, noise_sd, size=per_class)
        feats.append(np.column_stack([cluster, prop_coord]))
        classes.append(np.full(per_class, i + 1))
        props.append(p)
        ids.extend(f"c{i + 1}-{j}" for j in range(per_class))
    return LabeledDataset(
        np.concatenate(feats),
        np.concatenate(classes),
        np.concatenate(props),
        ids,
        [str(i + 1) for i in range(n_classes)],
    )


@dataclass
class SplitAssignment:
    """Train/val/test record indices forming a partition of the dataset."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=np.int64)
        self.val = np.asarray(self.val, dtype=np.int64)
        self.test = np.asarray(self.test, dtype=np.int64)

    @property
    def n_total(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)


def split_class_balanced(dataset: LabeledDataset, seed: int = 0) -> SplitAssignment:
    """Per-class 5:1:1 train/val/test split.

    Each class is shuffled with a seeded RNG, then val and test each take
    floor(m/7) records and the rounding remainder goes to train, keeping
    val/test exactly class-balanced when class sizes match.
    """
    rng = np.random.default_rng(seed)
    train, val, test = [], [], []
    for i in range(1, dataset.n_classes + 1):
        idx = np.flatnonzero(dataset.class_indices == i)
        m = len(idx)
        if m < 7:
            raise ClassTooSmallError(
                f"class {i} has {m} records; a 5:1:1 split needs at least 7"
            )
        idx = rng.permutation(idx)
        n_eval = m // 7
        train.append(idx[: m - 2 * n_eval])
        val.append(idx[m - 2 * n_eval : m - n_eval])
        test.append(idx[m - n_eval :])
    return SplitAssignment(
        np.concatenate(train), np.concatenate(val), np.concatenate(test)
    )
