"""Hybrid label codec.

Encodes a (class index, property value) pair into a single real-valued
label and decodes model predictions back. Each class i owns a closed
property interval [a_i, b_i]; the codec adds a per-class offset k_i so
the shifted intervals become disjoint and ordered by class index, which
lets one scalar carry both the class identity (which interval the value
falls in) and the property value (the position inside the interval).

Offsets are built in one of two modes:

``uniform``
    k_i = (i - 1) * u * delta, where delta is the widest class interval
    and u in [1, 2] scales the stride. Simple, but when the source
    intervals overlap or have very unequal widths the resulting
    inter-class gaps can fall outside the intended (delta, 2*delta)
    window; ``validate_spacing`` reports this.

``strict``
    k_1 = 0 and k_{i+1} = k_i + (b_i - a_{i+1}) + u * delta, which
    forces every inter-class gap to equal u * delta exactly, so the
    (delta, 2*delta) window holds whenever 1 < u < 2.

Optional range centering subtracts half the span of the offset
intervals, shrinking label magnitudes (helpful against large gradients
when training on the encoded labels).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import (
    ClassOutOfRangeError,
    DegenerateIntervalsError,
    InvalidSpacingError,
    NoOverlapError,
    PropertyOutOfIntervalError,
)
from .validation import as_float_array, as_index_array, check_finite, check_same_length

MODE_UNIFORM = "uniform"
MODE_STRICT = "strict"
_MODES = (MODE_UNIFORM, MODE_STRICT)

# Gap width substituted in strict mode when every class interval is a
# single point (delta == 0), so classes stay separable.
POINT_INTERVAL_GAP_DELTA = 1.0


@dataclass(frozen=True)
class ClassIntervals:
    """Per-class closed property intervals [a_i, b_i], class index i in 1..n.

    Classes keep the caller-supplied order; they are never re-sorted by
    their bounds, since the index itself is the class label.
    """

    bounds: np.ndarray  # shape (n, 2), float64

    def __post_init__(self):
        arr = np.asarray(self.bounds, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DegenerateIntervalsError(
                f"bounds must have shape (n, 2), got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise DegenerateIntervalsError("need at least one class interval")
        if not np.all(np.isfinite(arr)):
            raise DegenerateIntervalsError("interval bounds must be finite")
        bad = np.flatnonzero(arr[:, 0] > arr[:, 1])
        if bad.size:
            raise DegenerateIntervalsError(
                f"lower bound above upper bound for class(es) {(bad + 1).tolist()}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "bounds", arr)

    @classmethod
    def from_pairs(cls, pairs) -> "ClassIntervals":
        return cls(np.asarray(pairs, dtype=np.float64).reshape(-1, 2))

    @classmethod
    def from_labels(cls, class_indices, properties) -> "ClassIntervals":
        """Per-class min/max of observed property values.

        Class indices must be dense 1..n; every class needs at least one
        observation.
        """
        idx = as_index_array(class_indices, "class_indices")
        props = as_float_array(properties, "properties")
        check_same_length(idx, props, "class_indices and properties")
        if idx.size == 0:
            raise DegenerateIntervalsError("no labels to derive intervals from")
        n = int(idx.max())
        if idx.min() < 1:
            raise ClassOutOfRangeError("class indices must be >= 1")
        pairs = np.empty((n, 2))
        for i in range(1, n + 1):
            sel = props[idx == i]
            if sel.size == 0:
                raise DegenerateIntervalsError(f"class {i} has no observations")
            pairs[i - 1] = (sel.min(), sel.max())
        return cls(pairs)

    @property
    def n(self) -> int:
        return self.bounds.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.bounds[:, 1] - self.bounds[:, 0]

    def contains(self, class_indices, properties) -> np.ndarray:
        """Boolean mask: property within its class interval (closed)."""
        idx = as_index_array(class_indices) - 1
        props = as_float_array(properties)
        lo = self.bounds[idx, 0]
        hi = self.bounds[idx, 1]
        return (props >= lo) & (props <= hi)


@dataclass
class SpacingReport:
    """Disjointness / ordering / gap-width audit of the encoded intervals.

    ``gaps[i]`` is min(interval i+2) - max(interval i+1) for adjacent
    class pairs. Violations:

    * ``overlaps`` -- unordered class pairs (1-based) whose encoded
      intervals share at least one point;
    * ``ordering`` -- adjacent pair positions i (1-based, pair i,i+1)
      where the intervals are not strictly increasing;
    * ``spacing`` -- adjacent pairs whose gap falls outside the open
      window (gap_delta, 2*gap_delta).
    """

    gaps: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)
    ordering: list = field(default_factory=list)
    spacing: list = field(default_factory=list)  # (pair, gap, reason)
    gap_delta: float = 0.0

    @property
    def ok(self) -> bool:
        return not (self.overlaps or self.ordering or self.spacing)

    @property
    def n_violations(self) -> int:
        return len(self.overlaps) + len(self.ordering) + len(self.spacing)

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "gap_delta": self.gap_delta,
            "gaps": list(self.gaps),
            "overlap_pairs": [list(p) for p in self.overlaps],
            "ordering_violations": list(self.ordering),
            "spacing_violations": [
                {"pair": p, "gap": g, "reason": r} for p, g, r in self.spacing
            ],
        }

    def describe(self) -> str:
        lines = [f"verdict: {'good' if self.ok else 'bad'}"]
        for i, g in enumerate(self.gaps, start=1):
            lines.append(f"  gap {i}->{i + 1}: {g:.6g}")
        for p, q in self.overlaps:
            lines.append(f"  overlap: classes {p} and {q}")
        for i in self.ordering:
            lines.append(f"  ordering: classes {i} and {i + 1} not increasing")
        for p, g, reason in self.spacing:
            lines.append(
                f"  spacing: gap {p}->{p + 1} = {g:.6g} {reason} "
                f"(window ({self.gap_delta:.6g}, {2 * self.gap_delta:.6g}))"
            )
        return "\n".join(lines)


class HybridLabelEncoder(BaseEstimator):
    """Fit/transform/inverse_transform codec for hybrid labels.

    Parameters
    ----------
    u : float
        Spacing multiplier. ``uniform`` mode accepts 1 <= u <= 2,
        ``strict`` mode requires 1 < u < 2.
    mode : str
        ``"uniform"`` or ``"strict"`` offset construction (see module
        docstring).
    centering : bool
        Subtract half the span of the offset intervals from every label.

    Fitted attributes (after ``fit`` / ``fit_intervals``):
    ``intervals_``, ``n_classes_``, ``delta_``, ``offsets_``, ``shift_``,
    ``transformed_bounds_``. Fitting replaces this state wholesale and
    nothing mutates it afterwards, so a fitted encoder is safe to share
    across reader threads/processes.
    """

    def __init__(self, u: float = 1.5, mode: str = MODE_UNIFORM, centering: bool = True):
        self.u = u
        self.mode = mode
        self.centering = centering

    # --- fitting ----------------------------------------------------------

    def fit(self, class_indices, properties) -> "HybridLabelEncoder":
        """Derive per-class intervals from labelled data and fit."""
        return self.fit_intervals(ClassIntervals.from_labels(class_indices, properties))

    def fit_intervals(self, intervals: ClassIntervals) -> "HybridLabelEncoder":
        """Fit from known per-class property intervals."""
        self._check_params()
        bounds = intervals.bounds
        n = intervals.n
        delta = float(intervals.widths.max())
        gap_delta = delta
        if self.mode == MODE_UNIFORM:
            offsets = np.arange(n, dtype=np.float64) * (self.u * delta)
        else:
            if delta == 0.0:
                gap_delta = POINT_INTERVAL_GAP_DELTA
            offsets = np.zeros(n)
            for i in range(n - 1):
                offsets[i + 1] = (
                    offsets[i] + (bounds[i, 1] - bounds[i + 1, 0]) + self.u * gap_delta
                )
        return self._finalize(intervals, offsets, delta, gap_delta, self.centering)

    def _finalize(self, intervals, offsets, delta, gap_delta, centering):
        bounds = intervals.bounds
        pre_lo = bounds[:, 0] + offsets
        pre_hi = bounds[:, 1] + offsets
        shift = 0.5 * (pre_hi.max() - pre_lo.min()) if centering else 0.0
        self.intervals_ = intervals
        self.n_classes_ = intervals.n
        self.delta_ = delta
        self.gap_delta_ = gap_delta
        self.offsets_ = offsets
        self.shift_ = float(shift)
        # Net per-class offset applied in a single float operation by both
        # transform and inverse_transform, keeping round-trips tight.
        self._net_offsets = offsets - shift
        lo = bounds[:, 0] + self._net_offsets
        hi = bounds[:, 1] + self._net_offsets
        self.transformed_bounds_ = np.column_stack([lo, hi])
        gaps = lo[1:] - hi[:-1]
        self._sorted_disjoint = bool(np.all(gaps > 0.0)) if len(gaps) else True
        # Midpoints of inter-class gaps: nearest-interval assignment for a
        # sorted, disjoint layout reduces to binning against these edges.
        self._decode_edges = 0.5 * (hi[:-1] + lo[1:]) if self._sorted_disjoint else None
        return self

    def _check_params(self):
        if self.mode not in _MODES:
            raise InvalidSpacingError(
                f"mode must be one of {_MODES}, got {self.mode!r}"
            )
        u = self.u
        if self.mode == MODE_UNIFORM and not (1.0 <= u <= 2.0):
            raise InvalidSpacingError(f"uniform mode needs 1 <= u <= 2, got {u}")
        if self.mode == MODE_STRICT and not (1.0 < u < 2.0):
            raise InvalidSpacingError(f"strict mode needs 1 < u < 2, got {u}")

    def _check_fitted(self):
        if not hasattr(self, "transformed_bounds_"):
            raise NotFittedError(
                "this HybridLabelEncoder is not fitted yet; call fit or "
                "fit_intervals first"
            )

    # --- encoding ---------------------------------------------------------

    def transform(self, class_indices, properties, allow_out_of_range: bool = False) -> np.ndarray:
        """Encode (class, property) pairs into hybrid labels.

        Out-of-interval properties raise unless ``allow_out_of_range`` is
        set, in which case the per-class affine map is extended linearly
        beyond its interval (used to encode validation/test records whose
        property falls outside the training-derived range).
        """
        self._check_fitted()
        idx = as_index_array(class_indices, "class_indices")
        props = as_float_array(properties, "properties")
        check_same_length(idx, props, "class_indices and properties")
        bad_cls = (idx < 1) | (idx > self.n_classes_)
        if np.any(bad_cls):
            raise ClassOutOfRangeError(
                f"class indices out of 1..{self.n_classes_} at positions "
                f"{np.flatnonzero(bad_cls)[:10].tolist()}"
            )
        if not allow_out_of_range:
            inside = self.intervals_.contains(idx, props)
            if not np.all(inside):
                positions = np.flatnonzero(~inside)
                raise PropertyOutOfIntervalError(
                    f"property outside its class interval at positions "
                    f"{positions[:10].tolist()}",
                    indices=positions,
                )
        return props + self._net_offsets[idx - 1]

    def encode(self, class_index: int, prop: float) -> float:
        """Scalar convenience wrapper around :meth:`transform`."""
        return float(self.transform([class_index], [prop])[0])

    # --- decoding ---------------------------------------------------------

    def inverse_transform(self, values):
        """Decode hybrid labels back to (class_indices, properties, clamped).

        Each value is assigned to the class whose encoded interval is
        nearest (ties go to the lower class index); the property is the
        value minus that class's net offset, clamped into the class
        interval. ``clamped`` marks values that fell outside every
        encoded interval, i.e. in a gap or beyond the ends.
        """
        self._check_fitted()
        vals = as_float_array(values, "values")
        check_finite(vals, "values")
        lo = self.transformed_bounds_[:, 0]
        hi = self.transformed_bounds_[:, 1]
        if self._sorted_disjoint:
            cls0 = np.searchsorted(self._decode_edges, vals, side="left")
        else:
            # Point-to-interval distances; argmin returns the first (lowest
            # class index) minimiser, which implements the tie-break.
            dist = np.maximum(lo[None, :] - vals[:, None], 0.0) + np.maximum(
                vals[:, None] - hi[None, :], 0.0
            )
            cls0 = np.argmin(dist, axis=1)
        raw = vals - self._net_offsets[cls0]
        a = self.intervals_.bounds[cls0, 0]
        b = self.intervals_.bounds[cls0, 1]
        props = np.clip(raw, a, b)
        clamped = (vals < lo[cls0]) | (vals > hi[cls0])
        return cls0 + 1, props, clamped

    def decode(self, value: float):
        """Scalar convenience wrapper around :meth:`inverse_transform`."""
        cls, props, clamped = self.inverse_transform([value])
        return int(cls[0]), float(props[0]), bool(clamped[0])

    # --- diagnostics ------------------------------------------------------

    def validate_spacing(self) -> SpacingReport:
        """Audit the encoded intervals for disjointness, ordering and gap
        width. The verdict is good only with zero violations; a single
        class trivially passes."""
        self._check_fitted()
        lo = self.transformed_bounds_[:, 0]
        hi = self.transformed_bounds_[:, 1]
        n = self.n_classes_
        report = SpacingReport(gap_delta=self.gap_delta_)
        if n == 1:
            return report
        report.gaps = (lo[1:] - hi[:-1]).tolist()
        for p in range(n):
            for q in range(p + 1, n):
                if max(lo[p], lo[q]) <= min(hi[p], hi[q]):
                    report.overlaps.append((p + 1, q + 1))
        for i, gap in enumerate(report.gaps, start=1):
            if gap <= 0.0:
                report.ordering.append(i)
            if gap <= self.gap_delta_:
                report.spacing.append((i, gap, "at or below gap_delta"))
            elif gap >= 2.0 * self.gap_delta_:
                report.spacing.append((i, gap, "at or above 2*gap_delta"))
        return report

    # --- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        self._check_fitted()
        return {
            "n": self.n_classes_,
            "u": self.u,
            "mode": self.mode,
            "centering": self.centering,
            "delta": self.delta_,
            "offsets": self.offsets_.tolist(),
            "shift": self.shift_,
            "bounds": self.intervals_.bounds.tolist(),
            "transformed_bounds": self.transformed_bounds_.tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "HybridLabelEncoder":
        """Rebuild a fitted encoder from its JSON document.

        Offsets and shift are restored verbatim (not re-derived), so
        hand-built encoders such as the overlapping-label generator
        survive a round trip.
        """
        required = {"n", "u", "mode", "centering", "delta", "offsets", "shift", "bounds"}
        missing = required - doc.keys()
        if missing:
            raise ValueError(f"codec document missing keys: {sorted(missing)}")
        enc = cls(u=doc["u"], mode=doc["mode"], centering=bool(doc["centering"]))
        intervals = ClassIntervals.from_pairs(doc["bounds"])
        if intervals.n != int(doc["n"]):
            raise ValueError("codec document n does not match bounds length")
        offsets = np.asarray(doc["offsets"], dtype=np.float64)
        delta = float(intervals.widths.max())
        gap_delta = delta
        if enc.mode == MODE_STRICT and delta == 0.0:
            gap_delta = POINT_INTERVAL_GAP_DELTA
        enc._finalize(intervals, offsets, delta, gap_delta, centering=False)
        # Restore the stored shift rather than the recomputed one.
        enc.shift_ = float(doc["shift"])
        enc._net_offsets = offsets - enc.shift_
        lo = intervals.bounds[:, 0] + enc._net_offsets
        hi = intervals.bounds[:, 1] + enc._net_offsets
        enc.transformed_bounds_ = np.column_stack([lo, hi])
        gaps = lo[1:] - hi[:-1]
        enc._sorted_disjoint = bool(np.all(gaps > 0.0)) if len(gaps) else True
        enc._decode_edges = 0.5 * (hi[:-1] + lo[1:]) if enc._sorted_disjoint else None
        return enc

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "HybridLabelEncoder":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def make_overlapping_encoder(intervals: ClassIntervals, centering: bool = False) -> HybridLabelEncoder:
    """Build an encoder with every offset zeroed ("bad" labels).

    With no offsets, classes whose source intervals overlap stay
    overlapping in the encoded space, deliberately violating the
    disjointness requirement; the ablation harness trains on these to
    show classification collapsing while regression still learns.
    Raises :class:`NoOverlapError` when the source intervals are already
    pairwise disjoint (nothing would overlap, so this construction
    cannot produce bad labels).
    """
    bounds = intervals.bounds
    n = intervals.n
    any_overlap = False
    for p in range(n):
        for q in range(p + 1, n):
            if max(bounds[p, 0], bounds[q, 0]) <= min(bounds[p, 1], bounds[q, 1]):
                any_overlap = True
                break
        if any_overlap:
            break
    if not any_overlap:
        raise NoOverlapError(
            "class intervals are already pairwise disjoint; zero-offset "
            "labels would not overlap"
        )
    enc = HybridLabelEncoder(u=1.0, mode=MODE_UNIFORM, centering=centering)
    delta = float(intervals.widths.max())
    enc._finalize(intervals, np.zeros(n), delta, delta, centering)
    return enc
