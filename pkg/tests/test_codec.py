import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from hybridlabel import ClassIntervals, HybridLabelEncoder, make_overlapping_encoder
from hybridlabel.errors import (
    ClassOutOfRangeError,
    DegenerateIntervalsError,
    InvalidSpacingError,
    NoOverlapError,
    NonFiniteInputError,
    PropertyOutOfIntervalError,
)

from oracles import oracle_nearest_interval, oracle_transform


# --- frozen example traces --------------------------------------------------

def test_fit_three_class_example(example1_codec):
    enc = example1_codec
    assert enc.delta_ == 4.0
    assert enc.offsets_.tolist() == [0.0, 4.0, 8.0]
    assert enc.shift_ == 16.0
    assert enc.transformed_bounds_.tolist() == [[-16, -14], [-2, -1], [12, 16]]
    # cross-check against the independent step-by-step construction
    ref = oracle_transform([(0, 2), (10, 11), (20, 24)], 1.0, True, "uniform")
    assert enc.offsets_.tolist() == ref["k"]
    assert enc.shift_ == ref["shift"]
    assert enc.transformed_bounds_.tolist() == [list(p) for p in ref["post"]]


def test_fit_single_class_centered():
    enc = HybridLabelEncoder(u=1.7, mode="uniform", centering=True)
    enc.fit_intervals(ClassIntervals.from_pairs([(0, 2)]))
    assert enc.offsets_.tolist() == [0.0]
    assert enc.shift_ == 1.0
    assert enc.transformed_bounds_.tolist() == [[-1.0, 1.0]]
    assert enc.encode(1, 0) == -1.0


def test_fit_overlapping_uniform_gap_equals_delta():
    # overlapping source intervals: the uniform construction yields a gap of
    # exactly delta, outside the open (delta, 2*delta) window
    enc = HybridLabelEncoder(u=1.5, mode="uniform", centering=False)
    enc.fit_intervals(ClassIntervals.from_pairs([(0, 10), (5, 15)]))
    assert enc.delta_ == 10.0
    assert enc.offsets_.tolist() == [0.0, 15.0]
    assert enc.transformed_bounds_.tolist() == [[0, 10], [20, 30]]
    report = enc.validate_spacing()
    assert report.gaps == [10.0]
    assert not report.ok
    assert [v[0] for v in report.spacing] == [1]
    assert report.spacing[0][1] == enc.delta_
    assert not report.overlaps and not report.ordering


def test_encode_frozen_values(example1_codec):
    assert example1_codec.encode(1, 1) == -15.0
    assert example1_codec.encode(3, 20) == 12.0


def test_encode_errors(example1_codec):
    with pytest.raises(ClassOutOfRangeError):
        example1_codec.encode(4, 1.0)
    with pytest.raises(ClassOutOfRangeError):
        example1_codec.encode(0, 1.0)
    with pytest.raises(PropertyOutOfIntervalError) as exc:
        example1_codec.encode(1, 3.0)
    assert exc.value.indices == [0]
    # linear extension when explicitly allowed
    out = example1_codec.transform([1], [3.0], allow_out_of_range=True)
    assert out[0] == 3.0 + 0.0 - 16.0


def test_decode_frozen_values(example1_codec):
    assert example1_codec.decode(-15.0) == (1, 1.0, False)
    cls, prop, clamped = example1_codec.decode(12.0)
    assert (cls, prop, clamped) == (3, 20.0, False)


def test_decode_gap_midpoint_tie_breaks_low(example1_codec):
    bounds = example1_codec.transformed_bounds_
    mid = 0.5 * (bounds[0, 1] + bounds[1, 0])  # midpoint of the first gap
    assert oracle_nearest_interval(mid, bounds.tolist()) == 0
    cls, prop, clamped = example1_codec.decode(mid)
    assert cls == 1
    assert prop == 2.0  # clamped to the class-1 upper bound
    assert clamped


def test_decode_nonfinite_rejected(example1_codec):
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(NonFiniteInputError):
            example1_codec.decode(bad)


def test_single_class_decode_everywhere():
    enc = HybridLabelEncoder(u=1.5, mode="uniform", centering=True)
    enc.fit_intervals(ClassIntervals.from_pairs([(0, 2)]))
    for v, want_prop, want_clamp in [(-1.0, 0.0, False), (0.5, 1.5, False),
                                     (100.0, 2.0, True), (-100.0, 0.0, True)]:
        cls, prop, clamped = enc.decode(v)
        assert cls == 1 and prop == want_prop and clamped == want_clamp


# --- parameter and input validation ------------------------------------------

def test_invalid_u_by_mode():
    iv = ClassIntervals.from_pairs([(0, 1), (2, 3)])
    for u in (0.5, 2.5):
        with pytest.raises(InvalidSpacingError):
            HybridLabelEncoder(u=u, mode="uniform").fit_intervals(iv)
    for u in (1.0, 2.0):  # closed endpoints allowed only in uniform mode
        HybridLabelEncoder(u=u, mode="uniform").fit_intervals(iv)
        with pytest.raises(InvalidSpacingError):
            HybridLabelEncoder(u=u, mode="strict").fit_intervals(iv)
    with pytest.raises(InvalidSpacingError):
        HybridLabelEncoder(u=1.5, mode="nope").fit_intervals(iv)


def test_degenerate_intervals_rejected():
    with pytest.raises(DegenerateIntervalsError):
        ClassIntervals.from_pairs([(1, 0)])
    with pytest.raises(DegenerateIntervalsError):
        ClassIntervals.from_pairs([])
    with pytest.raises(DegenerateIntervalsError):
        ClassIntervals.from_pairs([(0, math.inf)])


def test_fit_from_labels_first_appearance():
    enc = HybridLabelEncoder(u=1.5, mode="strict")
    enc.fit(class_indices=[2, 1, 2, 1], properties=[5.0, 1.0, 7.0, 2.0])
    assert enc.intervals_.bounds.tolist() == [[1.0, 2.0], [5.0, 7.0]]


def test_unfitted_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        HybridLabelEncoder().transform([1], [0.5])


# --- spacing audit ------------------------------------------------------------

def test_strict_mode_verdict_good():
    enc = HybridLabelEncoder(u=1.5, mode="strict", centering=True)
    enc.fit_intervals(ClassIntervals.from_pairs([(0, 10), (5, 15), (100, 101)]))
    report = enc.validate_spacing()
    assert report.ok
    assert report.gaps == pytest.approx([15.0, 15.0])


def test_strict_point_intervals_use_gap_floor():
    enc = HybridLabelEncoder(u=1.5, mode="strict")
    enc.fit_intervals(ClassIntervals.from_pairs([(5, 5), (7, 7)]))
    assert enc.delta_ == 0.0
    assert enc.gap_delta_ == 1.0
    report = enc.validate_spacing()
    assert report.ok
    assert report.gaps == pytest.approx([1.5])


def test_zero_offset_encoder_flags_every_overlapping_pair():
    iv = ClassIntervals.from_pairs([(0, 10), (5, 15), (8, 9)])
    enc = make_overlapping_encoder(iv)
    report = enc.validate_spacing()
    assert set(report.overlaps) == {(1, 2), (1, 3), (2, 3)}
    assert not report.ok


def test_make_overlapping_encoder_cases():
    identical = ClassIntervals.from_pairs([(0, 2)] * 3)
    enc = make_overlapping_encoder(identical)
    assert np.all(enc.offsets_ == 0.0) and enc.shift_ == 0.0
    assert enc.transformed_bounds_.tolist() == identical.bounds.tolist()

    partial = make_overlapping_encoder(ClassIntervals.from_pairs([(0, 10), (5, 15)]))
    lo = partial.transformed_bounds_[:, 0]
    hi = partial.transformed_bounds_[:, 1]
    assert max(lo) == 5.0 and min(hi) == 10.0  # S1 and S2 share [5, 10]

    with pytest.raises(NoOverlapError):
        make_overlapping_encoder(ClassIntervals.from_pairs([(0, 1), (10, 11)]))


def test_make_overlapping_encoder_centered_variant():
    iv = ClassIntervals.from_pairs([(0, 2)] * 3)
    enc = make_overlapping_encoder(iv, centering=True)
    assert enc.shift_ == 1.0
    assert enc.transformed_bounds_.tolist() == [[-1.0, 1.0]] * 3


# --- serialization -------------------------------------------------------------

def test_json_round_trip_exact(example1_codec):
    doc = json.loads(json.dumps(example1_codec.to_json_dict()))
    back = HybridLabelEncoder.from_json_dict(doc)
    assert back.offsets_.tolist() == example1_codec.offsets_.tolist()
    assert back.shift_ == example1_codec.shift_
    assert back.transformed_bounds_.tolist() == example1_codec.transformed_bounds_.tolist()
    assert back.decode(-15.0) == example1_codec.decode(-15.0)


def test_json_round_trip_preserves_zero_offsets(tmp_path):
    enc = make_overlapping_encoder(ClassIntervals.from_pairs([(0, 10), (5, 15)]))
    path = tmp_path / "codec.json"
    enc.save(path)
    back = HybridLabelEncoder.load(path)
    assert np.all(back.offsets_ == 0.0)
    assert not back.validate_spacing().ok


def test_json_missing_keys_rejected():
    with pytest.raises(ValueError):
        HybridLabelEncoder.from_json_dict({"n": 1, "u": 1.5})


def test_sklearn_params_and_clone():
    enc = HybridLabelEncoder(u=1.25, mode="strict", centering=False)
    assert enc.get_params() == {"u": 1.25, "mode": "strict", "centering": False}
    twin = clone(enc)
    assert twin.get_params() == enc.get_params()
    twin.set_params(u=1.75)
    assert twin.u == 1.75 and enc.u == 1.25


# --- property-based invariants ---------------------------------------------------

def interval_arrays(min_n=1, max_n=8, min_width=0.0):
    return st.lists(
        st.tuples(
            st.floats(-1e6, 1e6, allow_nan=False),
            st.floats(min_width, 1e3, allow_nan=False),
        ),
        min_size=min_n,
        max_size=max_n,
    ).map(lambda pairs: ClassIntervals.from_pairs([(a, a + w) for a, w in pairs]))


strict_u = st.floats(1.001, 1.999, allow_nan=False)
uniform_u = st.floats(1.0, 2.0, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(), u=strict_u, centering=st.booleans(), data=st.data())
def test_round_trip_strict(iv, u, centering, data):
    enc = HybridLabelEncoder(u=u, mode="strict", centering=centering).fit_intervals(iv)
    c = data.draw(st.integers(1, iv.n))
    a, b = iv.bounds[c - 1]
    p = data.draw(st.floats(float(a), float(b), allow_nan=False))
    c2, p2, clamped = enc.decode(enc.encode(c, p))
    assert c2 == c
    assert math.isclose(p2, p, rel_tol=1e-9, abs_tol=1e-9)
    assert not clamped


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(min_n=2), u=uniform_u)
def test_uniform_offsets_strictly_increasing(iv, u):
    enc = HybridLabelEncoder(u=u, mode="uniform").fit_intervals(iv)
    if enc.delta_ > 0:
        assert enc.offsets_[0] == 0.0
        assert np.all(np.diff(enc.offsets_) > 0)


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(min_n=2, min_width=1e-3), u=strict_u)
def test_strict_bounds_sorted_and_verdict_good(iv, u):
    # widths bounded away from zero: a gap of u*delta below the float
    # resolution of the bounds cannot be represented
    enc = HybridLabelEncoder(u=u, mode="strict").fit_intervals(iv)
    assert enc.offsets_[0] == 0.0
    lo = enc.transformed_bounds_[:, 0]
    hi = enc.transformed_bounds_[:, 1]
    assert np.all(lo[1:] > hi[:-1])
    assert enc.validate_spacing().ok


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(), u=uniform_u, mode_strict=st.booleans())
def test_centering_shift_formula(iv, u, mode_strict):
    mode = "strict" if mode_strict else "uniform"
    u_eff = min(max(u, 1.001), 1.999) if mode_strict else u
    enc = HybridLabelEncoder(u=u_eff, mode=mode, centering=True).fit_intervals(iv)
    pre_lo = iv.bounds[:, 0] + enc.offsets_
    pre_hi = iv.bounds[:, 1] + enc.offsets_
    assert enc.shift_ == 0.5 * (pre_hi.max() - pre_lo.min())


def moderate_interval_arrays():
    # |bounds| <= 100, widths <= 10: keeps encoded magnitudes small enough
    # for the 1e-12 absolute symmetry tolerance to be float-representable
    return st.lists(
        st.tuples(
            st.floats(-100.0, 100.0, allow_nan=False),
            st.floats(0.0, 10.0, allow_nan=False),
        ),
        min_size=1,
        max_size=8,
    ).map(lambda pairs: ClassIntervals.from_pairs([(a, a + w) for a, w in pairs]))


@settings(max_examples=100, deadline=None)
@given(iv=moderate_interval_arrays(), u=uniform_u, mode_strict=st.booleans())
def test_centering_symmetry_for_origin_spans(iv, u, mode_strict):
    # the half-span shift symmetrises the encoded span about zero exactly
    # when the pre-shift span starts at zero; translate the source
    # intervals so it does and refit
    mode = "strict" if mode_strict else "uniform"
    u_eff = min(max(u, 1.001), 1.999) if mode_strict else u
    enc = HybridLabelEncoder(u=u_eff, mode=mode, centering=True).fit_intervals(iv)
    pre_lo = iv.bounds[:, 0] + enc.offsets_
    moved = ClassIntervals(iv.bounds - pre_lo.min())
    enc2 = HybridLabelEncoder(u=u_eff, mode=mode, centering=True).fit_intervals(moved)
    hi_max = enc2.transformed_bounds_[:, 1].max()
    lo_min = enc2.transformed_bounds_[:, 0].min()
    assert abs(hi_max + lo_min) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(min_width=0.01), u=strict_u, data=st.data())
def test_encode_order_preserved_within_class(iv, u, data):
    enc = HybridLabelEncoder(u=u, mode="strict", centering=True).fit_intervals(iv)
    c = data.draw(st.integers(1, iv.n))
    a, b = iv.bounds[c - 1]
    width = b - a
    t1 = data.draw(st.floats(0.0, 0.49, allow_nan=False))
    t2 = data.draw(st.floats(0.51, 1.0, allow_nan=False))
    p1, p2 = a + width * t1, a + width * t2
    assert enc.encode(c, p1) < enc.encode(c, p2)


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays(min_n=2), u=strict_u, data=st.data())
def test_cross_class_ordering_when_good(iv, u, data):
    enc = HybridLabelEncoder(u=u, mode="strict", centering=True).fit_intervals(iv)
    assert enc.validate_spacing().ok
    i = data.draw(st.integers(1, iv.n - 1))
    j = data.draw(st.integers(i + 1, iv.n))
    p_i = data.draw(st.floats(float(iv.bounds[i - 1, 0]), float(iv.bounds[i - 1, 1])))
    p_j = data.draw(st.floats(float(iv.bounds[j - 1, 0]), float(iv.bounds[j - 1, 1])))
    assert enc.encode(i, p_i) < enc.encode(j, p_j)


@settings(max_examples=100, deadline=None)
@given(iv=interval_arrays())
def test_delta_matches_brute_force(iv):
    enc = HybridLabelEncoder(u=1.5, mode="strict").fit_intervals(iv)
    assert enc.delta_ == max(float(b - a) for a, b in iv.bounds)


def test_decode_fast_path_matches_distance_argmin():
    rng = np.random.default_rng(42)
    for t in range(100):
        n = int(rng.integers(2, 9))
        a = np.sort(rng.uniform(-100, 100, n))
        w = rng.uniform(0.1, 5.0, n)
        iv = ClassIntervals.from_pairs(np.column_stack([a, a + w]))
        enc = HybridLabelEncoder(u=1.3, mode="strict", centering=True).fit_intervals(iv)
        lo = enc.transformed_bounds_[:, 0]
        hi = enc.transformed_bounds_[:, 1]
        vals = rng.uniform(lo.min() - 10, hi.max() + 10, 40)
        cls, _, _ = enc.inverse_transform(vals)
        for v, c in zip(vals, cls):
            assert c - 1 == oracle_nearest_interval(v, enc.transformed_bounds_.tolist())
