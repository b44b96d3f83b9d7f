import numpy as np
import pytest

from hybridlabel import (
    FeedForwardNet,
    LabeledDataset,
    TrainConfig,
    cross_entropy_loss,
    mse_loss,
    run_baseline,
    train,
)


def test_zero_regression_targets_match_classification_only_run(synth6, synth6_splits):
    """With the regression head zeroed and zero regression targets, its
    residuals stay zero, so the shared stack sees only classification
    gradients and must evolve exactly like a classification-only model
    built from the same seed."""
    d, n = synth6.feature_dim, synth6.n_classes
    cls0 = synth6.class_indices - 1
    zeros = np.zeros(len(synth6))
    tr, va = synth6_splits.train, synth6_splits.val

    two_head = FeedForwardNet((d, 32), (n, 1), seed=21)
    two_head.heads[1][0][:] = 0.0
    two_head.heads[1][1][:] = 0.0
    cls_only = FeedForwardNet((d, 32), (n,), seed=21)
    # identical shared-stack and class-head initialisation by draw order
    assert np.array_equal(two_head.layers[0][0], cls_only.layers[0][0])
    assert np.array_equal(two_head.heads[0][0], cls_only.heads[0][0])

    cfg = TrainConfig(seed=21, max_epochs=6, batch_size=32)
    train(two_head, synth6.features[tr], (cls0[tr], zeros[tr]),
          synth6.features[va], (cls0[va], zeros[va]), cfg,
          losses=(cross_entropy_loss, mse_loss))
    cfg2 = TrainConfig(seed=21, max_epochs=6, batch_size=32)
    train(cls_only, synth6.features[tr], (cls0[tr],),
          synth6.features[va], (cls0[va],), cfg2,
          losses=(cross_entropy_loss,))

    # regression head never moved (its gradients were identically zero)
    assert np.all(two_head.heads[1][0] == 0.0)
    assert np.all(two_head.heads[1][1] == 0.0)
    for (w2, b2), (w1, b1) in zip(two_head.layers, cls_only.layers):
        assert np.allclose(w2, w1, atol=1e-10, rtol=0)
        assert np.allclose(b2, b1, atol=1e-10, rtol=0)
    assert np.allclose(two_head.heads[0][0], cls_only.heads[0][0], atol=1e-10, rtol=0)


def test_regression_only_mode_reduces_to_plain_regression(synth6, synth6_splits):
    cfg = TrainConfig(seed=9, max_epochs=15, batch_size=32)
    res = run_baseline(synth6, synth6_splits, cfg, class_weight=0.0)
    assert res.report.mape <= 0.1  # property still learned
    # class head received no gradient: accuracy stays near chance
    assert res.report.accuracy <= 1 / 6 + 0.25


def test_huge_regression_scale_starves_no_one_but_breaks_regression(synth6, synth6_splits):
    """Scaling regression targets by 1e6 makes the MSE term dominate the
    equal-weighted loss; the regression task then fails outright within
    the epoch budget while classification may still ride the easy
    features. This is the scale-mismatch failure mode the two-head
    formulation is prone to."""
    cfg = TrainConfig(seed=9, max_epochs=15, batch_size=32)
    normal = run_baseline(synth6, synth6_splits, cfg)
    scaled_ds = LabeledDataset(synth6.features, synth6.class_indices,
                               synth6.properties * 1e6, synth6.ids,
                               synth6.class_names)
    scaled = run_baseline(scaled_ds, synth6_splits, cfg)
    assert normal.report.mape <= 0.1
    assert scaled.report.mape >= 0.5
    assert scaled.report.mse > 1e10
    # the regression term dwarfs the classification term in the total loss
    assert scaled.trace.train_loss[-1] > 1e6


def test_baseline_report_shape(synth6, synth6_splits, quick_config):
    res = run_baseline(synth6, synth6_splits, quick_config)
    assert res.report.model == "baseline-hps-ew"
    assert res.report.n_clamped == 0
    assert res.report.n_samples == len(synth6_splits.test)
    assert res.report.train_trace is not None
    doc = res.report.to_json_dict()
    assert doc["model"] == "baseline-hps-ew"
