import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hybridlabel import (
    ClassIntervals,
    HybridLabelEncoder,
    TrainConfig,
    generate_synthetic,
    split_class_balanced,
)

# Default synthetic task shared by pipeline/bench tests: 6 classes with
# identical property intervals, 140 records per class (600 train after the
# 5:1:1 split), 16 features.
DEFAULT_INTERVAL_PAIRS = [(10.0, 11.0)] * 6
DEFAULT_SYNTH = dict(
    n_classes=6, per_class=140, feature_dim=16, separation=6.0, noise_sd=0.1,
    seed=7,
)


@pytest.fixture(scope="session")
def synth6():
    intervals = ClassIntervals.from_pairs(DEFAULT_INTERVAL_PAIRS)
    return generate_synthetic(property_intervals=intervals, **DEFAULT_SYNTH)


@pytest.fixture(scope="session")
def synth6_splits(synth6):
    return split_class_balanced(synth6, seed=8)


@pytest.fixture()
def quick_config():
    """Short training config for functional (non-gate) tests."""
    return TrainConfig(seed=9, max_epochs=15, batch_size=32)


@pytest.fixture()
def example1_codec():
    """Three-class codec with hand-traced expected values."""
    enc = HybridLabelEncoder(u=1.0, mode="uniform", centering=True)
    return enc.fit_intervals(ClassIntervals.from_pairs([(0, 2), (10, 11), (20, 24)]))
