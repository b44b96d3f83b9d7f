"""hybridlabel: consolidate a classification task and a regression task
into a single-output regression model via hybrid label encoding.

Core pieces:

* :class:`HybridLabelEncoder` -- fit/transform/inverse_transform codec
  mapping (class index, property value) pairs to one real label and back;
* :mod:`hybridlabel.data` -- CSV/JSONL datasets, synthetic task
  generation, class-balanced 5:1:1 splits;
* :mod:`hybridlabel.nets` -- from-scratch MLP with Adam, weight decay and
  reduce-on-plateau scheduling;
* :func:`run_consolidated` / :func:`run_baseline` -- single-head codec
  pipeline and two-head equal-weighting baseline;
* :mod:`hybridlabel.bench` -- ablation grid and timing harness;
* ``hybridlabel`` CLI -- fit-codec, transform, decode, experiment.
"""

from .baseline import BASELINE_TAG, BaselineResult, baseline_net, run_baseline
from .bench import AblationRow, AblationTable, TimingReport, run_ablation, run_timing
from .codec import (
    MODE_STRICT,
    MODE_UNIFORM,
    ClassIntervals,
    HybridLabelEncoder,
    SpacingReport,
    make_overlapping_encoder,
)
from .data import (
    LabeledDataset,
    SplitAssignment,
    generate_synthetic,
    load_labels_csv,
    split_class_balanced,
)
from .metrics import EvalReport, accuracy, mae, mape, mse
from .nets import (
    Adam,
    FeedForwardNet,
    GuidelineVerdict,
    ReduceLROnPlateau,
    TrainConfig,
    TrainTrace,
    cross_entropy_loss,
    guideline_check,
    mse_loss,
    train,
)
from .pipeline import CONSOLIDATED_TAG, ConsolidatedResult, infer, run_consolidated

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "AblationRow",
    "AblationTable",
    "BASELINE_TAG",
    "BaselineResult",
    "CONSOLIDATED_TAG",
    "ClassIntervals",
    "ConsolidatedResult",
    "EvalReport",
    "FeedForwardNet",
    "GuidelineVerdict",
    "HybridLabelEncoder",
    "LabeledDataset",
    "MODE_STRICT",
    "MODE_UNIFORM",
    "ReduceLROnPlateau",
    "SpacingReport",
    "SplitAssignment",
    "TimingReport",
    "TrainConfig",
    "TrainTrace",
    "accuracy",
    "baseline_net",
    "cross_entropy_loss",
    "generate_synthetic",
    "guideline_check",
    "infer",
    "load_labels_csv",
    "mae",
    "make_overlapping_encoder",
    "mape",
    "mse",
    "mse_loss",
    "run_ablation",
    "run_baseline",
    "run_consolidated",
    "run_timing",
    "split_class_balanced",
    "train",
]
