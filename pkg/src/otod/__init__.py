"""Post-hoc out-of-distribution scoring with an optimal-transport score.

The package exposes:

* :mod:`otod.wasserstein`: 1-D Wasserstein-1 on discrete histograms and the
  normalized-vector part score built from it;
* :mod:`otod.scoring`: the fused OTOD score plus the MSP, EBO, GEN, MDS,
  and KLM baselines, all under one "higher = more ID-like" convention;
* :mod:`otod.metrics`: FPR@95 / AUROC and the benchmark evaluation loop;
* :mod:`otod.tensor_io`: the on-disk bundle format (raw float32 tensors,
  JSON manifest) and its validator;
* :mod:`otod.simulate`: a seeded Gaussian simulator for the score's
  mean-discrepancy behavior under mean shift;
* :mod:`otod.cli`: the ``otod`` command-line harness.
"""

from .metrics import EvalReport, OodResult, auroc, evaluate, fpr_at_tpr
from .scoring import (
    SCORER_IDS,
    FittedStats,
    OtodConfig,
    Scorer,
    ScoreVector,
    ebo,
    fit_mds,
    gen_score,
    klm_score,
    make_scorer,
    mds_score,
    msp,
    otod_score,
    score_batch,
    softmax,
)
from .simulate import GaussianSimSpec, SweepPoint, md_sweep, mean_discrepancy, sample_gaussian
from .tensor_io import (
    BundleValidationError,
    DatasetBundle,
    TensorIOError,
    TensorSet,
    ValidationReport,
    load_manifest,
    validate_bundle,
    validate_manifest,
)
from .wasserstein import (
    DegenerateInputError,
    cdf_w1,
    l2_normalize,
    lp_w1_oracle,
    mean_vector,
    w1_part_score,
    w1_part_scores,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # wasserstein
    "DegenerateInputError",
    "l2_normalize",
    "mean_vector",
    "cdf_w1",
    "lp_w1_oracle",
    "w1_part_score",
    "w1_part_scores",
    # scoring
    "SCORER_IDS",
    "OtodConfig",
    "FittedStats",
    "ScoreVector",
    "Scorer",
    "softmax",
    "otod_score",
    "msp",
    "ebo",
    "gen_score",
    "fit_mds",
    "mds_score",
    "klm_score",
    "make_scorer",
    "score_batch",
    # metrics
    "auroc",
    "fpr_at_tpr",
    "OodResult",
    "EvalReport",
    "evaluate",
    # tensor_io
    "TensorIOError",
    "BundleValidationError",
    "TensorSet",
    "DatasetBundle",
    "ValidationReport",
    "load_manifest",
    "validate_manifest",
    "validate_bundle",
    # simulate
    "GaussianSimSpec",
    "SweepPoint",
    "sample_gaussian",
    "mean_discrepancy",
    "md_sweep",
]
