"""Post-hoc OOD scorers: the OTOD score and the MSP, EBO, GEN, MDS, KLM baselines.

Every scorer follows one sign convention: HIGHER score = more ID-like.
Baselines whose literature convention is "higher = more anomalous" are
sign-flipped here so the metrics module has a single code path.

MSP and KLM work on softmax probabilities, EBO and GEN on logits, MDS on
features, and OTOD fuses Wasserstein-1 part scores over all three inputs.
MDS and KLM need ID statistics first (:func:`fit_mds`); everything else is
fit-free.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from scipy.special import logsumexp

from .tensor_io import TensorSet
from .wasserstein import w1_part_score, w1_part_scores

__all__ = [
    "OtodConfig",
    "FittedStats",
    "ScoreVector",
    "Scorer",
    "SCORER_IDS",
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
    "config_digest",
]

SCORER_IDS = ("otod", "msp", "ebo", "gen", "mds", "klm")

# Defaults from the GEN method; the generalized entropy is computed over the
# top-M probabilities with exponent gamma.
GEN_GAMMA = 0.1
GEN_TOP_M = 100

KLM_PROFILE_FLOOR = 1e-12


@dataclass(frozen=True)
class OtodConfig:
    """Fusion weights over (feature, logit, probability) parts, plus temperature."""

    alpha: tuple[float, float, float] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    temperature: float = 1.0

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 3:
            raise ValueError("alpha must have exactly 3 entries")
        if any(a < 0.0 or a > 1.0 for a in alpha):
            raise ValueError(f"each alpha must lie in [0, 1], got {alpha}")
        if abs(sum(alpha) - 1.0) > 1e-9:
            raise ValueError(f"alpha must sum to 1, got sum={sum(alpha)!r}")
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "temperature", float(self.temperature))


@dataclass(frozen=True)
class FittedStats:
    """ID statistics shared by MDS and KLM.

    class_means: [K, d] per-class feature means.
    precision: [d, d] inverse of the regularized pooled within-class covariance.
    class_softmax_profiles: [K, K] mean softmax per ground-truth class.
    fitted_on: [K] sample count per class.
    """

    class_means: np.ndarray
    precision: np.ndarray
    class_softmax_profiles: np.ndarray
    fitted_on: np.ndarray

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.class_means, self.precision, self.class_softmax_profiles):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()[:12]


@dataclass(frozen=True)
class ScoreVector:
    """Per-sample scores plus provenance (scorer id and config digest)."""

    scores: np.ndarray
    scorer_id: str
    config_digest: str


def config_digest(scorer_id: str, params: dict[str, Any]) -> str:
    """Stable short hash of a scorer id and its parameters."""
    blob = json.dumps(
        {"scorer": scorer_id, "params": params}, sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def softmax(logits: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Temperature-scaled softmax with max-subtraction for overflow safety."""
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z = np.asarray(logits, dtype=np.float64) / temperature
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def _softmax_rows(logits: np.ndarray, temperature: float) -> np.ndarray:
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z = np.asarray(logits, dtype=np.float64) / temperature
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def otod_score(f: np.ndarray, l: np.ndarray, cfg: OtodConfig) -> float:
    """OTOD score for one sample: weighted Wasserstein-1 parts over the
    feature vector, the logit vector, and the temperature-scaled softmax
    probabilities. Each part runs the same pipeline: L2-normalize, then score
    against the mean-vector and zero-vector references."""
    a1, a2, a3 = cfg.alpha
    part_f = w1_part_score(f)
    part_l = w1_part_score(l)
    part_p = w1_part_score(softmax(l, cfg.temperature))
    return a1 * part_f + a2 * part_l + a3 * part_p


def msp(l: np.ndarray) -> float:
    """Maximum softmax probability."""
    return float(softmax(l, 1.0).max())


def ebo(l: np.ndarray, temperature: float = 1.0) -> float:
    """Energy score T * log sum exp(l/T), computed overflow-safely."""
    if not temperature > 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    l = np.asarray(l, dtype=np.float64)
    return float(temperature * logsumexp(l / temperature))


def gen_score(l: np.ndarray, gamma: float = GEN_GAMMA, top_m: int | None = None) -> float:
    """Negated generalized entropy -sum p^gamma (1-p)^gamma over the top-M probs."""
    p = softmax(l, 1.0)
    k = p.size
    if top_m is None:
        top_m = min(GEN_TOP_M, k)
    if not 1 <= top_m <= k:
        raise ValueError(f"top_m must lie in [1, {k}], got {top_m}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    top = np.sort(p)[-top_m:]
    return float(-np.sum(top**gamma * (1.0 - top) ** gamma))


def fit_mds(id_train: TensorSet, epsilon: float | None = None) -> FittedStats:
    """Fit the shared ID statistics for MDS and KLM from a labeled train split.

    Class means are per-class feature averages; the shared covariance is the
    pooled within-class covariance (MLE, 1/N), regularized by ``epsilon * I``
    and inverted. When ``epsilon`` is None it defaults to the scale-aware
    value 1e-6 * trace(cov)/d. Softmax profiles are the mean softmax vector
    per ground-truth class.
    """
    if id_train.labels is None:
        raise ValueError("fit_mds requires a labeled id_train split")
    x = np.asarray(id_train.features, dtype=np.float64)
    probs = _softmax_rows(id_train.logits, 1.0)
    y = np.asarray(id_train.labels)
    n, d = x.shape
    k = id_train.num_classes

    counts = np.bincount(y, minlength=k)
    thin = np.flatnonzero(counts < 2)
    if thin.size:
        raise ValueError(
            f"class {int(thin[0])} has {int(counts[thin[0]])} samples; "
            "every class needs at least 2"
        )

    means = np.empty((k, d))
    profiles = np.empty((k, k))
    centered = np.empty_like(x)
    for c in range(k):
        mask = y == c
        means[c] = x[mask].mean(axis=0)
        profiles[c] = probs[mask].mean(axis=0)
        centered[mask] = x[mask] - means[c]
    cov = centered.T @ centered / n

    if epsilon is None:
        epsilon = max(1e-6 * np.trace(cov) / d, 1e-12)
    elif not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    cov_reg = cov + epsilon * np.eye(d)
    try:
        np.linalg.cholesky(cov_reg)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            f"covariance is singular even after epsilon={epsilon} regularization"
        ) from exc
    precision = np.linalg.inv(cov_reg)
    precision = (precision + precision.T) / 2.0
    return FittedStats(
        class_means=means,
        precision=precision,
        class_softmax_profiles=profiles,
        fitted_on=counts,
    )


def mds_score(f: np.ndarray, stats: FittedStats) -> float:
    """Negated minimum squared Mahalanobis distance to any class mean."""
    f = np.asarray(f, dtype=np.float64)
    return float(_mds_scores_matrix(f[None, :], stats)[0])


def _mds_scores_matrix(x: np.ndarray, stats: FittedStats) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    d = stats.class_means.shape[1]
    if x.shape[1] != d:
        raise ValueError(f"feature dimension {x.shape[1]} != fitted dimension {d}")
    best = np.full(x.shape[0], np.inf)
    for mu in stats.class_means:
        diff = x - mu
        quad = np.einsum("nd,de,ne->n", diff, stats.precision, diff)
        best = np.minimum(best, quad)
    return -best


def klm_score(l: np.ndarray, stats: FittedStats) -> float:
    """Negated minimum KL divergence from softmax(l) to any class profile."""
    l = np.asarray(l, dtype=np.float64)
    return float(_klm_scores_matrix(l[None, :], stats)[0])


def _klm_scores_matrix(logits: np.ndarray, stats: FittedStats) -> np.ndarray:
    p = _softmax_rows(logits, 1.0)
    if p.shape[1] != stats.class_softmax_profiles.shape[1]:
        raise ValueError(
            f"class count {p.shape[1]} != fitted count "
            f"{stats.class_softmax_profiles.shape[1]}"
        )
    # 0 * log(0/q) = 0; profiles are floored so KL stays finite.
    log_p = np.log(np.where(p > 0.0, p, 1.0))
    best = np.full(p.shape[0], np.inf)
    for profile in stats.class_softmax_profiles:
        log_q = np.log(np.clip(profile, KLM_PROFILE_FLOOR, None))
        kl = np.sum(p * (log_p - log_q), axis=1)
        best = np.minimum(best, kl)
    return -best


@dataclass(frozen=True)
class Scorer:
    """A batch scorer bound to its configuration (for provenance digests)."""

    scorer_id: str
    params: dict[str, Any]
    _score_fn: Callable[[TensorSet], np.ndarray]

    @property
    def config_digest(self) -> str:
        return config_digest(self.scorer_id, self.params)


def make_scorer(
    scorer_id: str,
    *,
    otod_config: OtodConfig | None = None,
    stats: FittedStats | None = None,
    temperature: float = 1.0,
    gamma: float = GEN_GAMMA,
    top_m: int | None = None,
) -> Scorer:
    """Build a named batch scorer.

    ``otod`` takes an OtodConfig, ``ebo`` a temperature, ``gen`` gamma/top_m,
    and ``mds``/``klm`` require FittedStats from :func:`fit_mds`.
    """
    if scorer_id == "otod":
        cfg = otod_config if otod_config is not None else OtodConfig()

        def fn(ts: TensorSet) -> np.ndarray:
            a1, a2, a3 = cfg.alpha
            part_f = w1_part_scores(ts.features)
            part_l = w1_part_scores(ts.logits)
            part_p = w1_part_scores(_softmax_rows(ts.logits, cfg.temperature))
            return a1 * part_f + a2 * part_l + a3 * part_p

        params = {"alpha": list(cfg.alpha), "temperature": cfg.temperature}
    elif scorer_id == "msp":

        def fn(ts: TensorSet) -> np.ndarray:
            return _softmax_rows(ts.logits, 1.0).max(axis=1)

        params = {}
    elif scorer_id == "ebo":
        if not temperature > 0.0:
            raise ValueError(f"temperature must be positive, got {temperature}")
        t = float(temperature)

        def fn(ts: TensorSet) -> np.ndarray:
            return t * logsumexp(np.asarray(ts.logits, dtype=np.float64) / t, axis=1)

        params = {"temperature": t}
    elif scorer_id == "gen":
        g, m = float(gamma), top_m

        def fn(ts: TensorSet) -> np.ndarray:
            p = _softmax_rows(ts.logits, 1.0)
            k = p.shape[1]
            mm = min(GEN_TOP_M, k) if m is None else m
            if not 1 <= mm <= k:
                raise ValueError(f"top_m must lie in [1, {k}], got {mm}")
            if not 0.0 < g < 1.0:
                raise ValueError(f"gamma must lie in (0, 1), got {g}")
            top = np.sort(p, axis=1)[:, -mm:]
            return -np.sum(top**g * (1.0 - top) ** g, axis=1)

        params = {"gamma": g, "top_m": m}
    elif scorer_id in ("mds", "klm"):
        if stats is None:
            raise ValueError(f"scorer '{scorer_id}' requires fitted ID statistics")
        matrix_fn = _mds_scores_matrix if scorer_id == "mds" else _klm_scores_matrix
        source = "features" if scorer_id == "mds" else "logits"

        def fn(ts: TensorSet) -> np.ndarray:
            return matrix_fn(getattr(ts, source), stats)

        params = {"stats": stats.digest()}
    else:
        raise ValueError(f"unknown scorer '{scorer_id}'; choose from {SCORER_IDS}")
    return Scorer(scorer_id=scorer_id, params=params, _score_fn=fn)


def score_batch(ts: TensorSet, scorer: Scorer) -> ScoreVector:
    """Apply a scorer to every sample of a TensorSet, order preserved."""
    scores = np.asarray(scorer._score_fn(ts), dtype=np.float64)
    if scores.shape != (ts.n,):
        raise ValueError(
            f"scorer '{scorer.scorer_id}' returned shape {scores.shape}, expected ({ts.n},)"
        )
    finite = np.isfinite(scores)
    if not finite.all():
        idx = int(np.flatnonzero(~finite)[0])
        raise ValueError(
            f"scorer '{scorer.scorer_id}' produced a non-finite score at sample {idx}"
        )
    return ScoreVector(
        scores=scores, scorer_id=scorer.scorer_id, config_digest=scorer.config_digest
    )
