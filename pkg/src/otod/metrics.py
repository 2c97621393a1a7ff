"""Threshold-free OOD detection metrics (AUROC, FPR@95) and report aggregation.

ID is the positive class and scores follow the scoring module's convention
(higher = more ID-like). Ties are handled with midranks for AUROC and with the
conservative (largest feasible) threshold for FPR@TPR, so both metrics are
deterministic and invariant under strictly increasing score transforms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .scoring import Scorer, score_batch
from .tensor_io import DatasetBundle

__all__ = ["OodResult", "EvalReport", "auroc", "fpr_at_tpr", "evaluate"]


def _as_scores(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def auroc(id_scores, ood_scores) -> float:
    """Probability a random ID sample outscores a random OOD sample (ties count half).

    Computed as the Mann-Whitney statistic via midranks in O(n log n). The
    complement is taken on whichever side is smaller so that
    auroc(a, b) + auroc(b, a) == 1.0 holds exactly in floating point.
    """
    a = _as_scores(id_scores, "id_scores")
    b = _as_scores(ood_scores, "ood_scores")
    ranks = rankdata(np.concatenate([a, b]))
    u = float(ranks[: a.size].sum()) - a.size * (a.size + 1) / 2.0
    pairs = float(a.size) * float(b.size)
    if 2.0 * u <= pairs:
        return u / pairs
    return 1.0 - (pairs - u) / pairs


def fpr_at_tpr(id_scores, ood_scores, tpr_target: float = 0.95) -> float:
    """False positive rate on OOD at the largest threshold keeping ID TPR >= target.

    The threshold is the k-th largest ID score with k = ceil(tpr_target * n_id),
    so the achieved TPR is always >= tpr_target (conservative rule).
    """
    a = _as_scores(id_scores, "id_scores")
    b = _as_scores(ood_scores, "ood_scores")
    if not 0.0 < tpr_target <= 1.0:
        raise ValueError(f"tpr_target must lie in (0, 1], got {tpr_target}")
    n = a.size
    # Guard against the float product landing a hair above an exact integer.
    k = math.ceil(tpr_target * n - 1e-9)
    k = min(max(k, 1), n)
    tau = np.partition(a, n - k)[n - k]
    return float(np.count_nonzero(b >= tau)) / b.size


@dataclass(frozen=True)
class OodResult:
    fpr_at_95: float
    auroc: float
    n_ood: int


@dataclass(frozen=True)
class EvalReport:
    """Per-OOD-dataset rates plus their unweighted averages (one benchmark row)."""

    scorer_id: str
    per_ood: dict[str, OodResult]
    average_fpr: float
    average_auroc: float
    n_id: int
    config_digest: str

    def to_dict(self) -> dict:
        return {
            "scorer_id": self.scorer_id,
            "config_digest": self.config_digest,
            "n_id": self.n_id,
            "per_ood": {
                name: {"fpr_at_95": r.fpr_at_95, "auroc": r.auroc, "n_ood": r.n_ood}
                for name, r in self.per_ood.items()
            },
            "average": {"fpr_at_95": self.average_fpr, "auroc": self.average_auroc},
        }

    def to_markdown(self) -> str:
        """Benchmark-table layout: FPR@95 (down) and AUROC (up) per dataset, in percent."""
        lines = [
            f"Scorer: {self.scorer_id} (config {self.config_digest}, n_id={self.n_id})",
            "",
            "| OOD dataset | FPR@95 ↓ | AUROC ↑ |",
            "|---|---|---|",
        ]
        for name, r in self.per_ood.items():
            lines.append(f"| {name} | {100 * r.fpr_at_95:.2f} | {100 * r.auroc:.2f} |")
        lines.append(
            f"| **Average** | {100 * self.average_fpr:.2f} | {100 * self.average_auroc:.2f} |"
        )
        return "\n".join(lines) + "\n"


def evaluate(
    bundle: DatasetBundle,
    scorer: Scorer,
    tpr_target: float = 0.95,
    threads: int = 1,
) -> EvalReport:
    """Score id_test once and each OOD set once; aggregate the benchmark row.

    OOD sets may be scored in parallel (``threads`` > 1); the report is
    deterministic and keeps the bundle's OOD order either way.
    """
    if not bundle.ood_sets:
        raise ValueError("bundle has no OOD splits to evaluate")
    id_vec = score_batch(bundle.id_test, scorer)
    names = list(bundle.ood_sets)

    def score_one(name: str) -> np.ndarray:
        return score_batch(bundle.ood_sets[name], scorer).scores

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ood_scores = list(pool.map(score_one, names))
    else:
        ood_scores = [score_one(name) for name in names]

    per_ood: dict[str, OodResult] = {}
    for name, scores in zip(names, ood_scores):
        per_ood[name] = OodResult(
            fpr_at_95=fpr_at_tpr(id_vec.scores, scores, tpr_target),
            auroc=auroc(id_vec.scores, scores),
            n_ood=scores.size,
        )
    return EvalReport(
        scorer_id=id_vec.scorer_id,
        per_ood=per_ood,
        average_fpr=float(np.mean([r.fpr_at_95 for r in per_ood.values()])),
        average_auroc=float(np.mean([r.auroc for r in per_ood.values()])),
        n_id=id_vec.scores.size,
        config_digest=id_vec.config_digest,
    )
