"""Discrete 1-D Wasserstein-1 machinery on uniform unit-interval supports.

A length-m weight vector is read as a (possibly signed, possibly unnormalized)
mass assignment on the grid {0, 1/(m-1), ..., 1}. The distance used throughout
is the generalized CDF-difference functional

    W1(a, b) = delta * sum_k |A(k) - B(k)|,   delta = 1/(m-1),

where A(k) is the partial sum of ``a`` up to bin k (the last partial sum,
total mass, is excluded). On nonnegative equal-mass inputs this equals the
true Wasserstein-1 transport distance; it stays finite and well-defined for
signed vectors and for the all-zero reference, which is what the single-sample
score needs.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "DegenerateInputError",
    "l2_normalize",
    "mean_vector",
    "cdf_w1",
    "lp_w1_oracle",
    "w1_part_score",
    "w1_part_scores",
]

ORACLE_MAX_BINS = 16


class DegenerateInputError(ValueError):
    """An all-zero vector reached a normalizer; it has no direction."""


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale ``v`` to unit Euclidean norm. All-zero input is an error."""
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize an all-zero vector")
    return v / norm


def mean_vector(v: np.ndarray) -> np.ndarray:
    """Constant vector of the same length whose entries equal mean(v)."""
    v = np.asarray(v, dtype=np.float64)
    return np.full_like(v, v.mean())


def cdf_w1(a: np.ndarray, b: np.ndarray) -> float:
    """Generalized CDF-difference distance between two same-length weight vectors.

    Equals the Wasserstein-1 distance whenever both inputs are nonnegative
    with equal total mass; remains finite for signed or unequal-mass inputs.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    m = a.size
    if m < 2:
        raise ValueError("histograms need at least 2 bins")
    delta = 1.0 / (m - 1)
    return float(delta * np.abs(np.cumsum(a)[:-1] - np.cumsum(b)[:-1]).sum())


def lp_w1_oracle(a: np.ndarray, b: np.ndarray) -> float:
    """Exact minimum-cost transport between two small nonnegative histograms.

    Solves the dense transportation LP with cost |x_i - x_j| on the uniform
    unit-interval support. Test-scale ground truth only: inputs must be
    nonnegative, equal-mass (within 1e-9), and have at most 16 bins.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    m = a.size
    if m < 2:
        raise ValueError("histograms need at least 2 bins")
    if m > ORACLE_MAX_BINS:
        raise ValueError(f"oracle accepts at most {ORACLE_MAX_BINS} bins, got {m}")
    if (a < 0).any() or (b < 0).any():
        raise ValueError("oracle requires nonnegative weights")
    mass_a, mass_b = a.sum(), b.sum()
    if abs(mass_a - mass_b) > 1e-9:
        raise ValueError(f"unequal mass: {mass_a} vs {mass_b}")
    if mass_a == 0.0:
        return 0.0
    # Rebalance the marginals exactly so the LP is feasible.
    b = b * (mass_a / mass_b)

    pos = np.arange(m) / (m - 1)
    cost = np.abs(pos[:, None] - pos[None, :]).ravel()
    a_eq = np.zeros((2 * m, m * m))
    for i in range(m):
        a_eq[i, i * m : (i + 1) * m] = 1.0  # row marginal = a_i
        a_eq[m + i, i::m] = 1.0  # column marginal = b_i
    res = linprog(
        cost,
        A_eq=a_eq,
        b_eq=np.concatenate([a, b]),
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def w1_part_score(v: np.ndarray) -> float:
    """Single-part OOD score: negated distance to the nearer reference.

    The input is L2-normalized, then compared against two references --
    its own mean vector and the all-zero vector -- and the smaller of the
    two distances is negated. Using both references gives a small ensemble
    effect. Always <= 0; equals 0 exactly for constant positive vectors;
    invariant to positive rescaling of ``v``. Higher means more ID-like.
    """
    vhat = l2_normalize(v)
    d_mean = cdf_w1(vhat, mean_vector(vhat))
    d_zero = cdf_w1(vhat, np.zeros_like(vhat))
    return -min(d_mean, d_zero)


def w1_part_scores(rows: np.ndarray) -> np.ndarray:
    """Vectorized :func:`w1_part_score` over the rows of an [N, m] matrix."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError(f"expected an [N, m] matrix, got ndim={rows.ndim}")
    n, m = rows.shape
    if m < 2:
        raise ValueError("histograms need at least 2 bins")
    norms = np.linalg.norm(rows, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise DegenerateInputError(
            f"all-zero vector at row {int(zero_rows[0])} cannot be normalized"
        )
    vhat = rows / norms[:, None]
    partial = np.cumsum(vhat, axis=1)[:, :-1]
    mean_ref = np.broadcast_to(vhat.mean(axis=1)[:, None], (n, m))
    mean_partial = np.cumsum(mean_ref, axis=1)[:, :-1]
    delta = 1.0 / (m - 1)
    d_mean = delta * np.abs(partial - mean_partial).sum(axis=1)
    d_zero = delta * np.abs(partial).sum(axis=1)
    return -np.minimum(d_mean, d_zero)
