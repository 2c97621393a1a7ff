import numpy as np
import pytest

from otod.wasserstein import (
    DegenerateInputError,
    cdf_w1,
    l2_normalize,
    lp_w1_oracle,
    mean_vector,
    w1_part_score,
    w1_part_scores,
)


def test_cdf_w1_worked_examples():
    # mass moved across the whole unit support costs exactly 1
    assert cdf_w1(np.array([1.0, 0, 0]), np.array([0, 0, 1.0])) == pytest.approx(1.0)
    # shifting half the mass one bin on a 3-bin support costs half a bin width
    assert cdf_w1(np.array([0.5, 0.5, 0]), np.array([0, 0.5, 0.5])) == pytest.approx(0.5)
    assert cdf_w1(np.array([0.2, 0.8]), np.array([0.2, 0.8])) == 0.0


def test_cdf_w1_is_a_metric_on_random_histograms():
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(2, 12))
        a = rng.random(m)
        a /= a.sum()
        b = rng.random(m)
        b /= b.sum()
        c = rng.random(m)
        c /= c.sum()
        dab, dba = cdf_w1(a, b), cdf_w1(b, a)
        assert dab == pytest.approx(dba, abs=1e-15)
        assert dab >= 0.0
        assert cdf_w1(a, a) == 0.0
        assert dab <= cdf_w1(a, c) + cdf_w1(c, b) + 1e-12


def test_cdf_w1_matches_lp_oracle():
    rng = np.random.default_rng(7)
    for _ in range(300):
        m = int(rng.integers(2, 9))
        a = rng.random(m)
        a /= a.sum()
        b = rng.random(m)
        b /= b.sum()
        assert abs(cdf_w1(a, b) - lp_w1_oracle(a, b)) <= 1e-9


def test_cdf_w1_rejects_bad_shapes():
    with pytest.raises(ValueError):
        cdf_w1(np.array([1.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        cdf_w1(np.array([0.5, 0.5]), np.array([0.3, 0.3, 0.4]))


def test_lp_oracle_guards():
    with pytest.raises(ValueError, match="bins"):
        lp_w1_oracle(np.full(17, 1 / 17), np.full(17, 1 / 17))
    with pytest.raises(ValueError, match="negative"):
        lp_w1_oracle(np.array([1.2, -0.2]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError, match="mass"):
        lp_w1_oracle(np.array([0.5, 0.5]), np.array([0.6, 0.6]))


def test_l2_normalize_unit_norm_and_direction():
    rng = np.random.default_rng(3)
    for scale in (1e-20, 1e-3, 1.0, 1e3, 1e18):
        v = rng.normal(size=12) * scale
        u = l2_normalize(v)
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-6)
        cos = float(v @ u) / np.linalg.norm(v)
        assert cos == pytest.approx(1.0, abs=1e-9)


def test_l2_normalize_worked_examples():
    np.testing.assert_allclose(l2_normalize(np.array([3.0, 4.0])), [0.6, 0.8])
    np.testing.assert_allclose(l2_normalize(np.array([0.0, 0.0, 5.0])), [0, 0, 1.0])


def test_l2_normalize_rejects_zero_vector():
    with pytest.raises(DegenerateInputError):
        l2_normalize(np.zeros(4))


def test_one_bin_translation_costs_exactly_delta():
    rng = np.random.default_rng(2)
    for _ in range(20):
        m = int(rng.integers(3, 12))
        pos = int(rng.integers(0, m - 1))
        a = np.zeros(m)
        b = np.zeros(m)
        a[pos] = 1.0
        b[pos + 1] = 1.0
        assert cdf_w1(a, b) == pytest.approx(1.0 / (m - 1))


def test_mean_vector():
    np.testing.assert_allclose(mean_vector(np.array([1.0, 2.0, 3.0])), [2.0, 2.0, 2.0])


def test_part_score_worked_example():
    # unit mass at the first bin: distance 0.5 to its mean vector, 1.0 to zero
    assert w1_part_score(np.array([1.0, 0.0])) == pytest.approx(-0.5)


def test_part_score_is_nonpositive_and_flat_vectors_score_best():
    rng = np.random.default_rng(19)
    flat = w1_part_score(np.ones(10))
    assert flat == pytest.approx(0.0, abs=1e-12)
    for _ in range(100):
        v = rng.random(10) + 1e-3
        assert w1_part_score(v) <= 1e-12


def test_part_score_is_scale_invariant():
    rng = np.random.default_rng(21)
    for _ in range(50):
        v = rng.normal(size=7)
        assert w1_part_score(3.0 * v) == pytest.approx(w1_part_score(v), abs=1e-12)


def test_part_scores_batch_matches_single():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(64, 9))
    batch = w1_part_scores(x)
    single = np.array([w1_part_score(row) for row in x])
    np.testing.assert_allclose(batch, single, atol=1e-12)


def test_part_scores_rejects_zero_row():
    x = np.ones((3, 4))
    x[1] = 0.0
    with pytest.raises(DegenerateInputError, match="row 1"):
        w1_part_scores(x)
