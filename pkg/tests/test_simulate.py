import numpy as np
import pytest

from otod.simulate import (
    GaussianSimSpec,
    md_sweep,
    mean_discrepancy,
    sample_gaussian,
    sweep_rows,
)


def test_sample_gaussian_is_deterministic():
    mu, sigma = np.zeros(3), np.eye(3)
    a = sample_gaussian(mu, sigma, 50, 123)
    b = sample_gaussian(mu, sigma, 50, 123)
    np.testing.assert_array_equal(a, b)
    c = sample_gaussian(mu, sigma, 50, 124)
    assert not np.array_equal(a, c)


def test_sample_gaussian_zero_covariance_collapses_to_mean():
    mu = np.array([1.0, -2.0, 0.5])
    x = sample_gaussian(mu, np.zeros((3, 3)), 20, 0)
    np.testing.assert_allclose(x, np.tile(mu, (20, 1)), atol=1e-12)


def test_sample_gaussian_mean_within_clt_bound():
    # n = 100000 draws in d = 4: the sample mean lands within 3/sqrt(n) < 0.02
    mu = np.array([0.5, -1.0, 2.0, 0.0])
    x = sample_gaussian(mu, np.eye(4), 100_000, 7)
    assert np.abs(x.mean(axis=0) - mu).max() < 0.02


def test_sample_gaussian_covariance_is_respected():
    sigma = np.array([[2.0, 1.2], [1.2, 1.0]])
    x = sample_gaussian(np.zeros(2), sigma, 200_000, 11)
    np.testing.assert_allclose(np.cov(x.T), sigma, atol=0.03)


def test_sample_gaussian_rejects_bad_sigma():
    with pytest.raises(ValueError, match="symmetric"):
        sample_gaussian(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]), 5, 0)
    with pytest.raises(ValueError, match="PSD"):
        sample_gaussian(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]), 5, 0)


def test_mean_discrepancy_identical_sets_is_zero():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(100, 4))
    md, stderr = mean_discrepancy(lambda m: m[:, 0], x, x)
    assert md == 0.0
    assert stderr > 0.0


def test_mean_discrepancy_constant_scorer():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(50, 3))
    y = rng.normal(size=(70, 3))
    md, stderr = mean_discrepancy(lambda m: np.full(m.shape[0], 2.5), x, y)
    assert md == 0.0
    assert stderr == 0.0


def test_mean_discrepancy_null_within_three_stderr():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(10_000, 6))
    y = rng.normal(size=(10_000, 6))
    md, stderr = mean_discrepancy(lambda m: m.sum(axis=1), x, y)
    assert abs(md) <= 3.0 * stderr


def test_spec_validation():
    GaussianSimSpec()  # defaults valid
    with pytest.raises(ValueError, match="start at 0"):
        GaussianSimSpec(shift_grid=np.array([0.5, 1.0]))
    with pytest.raises(ValueError, match="ascending"):
        GaussianSimSpec(shift_grid=np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ValueError, match="unit norm"):
        GaussianSimSpec(direction=np.full(16, 1.0))
    with pytest.raises(ValueError, match="shape"):
        GaussianSimSpec(d=4, mu_in=np.zeros(5))
    with pytest.raises(ValueError, match="n_per_side"):
        GaussianSimSpec(n_per_side=1)


def test_default_spec_fields():
    spec = GaussianSimSpec()
    assert spec.d == 16
    np.testing.assert_allclose(spec.shift_grid, np.arange(0.0, 3.25, 0.25))
    assert spec.shift_grid.size == 13
    assert np.linalg.norm(spec.direction) == pytest.approx(1.0)
    assert spec.n_per_side == 5000


def test_md_sweep_structure_and_tv_proxy():
    spec = GaussianSimSpec(n_per_side=500, shift_grid=np.array([0.0, 1.0, 2.0]))
    pts = md_sweep(spec)
    assert [p.shift for p in pts] == [0.0, 1.0, 2.0]
    for p in pts:
        # direction e1: half the L1 distance between the means is shift/2
        assert p.tv_proxy == pytest.approx(p.shift / 2.0)
        assert p.md_stderr >= 0.0
        assert 0.0 <= p.auroc <= 1.0


def test_md_sweep_is_bit_deterministic():
    spec = GaussianSimSpec(n_per_side=400, shift_grid=np.array([0.0, 0.5, 1.5]))
    assert md_sweep(spec) == md_sweep(spec)


def test_md_sweep_accepts_custom_scorer():
    spec = GaussianSimSpec(n_per_side=2000, shift_grid=np.array([0.0, 2.0]))
    pts = md_sweep(spec, scorer=lambda m: m[:, 0])
    # the first-coordinate scorer sees the normalized shift directly
    assert abs(pts[0].md_estimate) <= 3.0 * pts[0].md_stderr
    assert pts[1].md_estimate < -0.1
    assert pts[1].auroc < 0.5


def test_sweep_rows_column_order():
    spec = GaussianSimSpec(n_per_side=300, shift_grid=np.array([0.0]))
    rows = sweep_rows(md_sweep(spec))
    assert list(rows[0]) == ["shift", "tv_proxy", "md", "stderr", "auroc"]
