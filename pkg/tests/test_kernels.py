import numpy as np
import pytest

from progedit._kernels import (
    mixture_score_logpdf_numba,
    mixture_score_logpdf_numpy,
)


def _random_problem(seed, n=6, k=64):
    rng = np.random.default_rng(seed)
    means = rng.normal(size=(n, k))
    variances = rng.uniform(0.05, 2.0, size=n)
    w = rng.uniform(0.1, 1.0, size=n)
    log_w = np.log(w / w.sum())
    z = rng.normal(size=k)
    return z, means, variances, log_w


def test_numpy_single_component_closed_form():
    k = 16
    z = np.full(k, 2.0)
    means = np.zeros((1, k))
    variances = np.array([1.0])
    log_w = np.array([0.0])
    score, logpdf = mixture_score_logpdf_numpy(z, means, variances, log_w)
    assert np.allclose(score, -2.0)
    expected = -0.5 * (k * np.log(2 * np.pi) + np.sum(z**2))
    assert logpdf == pytest.approx(expected, rel=1e-12)


@pytest.mark.skipif(mixture_score_logpdf_numba is None, reason="numba unavailable")
def test_backends_agree():
    for seed in range(5):
        z, means, variances, log_w = _random_problem(seed)
        s_np, l_np = mixture_score_logpdf_numpy(z, means, variances, log_w)
        s_nb, l_nb = mixture_score_logpdf_numba(z, means, variances, log_w)
        assert np.allclose(s_np, s_nb, rtol=1e-12, atol=1e-12)
        assert l_np == pytest.approx(l_nb, rel=1e-12)


def test_logsumexp_stability_distant_components():
    # components far apart would underflow a naive implementation
    k = 8
    means = np.stack([np.zeros(k), np.full(k, 500.0)])
    variances = np.array([1.0, 1.0])
    log_w = np.log(np.array([0.5, 0.5]))
    z = np.zeros(k)
    score, logpdf = mixture_score_logpdf_numpy(z, means, variances, log_w)
    assert np.all(np.isfinite(score))
    assert np.isfinite(logpdf)
    # the near component dominates: score ~ 0 at its mean
    assert np.allclose(score, 0.0, atol=1e-10)
