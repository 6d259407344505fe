"""Hot numeric kernels: mixture score and log-density evaluation.

This is the inner loop of every sampler step and every realism probe, so it
carries a numba @njit implementation alongside a pure-numpy twin. Selection:

    PROGEDIT_KERNELS=numpy   force the numpy path
    PROGEDIT_KERNELS=numba   force numba (ImportError if unavailable)

unset -> numba when importable, numpy otherwise. Both paths compute the
log-sum-exp stabilized responsibilities; results agree to float64 rounding.
`benchmarks/bench_kernels.py` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "mixture_score_logpdf",
    "mixture_score_logpdf_numpy",
    "mixture_score_logpdf_numba",
    "KERNEL_BACKEND",
]

_LOG_2PI = float(np.log(2.0 * np.pi))


def mixture_score_logpdf_numpy(
    z: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
    log_weights: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Score and log-density of an isotropic Gaussian mixture at a point.

    z: (k,) query; means: (n, k); variances: (n,) per-component isotropic
    variance (component std**2 + convolution sigma**2); log_weights: (n,)
    normalized log mixture weights. Returns (score (k,), logpdf).
    """
    k = z.shape[0]
    diffs = means - z[None, :]
    sq = np.einsum("ij,ij->i", diffs, diffs)
    log_comp = log_weights - 0.5 * (k * (_LOG_2PI + np.log(variances)) + sq / variances)
    m = log_comp.max()
    shifted = np.exp(log_comp - m)
    total = shifted.sum()
    logpdf = m + np.log(total)
    resp = shifted / total
    score = (resp / variances) @ diffs
    return score, float(logpdf)


try:
    from numba import njit

    @njit(cache=True)
    def _score_logpdf_jit(z, means, variances, log_weights):  # pragma: no cover
        n, k = means.shape
        log_comp = np.empty(n)
        for i in range(n):
            sq = 0.0
            for j in range(k):
                d = means[i, j] - z[j]
                sq += d * d
            log_comp[i] = log_weights[i] - 0.5 * (
                k * (_LOG_2PI + np.log(variances[i])) + sq / variances[i]
            )
        m = log_comp[0]
        for i in range(1, n):
            if log_comp[i] > m:
                m = log_comp[i]
        total = 0.0
        for i in range(n):
            log_comp[i] = np.exp(log_comp[i] - m)
            total += log_comp[i]
        score = np.zeros(k)
        for i in range(n):
            coeff = log_comp[i] / (total * variances[i])
            for j in range(k):
                score[j] += coeff * (means[i, j] - z[j])
        return score, m + np.log(total)

    def mixture_score_logpdf_numba(z, means, variances, log_weights):
        score, logpdf = _score_logpdf_jit(z, means, variances, log_weights)
        return score, float(logpdf)

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    mixture_score_logpdf_numba = None
    _HAVE_NUMBA = False


def _select_backend() -> str:
    choice = os.environ.get("PROGEDIT_KERNELS", "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not _HAVE_NUMBA:
            raise ImportError("PROGEDIT_KERNELS=numba but numba is not importable")
        return "numba"
    return "numba" if _HAVE_NUMBA else "numpy"


KERNEL_BACKEND = _select_backend()

if KERNEL_BACKEND == "numba":
    mixture_score_logpdf = mixture_score_logpdf_numba
else:
    mixture_score_logpdf = mixture_score_logpdf_numpy
