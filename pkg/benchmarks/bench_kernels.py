"""Benchmark the numba and numpy mixture-score kernels.

The score kernel is the inner loop of every sampler step, so this is the
number that decides whether the numba path earns its keep:

    python benchmarks/bench_kernels.py

Also times a full progressive edit end to end under whichever backend the
PROGEDIT_KERNELS env flag selected for this process.
"""

import time

import numpy as np

from progedit import fixtures as fx
from progedit._kernels import (
    KERNEL_BACKEND,
    mixture_score_logpdf_numba,
    mixture_score_logpdf_numpy,
)
from progedit.grids import EncoderConfig
from progedit.scheduler import EditParams, progressive_edit


def time_kernel(fn, z, means, variances, log_w, repeats=2000):
    fn(z, means, variances, log_w)  # warm (and JIT-compile)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(z, means, variances, log_w)
    return (time.perf_counter() - start) / repeats


def main():
    world = fx.two_texture_world()
    rng = np.random.default_rng(0)
    z = np.ascontiguousarray(rng.normal(0.5, 0.5, size=world.k))
    variances = world.stds**2 + 0.25
    log_w = np.log(world.weights)

    print(f"problem: {world.n_components} components x {world.k} elements")
    t_np = time_kernel(mixture_score_logpdf_numpy, z, world.means, variances, log_w)
    print(f"numpy : {t_np * 1e6:9.1f} us/eval")
    if mixture_score_logpdf_numba is not None:
        t_nb = time_kernel(mixture_score_logpdf_numba, z, world.means, variances, log_w)
        print(f"numba : {t_nb * 1e6:9.1f} us/eval  ({t_np / t_nb:.1f}x vs numpy)")
        s_np, l_np = mixture_score_logpdf_numpy(z, world.means, variances, log_w)
        s_nb, l_nb = mixture_score_logpdf_numba(z, world.means, variances, log_w)
        err = max(np.max(np.abs(s_np - s_nb)), abs(l_np - l_nb))
        print(f"paths agree to {err:.2e}")
    else:
        print("numba : unavailable")

    x1, x2, mu = fx.two_texture_inputs()
    params = EditParams(T=50, t_ds_max=50, seed=0)
    cfg = EncoderConfig()
    progressive_edit(x1, x2, mu, params, world, cfg)  # warm
    start = time.perf_counter()
    n = 20
    for seed in range(n):
        progressive_edit(x1, x2, mu, EditParams(T=50, t_ds_max=50, seed=seed),
                         world, cfg)
    per_edit = (time.perf_counter() - start) / n
    print(f"end-to-end 50-step edit under '{KERNEL_BACKEND}' backend: "
          f"{per_edit * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
