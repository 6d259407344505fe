"""Analytic score worlds: Gaussian mixtures with closed-form convolved scores.

A GmmWorld stands in for the learned denoiser: convolving an isotropic
mixture with N(0, sigma^2 I) keeps it a mixture, so the score of every noise
marginal is available exactly. The reverse steppers below consume that score
the same way a sampler would consume a trained model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import mixture_score_logpdf
from .grids import EncoderConfig, NoiseSchedule, encode
from .rng import substream

__all__ = [
    "GmmWorld",
    "Conditioning",
    "NO_CONDITIONING",
    "gmm_score",
    "log_density",
    "denoise_step",
    "full_reverse",
    "estimate_B",
    "kde_world_from_patches",
]


@dataclass(frozen=True)
class Conditioning:
    """Restriction of sampling to a subset of mixture components.

    The minimal analog of prompt guidance: kind 'none' uses the full
    mixture, 'component-subset' renormalizes the listed components.
    """

    kind: str = "none"
    subset: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("none", "component-subset"):
            raise ValueError(f"unknown conditioning kind {self.kind!r}")
        if self.kind == "component-subset" and len(self.subset) == 0:
            raise ValueError("component-subset conditioning needs a nonempty subset")


NO_CONDITIONING = Conditioning()


@dataclass(frozen=True)
class GmmWorld:
    """Equal-shape isotropic Gaussian mixture over flattened latents.

    means: (n, k) component centers; stds: (n,) isotropic standard
    deviations; weights: (n,) summing to 1; shape: the (c, h, w) latent
    dimensions the world is defined over (k = c*h*w).
    """

    means: np.ndarray
    stds: np.ndarray
    weights: np.ndarray
    shape: tuple[int, int, int]

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=np.float64)
        stds = np.asarray(self.stds, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)
        object.__setattr__(self, "weights", weights)
        if means.ndim != 2 or means.shape[0] < 1:
            raise ValueError(f"means must be (n, k) with n >= 1, got {means.shape}")
        n, k = means.shape
        if stds.shape != (n,) or weights.shape != (n,):
            raise ValueError("stds and weights must have one entry per component")
        if np.any(stds <= 0.0):
            raise ValueError("component stds must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {weights.sum()}")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be positive")
        if int(np.prod(self.shape)) != k:
            raise ValueError(f"shape {self.shape} does not flatten to k={k}")

    @property
    def k(self) -> int:
        return self.means.shape[1]

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    def to_json(self) -> dict:
        return {
            "components": [
                {
                    "weight": float(w),
                    "mean": [float(v) for v in m],
                    "std": float(s),
                }
                for w, m, s in zip(self.weights, self.means, self.stds)
            ],
            "shape": list(self.shape),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GmmWorld":
        comps = doc["components"]
        if not comps:
            raise ValueError("world document has no components")
        means = np.array([c["mean"] for c in comps], dtype=np.float64)
        stds = np.array([c["std"] for c in comps], dtype=np.float64)
        weights = np.array([c["weight"] for c in comps], dtype=np.float64)
        shape = tuple(int(v) for v in doc["shape"])
        if len(shape) != 3:
            raise ValueError(f"shape must be [c, h, w], got {doc['shape']}")
        return cls(means=means, stds=stds, weights=weights, shape=shape)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path: str | Path) -> "GmmWorld":
        return cls.from_json(json.loads(Path(path).read_text()))


def _selected(world: GmmWorld, cond: Conditioning) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Component means/variance bases/log-weights under conditioning.

    The full set goes through the same renormalization as a subset so that
    conditioning on all components is bit-identical to no conditioning.
    """
    if cond.kind == "component-subset":
        idx = np.asarray(cond.subset, dtype=np.intp)
        if idx.size == 0:
            raise ValueError("empty restricted component subset")
        means = world.means[idx]
        stds = world.stds[idx]
        weights = world.weights[idx]
    else:
        means = world.means
        stds = world.stds
        weights = world.weights
    log_w = np.log(weights) - np.log(weights.sum())
    return means, stds, log_w


def _score_logpdf(z: np.ndarray, sigma: float, world: GmmWorld, cond: Conditioning):
    if z.shape != world.shape:
        raise ValueError(f"latent shape {z.shape} does not match world {world.shape}")
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    means, stds, log_w = _selected(world, cond)
    variances = stds**2 + sigma**2
    score_flat, logpdf = mixture_score_logpdf(
        np.ascontiguousarray(z.reshape(-1)), means, variances, log_w
    )
    return score_flat.reshape(world.shape), logpdf


def gmm_score(
    z: np.ndarray,
    sigma: float,
    world: GmmWorld,
    cond: Conditioning = NO_CONDITIONING,
) -> np.ndarray:
    """Exact score of the sigma-convolved (restricted) mixture at z.

    With per-component variance v_i = std_i^2 + sigma^2 the score is
    sum_i r_i(z) (m_i - z) / v_i, responsibilities r_i computed with
    log-sum-exp stabilization.
    """
    score, _ = _score_logpdf(z, sigma, world, cond)
    return score


def log_density(
    z: np.ndarray,
    sigma: float,
    world: GmmWorld,
    cond: Conditioning = NO_CONDITIONING,
) -> float:
    """Log density of the sigma-convolved (restricted) mixture at z."""
    _, logpdf = _score_logpdf(z, sigma, world, cond)
    return logpdf


def _apply_step(
    z: np.ndarray,
    score: np.ndarray,
    t: int,
    sched: NoiseSchedule,
    mode: str,
    rng: np.random.Generator | None,
) -> np.ndarray:
    s2_t = sched.sigma(t) ** 2
    s2_prev = sched.sigma(t - 1) ** 2
    d = s2_t - s2_prev
    if mode == "probability-flow":
        return z + 0.5 * d * score
    if mode == "ancestral":
        if rng is None:
            raise ValueError("ancestral mode needs an rng")
        noise_var = max(0.0, s2_prev * d / s2_t) if s2_t > 0.0 else 0.0
        eps = rng.standard_normal(z.shape)
        return z + d * score + np.sqrt(noise_var) * eps
    raise ValueError(f"unknown stepper mode {mode!r}")


def denoise_step(
    z: np.ndarray,
    t: int,
    sched: NoiseSchedule,
    world: GmmWorld,
    cond: Conditioning = NO_CONDITIONING,
    mode: str = "ancestral",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """One reverse step from noise level sigma(t) to sigma(t-1).

    probability-flow: z + (sigma^2(t) - sigma^2(t-1))/2 * score, fully
    deterministic, rng untouched. ancestral: Euler-Maruyama drift plus the
    ancestral noise sqrt(sigma^2(t-1) * (sigma^2(t)-sigma^2(t-1)) / sigma^2(t)).
    """
    if not 1 <= t <= sched.T:
        raise ValueError(f"step {t} outside [1, {sched.T}]")
    score = gmm_score(z, sched.sigma(t), world, cond)
    return _apply_step(z, score, t, sched, mode, rng)


def full_reverse(
    z_noisy: np.ndarray,
    t_start: int,
    sched: NoiseSchedule,
    world: GmmWorld,
    cond: Conditioning = NO_CONDITIONING,
    mode: str = "ancestral",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Fold denoise_step from t_start down to 1; t_start = 0 is a no-op."""
    if not 0 <= t_start <= sched.T:
        raise ValueError(f"t_start {t_start} outside [0, {sched.T}]")
    z = z_noisy.copy()
    for t in range(t_start, 0, -1):
        z = denoise_step(z, t, sched, world, cond, mode, rng)
    return z


def estimate_B(
    world: GmmWorld,
    sched: NoiseSchedule,
    n_samples: int,
    seed: int,
    cond: Conditioning = NO_CONDITIONING,
    mode: str = "ancestral",
) -> float:
    """Empirical sup of ||score||^2 along sampled reverse trajectories.

    The true sup over all z diverges for Gaussian scores, so the bound
    machinery uses the largest score norm actually visited: n_samples
    trajectories start from prior noise sigma(T) * eps and run the full
    reverse chain, with the score norm recorded at every step. Trajectory i
    always uses the same derived stream, so estimates under a growing
    n_samples are nested and the returned max is non-decreasing.
    """
    if n_samples < 1:
        raise ValueError("need at least one trajectory")
    best = 0.0
    for i in range(n_samples):
        rng = substream(seed, f"B-trajectory-{i}")
        z = sched.sigma(sched.T) * rng.standard_normal(world.shape)
        for t in range(sched.T, 0, -1):
            score = gmm_score(z, sched.sigma(t), world, cond)
            norm_sq = float(np.sum(score**2))
            if norm_sq > best:
                best = norm_sq
            z = _apply_step(z, score, t, sched, mode, rng)
    return best


def kde_world_from_patches(
    patches: list[np.ndarray],
    bandwidth: float,
    cfg: EncoderConfig,
) -> GmmWorld:
    """Equal-weight mixture with one component per encoded patch."""
    if not patches:
        raise ValueError("need at least one patch")
    if bandwidth <= 0.0:
        raise ValueError("bandwidth must be positive")
    latents = [encode(p, cfg) for p in patches]
    shape = latents[0].shape
    for z in latents[1:]:
        if z.shape != shape:
            raise ValueError("patches must share dimensions")
    n = len(latents)
    means = np.stack([z.reshape(-1) for z in latents])
    return GmmWorld(
        means=means,
        stds=np.full(n, float(bandwidth)),
        weights=np.full(n, 1.0 / n),
        shape=shape,
    )
