"""Progressive edit scheduling: threshold curves, shifting masks, and the
edit drivers (single exemplar, multi exemplar, iterative, and the two
baselines they are measured against).

The central loop re-noises the source every step, composes it with the
running residue through a shrinking binary mask, and takes one reverse
step. Regions with low edit-map values fall out of the mask early and
spend more steps owned by the residue, so they drift furthest from the
source.

RNG discipline: one root seed spawns the named substreams "init" (the
single shared perturbation applied to all initial latents), "source-noise"
(per-step re-noising of the source) and "stepper" (ancestral step noise).
Keeping consumers on separate streams makes the degenerate reductions
(edit-map 0 == exemplar img2img, multi with an all-ones second map ==
single) hold bit-exactly instead of merely in distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grids import (
    EncoderConfig,
    NoiseSchedule,
    as_edit_map,
    as_image,
    decode,
    downsample_map,
    encode,
    surgical_blend,
)
from .rng import pass_seed, substream
from .worlds import NO_CONDITIONING, Conditioning, GmmWorld, denoise_step

__all__ = [
    "THRESHOLD_KINDS",
    "STEPPER_MODES",
    "EditParams",
    "EditResult",
    "StepTrace",
    "threshold_value",
    "threshold_curve",
    "threshold_auc",
    "mask_at",
    "mask_schedule",
    "progressive_edit",
    "progressive_edit_multi",
    "iterative_edit",
    "naive_blend_baseline",
    "spatial_noise_baseline",
]

THRESHOLD_KINDS = ("linear", "cubic", "quadratic", "log", "sigmoid")
STEPPER_MODES = ("ancestral", "probability-flow")


def threshold_value(kind: str, i: int, n: int) -> float:
    """Threshold level for step index i of n; all kinds map [0, n) into [0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= i < n:
        raise ValueError(f"step index {i} outside [0, {n})")
    x = i / n
    if kind == "linear":
        return x
    if kind == "cubic":
        return x**3
    if kind == "quadratic":
        return x**2
    if kind == "log":
        return math.log(1 + i) / math.log(1 + n)
    if kind == "sigmoid":
        return 1.0 / (1.0 + math.exp(-(6.0 * x - 3.0)))
    raise ValueError(f"unknown threshold kind {kind!r}")


def threshold_curve(kind: str, n: int) -> list[float]:
    return [threshold_value(kind, i, n) for i in range(n)]


def threshold_auc(kind: str, n: int) -> float:
    """Area under the threshold curve (mean over the n grid points)."""
    return math.fsum(threshold_curve(kind, n)) / n


def mask_at(mu_d: np.ndarray, threshold: float) -> np.ndarray:
    """Strictly-greater comparison of the downsampled map against a level."""
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    return mu_d > threshold


@dataclass(frozen=True)
class EditParams:
    """Knobs of one edit run.

    t_ds_max is the step the reverse chain starts from (the maximum
    denoising strength); threshold picks the schedule shaping when each
    map level is released to the residue.
    """

    T: int = 50
    t_ds_max: int = 50
    threshold: str = "linear"
    mode: str = "ancestral"
    seed: int = 0
    conditioning: Conditioning = NO_CONDITIONING
    sigma_min: float = 0.01
    sigma_max: float = 10.0

    def __post_init__(self) -> None:
        if not 0 <= self.t_ds_max <= self.T:
            raise ValueError(f"t_ds_max {self.t_ds_max} outside [0, {self.T}]")
        if self.threshold not in THRESHOLD_KINDS:
            raise ValueError(f"unknown threshold kind {self.threshold!r}")
        if self.mode not in STEPPER_MODES:
            raise ValueError(f"unknown stepper mode {self.mode!r}")

    def schedule(self) -> NoiseSchedule:
        return NoiseSchedule(T=self.T, sigma_min=self.sigma_min, sigma_max=self.sigma_max)


@dataclass(frozen=True)
class StepTrace:
    """Per-step decomposition retained for visualization."""

    t: int
    mask: np.ndarray
    source_part: np.ndarray
    residue_part: np.ndarray


@dataclass
class EditResult:
    output: np.ndarray
    steps: list[int]
    params: EditParams
    per_step_masks: list[np.ndarray] | None = None
    per_step_latents: list[np.ndarray] | None = None
    traces: list[StepTrace] | None = None
    degenerate: bool = False


def mask_schedule(mu_d: np.ndarray, params: EditParams) -> list[tuple[int, np.ndarray]]:
    """The (step, mask) sequence an edit run walks through.

    The first executed step always uses the raw mu_d > 0 mask (the
    schedule-exempt opening comparison); later steps at t use the threshold
    curve evaluated at index T - t of T. Returns [] for t_ds_max = 0.
    """
    ts = params.t_ds_max
    if ts == 0:
        return []
    out = [(ts, mask_at(mu_d, 0.0))]
    for t in range(ts - 1, 0, -1):
        level = threshold_value(params.threshold, params.T - t, params.T)
        out.append((t, mask_at(mu_d, level)))
    return out


def _prepare(
    x1: np.ndarray,
    exemplars: Sequence[tuple[np.ndarray, np.ndarray]],
    cfg: EncoderConfig,
):
    x1 = as_image(x1)
    z1 = encode(x1, cfg)
    zs: list[np.ndarray] = []
    mus_d: list[np.ndarray] = []
    for x, mu in exemplars:
        x = as_image(x)
        mu = as_edit_map(mu)
        if x.shape != x1.shape:
            raise ValueError(f"exemplar shape {x.shape} does not match source {x1.shape}")
        if mu.shape != x1.shape[1:]:
            raise ValueError(f"map shape {mu.shape} does not match image {x1.shape}")
        zs.append(encode(x, cfg))
        mus_d.append(downsample_map(mu, cfg.factor))
    return z1, zs, mus_d


def _check_world(world: GmmWorld, z_shape: tuple[int, ...]) -> None:
    if world.shape != z_shape:
        raise ValueError(f"world shape {world.shape} does not match latent {z_shape}")


def _nested_compose(source_t: np.ndarray, residues: Sequence[np.ndarray], masks: Sequence[np.ndarray]) -> np.ndarray:
    """Left-nested mask chain: ((z1 | m1 vs r1) | m2 vs r2) ..."""
    acc = surgical_blend(source_t, residues[0], masks[0])
    for residue, mask in zip(residues[1:], masks[1:]):
        acc = surgical_blend(acc, residue, mask)
    return acc


def _run_progressive(
    x1: np.ndarray,
    exemplars: Sequence[tuple[np.ndarray, np.ndarray]],
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    retain_masks: bool = False,
    retain_latents: bool = False,
    retain_trace: bool = False,
    on_step: Callable[[int, int, int], None] | None = None,
) -> EditResult:
    if not exemplars:
        raise ValueError("need at least one exemplar")
    z1, zs, mus_d = _prepare(x1, exemplars, cfg)
    _check_world(world, z1.shape)
    sched = params.schedule()
    rng_init = substream(params.seed, "init")
    rng_src = substream(params.seed, "source-noise")
    rng_step = substream(params.seed, "stepper")
    ts = params.t_ds_max

    eps = rng_init.standard_normal(z1.shape)
    sig0 = sched.sigma(ts)
    z1n = z1 + sig0 * eps
    zsn = [z + sig0 * eps for z in zs]
    init_masks = [mask_at(mu_d, 0.0) for mu_d in mus_d]

    if ts == 0:
        z_mix = _nested_compose(z1n, zsn, init_masks)
        return EditResult(
            output=decode(z_mix, cfg), steps=[], params=params, degenerate=True,
            per_step_masks=[] if retain_masks else None,
            per_step_latents=[] if retain_latents else None,
            traces=[] if retain_trace else None,
        )

    schedules = [mask_schedule(mu_d, params) for mu_d in mus_d]
    steps: list[int] = []
    masks_out: list[np.ndarray] | None = [] if retain_masks else None
    latents_out: list[np.ndarray] | None = [] if retain_latents else None
    traces_out: list[StepTrace] | None = [] if retain_trace else None

    z_mix: np.ndarray | None = None
    n_steps = ts
    for i in range(n_steps):
        t = ts - i
        step_masks = [sch[i][1] for sch in schedules]
        if i == 0:
            source_t = z1n
            residues: list[np.ndarray] = zsn
        else:
            source_t = z1 + sched.sigma(t) * rng_src.standard_normal(z1.shape)
            residues = [z_mix] * len(zsn)
        composed = _nested_compose(source_t, residues, step_masks)
        if traces_out is not None:
            m0 = step_masks[0]
            traces_out.append(
                StepTrace(
                    t=t,
                    mask=m0.copy(),
                    source_part=np.where(m0[None], source_t, 0.0),
                    residue_part=np.where(m0[None], 0.0, residues[0]),
                )
            )
        z_mix = denoise_step(composed, t, sched, world, params.conditioning, params.mode, rng_step)
        steps.append(t)
        if masks_out is not None:
            masks_out.append(step_masks[0].copy())
        if latents_out is not None:
            latents_out.append(z_mix.copy())
        if on_step is not None:
            on_step(i + 1, n_steps, t)

    return EditResult(
        output=decode(z_mix, cfg),
        steps=steps,
        params=params,
        per_step_masks=masks_out,
        per_step_latents=latents_out,
        traces=traces_out,
    )


def progressive_edit(
    x1: np.ndarray,
    x2: np.ndarray,
    mu: np.ndarray,
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    **retain,
) -> EditResult:
    """Single-exemplar progressive edit (the core shifting-mask loop)."""
    return _run_progressive(x1, [(x2, mu)], params, world, cfg, **retain)


def progressive_edit_multi(
    x1: np.ndarray,
    exemplars: Sequence[tuple[np.ndarray, np.ndarray]],
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    **retain,
) -> EditResult:
    """n-exemplar generalization via a left-nested mask chain.

    Exemplar latents enter only at initialization; every later step
    composes the re-noised source with the shared residue through each
    map's mask in turn.
    """
    return _run_progressive(x1, list(exemplars), params, world, cfg, **retain)


def iterative_edit(
    x1: np.ndarray,
    passes: Sequence[tuple[np.ndarray, np.ndarray]],
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    **retain,
) -> EditResult:
    """One exemplar at a time: each pass's output becomes the next source.

    Pass 0 runs with the given seed (a single pass is identical to
    progressive_edit); later passes run with independently derived seeds.
    """
    if not passes:
        raise ValueError("need at least one pass")
    source = x1
    result: EditResult | None = None
    for idx, (exemplar, mu) in enumerate(passes):
        pparams = EditParams(
            T=params.T,
            t_ds_max=params.t_ds_max,
            threshold=params.threshold,
            mode=params.mode,
            seed=pass_seed(params.seed, idx),
            conditioning=params.conditioning,
            sigma_min=params.sigma_min,
            sigma_max=params.sigma_max,
        )
        result = progressive_edit(source, exemplar, mu, pparams, world, cfg, **retain)
        source = result.output
    return result


def naive_blend_baseline(
    x1: np.ndarray,
    x2: np.ndarray,
    mu: np.ndarray,
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    **retain,
) -> EditResult:
    """Surgical copy-paste once at full strength, then plain denoising.

    The map is binarized at 0.5, the noised latents are blended a single
    time, and the result rides the reverse chain with no shifting mask;
    this is the baseline whose seam artifacts the progressive schedule
    exists to remove.
    """
    z1, zs, mus_d = _prepare(x1, [(x2, mu)], cfg)
    _check_world(world, z1.shape)
    sched = params.schedule()
    rng_init = substream(params.seed, "init")
    rng_step = substream(params.seed, "stepper")
    ts = params.t_ds_max

    mask = mask_at(mus_d[0], 0.5)
    eps = rng_init.standard_normal(z1.shape)
    sig0 = sched.sigma(ts)
    z_mix = surgical_blend(z1 + sig0 * eps, zs[0] + sig0 * eps, mask)

    retain_masks = retain.get("retain_masks", False)
    retain_latents = retain.get("retain_latents", False)
    if ts == 0:
        return EditResult(
            output=decode(z_mix, cfg), steps=[], params=params, degenerate=True,
            per_step_masks=[] if retain_masks else None,
            per_step_latents=[] if retain_latents else None,
        )
    steps = list(range(ts, 0, -1))
    latents_out: list[np.ndarray] | None = [] if retain_latents else None
    for t in steps:
        z_mix = denoise_step(z_mix, t, sched, world, params.conditioning, params.mode, rng_step)
        if latents_out is not None:
            latents_out.append(z_mix.copy())
    return EditResult(
        output=decode(z_mix, cfg),
        steps=steps,
        params=params,
        per_step_masks=[mask.copy() for _ in steps] if retain_masks else None,
        per_step_latents=latents_out,
    )


def spatial_noise_baseline(
    x1: np.ndarray,
    x2: np.ndarray,
    mu: np.ndarray,
    params: EditParams,
    world: GmmWorld,
    cfg: EncoderConfig,
    **retain,
) -> EditResult:
    """Documented failure mode: modulate the added noise by the edit map.

    The source is re-noised each step with the noise scaled elementwise by
    (1 - mu_d) and injected through a fixed binary mask, so the denoiser
    sees regions at inconsistent noise levels.
    """
    z1, zs, mus_d = _prepare(x1, [(x2, mu)], cfg)
    _check_world(world, z1.shape)
    sched = params.schedule()
    rng_init = substream(params.seed, "init")
    rng_src = substream(params.seed, "source-noise")
    rng_step = substream(params.seed, "stepper")
    ts = params.t_ds_max

    mu_d = mus_d[0]
    scale = 1.0 - mu_d
    mask = mask_at(mu_d, 0.5)
    eps = rng_init.standard_normal(z1.shape)
    sig0 = sched.sigma(ts)
    z_mix = surgical_blend(z1 + sig0 * scale[None] * eps, zs[0] + sig0 * eps, mask)

    retain_masks = retain.get("retain_masks", False)
    retain_latents = retain.get("retain_latents", False)
    if ts == 0:
        return EditResult(
            output=decode(z_mix, cfg), steps=[], params=params, degenerate=True,
            per_step_masks=[] if retain_masks else None,
            per_step_latents=[] if retain_latents else None,
        )
    steps = []
    latents_out: list[np.ndarray] | None = [] if retain_latents else None
    for i, t in enumerate(range(ts, 0, -1)):
        if i > 0:
            z1t = z1 + sched.sigma(t) * scale[None] * rng_src.standard_normal(z1.shape)
            z_mix = surgical_blend(z1t, z_mix, mask)
        z_mix = denoise_step(z_mix, t, sched, world, params.conditioning, params.mode, rng_step)
        steps.append(t)
        if latents_out is not None:
            latents_out.append(z_mix.copy())
    return EditResult(
        output=decode(z_mix, cfg),
        steps=steps,
        params=params,
        per_step_masks=[mask.copy() for _ in steps] if retain_masks else None,
        per_step_latents=latents_out,
    )
