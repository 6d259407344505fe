"""Grids, toy pixel/latent codec, noise schedule, and blending primitives.

Images and latents are both plain float64 arrays of shape (channels, height,
width); edit maps are (height, width) arrays in [0, 1]; binary masks are
(height, width) bool arrays that broadcast over channels when blending.

The codec is deliberately simple: identity, or f x f block averaging with
nearest-neighbor decoding. Block pooling keeps pixel and latent positions
aligned, which is what lets a downsampled edit map address latent regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoiseSchedule",
    "EncoderConfig",
    "as_image",
    "as_edit_map",
    "encode",
    "decode",
    "downsample_map",
    "add_noise",
    "surgical_blend",
    "latent_distance",
]


def as_image(values: np.ndarray) -> np.ndarray:
    """Validate and return a (C, H, W) float64 image/latent array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 3:
        raise ValueError(f"expected (channels, height, width), got shape {arr.shape}")
    if arr.shape[0] not in (1, 3):
        raise ValueError(f"expected 1 or 3 channels, got {arr.shape[0]}")
    if min(arr.shape) <= 0:
        raise ValueError(f"dimensions must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image values must be finite")
    return arr


def as_edit_map(values: np.ndarray) -> np.ndarray:
    """Validate and return an (H, W) float64 edit map with values in [0, 1]."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected (height, width) edit map, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("edit map values must be finite")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("edit map values must lie in [0, 1]")
    return arr


@dataclass(frozen=True)
class NoiseSchedule:
    """Geometric variance-exploding noise schedule sigma(t), t = 0..T.

    sigma(t) = sigma_min * (sigma_max / sigma_min) ** (t / T), so sigma(0) =
    sigma_min and sigma(T) = sigma_max. A geometric schedule cannot reach 0,
    so the floor is a small positive sigma_min rather than the idealized
    sigma(0) = 0.
    """

    T: int
    sigma_min: float = 0.01
    sigma_max: float = 10.0

    def __post_init__(self) -> None:
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if not (0.0 < self.sigma_min < self.sigma_max):
            raise ValueError(
                f"need 0 < sigma_min < sigma_max, got {self.sigma_min}, {self.sigma_max}"
            )

    def sigma(self, t: int) -> float:
        if not 0 <= t <= self.T:
            raise ValueError(f"step {t} outside [0, {self.T}]")
        return self.sigma_min * (self.sigma_max / self.sigma_min) ** (t / self.T)


@dataclass(frozen=True)
class EncoderConfig:
    """Toy latent codec: 'identity' or 'block-average' with factor 1, 2 or 4."""

    kind: str = "identity"
    factor: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "block-average"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if self.factor not in (1, 2, 4):
            raise ValueError(f"factor must be 1, 2 or 4, got {self.factor}")
        if self.kind == "identity" and self.factor != 1:
            raise ValueError("identity encoder requires factor 1")


def _check_divisible(h: int, w: int, f: int) -> None:
    if h % f != 0 or w % f != 0:
        raise ValueError(f"dimensions {h}x{w} not divisible by factor {f}")


def encode(img: np.ndarray, cfg: EncoderConfig) -> np.ndarray:
    """Encode an image to latent space: identity, or f x f block means."""
    img = as_image(img)
    if cfg.kind == "identity":
        return img.copy()
    c, h, w = img.shape
    f = cfg.factor
    _check_divisible(h, w, f)
    blocks = img.reshape(c, h // f, f, w // f, f)
    return blocks.mean(axis=(2, 4))


def decode(z: np.ndarray, cfg: EncoderConfig) -> np.ndarray:
    """Decode a latent back to pixel space (nearest-neighbor upsampling).

    No clamping here; values are clamped to [0, 1] only at image export.
    """
    z = as_image(z)
    if cfg.kind == "identity":
        return z.copy()
    f = cfg.factor
    return np.repeat(np.repeat(z, f, axis=1), f, axis=2)


def downsample_map(mu: np.ndarray, factor: int) -> np.ndarray:
    """Block-average an edit map down by `factor`; values stay in [0, 1]."""
    mu = as_edit_map(mu)
    if factor == 1:
        return mu.copy()
    h, w = mu.shape
    _check_divisible(h, w, factor)
    blocks = mu.reshape(h // factor, factor, w // factor, factor)
    return blocks.mean(axis=(1, 3))


def add_noise(z_init: np.ndarray, t: int, sched: NoiseSchedule, rng: np.random.Generator) -> np.ndarray:
    """Return z_init + sigma(t) * eps with eps drawn fresh from `rng`."""
    s = sched.sigma(t)
    return z_init + s * rng.standard_normal(z_init.shape)


def surgical_blend(z1: np.ndarray, z2: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Copy-paste composition: z1 where mask is true, z2 elsewhere.

    The mask is (H, W) and broadcasts over channels; every element comes
    from exactly one of the two inputs.
    """
    if z1.shape != z2.shape:
        raise ValueError(f"shape mismatch: {z1.shape} vs {z2.shape}")
    if mask.shape != z1.shape[1:]:
        raise ValueError(f"mask shape {mask.shape} does not match latent {z1.shape}")
    return np.where(mask[None, :, :], z1, z2)


def latent_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two grids of identical shape."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))
