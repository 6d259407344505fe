"""Edit quality measurements: adherence, realism proxy, seam smoothness.

The worlds here are synthetic mixtures, so L2-based measures are the
natural geometry: map-weighted RMSE for adherence, normalized model
log-density for realism, and gradient energy in the transition band for
seam quality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import EncoderConfig, as_edit_map, as_image, encode
from .worlds import GmmWorld, log_density

__all__ = [
    "AdherenceScores",
    "EditScore",
    "adherence",
    "realism_proxy",
    "boundary_smoothness",
    "DEFAULT_BAND",
    "EMPTY_REGION_SENTINEL",
]

# band excludes pure-source and pure-exemplar pixels so the measure isolates the seam
DEFAULT_BAND = (0.05, 0.95)

# convolution floor for the realism probe; matches the samplers' terminal sigma
REALISM_SIGMA = 0.01

EMPTY_REGION_SENTINEL = 0.0


@dataclass(frozen=True)
class AdherenceScores:
    source: float
    exemplar: float
    source_region_empty: bool = False
    exemplar_region_empty: bool = False


@dataclass(frozen=True)
class EditScore:
    adherence_source: float
    adherence_exemplar: float
    realism: float
    boundary_smoothness: float

    def to_json(self) -> dict:
        # stable key order for CLI printing
        return {
            "adherence_source": self.adherence_source,
            "adherence_exemplar": self.adherence_exemplar,
            "realism": self.realism,
            "boundary_smoothness": self.boundary_smoothness,
        }


def _weighted_rmse(diff_sq: np.ndarray, weights: np.ndarray) -> tuple[float, bool]:
    c = diff_sq.shape[0]
    total = weights.sum() * c
    if total <= 0.0:
        return EMPTY_REGION_SENTINEL, True
    return float(np.sqrt(np.sum(diff_sq * weights[None, :, :]) / total)), False


def adherence(
    edit: np.ndarray,
    source: np.ndarray,
    exemplar: np.ndarray,
    mu: np.ndarray,
) -> AdherenceScores:
    """Map-weighted RMSE of the edit against source and exemplar.

    mu weights the comparison to the source, (1 - mu) the comparison to the
    exemplar; a zero-weight region yields the sentinel with its empty flag
    set.
    """
    edit = as_image(edit)
    source = as_image(source)
    exemplar = as_image(exemplar)
    mu = as_edit_map(mu)
    if edit.shape != source.shape or edit.shape != exemplar.shape:
        raise ValueError("edit/source/exemplar shapes must match")
    if mu.shape != edit.shape[1:]:
        raise ValueError(f"map shape {mu.shape} does not match image {edit.shape}")
    src_val, src_empty = _weighted_rmse((edit - source) ** 2, mu)
    ex_val, ex_empty = _weighted_rmse((edit - exemplar) ** 2, 1.0 - mu)
    return AdherenceScores(src_val, ex_val, src_empty, ex_empty)


def realism_proxy(edit: np.ndarray, world: GmmWorld, cfg: EncoderConfig) -> float:
    """Per-element log-density of the encoded edit under the world.

    Evaluated against the sigma_min-convolved mixture (the same floor the
    samplers terminate at) and normalized by the latent element count.
    """
    z = encode(edit, cfg)
    return log_density(z, REALISM_SIGMA, world) / world.k


def boundary_smoothness(
    edit: np.ndarray,
    mu: np.ndarray,
    band: tuple[float, float] = DEFAULT_BAND,
) -> float:
    """Mean squared forward-difference gradient over the transition band.

    Pixels with mu strictly inside (lo, hi) are selected; each contributes
    its squared forward differences in x and y (zero at the trailing edge).
    An empty band yields the sentinel.
    """
    edit = as_image(edit)
    mu = as_edit_map(mu)
    lo, hi = band
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"malformed band {band}")
    if mu.shape != edit.shape[1:]:
        raise ValueError(f"map shape {mu.shape} does not match image {edit.shape}")
    sel = (mu > lo) & (mu < hi)
    if not sel.any():
        return EMPTY_REGION_SENTINEL
    grad_sq = np.zeros_like(edit)
    grad_sq[:, :, :-1] += (edit[:, :, 1:] - edit[:, :, :-1]) ** 2
    grad_sq[:, :-1, :] += (edit[:, 1:, :] - edit[:, :-1, :]) ** 2
    c = edit.shape[0]
    return float(np.sum(grad_sq * sel[None, :, :]) / (sel.sum() * c))
