"""Concentration-bound machinery for the surgical-latent traversal.

The reverse chain from a noised surgical latent moves it at most
sigma^4 * B + sigma^2 * (chi-squared tail) in squared distance, with
probability at least 1 - p. These routines assemble that bound, check it
per realization by Monte Carlo, and run the denoising-strength
recommendation sweep built on the same trade-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import EncoderConfig, NoiseSchedule
from .metrics import realism_proxy
from .scheduler import EditParams, progressive_edit
from .rng import substream
from .worlds import GmmWorld, estimate_B, full_reverse

__all__ = [
    "BoundInputs",
    "BoundReport",
    "TdsRecommendation",
    "chi_square_tail_threshold",
    "lemma1_bound",
    "verify_bound",
    "recommend_tds",
]

B_PROTOCOL = (
    "empirical sup of ||score||^2 along ancestral reverse trajectories "
    "from prior noise (not a global sup, which diverges for Gaussian scores)"
)


def chi_square_tail_threshold(k: int, p_tail: float) -> float:
    """Upper tail point of chi^2_k: k + 2*sqrt(-k ln p) - 2 ln p.

    A chi-squared variable with k degrees of freedom exceeds this with
    probability at most p_tail.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not 0.0 < p_tail < 1.0:
        raise ValueError(f"p_tail must lie in (0, 1), got {p_tail}")
    neg_log_p = -math.log(p_tail)
    return k + 2.0 * math.sqrt(k * neg_log_p) + 2.0 * neg_log_p


@dataclass(frozen=True)
class BoundInputs:
    sigma_tds: float
    B: float
    k: int
    p_tail: float

    def __post_init__(self) -> None:
        if self.sigma_tds < 0.0:
            raise ValueError("sigma_tds must be non-negative")
        if self.B < 0.0:
            raise ValueError("B must be non-negative")
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if not 0.0 < self.p_tail < 1.0:
            raise ValueError("p_tail must lie in (0, 1)")

    def to_json(self) -> dict:
        return {
            "sigma_tds": self.sigma_tds,
            "B": self.B,
            "k": self.k,
            "p_tail": self.p_tail,
        }


def lemma1_bound(b: BoundInputs) -> float:
    """sigma^4 * B + sigma^2 * chi_square_tail_threshold(k, p_tail)."""
    s2 = b.sigma_tds**2
    return s2 * s2 * b.B + s2 * chi_square_tail_threshold(b.k, b.p_tail)


@dataclass(frozen=True)
class BoundReport:
    bound: float
    n_runs: int
    n_within: int
    empirical_coverage: float
    inputs: BoundInputs
    b_protocol: str
    realized: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "n_runs": self.n_runs,
            "n_within": self.n_within,
            "empirical_coverage": self.empirical_coverage,
            "inputs": self.inputs.to_json(),
            "b_protocol": self.b_protocol,
            "realized": list(self.realized),
        }


def verify_bound(
    world: GmmWorld,
    z_surgical: np.ndarray,
    t_ds: int,
    sched: NoiseSchedule,
    p_tail: float,
    n_runs: int,
    seed: int,
    b_samples: int = 16,
) -> BoundReport:
    """Monte-Carlo check of the traversal bound, one count per realization.

    Each run perturbs the surgical latent to noise level sigma(t_ds), runs
    the ancestral reverse chain to the end, and compares the realized
    squared displacement against the assembled bound. t_ds = 0 means an
    empty traversal interval: no perturbation, no steps, zero displacement.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if z_surgical.shape != world.shape:
        raise ValueError(f"latent shape {z_surgical.shape} does not match world {world.shape}")
    B = estimate_B(world, sched, b_samples, seed=int(substream(seed, "B-seed").integers(2**63)))
    inputs = BoundInputs(
        sigma_tds=sched.sigma(t_ds) if t_ds > 0 else 0.0,
        B=B,
        k=world.k,
        p_tail=p_tail,
    )
    bound = lemma1_bound(inputs)
    realized: list[float] = []
    for i in range(n_runs):
        rng = substream(seed, f"bound-run-{i}")
        if t_ds == 0:
            realized.append(0.0)
            continue
        z_noisy = z_surgical + sched.sigma(t_ds) * rng.standard_normal(world.shape)
        z_final = full_reverse(z_noisy, t_ds, sched, world, mode="ancestral", rng=rng)
        realized.append(float(np.sum((z_final - z_noisy) ** 2)))
    n_within = sum(1 for r in realized if r <= bound)
    return BoundReport(
        bound=bound,
        n_runs=n_runs,
        n_within=n_within,
        empirical_coverage=n_within / n_runs,
        inputs=inputs,
        b_protocol=B_PROTOCOL,
        realized=tuple(realized),
    )


@dataclass(frozen=True)
class TdsRecommendation:
    t_ds: int
    reached: bool
    grid: tuple[int, ...]
    proxies: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "t_ds": self.t_ds,
            "reached": self.reached,
            "grid": list(self.grid),
            "proxies": list(self.proxies),
        }


def tds_grid(T: int) -> list[int]:
    """The scan grid {0, T/10, 2T/10, ..., T} (rounded, deduplicated)."""
    pts = sorted({round(j * T / 10) for j in range(11)})
    return [int(p) for p in pts]


def recommend_tds(
    x1: np.ndarray,
    x2: np.ndarray,
    mu: np.ndarray,
    world: GmmWorld,
    cfg: EncoderConfig,
    realism_floor: float,
    params: EditParams,
) -> TdsRecommendation:
    """Smallest scanned denoising strength whose edit meets the realism floor.

    Scans t_ds over tds_grid(T), running a full progressive edit at each
    point; if no point reaches the floor, returns T with reached=False.
    """
    grid = tds_grid(params.T)
    proxies: list[float] = []
    chosen: int | None = None
    for t_ds in grid:
        run_params = EditParams(
            T=params.T,
            t_ds_max=t_ds,
            threshold=params.threshold,
            mode=params.mode,
            seed=params.seed,
            conditioning=params.conditioning,
            sigma_min=params.sigma_min,
            sigma_max=params.sigma_max,
        )
        result = progressive_edit(x1, x2, mu, run_params, world, cfg)
        proxy = realism_proxy(result.output, world, cfg)
        proxies.append(proxy)
        if chosen is None and proxy >= realism_floor:
            chosen = t_ds
    if chosen is None:
        return TdsRecommendation(params.T, False, tuple(grid), tuple(proxies))
    return TdsRecommendation(chosen, True, tuple(grid), tuple(proxies))
