"""Progressive exemplar-driven latent editing over analytic score worlds."""

from .grids import (
    EncoderConfig,
    NoiseSchedule,
    add_noise,
    decode,
    downsample_map,
    encode,
    latent_distance,
    surgical_blend,
)
from .scheduler import (
    EditParams,
    EditResult,
    iterative_edit,
    mask_at,
    naive_blend_baseline,
    progressive_edit,
    progressive_edit_multi,
    spatial_noise_baseline,
    threshold_auc,
    threshold_curve,
    threshold_value,
)
from .worlds import (
    Conditioning,
    GmmWorld,
    denoise_step,
    estimate_B,
    full_reverse,
    gmm_score,
    kde_world_from_patches,
)
from .bounds import (
    BoundInputs,
    BoundReport,
    chi_square_tail_threshold,
    lemma1_bound,
    recommend_tds,
    verify_bound,
)
from .metrics import EditScore, adherence, boundary_smoothness, realism_proxy

__version__ = "0.1.0"
