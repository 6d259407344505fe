import numpy as np
import pytest

from progedit import fixtures as fx
from progedit.grids import EncoderConfig, NoiseSchedule, add_noise, decode, encode
from progedit.rng import substream
from progedit.worlds import denoise_step


@pytest.fixture(scope="session")
def cfg_identity():
    return EncoderConfig()


@pytest.fixture(scope="session")
def two_texture():
    return fx.two_texture_world()


@pytest.fixture(scope="session")
def single_gaussian():
    return fx.single_gaussian_world()


@pytest.fixture(scope="session")
def ladder_world():
    return fx.ladder_world()


@pytest.fixture(scope="session")
def seam_inputs():
    return fx.two_texture_inputs()


@pytest.fixture(scope="session")
def sched_default():
    return NoiseSchedule(T=50)


@pytest.fixture(scope="session")
def tau_adh(two_texture, seam_inputs, cfg_identity, sched_default):
    """Adherence tolerance for full-keep runs.

    Independent oracle: a full-keep run ends with one sigma(1)-level
    noising of the source followed by a single denoise step, so the
    tolerance is the RMSE of exactly that operation (32 fresh draws,
    mean + 5 sigma) plus one 8-bit quantization step.
    """
    x1, _, _ = seam_inputs
    z1 = encode(x1, cfg_identity)
    rmses = []
    for i in range(32):
        rng = substream(555, f"adh-oracle-{i}")
        zn = add_noise(z1, 1, sched_default, rng)
        out = decode(denoise_step(zn, 1, sched_default, two_texture, rng=rng), cfg_identity)
        rmses.append(np.sqrt(np.mean((out - x1) ** 2)))
    rmses = np.array(rmses)
    return float(rmses.mean() + 5.0 * rmses.std() + 1.0 / 255.0)
