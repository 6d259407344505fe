import base64
import json

import numpy as np
import pytest

from progedit import fixtures as fx
from progedit.pnm import write_map_bytes, write_pnm_bytes
from progedit.runconfig import ConfigError, config_digest, load_run_spec


def b64(data: bytes) -> dict:
    return {"b64": base64.b64encode(data).decode()}


def inline_config(**overrides) -> dict:
    x1, x2, mu = fx.two_texture_inputs()
    cfg = {
        "source": b64(write_pnm_bytes(x1)),
        "exemplars": [b64(write_pnm_bytes(x2))],
        "maps": [b64(write_map_bytes(mu))],
        "T": 50,
        "t_ds_max": 20,
        "seed": 3,
        "world": {"fixture": "two-texture"},
    }
    cfg.update(overrides)
    return cfg


def test_valid_inline_config():
    spec = load_run_spec(inline_config())
    assert spec.source.shape == (1, 32, 32)
    assert spec.params.t_ds_max == 20
    assert spec.world.n_components == 12


def test_file_refs(tmp_path):
    x1, x2, mu = fx.two_texture_inputs()
    (tmp_path / "s.pgm").write_bytes(write_pnm_bytes(x1))
    (tmp_path / "e.pgm").write_bytes(write_pnm_bytes(x2))
    (tmp_path / "m.pgm").write_bytes(write_map_bytes(mu))
    fx.two_texture_world().save(tmp_path / "w.json")
    cfg = {
        "source": "s.pgm", "exemplars": ["e.pgm"], "maps": ["m.pgm"],
        "world": "w.json",
    }
    spec = load_run_spec(cfg, base_dir=tmp_path)
    assert spec.params.T == 50  # default
    assert spec.params.t_ds_max == 50  # defaults to T


def test_missing_file_reports_input_missing(tmp_path):
    cfg = {
        "source": "absent.pgm", "exemplars": ["absent.pgm"],
        "maps": ["absent.pgm"], "world": {"fixture": "two-texture"},
    }
    with pytest.raises(ConfigError) as err:
        load_run_spec(cfg, base_dir=tmp_path)
    assert err.value.kind == "input-missing"
    assert err.value.path == "source"


def test_missing_field():
    cfg = inline_config()
    del cfg["world"]
    with pytest.raises(ConfigError) as err:
        load_run_spec(cfg)
    assert err.value.path == "world"


def test_map_channel_error_path():
    cfg = inline_config(maps=[b64(write_pnm_bytes(np.zeros((3, 32, 32))))])
    with pytest.raises(ConfigError) as err:
        load_run_spec(cfg)
    assert err.value.path == "maps[0]"


def test_shape_mismatch_path():
    cfg = inline_config(exemplars=[b64(write_pnm_bytes(np.zeros((1, 16, 16))))])
    with pytest.raises(ConfigError) as err:
        load_run_spec(cfg)
    assert err.value.path == "exemplars[0]"


def test_t_ds_range():
    with pytest.raises(ConfigError) as err:
        load_run_spec(inline_config(t_ds_max=99))
    assert err.value.path == "t_ds_max"


def test_unknown_threshold():
    with pytest.raises(ConfigError) as err:
        load_run_spec(inline_config(threshold="banana"))
    assert err.value.path == "threshold"


def test_unknown_fixture():
    with pytest.raises(ConfigError) as err:
        load_run_spec(inline_config(world={"fixture": "nope"}))
    assert err.value.path == "world.fixture"


def test_inline_world_document():
    world = fx.single_gaussian_world()
    x1 = np.full((1, 32, 32), 0.5)
    cfg = inline_config(
        source=b64(write_pnm_bytes(x1)),
        exemplars=[b64(write_pnm_bytes(x1))],
        maps=[b64(write_map_bytes(np.zeros((32, 32))))],
        world=world.to_json(),
    )
    spec = load_run_spec(cfg)
    assert spec.world.n_components == 1


def test_config_digest_stable_and_order_free():
    a = {"x": 1, "y": [1, 2]}
    b = {"y": [1, 2], "x": 1}
    assert config_digest(a) == config_digest(b)
    assert config_digest(a) != config_digest({"x": 2, "y": [1, 2]})
