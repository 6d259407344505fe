"""Run-config schema shared by the CLI and the HTTP service.

A run config is a JSON document:

    {
      "source": <image ref>, "exemplars": [<image ref>, ...],
      "maps": [<map ref>, ...],
      "T": 50, "t_ds_max": 30, "threshold": "linear",
      "mode": "ancestral", "seed": 0,
      "world": <path | {"fixture": name} | inline world doc>,
      "encoder": {"kind": "identity", "factor": 1},
      "retain_steps": false,
      "emit": {"result": true, "step_masks": false,
               "step_latents": false, "score_json": false},
      "sweep": {"realism_floor": null, "fixed_tds": null},
      "bound": {"t_ds": 25, "p_tail": 0.5, "n_runs": 1000, "b_samples": 16}
    }

Image refs are file paths (CLI) or {"b64": "..."} inline pixmaps (service).
Validation failures raise ConfigError carrying the JSON path of the
offending field, so both front doors report the same machine-readable
location.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fixtures import FIXTURE_WORLDS, fixture_world
from .grids import EncoderConfig
from .pnm import read_map_bytes, read_pnm_bytes
from .scheduler import STEPPER_MODES, THRESHOLD_KINDS, EditParams
from .worlds import GmmWorld

__all__ = ["ConfigError", "RunSpec", "EmitFlags", "load_run_spec", "load_world_ref", "config_digest"]


class ConfigError(ValueError):
    """Invalid run config; `kind` and `path` locate the problem."""

    def __init__(self, kind: str, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.kind = kind
        self.path = path
        self.message = message

    def to_json(self) -> dict:
        return {"kind": self.kind, "path": self.path, "message": self.message}


@dataclass(frozen=True)
class EmitFlags:
    result: bool = True
    step_masks: bool = False
    step_latents: bool = False
    score_json: bool = False


@dataclass
class RunSpec:
    source: np.ndarray
    exemplars: list[np.ndarray]
    maps: list[np.ndarray]
    params: EditParams
    world: GmmWorld
    encoder: EncoderConfig
    retain_steps: bool
    emit: EmitFlags
    sweep: dict = field(default_factory=dict)
    bound: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _require(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError("schema", f"{path}{key}", "missing required field")
    return cfg[key]


def _load_image_ref(ref, path: str, base_dir: Path | None, as_map: bool) -> np.ndarray:
    if isinstance(ref, str):
        file_path = Path(ref)
        if base_dir is not None and not file_path.is_absolute():
            file_path = base_dir / file_path
        if not file_path.exists():
            raise ConfigError("input-missing", path, f"file not found: {file_path}")
        data = file_path.read_bytes()
    elif isinstance(ref, dict) and "b64" in ref:
        try:
            data = base64.b64decode(ref["b64"], validate=True)
        except (binascii.Error, ValueError) as exc:
            raise ConfigError("value", path, f"invalid base64 payload: {exc}") from None
    else:
        raise ConfigError("schema", path, "expected a file path or {'b64': ...}")
    try:
        return read_map_bytes(data) if as_map else read_pnm_bytes(data)
    except ValueError as exc:
        raise ConfigError("value", path, str(exc)) from None


def load_world_ref(ref, path: str, base_dir: Path | None) -> GmmWorld:
    if isinstance(ref, str):
        file_path = Path(ref)
        if base_dir is not None and not file_path.is_absolute():
            file_path = base_dir / file_path
        if not file_path.exists():
            raise ConfigError("input-missing", path, f"file not found: {file_path}")
        try:
            doc = json.loads(file_path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("value", path, f"invalid world JSON: {exc}") from None
    elif isinstance(ref, dict) and "fixture" in ref:
        name = ref["fixture"]
        if name not in FIXTURE_WORLDS:
            raise ConfigError(
                "value", f"{path}.fixture",
                f"unknown fixture {name!r}; have {sorted(FIXTURE_WORLDS)}",
            )
        return fixture_world(name)
    elif isinstance(ref, dict):
        doc = ref
    else:
        raise ConfigError("schema", path, "expected a path, {'fixture': name} or a world document")
    try:
        return GmmWorld.from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("value", path, f"bad world document: {exc}") from None


def load_run_spec(cfg: dict, base_dir: Path | None = None) -> RunSpec:
    """Validate a run-config dict and load everything it references."""
    if not isinstance(cfg, dict):
        raise ConfigError("schema", "", "run config must be a JSON object")

    source = _load_image_ref(_require(cfg, "source", ""), "source", base_dir, as_map=False)

    ex_refs = _require(cfg, "exemplars", "")
    if not isinstance(ex_refs, list) or not ex_refs:
        raise ConfigError("schema", "exemplars", "expected a nonempty list")
    exemplars = [
        _load_image_ref(ref, f"exemplars[{i}]", base_dir, as_map=False)
        for i, ref in enumerate(ex_refs)
    ]

    map_refs = _require(cfg, "maps", "")
    if not isinstance(map_refs, list) or len(map_refs) != len(ex_refs):
        raise ConfigError("schema", "maps", "expected one map per exemplar")
    maps = [
        _load_image_ref(ref, f"maps[{i}]", base_dir, as_map=True)
        for i, ref in enumerate(map_refs)
    ]
    for i, (img, mu) in enumerate(zip(exemplars, maps)):
        if img.shape != source.shape:
            raise ConfigError(
                "value", f"exemplars[{i}]",
                f"shape {img.shape} does not match source {source.shape}",
            )
        if mu.shape != source.shape[1:]:
            raise ConfigError(
                "value", f"maps[{i}]",
                f"shape {mu.shape} does not match source {source.shape}",
            )
        if mu.min() < 0.0 or mu.max() > 1.0:
            raise ConfigError("value", f"maps[{i}]", "edit map values must lie in [0, 1]")

    enc_doc = cfg.get("encoder", {})
    if not isinstance(enc_doc, dict):
        raise ConfigError("schema", "encoder", "expected an object")
    try:
        encoder = EncoderConfig(
            kind=enc_doc.get("kind", "identity"),
            factor=int(enc_doc.get("factor", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("value", "encoder", str(exc)) from None

    def _int_field(key: str, default: int, lo: int, hi: int | None = None) -> int:
        value = cfg.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError("value", key, f"expected an integer, got {value!r}")
        if value < lo or (hi is not None and value > hi):
            raise ConfigError("value", key, f"{value} outside [{lo}, {hi}]")
        return value

    T = _int_field("T", 50, 1)
    t_ds_max = _int_field("t_ds_max", T, 0, T)
    seed = _int_field("seed", 0, 0)
    threshold = cfg.get("threshold", "linear")
    if threshold not in THRESHOLD_KINDS:
        raise ConfigError("value", "threshold", f"unknown threshold {threshold!r}")
    mode = cfg.get("mode", "ancestral")
    if mode not in STEPPER_MODES:
        raise ConfigError("value", "mode", f"unknown mode {mode!r}")
    try:
        params = EditParams(
            T=T,
            t_ds_max=t_ds_max,
            threshold=threshold,
            mode=mode,
            seed=seed,
            sigma_min=float(cfg.get("sigma_min", 0.01)),
            sigma_max=float(cfg.get("sigma_max", 10.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError("value", "sigma_min", str(exc)) from None

    world = load_world_ref(_require(cfg, "world", ""), "world", base_dir)
    emit_doc = cfg.get("emit", {})
    if not isinstance(emit_doc, dict):
        raise ConfigError("schema", "emit", "expected an object")
    emit = EmitFlags(
        result=bool(emit_doc.get("result", True)),
        step_masks=bool(emit_doc.get("step_masks", False)),
        step_latents=bool(emit_doc.get("step_latents", False)),
        score_json=bool(emit_doc.get("score_json", False)),
    )

    return RunSpec(
        source=source,
        exemplars=exemplars,
        maps=maps,
        params=params,
        world=world,
        encoder=encoder,
        retain_steps=bool(cfg.get("retain_steps", False)),
        emit=emit,
        sweep=cfg.get("sweep", {}) or {},
        bound=cfg.get("bound", {}) or {},
        raw=cfg,
    )


def config_digest(cfg: dict) -> str:
    """Stable hash of the effective config (canonical JSON, sorted keys)."""
    import hashlib

    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canonical).hexdigest()
