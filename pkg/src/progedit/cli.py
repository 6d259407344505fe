"""Command-line front door.

Subcommands: edit, multi-edit, iterate, baseline {naive|spatial-noise},
schedule-viz, bound-check, sweep-tds. Every run takes a JSON config
(--config), writes its artifacts under --out, and drops a manifest.json
recording the effective config hash, the tool version, and a digest of
every artifact. Outputs are byte-identical across runs of the same config
and seed. Exit codes: 0 success, 1 internal failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import recommend_tds, tds_grid, verify_bound
from .fixtures import default_realism_floor
from .grids import encode, latent_distance, surgical_blend
from .metrics import EditScore, adherence, boundary_smoothness, realism_proxy
from .pnm import write_pnm_bytes, write_map_bytes
from .runconfig import ConfigError, RunSpec, config_digest, load_run_spec
from .scheduler import (
    EditParams,
    EditResult,
    iterative_edit,
    mask_at,
    naive_blend_baseline,
    progressive_edit,
    progressive_edit_multi,
    spatial_noise_baseline,
)

__all__ = ["main"]


def _fail(kind: str, path: str, message: str) -> int:
    print(json.dumps({"error": {"kind": kind, "path": path, "message": message}}),
          file=sys.stderr)
    return 2


class _OutDir:
    """Collects artifacts and writes the manifest last."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self.artifacts: dict[str, str] = {}

    def write(self, name: str, data: bytes) -> None:
        (self.root / name).write_bytes(data)
        self.artifacts[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name: str, doc) -> None:
        self.write(name, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())

    def finish(self, cfg: dict) -> None:
        manifest = {
            "config_sha256": config_digest(cfg),
            "tool_version": __version__,
            "artifacts": dict(sorted(self.artifacts.items())),
        }
        (self.root / "manifest.json").write_bytes(
            (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode()
        )


def _load(args) -> tuple[RunSpec, dict]:
    cfg_path = Path(args.config)
    if not cfg_path.exists():
        raise ConfigError("input-missing", "config", f"file not found: {cfg_path}")
    try:
        cfg = json.loads(cfg_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("value", "config", f"invalid JSON: {exc}") from None
    if args.seed is not None:
        cfg["seed"] = args.seed
    spec = load_run_spec(cfg, base_dir=cfg_path.parent)
    return spec, cfg


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.save(buf, arr)
    return buf.getvalue()


def _emit_result(out: _OutDir, spec: RunSpec, result: EditResult) -> None:
    if spec.emit.result:
        suffix = "pgm" if result.output.shape[0] == 1 else "ppm"
        out.write(f"result.{suffix}", write_pnm_bytes(result.output))
    if spec.emit.step_masks and result.per_step_masks is not None:
        for t, mask in zip(result.steps, result.per_step_masks):
            out.write(f"mask_t{t:04d}.pgm", write_map_bytes(mask.astype(np.float64)))
    if spec.emit.step_latents and result.per_step_latents is not None:
        for t, z in zip(result.steps, result.per_step_latents):
            out.write(f"latent_t{t:04d}.npy", _npy_bytes(z))
    if spec.emit.score_json:
        adh = adherence(result.output, spec.source, spec.exemplars[0], spec.maps[0])
        score = EditScore(
            adherence_source=adh.source,
            adherence_exemplar=adh.exemplar,
            realism=realism_proxy(result.output, spec.world, spec.encoder),
            boundary_smoothness=boundary_smoothness(result.output, spec.maps[0]),
        )
        out.write("score.json", (json.dumps(score.to_json()) + "\n").encode())


def _retain_kwargs(spec: RunSpec) -> dict:
    need_masks = spec.retain_steps or spec.emit.step_masks
    need_latents = spec.retain_steps or spec.emit.step_latents
    return {"retain_masks": need_masks, "retain_latents": need_latents}


def cmd_edit(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    result = progressive_edit(
        spec.source, spec.exemplars[0], spec.maps[0],
        spec.params, spec.world, spec.encoder, **_retain_kwargs(spec),
    )
    _emit_result(out, spec, result)
    out.finish(cfg)
    return 0


def cmd_multi_edit(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    result = progressive_edit_multi(
        spec.source, list(zip(spec.exemplars, spec.maps)),
        spec.params, spec.world, spec.encoder, **_retain_kwargs(spec),
    )
    _emit_result(out, spec, result)
    out.finish(cfg)
    return 0


def cmd_iterate(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    result = iterative_edit(
        spec.source, list(zip(spec.exemplars, spec.maps)),
        spec.params, spec.world, spec.encoder, **_retain_kwargs(spec),
    )
    _emit_result(out, spec, result)
    out.finish(cfg)
    return 0


def cmd_baseline(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    runner = naive_blend_baseline if args.kind == "naive" else spatial_noise_baseline
    result = runner(
        spec.source, spec.exemplars[0], spec.maps[0],
        spec.params, spec.world, spec.encoder, **_retain_kwargs(spec),
    )
    _emit_result(out, spec, result)
    out.finish(cfg)
    return 0


def cmd_schedule_viz(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    result = progressive_edit(
        spec.source, spec.exemplars[0], spec.maps[0],
        spec.params, spec.world, spec.encoder,
        retain_masks=True, retain_trace=True,
    )
    from .grids import decode

    for trace in result.traces or []:
        out.write(f"mask_t{trace.t:04d}.pgm", write_map_bytes(trace.mask.astype(np.float64)))
        src_img = decode(trace.source_part, spec.encoder)
        res_img = decode(trace.residue_part, spec.encoder)
        suffix = "pgm" if src_img.shape[0] == 1 else "ppm"
        out.write(f"source_region_t{trace.t:04d}.{suffix}", write_pnm_bytes(src_img))
        out.write(f"residue_region_t{trace.t:04d}.{suffix}", write_pnm_bytes(res_img))
    out.write_json("steps.json", {"steps": result.steps})
    out.finish(cfg)
    return 0


def cmd_bound_check(args) -> int:
    spec, cfg = _load(args)
    if args.world is not None:
        from .runconfig import load_world_ref

        spec.world = load_world_ref(args.world, "world", Path.cwd())
    out = _OutDir(Path(args.out))
    bound_cfg = spec.bound
    t_ds = int(bound_cfg.get("t_ds", spec.params.t_ds_max))
    p_tail = float(bound_cfg.get("p_tail", 0.5))
    n_runs = int(bound_cfg.get("n_runs", 200))
    b_samples = int(bound_cfg.get("b_samples", 16))
    z1 = encode(spec.source, spec.encoder)
    z2 = encode(spec.exemplars[0], spec.encoder)
    from .grids import downsample_map

    mu_d = downsample_map(spec.maps[0], spec.encoder.factor)
    z_surgical = surgical_blend(z1, z2, mask_at(mu_d, 0.5))
    report = verify_bound(
        spec.world, z_surgical, t_ds, spec.params.schedule(),
        p_tail, n_runs, seed=spec.params.seed, b_samples=b_samples,
    )
    out.write_json("bound_report.json", report.to_json())
    out.finish(cfg)
    return 0


def cmd_sweep_tds(args) -> int:
    spec, cfg = _load(args)
    out = _OutDir(Path(args.out))
    floor = spec.sweep.get("realism_floor")
    if floor is None:
        floor = default_realism_floor(
            [spec.source] + spec.exemplars, spec.world, spec.encoder
        )
    floor = float(floor)
    fixed_tds = spec.sweep.get("fixed_tds")
    if fixed_tds is None:
        fixed_tds = round(0.2 * spec.params.T)
    fixed_tds = int(fixed_tds)

    z1 = encode(spec.source, spec.encoder)

    def run_one(i: int):
        exemplar, mu = spec.exemplars[i], spec.maps[i]
        dist = latent_distance(z1, encode(exemplar, spec.encoder))
        rec = recommend_tds(
            spec.source, exemplar, mu, spec.world, spec.encoder, floor, spec.params
        )
        rows = []
        for setting, t_ds in (("recommended", rec.t_ds), ("fixed", fixed_tds)):
            params = EditParams(
                T=spec.params.T, t_ds_max=t_ds, threshold=spec.params.threshold,
                mode=spec.params.mode, seed=spec.params.seed,
                sigma_min=spec.params.sigma_min, sigma_max=spec.params.sigma_max,
            )
            result = progressive_edit(
                spec.source, exemplar, mu, params, spec.world, spec.encoder
            )
            adh = adherence(result.output, spec.source, exemplar, mu)
            rows.append({
                "exemplar_index": i,
                "latent_distance": dist,
                "setting": setting,
                "t_ds": t_ds,
                "floor_reached": rec.reached if setting == "recommended" else "",
                "adherence_source": adh.source,
                "adherence_exemplar": adh.exemplar,
                "realism": realism_proxy(result.output, spec.world, spec.encoder),
            })
        return rows

    indices = range(len(spec.exemplars))
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            per_exemplar = list(pool.map(run_one, indices))
    else:
        per_exemplar = [run_one(i) for i in indices]

    fieldnames = [
        "exemplar_index", "latent_distance", "setting", "t_ds", "floor_reached",
        "adherence_source", "adherence_exemplar", "realism",
    ]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for rows in per_exemplar:
        for row in rows:
            writer.writerow(row)
    out.write("sweep.csv", buf.getvalue().encode())
    out.write_json("sweep_meta.json", {"realism_floor": floor, "fixed_tds": fixed_tds,
                                       "grid": tds_grid(spec.params.T)})
    out.finish(cfg)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="progedit",
        description="Progressive exemplar-driven latent editing on analytic score worlds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run config JSON path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--workers", type=int, default=1, help="worker pool size")

    p = sub.add_parser("edit", help="single-exemplar progressive edit")
    common(p)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("multi-edit", help="single-pass edit with all exemplars")
    common(p)
    p.set_defaults(func=cmd_multi_edit)

    p = sub.add_parser("iterate", help="one exemplar per pass, feeding outputs forward")
    common(p)
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("baseline", help="run a reference baseline")
    p.add_argument("kind", choices=["naive", "spatial-noise"])
    common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("schedule-viz", help="emit per-step mask/region decompositions")
    common(p)
    p.set_defaults(func=cmd_schedule_viz)

    p = sub.add_parser("bound-check", help="Monte-Carlo verification of the traversal bound")
    common(p)
    p.add_argument("--world", default=None, help="world JSON path (overrides config)")
    p.set_defaults(func=cmd_bound_check)

    p = sub.add_parser("sweep-tds", help="denoising-strength recommendation sweep")
    common(p)
    p.set_defaults(func=cmd_sweep_tds)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(exc.kind, exc.path, exc.message)
    except (OSError, ValueError, KeyError) as exc:
        print(json.dumps({"error": {"kind": "internal", "path": "", "message": str(exc)}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
