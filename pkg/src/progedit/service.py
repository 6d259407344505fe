"""HTTP facade over the scheduler for the interactive map-painting UI.

Jobs are submitted as JSON run configs with base64-encoded pixmaps, run on
a small worker pool, and polled by id; per-step masks and the result are
fetched as raw pixmap bytes. Everything is in-memory and process-local.

    POST /v1/edits              submit (202, returns job id)
    GET  /v1/edits/{id}         job state + links
    GET  /v1/edits/{id}/result  result pixmap bytes (P5/P6)
    GET  /v1/edits/{id}/steps/{t}  mask graymap bytes (P5)
    GET  /v1/thresholds         threshold curve catalog (n=100 + AUC)
    GET  /v1/worlds             bundled fixture worlds
    GET  /v1/worlds/{name}      full world document
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .fixtures import FIXTURE_WORLDS, fixture_world
from .pnm import write_map_bytes, write_pnm_bytes
from .runconfig import ConfigError, load_run_spec
from .scheduler import (
    THRESHOLD_KINDS,
    iterative_edit,
    naive_blend_baseline,
    progressive_edit,
    progressive_edit_multi,
    spatial_noise_baseline,
    threshold_auc,
    threshold_curve,
)

__all__ = ["create_app"]

THRESHOLD_SAMPLES = 100

_OPS = ("edit", "multi-edit", "iterate", "baseline-naive", "baseline-spatial")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class _Job:
    id: str
    state: str = "queued"  # queued -> running -> done | failed
    step: int = 0
    total_steps: int = 0
    error: str | None = None
    result_bytes: bytes | None = None
    result_channels: int = 1
    masks: dict[int, bytes] = field(default_factory=dict)
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "state": self.state,
            "created": self.created,
            "updated": self.updated,
        }
        if self.state == "running":
            doc["step"] = self.step
            doc["total_steps"] = self.total_steps
        if self.state == "failed":
            doc["reason"] = self.error
        if self.state == "done":
            doc["links"] = {
                "result": f"/v1/edits/{self.id}/result",
                "steps": [f"/v1/edits/{self.id}/steps/{t}" for t in sorted(self.masks, reverse=True)],
            }
        return doc


def create_app(workers: int = 2, retain_cap: int = 64) -> FastAPI:
    """Build the service app; `retain_cap` bounds per-job retained masks."""
    app = FastAPI(title="progedit service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    jobs: dict[str, _Job] = {}
    idempotency: dict[str, str] = {}
    lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=workers)

    def _run_job(job_id: str, spec, op: str) -> None:
        with lock:
            job = jobs[job_id]
            job.state = "running"
            job.updated = _now()

        def on_step(i: int, n: int, t: int) -> None:
            with lock:
                job.step = i
                job.total_steps = n
                job.updated = _now()

        try:
            pairs = list(zip(spec.exemplars, spec.maps))
            kwargs = {"retain_masks": spec.retain_steps}
            if op == "edit":
                result = progressive_edit(
                    spec.source, spec.exemplars[0], spec.maps[0],
                    spec.params, spec.world, spec.encoder,
                    on_step=on_step, **kwargs,
                )
            elif op == "multi-edit":
                result = progressive_edit_multi(
                    spec.source, pairs, spec.params, spec.world, spec.encoder,
                    on_step=on_step, **kwargs,
                )
            elif op == "iterate":
                result = iterative_edit(
                    spec.source, pairs, spec.params, spec.world, spec.encoder, **kwargs
                )
            elif op == "baseline-naive":
                result = naive_blend_baseline(
                    spec.source, spec.exemplars[0], spec.maps[0],
                    spec.params, spec.world, spec.encoder, **kwargs,
                )
            else:
                result = spatial_noise_baseline(
                    spec.source, spec.exemplars[0], spec.maps[0],
                    spec.params, spec.world, spec.encoder, **kwargs,
                )
            result_bytes = write_pnm_bytes(result.output)
            masks: dict[int, bytes] = {}
            if result.per_step_masks is not None:
                for t, mask in list(zip(result.steps, result.per_step_masks))[:retain_cap]:
                    masks[t] = write_map_bytes(mask.astype(np.float64))
            with lock:
                job.result_bytes = result_bytes
                job.result_channels = result.output.shape[0]
                job.masks = masks
                job.state = "done"
                job.updated = _now()
        except Exception as exc:  # failure is a terminal job state, not a 500
            with lock:
                job.state = "failed"
                job.error = str(exc)
                job.updated = _now()

    @app.exception_handler(ConfigError)
    async def _config_error(request, exc: ConfigError):
        return JSONResponse(
            status_code=400,
            content={"detail": [exc.to_json()]},
        )

    @app.post("/v1/edits", status_code=202)
    async def submit_edit(body: dict):
        if not isinstance(body, dict):
            raise ConfigError("schema", "", "body must be a JSON object")
        op = body.get("op", None)
        key = body.get("idempotency_key")
        if key is not None:
            with lock:
                existing = idempotency.get(key)
            if existing is not None:
                with lock:
                    return {"id": existing, "state": jobs[existing].state}
        cfg = {k: v for k, v in body.items() if k not in ("op", "idempotency_key")}
        spec = load_run_spec(cfg, base_dir=None)
        if op is None:
            op = "edit" if len(spec.exemplars) == 1 else "multi-edit"
        if op not in _OPS:
            raise ConfigError("value", "op", f"unknown op {op!r}; have {_OPS}")
        job_id = uuid.uuid4().hex
        job = _Job(id=job_id)
        with lock:
            jobs[job_id] = job
            if key is not None:
                idempotency[key] = job_id
        pool.submit(_run_job, job_id, spec, op)
        return {"id": job_id, "state": "queued"}

    def _get_job(job_id: str) -> _Job:
        with lock:
            job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        return job

    @app.get("/v1/edits/{job_id}")
    async def get_job(job_id: str):
        with lock:
            job = jobs.get(job_id)
            if job is None:
                raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
            return job.to_json()

    @app.get("/v1/edits/{job_id}/result")
    async def get_result(job_id: str):
        job = _get_job(job_id)
        with lock:
            if job.state != "done" or job.result_bytes is None:
                raise HTTPException(status_code=404, detail=f"job {job_id} has no result yet")
            media = (
                "image/x-portable-graymap"
                if job.result_channels == 1
                else "image/x-portable-pixmap"
            )
            return Response(content=job.result_bytes, media_type=media)

    @app.get("/v1/edits/{job_id}/steps/{t}")
    async def get_step_mask(job_id: str, t: int):
        job = _get_job(job_id)
        with lock:
            data = job.masks.get(t)
        if data is None:
            raise HTTPException(
                status_code=404,
                detail=f"no retained mask for step {t} of job {job_id}",
            )
        return Response(content=data, media_type="image/x-portable-graymap")

    @app.get("/v1/thresholds")
    async def list_thresholds():
        n = THRESHOLD_SAMPLES
        return {
            "n": n,
            "kinds": [
                {
                    "kind": kind,
                    "values": threshold_curve(kind, n),
                    "auc": threshold_auc(kind, n),
                }
                for kind in THRESHOLD_KINDS
            ],
        }

    @app.get("/v1/worlds")
    async def list_worlds():
        out = []
        for name in sorted(FIXTURE_WORLDS):
            world = fixture_world(name)
            out.append({
                "name": name,
                "shape": list(world.shape),
                "n_components": world.n_components,
            })
        return {"worlds": out}

    @app.get("/v1/worlds/{name}")
    async def get_world(name: str):
        if name not in FIXTURE_WORLDS:
            raise HTTPException(status_code=404, detail=f"unknown world {name!r}")
        return fixture_world(name).to_json()

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the edit service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8321)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()
    uvicorn.run(create_app(workers=args.workers), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
