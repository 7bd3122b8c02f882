"""FastAPI service exposing the imaging pipeline.

Every endpoint that completes writes its machine-readable outputs (dataset
container, CSV/PGM/JSON image exports, JSON reports) before responding, so
a 2xx response guarantees the artifacts exist.  Domain errors (bad files,
invalid parameter combinations) map to HTTP 400 with a one-line detail.
"""

from __future__ import annotations

import hashlib
import time

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..beamform import BeamformerKind, image
from ..bench import parse_mode, records_to_csv, run_bench
from ..coarse2fine import (
    FrameworkConfig,
    breast_mask,
    consistency_check,
    run_framework,
)
from ..geometry import ring_array
from ..io import (
    DatasetFormatError,
    export_energy_map,
    load_dataset,
    save_dataset,
    save_json,
)
from ..presets import grid_for_geometry, preset_phantom
from ..simulate import Phantom, Pulse, simulate
from .schemas import (
    BenchRequest,
    BenchResponse,
    CheckRequest,
    CheckResponse,
    FrameworkRequest,
    FrameworkResponse,
    HealthResponse,
    ImageRequest,
    ImageResponse,
    RunConfig,
    SimulateRequest,
    SimulateResponse,
)


def _load(path: str):
    try:
        return load_dataset(path)
    except FileNotFoundError:
        raise HTTPException(status_code=400, detail=f"dataset not found: {path}")
    except DatasetFormatError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _config(req) -> FrameworkConfig:
    return FrameworkConfig(
        frame_fraction=req.frame_fraction,
        n_min=req.n_min,
        min_tumor_diameter=req.min_tumor_diameter,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="mwbeam", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(name="mwbeam", version=__version__)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
        try:
            if req.preset is not None:
                phantom = preset_phantom(req.preset)
            else:
                phantom = Phantom(
                    radius=req.phantom_radius,
                    tumor_center=req.tumor_center or (0.0, 0.0),
                    tumor_diameter=req.tumor_diameter,
                    tumor_contrast=req.tumor_contrast,
                )
            geom = ring_array(
                req.n_antennas,
                req.ring_radius if req.ring_radius is not None else phantom.radius,
                phantom.center,
                req.propagation_speed,
                req.sample_interval,
            )
            pulse = Pulse(req.center_frequency, req.envelope_width, req.pulse_duration)
            ds = simulate(
                phantom,
                geom,
                pulse,
                n_samples=req.n_samples,
                noise_std=req.noise_std,
                seed=req.seed,
                scatterers=[] if req.tumor_free else None,
            )
            save_dataset(ds, req.output)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        digest = hashlib.sha256(open(req.output, "rb").read()).hexdigest()
        report_path = req.output + ".json"
        meta = {
            "output": req.output,
            "preset": req.preset,
            "n_antennas": ds.n_antennas,
            "n_samples": ds.n_samples,
            "sample_interval": geom.sample_interval,
            "t0": ds.t0,
            "propagation_speed": geom.propagation_speed,
            "noise_std": req.noise_std,
            "seed": req.seed,
            "tumor_free": req.tumor_free,
            "sha256": digest,
        }
        save_json(meta, report_path)
        return SimulateResponse(
            output=req.output,
            report=report_path,
            n_antennas=ds.n_antennas,
            n_samples=ds.n_samples,
            sample_interval=geom.sample_interval,
            t0=ds.t0,
            propagation_speed=geom.propagation_speed,
            sha256=digest,
        )

    @app.post("/image", response_model=ImageResponse)
    def image_endpoint(req: ImageRequest) -> ImageResponse:
        ds = _load(req.input)
        grid = grid_for_geometry(ds.geometry, req.resolution)
        mask = breast_mask(grid)
        kind = BeamformerKind.parse(req.kind)
        try:
            t0 = time.perf_counter()
            emap = image(ds, kind, grid, stride=1, mask=mask, threads=req.threads)
            elapsed = time.perf_counter() - t0
            paths = export_energy_map(emap, req.output)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        report_path = str(req.output) + ".report.json"
        payload = {
            "input": req.input,
            "kind": kind.value,
            "resolution": req.resolution,
            "points_evaluated": len(emap),
            "argmax_cell": list(emap.argmax_cell()),
            "argmax_position": list(emap.argmax_position()),
            "elapsed_s": elapsed,
            "paths": paths,
        }
        save_json(payload, report_path)
        paths["report"] = report_path
        return ImageResponse(
            paths=paths,
            report=report_path,
            argmax_cell=emap.argmax_cell(),
            argmax_position=emap.argmax_position(),
            points_evaluated=len(emap),
            elapsed_s=elapsed,
        )

    @app.post("/framework", response_model=FrameworkResponse)
    def framework_endpoint(req: FrameworkRequest) -> FrameworkResponse:
        ds = _load(req.input)
        grid = grid_for_geometry(ds.geometry, req.resolution)
        kind = BeamformerKind.parse(req.kind)
        try:
            mode = parse_mode(req.mode)
            if mode == "basic":
                raise ValueError("framework mode must be manual:D or auto:DIAM")
            composite, report = run_framework(
                ds, kind, grid, mode, _config(req), req.threads
            )
            paths = export_energy_map(composite, req.output)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        payload = report.to_dict()
        payload["input"] = req.input
        payload["config"] = RunConfig(
            kind=req.kind,
            mode=req.mode,
            frame_fraction=req.frame_fraction,
            n_min=req.n_min,
            min_tumor_diameter=req.min_tumor_diameter,
            resolution=req.resolution,
            extent=grid.extent,
            propagation_speed=ds.geometry.propagation_speed,
            threads=req.threads,
            output=str(req.output),
        ).model_dump()
        payload["paths"] = paths
        report_path = str(req.output) + ".report.json"
        save_json(payload, report_path)
        paths["report"] = report_path
        return FrameworkResponse(paths=paths, report=payload)

    @app.post("/check", response_model=CheckResponse)
    def check_endpoint(req: CheckRequest) -> CheckResponse:
        ds = _load(req.input)
        grid = grid_for_geometry(ds.geometry, req.resolution)
        kind = BeamformerKind.parse(req.kind)
        try:
            verdict, rep_a, rep_b = consistency_check(
                ds, kind, grid, req.d1, req.d2, _config(req), req.threads
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        detail = verdict.to_dict()
        detail["d1"] = req.d1
        detail["d2"] = req.d2
        detail["kind"] = kind.value
        detail["reports"] = [rep_a.to_dict(), rep_b.to_dict()]
        report_path = str(req.output) if req.output else req.input + ".check.json"
        save_json(detail, report_path)
        return CheckResponse(
            verdict="confirmed" if verdict.confirmed else "inconsistent",
            detail=detail,
            report=report_path,
        )

    @app.post("/bench", response_model=BenchResponse)
    def bench_endpoint(req: BenchRequest) -> BenchResponse:
        ds = _load(req.input)
        grid = grid_for_geometry(ds.geometry, req.resolution)
        try:
            kinds = [BeamformerKind.parse(k) for k in req.kinds]
            modes = [parse_mode(m) for m in req.modes]
            records = run_bench(
                ds, grid, kinds, modes, req.repeat, _config(req), req.threads
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        csv_text = records_to_csv(records)
        base = str(req.output) if req.output else req.input + ".bench"
        paths = {"csv": base + ".csv", "json": base + ".json"}
        with open(paths["csv"], "w", newline="\n") as fh:
            fh.write(csv_text)
        save_json({"records": [r.to_dict() for r in records]}, paths["json"])
        return BenchResponse(
            records=[r.to_dict() for r in records], csv=csv_text, paths=paths
        )

    return app
