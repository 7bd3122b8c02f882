"""Pydantic request/response models for the imaging service.

Lengths in request bodies are SI meters throughout; the CLI converts its
cm-denominated flags before building a request.  Paths refer to the
filesystem the service runs on (the CLI's own filesystem when it uses the
default in-process transport).
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RunConfig(BaseModel):
    """Resolved configuration of a run, echoed into reports.

    Round-trips losslessly through JSON (pydantic keeps float precision).
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["das", "dmas"] = "das"
    mode: str = "auto:0.01"
    frame_fraction: float = Field(0.25, ge=0.0, lt=1.0)
    n_min: int = Field(4, ge=1)
    min_tumor_diameter: float = Field(0.01, gt=0)
    resolution: float = Field(0.001, gt=0)
    extent: Optional[tuple[float, float]] = None
    propagation_speed: float = Field(2.99792458e8, gt=0)
    seed: int = 0
    threads: int = Field(1, ge=1)
    output: Optional[str] = None


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    preset: Optional[Literal["dataset1", "dataset2"]] = None
    phantom_radius: Optional[float] = Field(None, gt=0)
    tumor_center: Optional[tuple[float, float]] = None
    tumor_diameter: float = Field(0.01, gt=0)
    tumor_contrast: float = Field(1.0, gt=0)
    tumor_free: bool = False
    n_antennas: int = Field(12, ge=2)
    ring_radius: Optional[float] = Field(None, gt=0)
    center_frequency: float = Field(4e9, gt=0)
    envelope_width: float = Field(100e-12, gt=0)
    pulse_duration: float = Field(600e-12, gt=0)
    sample_interval: float = Field(1e-11, gt=0)
    propagation_speed: float = Field(2.99792458e8, gt=0)
    n_samples: int = Field(256, ge=8)
    noise_std: float = Field(0.0, ge=0)
    seed: int = 0
    output: str

    @model_validator(mode="after")
    def _preset_or_phantom(self):
        if self.preset is None and self.phantom_radius is None:
            raise ValueError("either preset or phantom_radius is required")
        return self


class SimulateResponse(BaseModel):
    output: str
    report: str
    n_antennas: int
    n_samples: int
    sample_interval: float
    t0: float
    propagation_speed: float
    sha256: str


class ImageRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input: str
    kind: Literal["das", "dmas"] = "das"
    resolution: float = Field(0.001, gt=0)
    threads: int = Field(1, ge=1)
    output: str


class ImageResponse(BaseModel):
    paths: dict[str, str]
    report: str
    argmax_cell: tuple[int, int]
    argmax_position: tuple[float, float]
    points_evaluated: int
    elapsed_s: float


class FrameworkRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input: str
    kind: Literal["das", "dmas"] = "das"
    mode: str = "auto:0.01"
    frame_fraction: float = Field(0.25, ge=0.0, lt=1.0)
    n_min: int = Field(4, ge=1)
    min_tumor_diameter: float = Field(0.01, gt=0)
    resolution: float = Field(0.001, gt=0)
    threads: int = Field(1, ge=1)
    output: str


class FrameworkResponse(BaseModel):
    paths: dict[str, str]
    report: dict


class CheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input: str
    kind: Literal["das", "dmas"] = "das"
    d1: int = Field(..., ge=1)
    d2: int = Field(..., ge=1)
    frame_fraction: float = Field(0.25, ge=0.0, lt=1.0)
    n_min: int = Field(4, ge=1)
    min_tumor_diameter: float = Field(0.01, gt=0)
    resolution: float = Field(0.001, gt=0)
    threads: int = Field(1, ge=1)
    output: Optional[str] = None


class CheckResponse(BaseModel):
    verdict: Literal["confirmed", "inconsistent"]
    detail: dict
    report: Optional[str] = None


class BenchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input: str
    kinds: list[Literal["das", "dmas"]] = ["das", "dmas"]
    modes: list[str] = ["basic", "auto:0.01"]
    repeat: int = Field(3, ge=1)
    frame_fraction: float = Field(0.25, ge=0.0, lt=1.0)
    n_min: int = Field(4, ge=1)
    min_tumor_diameter: float = Field(0.01, gt=0)
    resolution: float = Field(0.001, gt=0)
    threads: int = Field(1, ge=1)
    output: Optional[str] = None


class BenchResponse(BaseModel):
    records: list[dict]
    csv: str
    paths: dict[str, str]


class HealthResponse(BaseModel):
    name: str
    version: str
