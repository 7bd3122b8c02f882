"""Benchmark harness comparing basic, manual and automatic runs.

Timings are wall clock around kernel passes only (no file I/O), reported as
the median over the requested repeats.  Reduction ratios come from evaluated
point counts; the basic (full-resolution) run is the reference with ratio 1.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .beamform import BeamformerKind, image
from .coarse2fine import (
    Automatic,
    DecimationMode,
    FrameworkConfig,
    Manual,
    breast_mask,
    run_framework,
)
from .geometry import ImagingGrid
from .simulate import BackscatterDataset


@dataclass
class BenchRecord:
    label: str
    kind: str
    mode: str
    repeat: int
    elapsed_s: float
    iterations: int
    points_evaluated: int
    reduction_ratio: float
    detected_cell: tuple[int, int]
    detected_position: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "mode": self.mode,
            "repeat": self.repeat,
            "elapsed_s": self.elapsed_s,
            "iterations": self.iterations,
            "points_evaluated": self.points_evaluated,
            "reduction_ratio": self.reduction_ratio,
            "detected_cell": list(self.detected_cell),
            "detected_position": list(self.detected_position),
        }


CSV_HEADER = (
    "label,kind,mode,repeat,elapsed_s,iterations,points_evaluated,"
    "reduction_ratio,cell_ix,cell_iy,pos_x,pos_y"
)


def records_to_csv(records: list[BenchRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.label},{r.kind},{r.mode},{r.repeat},{r.elapsed_s!r},"
            f"{r.iterations},{r.points_evaluated},{r.reduction_ratio!r},"
            f"{r.detected_cell[0]},{r.detected_cell[1]},"
            f"{r.detected_position[0]!r},{r.detected_position[1]!r}"
        )
    return "\n".join(lines) + "\n"


def parse_mode(text: str) -> str | DecimationMode:
    """Parse ``basic``, ``manual:D`` or ``auto:DIAMETER`` (meters)."""
    s = text.strip().lower()
    if s == "basic":
        return "basic"
    if s.startswith("manual:"):
        return Manual(int(s.split(":", 1)[1]))
    if s.startswith("auto:"):
        return Automatic(float(s.split(":", 1)[1]))
    raise ValueError(f"unknown mode: {text!r} (expected basic, manual:D or auto:DIAM)")


def mode_label(mode: str | DecimationMode) -> str:
    if mode == "basic":
        return "basic"
    if isinstance(mode, Manual):
        return f"manual:{mode.factor}"
    return f"auto:{mode.min_tumor_diameter:g}"


def run_bench(
    ds: BackscatterDataset,
    grid: ImagingGrid,
    kinds: list[BeamformerKind],
    modes: list[str | DecimationMode],
    repeat: int = 3,
    cfg: FrameworkConfig = FrameworkConfig(),
    threads: int = 1,
) -> list[BenchRecord]:
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    mask = breast_mask(grid)
    records = []
    for kind in kinds:
        for mode in modes:
            if mode == "basic":
                times = []
                for _ in range(repeat):
                    t0 = time.perf_counter()
                    emap = image(ds, kind, grid, stride=1, mask=mask, threads=threads)
                    times.append(time.perf_counter() - t0)
                records.append(
                    BenchRecord(
                        label=f"basic {kind.value}",
                        kind=kind.value,
                        mode="basic",
                        repeat=repeat,
                        elapsed_s=statistics.median(times),
                        iterations=0,
                        points_evaluated=len(emap),
                        reduction_ratio=1.0,
                        detected_cell=emap.argmax_cell(),
                        detected_position=emap.argmax_position(),
                    )
                )
            else:
                times = []
                for _ in range(repeat):
                    composite, report = run_framework(ds, kind, grid, mode, cfg, threads)
                    times.append(report.elapsed["total"])
                records.append(
                    BenchRecord(
                        label=f"{mode_label(mode)} {kind.value}",
                        kind=kind.value,
                        mode=mode_label(mode),
                        repeat=repeat,
                        elapsed_s=statistics.median(times),
                        iterations=report.iterations,
                        points_evaluated=report.coarse_points_evaluated
                        + report.fine_points_evaluated,
                        reduction_ratio=report.reduction_ratio,
                        detected_cell=report.argmax_cell,
                        detected_position=report.argmax_position,
                    )
                )
    return records
