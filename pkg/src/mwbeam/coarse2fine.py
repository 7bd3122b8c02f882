"""Coarse-to-fine focal-point decimation framework.

Three phases: (1) beamform a decimated lattice of focal points over the
breast disc, (2) iteratively quadrant-subdivide the region, scoring each
quadrant with a mean/variance decision metric and keeping within/between
class distances of consecutive selections as the stopping test, (3) re-image
the final region of interest at full resolution and composite it over the
coarse background.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .beamform import BeamformerKind, EnergyMap, image
from .geometry import ImagingGrid, Region
from .simulate import BackscatterDataset


@dataclass(frozen=True)
class Manual:
    """Fixed spatial decimation factor."""

    factor: int

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("manual decimation factor must be >= 1")


@dataclass(frozen=True)
class Automatic:
    """Decimation derived from the smallest tumor diameter to detect."""

    min_tumor_diameter: float

    def __post_init__(self):
        if not self.min_tumor_diameter > 0:
            raise ValueError("min_tumor_diameter must be > 0")


DecimationMode = Manual | Automatic


def auto_decimation_factor(min_tumor_diameter: float, resolution: float) -> int:
    """Largest stride that cannot skip over a tumor of the given diameter.

    A circular tumor of diameter d contains an axis-aligned square of side
    d / sqrt(2); sampling at that pitch (in cells) guarantees at least one
    coarse focal point inside the tumor.
    """
    if not (min_tumor_diameter > 0 and resolution > 0):
        raise ValueError("min_tumor_diameter and resolution must be > 0")
    return max(1, math.floor((min_tumor_diameter / math.sqrt(2.0)) / resolution))


def decimation_factor(mode: DecimationMode, resolution: float) -> int:
    if isinstance(mode, Manual):
        return mode.factor
    return auto_decimation_factor(mode.min_tumor_diameter, resolution)


def decision_metric(energies_current, sigma_prev_sq: float) -> float:
    """Blend of quadrant mean and variance, Delta-weighted by the variance
    change against the previously selected region (Delta clamped to [0, 1];
    zero variance falls back to the mean)."""
    value, _ = _metric_parts(np.asarray(energies_current, dtype=np.float64), sigma_prev_sq)
    return value


def _metric_parts(vals: np.ndarray, sigma_prev_sq: float) -> tuple[float, dict]:
    if vals.size == 0:
        raise ValueError("decision_metric needs a nonempty value set")
    mu = float(vals.mean())
    var = float(vals.var())
    if var == 0.0:
        return mu, {"mu": mu, "var": var, "delta_raw": 0.0, "delta": 0.0, "clamped": False}
    delta_raw = (var - sigma_prev_sq) / var
    delta = min(max(delta_raw, 0.0), 1.0)
    value = (1.0 - delta) * mu + delta * var
    return value, {
        "mu": mu,
        "var": var,
        "delta_raw": delta_raw,
        "delta": delta,
        "clamped": delta != delta_raw,
    }


def class_distances(class_a, class_b) -> tuple[float, float]:
    """Within-class (W) and between-class (B) scatter of two value sets.

    Values are scalar energies, so the outer products reduce to squares:
    W sums squared deviations from each class mean, B sums count-weighted
    squared deviations of the class means from the pooled mean.
    """
    a = np.asarray(class_a, dtype=np.float64)
    b = np.asarray(class_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("class_distances needs nonempty classes")
    ma, mb = a.mean(), b.mean()
    w = float(((a - ma) ** 2).sum() + ((b - mb) ** 2).sum())
    grand = np.concatenate([a, b]).mean()
    bdist = float(a.size * (ma - grand) ** 2 + b.size * (mb - grand) ** 2)
    return w, bdist


@dataclass(frozen=True)
class FrameworkConfig:
    frame_fraction: float = 0.25
    n_min: int = 4
    min_tumor_diameter: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.frame_fraction < 1.0:
            raise ValueError("frame_fraction must be in [0, 1)")
        if self.n_min < 1:
            raise ValueError("n_min must be >= 1")
        if not self.min_tumor_diameter > 0:
            raise ValueError("min_tumor_diameter must be > 0")


@dataclass
class IterationRecord:
    iteration: int
    quadrant_counts: list[int]
    scores: list[float]
    stats: list[dict | None]
    selected: int
    selected_region: Region
    expanded_region: Region
    w: float
    b: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "quadrant_counts": self.quadrant_counts,
            "scores": self.scores,
            "stats": self.stats,
            "selected": self.selected,
            "selected_region": self.selected_region.to_dict(),
            "expanded_region": self.expanded_region.to_dict(),
            "W": self.w,
            "B": self.b,
            "satisfied": self.satisfied,
        }


@dataclass
class MetricTrace:
    records: list[IterationRecord] = field(default_factory=list)
    termination: str = ""
    warning: str | None = None

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "termination": self.termination,
            "warning": self.warning,
        }


def select_roi(
    coarse: EnergyMap, breast_region: Region, cfg: FrameworkConfig = FrameworkConfig()
) -> tuple[Region, MetricTrace]:
    """Iterative quadrant selection of the most tumor-like region.

    Each iteration subdivides the current selection into 4 quadrants (ties
    broken toward the lowest quadrant index), scores them on their coarse
    energies (pure variance on the first iteration, the decision metric
    afterwards), expands the winner by the sliding-frame fraction clipped to
    its parent, and evaluates (W, B) between the previous and the new
    selection.  Iteration stops when neither distance metric improves (B
    fails to increase and W fails to decrease), when the winning quadrant
    holds fewer than ``n_min`` coarse points, or when the region cannot be
    subdivided further; the last selection that satisfied the criteria is
    returned.
    """
    trace = MetricTrace()
    vals = coarse.values_in(breast_region)
    if vals.size == 0:
        raise ValueError("coarse map has no entries in the breast region")
    if vals.max() == vals.min():
        trace.termination = "degenerate"
        trace.warning = "energy map has no discriminating signal"
        return breast_region, trace

    sel = breast_region
    sel_vals = vals
    sigma_prev_sq = float(vals.var())
    prev_w: float | None = None
    prev_b: float | None = None
    iteration = 0

    while True:
        quads = sel.quadrants()
        if quads is None:
            trace.termination = "region-floor"
            return sel, trace

        scores: list[float] = []
        stats: list[dict | None] = []
        counts: list[int] = []
        qvals: list[np.ndarray] = []
        for q in quads:
            v = coarse.values_in(q)
            qvals.append(v)
            counts.append(int(v.size))
            if v.size == 0:
                scores.append(-np.inf)
                stats.append(None)
            elif iteration == 0:
                scores.append(float(v.var()))
                stats.append({"mu": float(v.mean()), "var": float(v.var())})
            else:
                value, parts = _metric_parts(v, sigma_prev_sq)
                scores.append(value)
                stats.append(parts)

        selected = int(np.argmax(scores))
        if counts[selected] < cfg.n_min:
            trace.termination = "n-min"
            return sel, trace

        iteration += 1
        expanded = quads[selected].expand(cfg.frame_fraction, sel)
        new_vals = coarse.values_in(expanded)
        w, b = class_distances(sel_vals, new_vals)
        satisfied = prev_w is None or (b > prev_b or w < prev_w)
        trace.records.append(
            IterationRecord(
                iteration=iteration,
                quadrant_counts=counts,
                scores=[float(s) for s in scores],
                stats=stats,
                selected=selected,
                selected_region=quads[selected],
                expanded_region=expanded,
                w=w,
                b=b,
                satisfied=satisfied,
            )
        )
        if not satisfied:
            trace.termination = "distance-metrics"
            return sel, trace

        sigma_prev_sq = float(new_vals.var())
        sel, sel_vals = expanded, new_vals
        prev_w, prev_b = w, b


def breast_mask(grid: ImagingGrid) -> np.ndarray:
    """Boolean mask of cells whose centers lie inside the circle inscribed
    in the grid (the phantom disc for a phantom-bounding grid)."""
    nx, ny = grid.dims
    cx, cy = grid.center()
    radius = min(nx, ny) * grid.resolution / 2.0
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    px = grid.origin[0] + (ix + 0.5) * grid.resolution
    py = grid.origin[1] + (iy + 0.5) * grid.resolution
    return (px - cx) ** 2 + (py - cy) ** 2 <= radius**2


@dataclass
class FrameworkReport:
    decimation_factor: int
    iterations: int
    final_region: Region
    coarse_points_evaluated: int
    fine_points_evaluated: int
    full_equivalent_points: int
    reduction_ratio: float
    elapsed: dict[str, float]
    trace: MetricTrace
    argmax_cell: tuple[int, int]
    argmax_position: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "decimation_factor": self.decimation_factor,
            "iterations": self.iterations,
            "final_region": self.final_region.to_dict(),
            "coarse_points_evaluated": self.coarse_points_evaluated,
            "fine_points_evaluated": self.fine_points_evaluated,
            "full_equivalent_points": self.full_equivalent_points,
            "reduction_ratio": self.reduction_ratio,
            "elapsed": self.elapsed,
            "trace": self.trace.to_dict(),
            "argmax_cell": list(self.argmax_cell),
            "argmax_position": list(self.argmax_position),
        }


def run_framework(
    ds: BackscatterDataset,
    kind: BeamformerKind,
    grid: ImagingGrid,
    mode: DecimationMode,
    cfg: FrameworkConfig = FrameworkConfig(),
    threads: int = 1,
) -> tuple[EnergyMap, FrameworkReport]:
    """Coarse pass, ROI selection, full-resolution pass, composite."""
    d = decimation_factor(mode, grid.resolution)
    region = grid.full_region()
    mask = breast_mask(grid)

    t0 = time.perf_counter()
    coarse = image(ds, kind, grid, region, d, mask, threads)
    t1 = time.perf_counter()
    if not coarse.entries:
        raise ValueError("no coarse focal points inside the breast mask")
    final_region, trace = select_roi(coarse, region, cfg)
    t2 = time.perf_counter()
    fine = image(
        ds, kind, grid, final_region, 1, mask, threads, skip=set(coarse.entries)
    )
    t3 = time.perf_counter()

    entries = dict(coarse.entries)
    entries.update(fine.entries)
    composite = EnergyMap(grid, entries, stride=d, roi=final_region)

    full_equivalent = int(mask.sum())
    evaluated = len(coarse) + len(fine)
    report = FrameworkReport(
        decimation_factor=d,
        iterations=len(trace.records),
        final_region=final_region,
        coarse_points_evaluated=len(coarse),
        fine_points_evaluated=len(fine),
        full_equivalent_points=full_equivalent,
        reduction_ratio=full_equivalent / evaluated,
        elapsed={
            "coarse": t1 - t0,
            "select": t2 - t1,
            "fine": t3 - t2,
            "total": t3 - t0,
        },
        trace=trace,
        argmax_cell=composite.argmax_cell(),
        argmax_position=composite.argmax_position(),
    )
    return composite, report


@dataclass
class CheckVerdict:
    """Outcome of running the framework with two decimation factors."""

    confirmed: bool
    overlap: Region | None
    region_a: Region
    region_b: Region

    def to_dict(self) -> dict:
        return {
            "confirmed": self.confirmed,
            "overlap": self.overlap.to_dict() if self.overlap else None,
            "region_a": self.region_a.to_dict(),
            "region_b": self.region_b.to_dict(),
        }


def consistency_check(
    ds: BackscatterDataset,
    kind: BeamformerKind,
    grid: ImagingGrid,
    d1: int,
    d2: int,
    cfg: FrameworkConfig = FrameworkConfig(),
    threads: int = 1,
) -> tuple[CheckVerdict, FrameworkReport, FrameworkReport]:
    """Confirmed when the two final regions overlap, else Inconsistent.

    Both factors must differ and stay within the acceptable range, i.e. at
    most the automatic factor for the configured minimum tumor diameter.
    """
    if d1 == d2:
        raise ValueError("consistency check needs two different decimation factors")
    limit = auto_decimation_factor(cfg.min_tumor_diameter, grid.resolution)
    for dd in (d1, d2):
        if dd < 1 or dd > limit:
            raise ValueError(
                f"decimation factor {dd} outside acceptable range [1, {limit}]"
            )
    _, rep_a = run_framework(ds, kind, grid, Manual(d1), cfg, threads)
    _, rep_b = run_framework(ds, kind, grid, Manual(d2), cfg, threads)
    inter = rep_a.final_region.intersection(rep_b.final_region)
    verdict = CheckVerdict(
        confirmed=inter is not None,
        overlap=inter,
        region_a=rep_a.final_region,
        region_b=rep_b.final_region,
    )
    return verdict, rep_a, rep_b
