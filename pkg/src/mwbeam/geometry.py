"""Antenna-array and imaging-grid geometry.

Round-trip propagation delays are expressed in (fractional) samples so that
beamforming kernels can index time series directly.  For a monostatic
channel the delay of a focal point ``r`` from antenna ``i`` is

    n_i(r) = |r - a_i| / (2 * v * dt)

and for a multistatic transmitter/receiver pair ``(i, j)``

    n_ij(r) = |r - a_i| / (v * dt) + |r - a_j| / (v * dt)

with ``v`` the propagation speed and ``dt`` the sampling interval.  The
factor 2 sits in the monostatic denominator, so ``n_ij(i, i) = 4 * n_i``;
both forms are implemented exactly as defined above.

Imaging is a 2-D slice at z = 0: focal points are (x, y) pairs, antenna
positions keep a z component that simply enters the Euclidean distance.
All quantities are SI (meters, seconds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8


@dataclass(frozen=True)
class ArrayGeometry:
    """Immutable antenna array description.

    Attributes:
        antennas: (M, 3) float array of antenna positions in meters.
        propagation_speed: assumed wave speed in m/s (defaults to c; use
            c / sqrt(eps_r) for an effective in-tissue speed).
        sample_interval: sampling interval dt in seconds.
    """

    antennas: np.ndarray
    propagation_speed: float = SPEED_OF_LIGHT
    sample_interval: float = 1e-11

    def __post_init__(self):
        ants = np.asarray(self.antennas, dtype=np.float64)
        if ants.ndim != 2 or ants.shape[1] != 3:
            raise ValueError("antennas must be an (M, 3) array")
        if ants.shape[0] < 2:
            raise ValueError("need at least 2 antennas")
        if not np.all(np.isfinite(ants)):
            raise ValueError("antenna positions must be finite")
        diff = ants[:, None, :] - ants[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        if np.any(dist == 0.0):
            raise ValueError("antenna positions must be pairwise distinct")
        if not self.propagation_speed > 0:
            raise ValueError("propagation_speed must be > 0")
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be > 0")
        ants.setflags(write=False)
        object.__setattr__(self, "antennas", ants)

    @property
    def n_antennas(self) -> int:
        return self.antennas.shape[0]


def ring_array(
    n: int,
    radius: float,
    center=(0.0, 0.0),
    propagation_speed: float = SPEED_OF_LIGHT,
    sample_interval: float = 1e-11,
) -> ArrayGeometry:
    """Place ``n`` antennas uniformly on a circle in the z = 0 plane.

    The first antenna sits at angle 0 (positive x axis from the center).
    """
    if n < 2:
        raise ValueError("ring_array needs n >= 2")
    if not radius > 0:
        raise ValueError("ring_array needs radius > 0")
    angles = 2.0 * np.pi * np.arange(n) / n
    ants = np.stack(
        [
            center[0] + radius * np.cos(angles),
            center[1] + radius * np.sin(angles),
            np.zeros(n),
        ],
        axis=1,
    )
    return ArrayGeometry(ants, propagation_speed, sample_interval)


def _focal_point(r) -> np.ndarray:
    p = np.asarray(r, dtype=np.float64)
    if p.shape == (2,):
        p = np.array([p[0], p[1], 0.0])
    if p.shape != (3,):
        raise ValueError("focal point must be a 2- or 3-vector")
    return p


def distance(geom: ArrayGeometry, i: int, r) -> float:
    """Euclidean distance from antenna ``i`` to focal point ``r``."""
    p = _focal_point(r)
    a = geom.antennas[i]
    dx = p[0] - a[0]
    dy = p[1] - a[1]
    dz = p[2] - a[2]
    return float(np.sqrt(dx * dx + dy * dy + dz * dz))


def delay_monostatic(geom: ArrayGeometry, i: int, r) -> float:
    """Monostatic delay of focal point ``r`` for antenna ``i``, in samples."""
    return distance(geom, i, r) / (2.0 * geom.propagation_speed * geom.sample_interval)


def delay_multistatic(geom: ArrayGeometry, i: int, j: int, r) -> float:
    """Multistatic delay for transmitter ``i`` and receiver ``j``, in samples."""
    scale = geom.propagation_speed * geom.sample_interval
    return distance(geom, i, r) / scale + distance(geom, j, r) / scale


@dataclass(frozen=True)
class ImagingGrid:
    """Uniform 2-D grid of focal points.

    Cell ``(ix, iy)`` has its center at ``origin + (ix + 0.5, iy + 0.5) *
    resolution``.  ``dims`` is derived from ``extent`` by rounding up, so the
    grid always covers the requested extent.
    """

    origin: tuple[float, float]
    extent: tuple[float, float]
    resolution: float
    dims: tuple[int, int] = field(init=False)

    def __post_init__(self):
        if not self.resolution > 0:
            raise ValueError("resolution must be > 0")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))
        object.__setattr__(self, "resolution", float(self.resolution))
        nx = max(1, math.ceil(round(self.extent[0] / self.resolution, 9)))
        ny = max(1, math.ceil(round(self.extent[1] / self.resolution, 9)))
        if self.extent[0] <= 0 or self.extent[1] <= 0:
            raise ValueError("extent must be positive")
        object.__setattr__(self, "dims", (nx, ny))

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.origin[0] + (ix + 0.5) * self.resolution,
            self.origin[1] + (iy + 0.5) * self.resolution,
        )

    def point_to_cell(self, x: float, y: float) -> tuple[int, int]:
        ix = int(math.floor((x - self.origin[0]) / self.resolution))
        iy = int(math.floor((y - self.origin[1]) / self.resolution))
        return ix, iy

    def full_region(self) -> "Region":
        return Region((0, 0), (self.dims[0] - 1, self.dims[1] - 1))

    def center(self) -> tuple[float, float]:
        return (
            self.origin[0] + self.dims[0] * self.resolution / 2.0,
            self.origin[1] + self.dims[1] * self.resolution / 2.0,
        )


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle of grid cells, bounds inclusive."""

    min_cell: tuple[int, int]
    max_cell: tuple[int, int]

    def __post_init__(self):
        (x0, y0), (x1, y1) = self.min_cell, self.max_cell
        if x0 > x1 or y0 > y1:
            raise ValueError("region bounds must satisfy min_cell <= max_cell")
        object.__setattr__(self, "min_cell", (int(x0), int(y0)))
        object.__setattr__(self, "max_cell", (int(x1), int(y1)))

    @property
    def width(self) -> int:
        return self.max_cell[0] - self.min_cell[0] + 1

    @property
    def height(self) -> int:
        return self.max_cell[1] - self.min_cell[1] + 1

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    def contains_cell(self, ix: int, iy: int) -> bool:
        return (
            self.min_cell[0] <= ix <= self.max_cell[0]
            and self.min_cell[1] <= iy <= self.max_cell[1]
        )

    def contains_region(self, other: "Region") -> bool:
        return (
            self.min_cell[0] <= other.min_cell[0]
            and self.min_cell[1] <= other.min_cell[1]
            and self.max_cell[0] >= other.max_cell[0]
            and self.max_cell[1] >= other.max_cell[1]
        )

    def intersection(self, other: "Region") -> "Region | None":
        x0 = max(self.min_cell[0], other.min_cell[0])
        y0 = max(self.min_cell[1], other.min_cell[1])
        x1 = min(self.max_cell[0], other.max_cell[0])
        y1 = min(self.max_cell[1], other.max_cell[1])
        if x0 > x1 or y0 > y1:
            return None
        return Region((x0, y0), (x1, y1))

    def quadrants(self) -> "list[Region] | None":
        """Split into 4 disjoint quadrants covering the region exactly.

        For odd side lengths the extra cell goes to the low-index half.
        Returns None when the region is a single row or column and cannot
        produce 4 non-empty quadrants.
        """
        if self.width < 2 or self.height < 2:
            return None
        (x0, y0), (x1, y1) = self.min_cell, self.max_cell
        xm = x0 + (self.width + 1) // 2 - 1   # last column of the low half
        ym = y0 + (self.height + 1) // 2 - 1
        return [
            Region((x0, y0), (xm, ym)),
            Region((xm + 1, y0), (x1, ym)),
            Region((x0, ym + 1), (xm, y1)),
            Region((xm + 1, ym + 1), (x1, y1)),
        ]

    def expand(self, fraction: float, clip_to: "Region") -> "Region":
        """Grow by ``ceil(fraction * side)`` cells on each side, clipped."""
        px = math.ceil(fraction * self.width)
        py = math.ceil(fraction * self.height)
        return Region(
            (
                max(self.min_cell[0] - px, clip_to.min_cell[0]),
                max(self.min_cell[1] - py, clip_to.min_cell[1]),
            ),
            (
                min(self.max_cell[0] + px, clip_to.max_cell[0]),
                min(self.max_cell[1] + py, clip_to.max_cell[1]),
            ),
        )

    def to_dict(self) -> dict:
        return {"min_cell": list(self.min_cell), "max_cell": list(self.max_cell)}

    @classmethod
    def from_dict(cls, d: dict) -> "Region":
        return cls(tuple(d["min_cell"]), tuple(d["max_cell"]))
