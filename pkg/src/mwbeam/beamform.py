"""Point-wise synthesized-energy kernels (DAS and DMAS).

For a focal point ``r`` every channel is aligned by sampling it at its own
round-trip delay, ``y_ij(t) = Y_ij(t + n_ij(r))``, which moves the echo of
a scatterer at ``r`` to a common record position so the channels add
coherently.  Fractional delays are resolved by linear interpolation between
adjacent samples; reads past the end of the record are zero.

DAS sums the aligned channels and accumulates the squared sum over the full
record.  DMAS accumulates the sum of products of all distinct unordered
pairs of aligned channels, computed through the identity

    sum_{k<l} s_k s_l = ((sum_k s_k)^2 - sum_k s_k^2) / 2

which costs O(M^2) per time sample instead of O(M^4).  DMAS values can be
negative; DAS values are always >= 0.

Focal points are evaluated in fixed-size batches defined by their global
ordering, and every accumulation is per-point elementwise, so results are
bitwise identical no matter how points are grouped or how many worker
threads are used.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .geometry import ImagingGrid, Region, delay_multistatic
from .simulate import BackscatterDataset

# points per kernel batch; fixed so batching never depends on thread count
_BATCH = 64


class BeamformerKind(Enum):
    DAS = "das"
    DMAS = "dmas"

    @classmethod
    def parse(cls, name: str) -> "BeamformerKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown beamformer kind: {name!r}") from None


class EvalCounter:
    """Thread-safe counter of kernel invocations (focal points evaluated)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0

    def add(self, n: int) -> None:
        with self._lock:
            self._value += n

    @property
    def value(self) -> int:
        with self._lock:
            return self._value

    def reset(self) -> None:
        with self._lock:
            self._value = 0


#: global evaluated-point counter consumed by framework reports
EVAL_COUNTER = EvalCounter()


@dataclass
class EnergyMap:
    """Sparse map from grid cell index to synthesized energy.

    ``stride`` is the decimation factor the entries were computed at
    (1 = full resolution).  ``roi`` is set on composite maps to mark the
    full-resolution region.
    """

    grid: ImagingGrid
    entries: dict[tuple[int, int], float]
    stride: int = 1
    roi: Region | None = None

    def __post_init__(self):
        if self.entries:
            vals = np.fromiter(self.entries.values(), dtype=np.float64)
            if not np.all(np.isfinite(vals)):
                raise ValueError("energy map contains non-finite values")

    def __len__(self) -> int:
        return len(self.entries)

    def argmax_cell(self) -> tuple[int, int]:
        if not self.entries:
            raise ValueError("energy map is empty")
        return max(self.entries, key=lambda k: (self.entries[k], (-k[0], -k[1])))

    def argmax_position(self) -> tuple[float, float]:
        ix, iy = self.argmax_cell()
        return self.grid.cell_center(ix, iy)

    def values_in(self, region: Region) -> np.ndarray:
        (x0, y0), (x1, y1) = region.min_cell, region.max_cell
        return np.array(
            [v for (ix, iy), v in self.entries.items() if x0 <= ix <= x1 and y0 <= iy <= y1]
        )

    def dense(self, fill: float = np.nan) -> np.ndarray:
        """Render to a dims-shaped array, holding each stride-D value over
        its D x D block; cells with no covering entry get ``fill``."""
        nx, ny = self.grid.dims
        out = np.full((nx, ny), fill, dtype=np.float64)
        d = self.stride
        if d > 1:
            for (ix, iy), v in self.entries.items():
                if ix % d == 0 and iy % d == 0:
                    out[ix : min(ix + d, nx), iy : min(iy + d, ny)] = v
        for (ix, iy), v in self.entries.items():
            out[ix, iy] = v
        return out


def _check_interpolation(interpolation: str) -> None:
    if interpolation not in ("linear", "nearest"):
        raise ValueError(f"unknown interpolation: {interpolation!r}")


def aligned_channel(
    ds: BackscatterDataset, i: int, j: int, r, interpolation: str = "linear"
) -> np.ndarray:
    """Channel (i, j) aligned to focal point ``r``.

    Returns ``y[k] = (1 - f) * Y[k + n0] + f * Y[k + n0 + 1]`` where
    ``n0 = floor(n_ij(r))`` and ``f`` is the fractional part; out-of-range
    samples read as 0.  ``interpolation="nearest"`` rounds the delay to the
    closest sample instead of interpolating.
    """
    _check_interpolation(interpolation)
    n = delay_multistatic(ds.geometry, i, j, r)
    if interpolation == "nearest":
        n = float(np.rint(n))
    return _shift_series(ds.signals[i, j], n)


def _shift_series(y: np.ndarray, n: float) -> np.ndarray:
    nsamp = y.shape[0]
    i0 = int(np.floor(n))
    frac = n - i0
    pad = np.zeros(nsamp + abs(i0) + 2)
    if i0 >= 0:
        pad[: nsamp] = y
        a = pad[i0 : i0 + nsamp]
        b = pad[i0 + 1 : i0 + 1 + nsamp]
    else:
        pad[-i0 : -i0 + nsamp] = y
        a = pad[: nsamp]
        b = pad[1 : 1 + nsamp]
    return (1.0 - frac) * a + frac * b


def _multistatic_energies(
    ds: BackscatterDataset,
    points: np.ndarray,
    kind: BeamformerKind,
    interpolation: str = "linear",
) -> np.ndarray:
    """Energies for a (P, 2) batch of focal positions."""
    geom = ds.geometry
    m = ds.n_antennas
    nsamp = ds.n_samples
    c = m * m
    scale = geom.propagation_speed * geom.sample_interval

    dx = points[:, 0, None] - geom.antennas[None, :, 0]
    dy = points[:, 1, None] - geom.antennas[None, :, 1]
    dz = geom.antennas[None, :, 2]
    d = np.sqrt(dx * dx + dy * dy + dz * dz)                      # (P, M)
    shifts = ((d[:, :, None] + d[:, None, :]) / scale).reshape(len(points), c)
    if interpolation == "nearest":
        shifts = np.rint(shifts)
    i0 = np.floor(shifts).astype(np.int64)
    frac = shifts - i0

    ypad = np.zeros((c, nsamp + int(i0.max()) + 2))
    ypad[:, :nsamp] = ds.signals.reshape(c, nsamp)
    win = sliding_window_view(ypad, nsamp + 1, axis=1)            # (C, :, N+1)

    p = len(points)
    s = np.zeros((p, nsamp))
    q = np.zeros((p, nsamp)) if kind is BeamformerKind.DMAS else None
    for ch in range(c):
        w = win[ch, i0[:, ch]]                                    # (P, N+1)
        f1 = frac[:, ch, None]
        f0 = 1.0 - f1
        if q is None:
            s += f0 * w[:, :nsamp]
            s += f1 * w[:, 1:]
        else:
            a = f0 * w[:, :nsamp] + f1 * w[:, 1:]
            s += a
            q += a * a
    if q is None:
        return (s * s).sum(axis=1)
    return 0.5 * ((s * s) - q).sum(axis=1)


def _monostatic_energies(ds: BackscatterDataset, points: np.ndarray) -> np.ndarray:
    geom = ds.geometry
    m = ds.n_antennas
    nsamp = ds.n_samples

    dx = points[:, 0, None] - geom.antennas[None, :, 0]
    dy = points[:, 1, None] - geom.antennas[None, :, 1]
    dz = geom.antennas[None, :, 2]
    d = np.sqrt(dx * dx + dy * dy + dz * dz)
    shifts = d / (2.0 * geom.propagation_speed * geom.sample_interval)
    i0 = np.floor(shifts).astype(np.int64)
    frac = shifts - i0

    diag = ds.signals[np.arange(m), np.arange(m)]                 # (M, N)
    ypad = np.zeros((m, nsamp + int(i0.max()) + 2))
    ypad[:, :nsamp] = diag
    win = sliding_window_view(ypad, nsamp + 1, axis=1)

    s = np.zeros((len(points), nsamp))
    for ch in range(m):
        w = win[ch, i0[:, ch]]
        f1 = frac[:, ch, None]
        s += (1.0 - f1) * w[:, :nsamp]
        s += f1 * w[:, 1:]
    return (s * s).sum(axis=1)


def das_energy(ds: BackscatterDataset, r, interpolation: str = "linear") -> float:
    """Multistatic DAS synthesized energy at focal point ``r``."""
    _check_interpolation(interpolation)
    pt = np.asarray(r, dtype=np.float64)[:2].reshape(1, 2)
    return float(_multistatic_energies(ds, pt, BeamformerKind.DAS, interpolation)[0])


def dmas_energy(ds: BackscatterDataset, r, interpolation: str = "linear") -> float:
    """Multistatic DMAS synthesized energy at focal point ``r``."""
    _check_interpolation(interpolation)
    pt = np.asarray(r, dtype=np.float64)[:2].reshape(1, 2)
    return float(_multistatic_energies(ds, pt, BeamformerKind.DMAS, interpolation)[0])


def das_energy_monostatic(ds: BackscatterDataset, r) -> float:
    """Monostatic DAS energy; requires all off-diagonal channels zero."""
    if not ds.is_monostatic():
        raise ValueError("dataset is not monostatic (off-diagonal channels present)")
    pt = np.asarray(r, dtype=np.float64)[:2].reshape(1, 2)
    return float(_monostatic_energies(ds, pt)[0])


def point_energy(ds: BackscatterDataset, kind: BeamformerKind, r) -> float:
    return das_energy(ds, r) if kind is BeamformerKind.DAS else dmas_energy(ds, r)


def _region_cells(grid: ImagingGrid, region: Region, stride: int, mask: np.ndarray | None):
    """Cells of ``region`` whose indices are multiples of ``stride`` (grid-
    anchored lattice), optionally filtered by a dims-shaped boolean mask."""
    (x0, y0), (x1, y1) = region.min_cell, region.max_cell
    xs = np.arange(((x0 + stride - 1) // stride) * stride, x1 + 1, stride)
    ys = np.arange(((y0 + stride - 1) // stride) * stride, y1 + 1, stride)
    ix, iy = np.meshgrid(xs, ys, indexing="ij")
    ix = ix.ravel()
    iy = iy.ravel()
    if mask is not None:
        keep = mask[ix, iy]
        ix, iy = ix[keep], iy[keep]
    return ix, iy


def image(
    ds: BackscatterDataset,
    kind: BeamformerKind,
    grid: ImagingGrid,
    region: Region | None = None,
    stride: int = 1,
    mask: np.ndarray | None = None,
    threads: int = 1,
    skip: set[tuple[int, int]] | None = None,
    interpolation: str = "linear",
) -> EnergyMap:
    """Evaluate the kernel on the stride-D lattice of ``region``.

    ``skip`` drops cells whose values are already known (the framework's
    fine pass reuses coarse-pass values).  Every evaluated point increments
    the module-level :data:`EVAL_COUNTER`.
    """
    _check_interpolation(interpolation)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if region is None:
        region = grid.full_region()
    if not grid.full_region().contains_region(region):
        raise ValueError("region lies outside the grid")

    ix, iy = _region_cells(grid, region, stride, mask)
    if skip:
        keep = np.fromiter(
            ((int(a), int(b)) not in skip for a, b in zip(ix, iy)),
            dtype=bool,
            count=len(ix),
        )
        ix, iy = ix[keep], iy[keep]

    entries: dict[tuple[int, int], float] = {}
    if len(ix) == 0:
        return EnergyMap(grid, entries, stride)

    px = grid.origin[0] + (ix + 0.5) * grid.resolution
    py = grid.origin[1] + (iy + 0.5) * grid.resolution
    points = np.stack([px, py], axis=1)

    batches = [slice(b, min(b + _BATCH, len(points))) for b in range(0, len(points), _BATCH)]
    results: list[np.ndarray | None] = [None] * len(batches)

    def work(k: int) -> None:
        results[k] = _multistatic_energies(ds, points[batches[k]], kind, interpolation)

    if threads > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(batches))))
    else:
        for k in range(len(batches)):
            work(k)

    energies = np.concatenate([r for r in results if r is not None])
    EVAL_COUNTER.add(len(points))
    for a, b, e in zip(ix.tolist(), iy.tolist(), energies.tolist()):
        entries[(a, b)] = e
    return EnergyMap(grid, entries, stride)
