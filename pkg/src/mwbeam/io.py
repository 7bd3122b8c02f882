"""Dataset and image serialization.

Datasets use a fixed little-endian binary container carrying everything a
beamformer needs (including the propagation speed, so simulation and
imaging can never disagree about it):

    offset  size  field
    0       8     magic "MWBSCAT\\0"
    8       4     version (uint32)
    12      4     M, antenna count (uint32)
    16      4     N, samples per channel (uint32)
    20      8     sample interval dt (float64, seconds)
    28      8     t0 (float64, seconds)
    36      8     propagation speed (float64, m/s)
    44      24*M  antenna positions, (M, 3) float64
    ...     8*M*M*N  channel series, row-major (i, j) order

Energy maps export as a CSV of ``ix,iy,energy`` rows (sorted by (iy, ix),
shortest round-trip float formatting), an 8-bit binary PGM rendering, and a
JSON sidecar with the grid metadata and normalization bounds.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .beamform import EnergyMap
from .geometry import ArrayGeometry, ImagingGrid, Region
from .simulate import BackscatterDataset

MAGIC = b"MWBSCAT\x00"
VERSION = 1
_HEADER = struct.Struct("<8sIIIddd")


class DatasetFormatError(ValueError):
    """File is not a valid dataset container."""


class DatasetVersionError(DatasetFormatError):
    """Container version is not supported."""


class DatasetTruncatedError(DatasetFormatError):
    """File ends before the declared payload."""


def save_dataset(ds: BackscatterDataset, path) -> None:
    geom = ds.geometry
    m = ds.n_antennas
    n = ds.n_samples
    header = _HEADER.pack(
        MAGIC, VERSION, m, n, geom.sample_interval, ds.t0, geom.propagation_speed
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(geom.antennas, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(ds.signals, dtype="<f8").tobytes())


def load_dataset(path) -> BackscatterDataset:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise DatasetTruncatedError(f"{path}: file shorter than header")
    magic, version, m, n, dt, t0, speed = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise DatasetFormatError(f"{path}: bad magic, not a dataset file")
    if version != VERSION:
        raise DatasetVersionError(f"{path}: unsupported version {version}")
    if m < 2 or n < 1 or not (dt > 0) or not (speed > 0):
        raise DatasetFormatError(f"{path}: corrupt header (M={m}, N={n})")
    need = _HEADER.size + 24 * m + 8 * m * m * n
    if len(raw) < need:
        raise DatasetTruncatedError(
            f"{path}: truncated payload, {len(raw)} bytes of {need}"
        )
    off = _HEADER.size
    ants = np.frombuffer(raw, dtype="<f8", count=3 * m, offset=off).reshape(m, 3)
    off += 24 * m
    sig = np.frombuffer(raw, dtype="<f8", count=m * m * n, offset=off).reshape(m, m, n)
    geom = ArrayGeometry(ants.astype(np.float64), speed, dt)
    return BackscatterDataset(geom, sig.astype(np.float64), t0)


def dataset_file_size(m: int, n: int) -> int:
    """Exact container size in bytes for an M-antenna, N-sample dataset."""
    return _HEADER.size + 24 * m + 8 * m * m * n


def _format_float(v: float) -> str:
    return repr(float(v))


def export_energy_map(emap: EnergyMap, base_path) -> dict[str, str]:
    """Write ``<base>.csv``, ``<base>.pgm`` and ``<base>.json``.

    Returns the paths written.  The PGM holds the dense composite (coarse
    values held over their stride blocks), min-max normalized over the
    signed value range; cells without a value (outside the breast mask) are
    0, and a constant map renders as all zeros.
    """
    if not emap.entries:
        raise ValueError("cannot export an empty energy map")
    base = Path(base_path)
    if base.suffix in {".csv", ".pgm", ".json"}:
        base = base.with_suffix("")
    paths = {
        "csv": str(base) + ".csv",
        "pgm": str(base) + ".pgm",
        "json": str(base) + ".json",
    }

    rows = sorted(emap.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    with open(paths["csv"], "w", newline="\n") as fh:
        for (ix, iy), v in rows:
            fh.write(f"{ix},{iy},{_format_float(v)}\n")

    vals = np.fromiter(emap.entries.values(), dtype=np.float64)
    vmin = float(vals.min())
    vmax = float(vals.max())
    dense = emap.dense(fill=np.nan)
    nx, ny = emap.grid.dims
    if vmax > vmin:
        norm = (dense - vmin) / (vmax - vmin)
        pix = np.where(np.isnan(norm), 0.0, np.clip(norm, 0.0, 1.0))
        raster = np.rint(255.0 * pix).astype(np.uint8)
    else:
        raster = np.zeros((nx, ny), dtype=np.uint8)
    with open(paths["pgm"], "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(raster.T.tobytes())  # row r of the raster is iy = r

    sidecar = {
        "grid": {
            "origin": list(emap.grid.origin),
            "extent": list(emap.grid.extent),
            "resolution": emap.grid.resolution,
            "dims": list(emap.grid.dims),
        },
        "stride": emap.stride,
        "roi": emap.roi.to_dict() if emap.roi else None,
        "entries": len(emap.entries),
        "vmin": vmin,
        "vmax": vmax,
        "pgm_layout": "row r = iy, column c = ix",
    }
    with open(paths["json"], "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def import_energy_map_csv(path, grid: ImagingGrid, stride: int = 1, roi: Region | None = None) -> EnergyMap:
    """Rebuild an energy map from an exported CSV (exact round trip)."""
    entries: dict[tuple[int, int], float] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sx, sy, sv = line.split(",")
            entries[(int(sx), int(sy))] = float(sv)
    return EnergyMap(grid, entries, stride, roi)


def save_json(payload: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
