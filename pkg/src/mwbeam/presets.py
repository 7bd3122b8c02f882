"""Canned experiment setups and grid derivation.

Two presets mirror the reference experiments: a 12-antenna ring around a
circular phantom with a 1 cm tumor, either at (-2, -3) cm in a 10 cm-radius
phantom (``dataset1``) or at (2, 0) cm in a 5 cm-radius phantom
(``dataset2``; the source position has a 1 cm z offset, which the 2-D slice
absorbs into the scatterer's in-plane position).  Antennas sit on the
phantom boundary, so the circle inscribed in the derived imaging grid is
the phantom disc.
"""

from __future__ import annotations

from .geometry import ArrayGeometry, ImagingGrid, SPEED_OF_LIGHT, ring_array
from .simulate import BackscatterDataset, Phantom, Pulse, simulate

DEFAULT_SAMPLE_INTERVAL = 1e-11
DEFAULT_N_SAMPLES = 256
DEFAULT_RING_ANTENNAS = 12


def preset_phantom(name: str) -> Phantom:
    if name == "dataset1":
        return Phantom(radius=0.10, tumor_center=(-0.02, -0.03), tumor_diameter=0.01)
    if name == "dataset2":
        return Phantom(radius=0.05, tumor_center=(0.02, 0.0), tumor_diameter=0.01)
    raise ValueError(f"unknown preset: {name!r} (expected dataset1 or dataset2)")


def preset_dataset(
    name: str,
    n_samples: int = DEFAULT_N_SAMPLES,
    noise_std: float = 0.0,
    seed: int = 0,
    propagation_speed: float = SPEED_OF_LIGHT,
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL,
    tumor_free: bool = False,
) -> BackscatterDataset:
    phantom = preset_phantom(name)
    geom = ring_array(
        DEFAULT_RING_ANTENNAS,
        phantom.radius,
        phantom.center,
        propagation_speed,
        sample_interval,
    )
    return simulate(
        phantom,
        geom,
        Pulse(),
        n_samples=n_samples,
        noise_std=noise_std,
        seed=seed,
        scatterers=[] if tumor_free else None,
    )


def grid_for_geometry(geom: ArrayGeometry, resolution: float) -> ImagingGrid:
    """Square grid bounding the antenna ring (and hence the phantom)."""
    xy = geom.antennas[:, :2]
    cx, cy = xy.mean(axis=0)
    radius = float(((xy[:, 0] - cx) ** 2 + (xy[:, 1] - cy) ** 2).max() ** 0.5)
    return ImagingGrid(
        origin=(cx - radius, cy - radius),
        extent=(2.0 * radius, 2.0 * radius),
        resolution=resolution,
    )
