"""Synthetic multistatic backscatter generation.

A circular breast phantom with one or more point scatterers in a
homogeneous background (no skin layer, no clutter).  Each channel records

    Y_ij(t) = sum_s  contrast_s * a(d_i, d_j) * p(t - (d_i + d_j) / v) + noise

where ``d_i``/``d_j`` are transmitter/receiver distances to the scatterer,
``a = 1 / max(d_i * d_j, eps)`` is geometric spreading and ``p`` is a
cosine-modulated Gaussian pulse.  This Born-style model concentrates energy
at exactly the multistatic round-trip delay, which makes every downstream
beamforming result checkable against closed-form delays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry

# floor for the spreading denominator; only reached when a scatterer sits
# on top of an antenna
SPREADING_EPS = 1e-9


@dataclass(frozen=True)
class Phantom:
    """Circular phantom with a single spherical tumor."""

    radius: float
    center: tuple[float, float] = (0.0, 0.0)
    tumor_center: tuple[float, float] = (0.0, 0.0)
    tumor_diameter: float = 0.01
    tumor_contrast: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("phantom radius must be > 0")
        if not self.tumor_diameter > 0:
            raise ValueError("tumor_diameter must be > 0")
        if not self.tumor_contrast > 0:
            raise ValueError("tumor_contrast must be > 0")
        off = np.hypot(
            self.tumor_center[0] - self.center[0],
            self.tumor_center[1] - self.center[1],
        )
        if not off + self.tumor_diameter / 2.0 < self.radius:
            raise ValueError("tumor must lie strictly inside the phantom")


@dataclass(frozen=True)
class Pulse:
    """Cosine-modulated Gaussian excitation, peak amplitude 1 at duration/2."""

    center_frequency: float = 4e9
    envelope_width: float = 100e-12
    duration: float = 600e-12

    def __post_init__(self):
        if self.center_frequency <= 0 or self.envelope_width <= 0 or self.duration <= 0:
            raise ValueError("pulse parameters must be positive")


def gaussian_modulated_pulse(pulse: Pulse, t) -> np.ndarray:
    """Evaluate the pulse at time(s) ``t`` (seconds from pulse start)."""
    tc = pulse.duration / 2.0
    u = np.asarray(t, dtype=np.float64) - tc
    out = np.exp(-(u**2) / (2.0 * pulse.envelope_width**2)) * np.cos(
        2.0 * np.pi * pulse.center_frequency * u
    )
    return out if out.shape else float(out)


@dataclass(frozen=True)
class BackscatterDataset:
    """M x M channel matrix of sampled time series plus its geometry.

    ``signals[i, j, k]`` is the sample of channel (transmitter i, receiver j)
    at time ``t0 + k * sample_interval``.
    """

    geometry: ArrayGeometry
    signals: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        sig = np.asarray(self.signals, dtype=np.float64)
        m = self.geometry.n_antennas
        if sig.ndim != 3 or sig.shape[0] != m or sig.shape[1] != m:
            raise ValueError("signals must have shape (M, M, N)")
        sig.setflags(write=False)
        object.__setattr__(self, "signals", sig)

    @property
    def n_antennas(self) -> int:
        return self.signals.shape[0]

    @property
    def n_samples(self) -> int:
        return self.signals.shape[2]

    def is_monostatic(self) -> bool:
        """True when all off-diagonal channels are identically zero."""
        m = self.n_antennas
        off = ~np.eye(m, dtype=bool)
        return not np.any(self.signals[off])


def simulate(
    phantom: Phantom,
    geom: ArrayGeometry,
    pulse: Pulse = Pulse(),
    n_samples: int = 256,
    noise_std: float = 0.0,
    seed: int = 0,
    t0: float = 0.0,
    scatterers: list[tuple[tuple[float, float], float]] | None = None,
) -> BackscatterDataset:
    """Generate a multistatic dataset for the phantom.

    ``scatterers`` overrides the phantom tumor with an explicit list of
    ``((x, y), contrast)`` pairs; an empty list produces a scatterer-free
    (noise-only) dataset.  The record must be long enough to hold the
    longest round-trip delay plus the pulse duration.
    """
    if scatterers is None:
        scatterers = [(phantom.tumor_center, phantom.tumor_contrast)]
    for (sx, sy), _contrast in scatterers:
        off = np.hypot(sx - phantom.center[0], sy - phantom.center[1])
        if off >= phantom.radius:
            raise ValueError(f"scatterer ({sx}, {sy}) lies outside the phantom")

    v = geom.propagation_speed
    dt = geom.sample_interval
    m = geom.n_antennas
    t = t0 + dt * np.arange(n_samples)

    signals = np.zeros((m, m, n_samples))
    for (sx, sy), contrast in scatterers:
        dx = geom.antennas[:, 0] - sx
        dy = geom.antennas[:, 1] - sy
        dz = geom.antennas[:, 2]
        d = np.sqrt(dx * dx + dy * dy + dz * dz)           # (M,)
        tau = (d[:, None] + d[None, :]) / v                 # (M, M)
        t_end = float(tau.max()) + pulse.duration
        if t_end > t0 + (n_samples - 1) * dt:
            raise ValueError(
                f"record window too short: needs {t_end:.3e} s, "
                f"has {t0 + (n_samples - 1) * dt:.3e} s"
            )
        amp = contrast / np.maximum(d[:, None] * d[None, :], SPREADING_EPS)
        signals += amp[:, :, None] * gaussian_modulated_pulse(
            pulse, t[None, None, :] - tau[:, :, None]
        )

    if noise_std > 0:
        rng = np.random.default_rng(seed)
        signals = signals + rng.normal(0.0, noise_std, signals.shape)

    return BackscatterDataset(geom, signals, t0)
