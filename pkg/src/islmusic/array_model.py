"""Array geometry, carrier wavelength, and steering-vector construction.

Coordinate convention: element positions are cartesian (x, y, z) in meters.
A plane wave arrives from polar angle theta (measured from the z-axis) and
azimuth phi (measured from the x-axis). A uniform linear array lies along
the x-axis, so with theta fixed at 90 degrees the inter-element phase
depends on cos(phi) only and the usable field of view is [0, 180] degrees,
with 90 degrees being broadside.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

SPEED_OF_LIGHT = 299_792_458.0
"""Exact propagation speed in m/s (default)."""

SPEED_OF_LIGHT_ROUNDED = 3.0e8
"""Rounded propagation speed in m/s, used by the compatibility constants mode."""


@dataclass(frozen=True)
class CarrierSpec:
    """Narrowband carrier: frequency plus the propagation speed in use."""

    frequency_hz: float
    propagation_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not (np.isfinite(self.frequency_hz) and self.frequency_hz > 0):
            raise ConfigurationError("carrier frequency must be positive and finite")
        if not (np.isfinite(self.propagation_speed) and self.propagation_speed > 0):
            raise ConfigurationError("propagation speed must be positive and finite")

    @property
    def wavelength_m(self) -> float:
        return self.propagation_speed / self.frequency_hz

    @property
    def wavenumber(self) -> float:
        """Free-space wavenumber 2*pi/lambda in rad/m."""
        return 2.0 * np.pi / self.wavelength_m


# A gain model maps (carrier, azimuth_deg, polar_deg) to a length-M vector of
# per-element amplitude gains. Elements are isotropic (unit gain) by default.
GainModel = Callable[[CarrierSpec, float, float], np.ndarray]


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Element positions in meters, one (x, y, z) row per element."""

    positions: np.ndarray
    gain_model: Optional[GainModel] = None

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ConfigurationError("positions must be an (M, 3) array of meters")
        if pos.shape[0] < 2:
            raise ConfigurationError("an array needs at least 2 elements")
        if not np.all(np.isfinite(pos)):
            raise ConfigurationError("element positions must be finite")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def element_count(self) -> int:
        return self.positions.shape[0]

    def element_gains(self, carrier: CarrierSpec, azimuth_deg: float,
                      polar_deg: float = 90.0) -> np.ndarray:
        if self.gain_model is None:
            return np.ones(self.element_count)
        gains = np.asarray(self.gain_model(carrier, azimuth_deg, polar_deg), dtype=float)
        if gains.shape != (self.element_count,):
            raise ConfigurationError("gain model must return one gain per element")
        return gains

    def content_hash(self) -> str:
        """Stable short digest of the element layout, for run metadata."""
        return hashlib.sha256(self.positions.tobytes()).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class SteeringVector:
    """Array response to a unit plane wave from one direction."""

    entries: np.ndarray

    def __len__(self) -> int:
        return self.entries.shape[0]


def ula_positions(element_count: int, spacing_m: float) -> ArrayGeometry:
    """Uniform linear array along the x-axis: element i at (i * spacing, 0, 0)."""
    if element_count < 2:
        raise ConfigurationError(f"ULA needs at least 2 elements, got {element_count}")
    if not (np.isfinite(spacing_m) and spacing_m > 0):
        raise ConfigurationError(f"ULA spacing must be positive, got {spacing_m}")
    x = np.arange(element_count) * spacing_m
    positions = np.column_stack([x, np.zeros(element_count), np.zeros(element_count)])
    return ArrayGeometry(positions)


def wavelength(carrier: CarrierSpec) -> float:
    """Carrier wavelength in meters: propagation_speed / frequency."""
    return carrier.wavelength_m


def _check_angles(azimuth_deg, polar_deg) -> None:
    az = np.asarray(azimuth_deg, dtype=float)
    if np.any(az < 0.0) or np.any(az > 180.0):
        raise ValueError("azimuth must lie in [0, 180] degrees")
    pol = np.asarray(polar_deg, dtype=float)
    if np.any(pol < 0.0) or np.any(pol > 180.0):
        raise ValueError("polar angle must lie in [0, 180] degrees")


def _direction_matrix(azimuth_deg, polar_deg) -> np.ndarray:
    """Unit propagation directions, shape (3, G)."""
    az = np.deg2rad(np.atleast_1d(np.asarray(azimuth_deg, dtype=float)))
    pol = np.deg2rad(float(polar_deg))
    sin_pol = np.sin(pol)
    return np.stack([
        sin_pol * np.cos(az),
        sin_pol * np.sin(az),
        np.full(az.shape, np.cos(pol)),
    ])


def phase_shift(geometry: ArrayGeometry, carrier: CarrierSpec, element_index: int,
                azimuth_deg: float, polar_deg: float = 90.0) -> float:
    """Phase advance of one element relative to the coordinate origin.

    For element position r and arrival direction v(theta, phi) this is
    (2*pi/lambda) * (r . v); the equivalent propagation delay is
    -phase / (2*pi*frequency).
    """
    if not 0 <= element_index < geometry.element_count:
        raise ValueError(
            f"element index {element_index} out of range 0..{geometry.element_count - 1}")
    _check_angles(azimuth_deg, polar_deg)
    direction = _direction_matrix(azimuth_deg, polar_deg)[:, 0]
    return carrier.wavenumber * float(geometry.positions[element_index] @ direction)


def steering_matrix(geometry: ArrayGeometry, carrier: CarrierSpec, azimuths_deg,
                    polar_deg: float = 90.0) -> np.ndarray:
    """Steering vectors for many azimuths at once, shape (M, G).

    Column g holds g_i * exp(j * xi_i) for azimuth g, where xi_i is the
    per-element phase shift and g_i the element gain (1 unless the geometry
    carries a gain model).
    """
    _check_angles(azimuths_deg, polar_deg)
    azimuths = np.atleast_1d(np.asarray(azimuths_deg, dtype=float))
    directions = _direction_matrix(azimuths, polar_deg)
    phases = carrier.wavenumber * (geometry.positions @ directions)
    entries = np.exp(1j * phases)
    if geometry.gain_model is not None:
        for g, az in enumerate(azimuths):
            entries[:, g] *= geometry.element_gains(carrier, float(az), polar_deg)
    return entries


def steering_vector(geometry: ArrayGeometry, carrier: CarrierSpec, azimuth_deg: float,
                    polar_deg: float = 90.0) -> SteeringVector:
    """Steering vector for a single azimuth."""
    return SteeringVector(steering_matrix(geometry, carrier, [azimuth_deg], polar_deg)[:, 0])


def aperture_length(geometry: ArrayGeometry) -> float:
    """Largest pairwise element distance; (M-1)*spacing for a ULA."""
    pos = geometry.positions
    diffs = pos[:, None, :] - pos[None, :, :]
    return float(np.sqrt(np.sum(diffs**2, axis=-1)).max())


def paper_total_dimension(element_count: int, carrier: CarrierSpec) -> float:
    """Quoted total array dimension in meters: element_count * wavelength.

    Always evaluated with the rounded propagation speed, because that is the
    convention behind the published dimension figures. Note this intentionally
    differs from the geometric aperture (element_count - 1) * spacing; both
    quantities are exposed.
    """
    if element_count < 2:
        raise ConfigurationError(f"need at least 2 elements, got {element_count}")
    return element_count * (SPEED_OF_LIGHT_ROUNDED / carrier.frequency_hz)
