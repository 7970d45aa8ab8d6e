"""Circular-orbit arithmetic and the processing-deadline feasibility check.

A satellite on a circular orbit sweeps one degree of its orbit every
period/360 seconds. Direction estimation is usable for link pointing when
the full processing pipeline finishes inside that interval.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import ConfigurationError

PAPER_PI = 3.14
"""Rounded circle constant used by the compatibility mode."""

EARTH_RADIUS_KM = 6371.0

SPOT_ALTITUDE_KM = 830.0
SPOT_PERIOD_S = 101.0 * 60.0


@dataclass(frozen=True)
class OrbitSpec:
    """Circular orbit given by altitude and period (both taken as inputs).

    ``paper_compat`` switches to the rounded arithmetic that reproduces the
    published figures: circle constant 3.14 and the period rounded to
    thousandths of an hour before deriving speeds.
    """

    altitude_km: float
    period_s: float
    earth_radius_km: float = EARTH_RADIUS_KM
    paper_compat: bool = False

    def __post_init__(self):
        if not self.altitude_km > 0:
            raise ConfigurationError(f"altitude must be positive, got {self.altitude_km}")
        if not self.period_s > 0:
            raise ConfigurationError(f"period must be positive, got {self.period_s}")
        if not self.earth_radius_km > 0:
            raise ConfigurationError("earth radius must be positive")


@dataclass(frozen=True)
class OrbitMetrics:
    """Derived quantities; ``period_s_effective`` is the period the speed
    figures were computed with (differs from the input only in the rounded
    compatibility mode)."""

    orbit_radius_km: float
    circumference_km: float
    speed_km_h: float
    speed_m_s: float
    distance_per_degree_km: float
    time_per_degree_s: float
    period_s_effective: float
    circle_constant: float

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class FeasibilityVerdict:
    passed: bool
    compute_time_s: float
    deadline_s: float
    margin_s: float

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["verdict"] = self.verdict
        return out


def orbit_metrics(spec: OrbitSpec) -> OrbitMetrics:
    """Radius, circumference, speed, and per-degree distance/time."""
    circle = PAPER_PI if spec.paper_compat else math.pi
    radius = spec.earth_radius_km + spec.altitude_km
    circumference = 2.0 * circle * radius
    if spec.paper_compat:
        # Period in hours rounded to three decimals, as in the published chain.
        period = round(spec.period_s / 3600.0, 3) * 3600.0
    else:
        period = spec.period_s
    speed_km_h = circumference / (period / 3600.0)
    return OrbitMetrics(
        orbit_radius_km=radius,
        circumference_km=circumference,
        speed_km_h=speed_km_h,
        speed_m_s=speed_km_h / 3.6,
        distance_per_degree_km=circumference / 360.0,
        time_per_degree_s=period / 360.0,
        period_s_effective=period,
        circle_constant=circle,
    )


def spot_metrics(paper_compat: bool = False) -> OrbitMetrics:
    """Metrics for the reference SPOT orbit (830 km altitude, 101 min period)."""
    return orbit_metrics(OrbitSpec(altitude_km=SPOT_ALTITUDE_KM, period_s=SPOT_PERIOD_S,
                                   paper_compat=paper_compat))


def feasibility(compute_time_s: float, metrics: OrbitMetrics) -> FeasibilityVerdict:
    """PASS when processing strictly beats the one-degree orbit interval."""
    if compute_time_s < 0:
        raise ValueError(f"compute time must be >= 0, got {compute_time_s}")
    deadline = metrics.time_per_degree_s
    return FeasibilityVerdict(
        passed=compute_time_s < deadline,
        compute_time_s=compute_time_s,
        deadline_s=deadline,
        margin_s=deadline - compute_time_s,
    )
