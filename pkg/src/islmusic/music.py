"""Pseudospectrum evaluation, peak detection, and accuracy scoring.

The pseudospectrum at azimuth phi is 1 / ||U_L^H s(phi)||^2 where U_L is the
noise-subspace basis and s(phi) the steering vector. A small floor inside the
denominator keeps the value finite when the projection is exactly zero
(noiseless data at a true arrival angle).
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .array_model import ArrayGeometry, CarrierSpec, steering_matrix
from .subspace import SubspaceSplit

PMUSIC_EPSILON = 1e-12
"""Floor applied to the squared noise-subspace projection."""

SPECTRUM_CSV_COLUMNS = ("azimuth_deg", "pmusic", "pmusic_db")


@dataclass(frozen=True)
class AzimuthGrid:
    """Uniform azimuth scan grid in degrees, endpoints included when they fit."""

    start_deg: float = 0.0
    end_deg: float = 180.0
    step_deg: float = 1.0

    def __post_init__(self):
        if not self.start_deg < self.end_deg:
            raise ValueError("grid start must be below grid end")
        if not self.step_deg > 0:
            raise ValueError("grid step must be positive")
        if self.start_deg < 0.0 or self.end_deg > 180.0:
            raise ValueError("grid must lie within [0, 180] degrees")

    def angles(self) -> np.ndarray:
        span = self.end_deg - self.start_deg
        count = int(np.floor(span / self.step_deg + 1e-9))
        points = self.start_deg + self.step_deg * np.arange(count + 1)
        if points[-1] > self.end_deg + 1e-9 * self.step_deg:
            points = points[:-1]
        return points

    def __len__(self) -> int:
        return self.angles().shape[0]


@dataclass(frozen=True, eq=False)
class Pseudospectrum:
    """Scan values over the grid, linear and in dB (10*log10)."""

    grid: AzimuthGrid
    values: np.ndarray
    values_db: np.ndarray


@dataclass(frozen=True)
class DetectionResult:
    """Peak list with optional scoring against known arrival angles."""

    detected_azimuths_deg: Tuple[float, ...]
    peak_db: Tuple[float, ...]
    requested: int
    truth_azimuths_deg: Optional[Tuple[float, ...]] = None
    accuracy: Optional[float] = None
    min_sensitivity_db: Optional[float] = None

    @property
    def shortfall(self) -> bool:
        """True when fewer local maxima existed than peaks were requested."""
        return len(self.detected_azimuths_deg) < self.requested

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["shortfall"] = self.shortfall
        return out


def music_spectrum(split: SubspaceSplit, geometry: ArrayGeometry, carrier: CarrierSpec,
                   grid: AzimuthGrid, polar_deg: float = 90.0) -> Pseudospectrum:
    """Evaluate the pseudospectrum on every grid azimuth."""
    if geometry.element_count != split.noise_basis.shape[0]:
        raise ValueError(
            f"geometry has {geometry.element_count} elements but the subspace "
            f"split is {split.noise_basis.shape[0]}-dimensional")
    manifold = steering_matrix(geometry, carrier, grid.angles(), polar_deg)
    projection = split.noise_basis.conj().T @ manifold
    denominator = np.sum(np.abs(projection) ** 2, axis=0)
    values = 1.0 / np.maximum(denominator, PMUSIC_EPSILON)
    return Pseudospectrum(grid=grid, values=values, values_db=10.0 * np.log10(values))


def _peak_candidates(values: np.ndarray) -> list:
    """(value, leftmost index) of every strict local maximum.

    A plateau counts once, at its leftmost point, and qualifies only if the
    values adjacent to the whole run are strictly smaller. Grid endpoints
    qualify against their single neighbor. An all-flat spectrum has no peaks.
    """
    n = len(values)
    candidates = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left_ok = i == 0 or values[i - 1] < values[i]
        right_ok = j == n - 1 or values[j + 1] < values[i]
        if left_ok and right_ok and not (i == 0 and j == n - 1):
            candidates.append((values[i], i))
        i = j + 1
    return candidates


def detect_peaks(spectrum: Pseudospectrum, max_peaks: int) -> DetectionResult:
    """Top local maxima by value, reported in azimuth order.

    Fewer than ``max_peaks`` maxima is not an error; the shortfall is visible
    on the result.
    """
    if max_peaks < 1:
        raise ValueError(f"max_peaks must be >= 1, got {max_peaks}")
    angles = spectrum.grid.angles()
    candidates = _peak_candidates(spectrum.values)
    candidates.sort(key=lambda c: (-c[0], c[1]))
    chosen = sorted(candidates[:max_peaks], key=lambda c: c[1])
    azimuths = tuple(float(angles[i]) for _, i in chosen)
    peak_db = tuple(float(spectrum.values_db[i]) for _, i in chosen)
    return DetectionResult(
        detected_azimuths_deg=azimuths,
        peak_db=peak_db,
        requested=max_peaks,
        min_sensitivity_db=min(peak_db) if peak_db else None,
    )


def accuracy(detected: Sequence[float], truth: Sequence[float],
             tolerance_deg: float = 0.5) -> float:
    """Fraction of true angles matched one-to-one within the tolerance.

    Matching is greedy nearest-first, so each detection and each true angle
    is used at most once.
    """
    if len(truth) == 0:
        raise ValueError("truth angle list must be non-empty")
    if tolerance_deg < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance_deg}")
    if len(detected) == 0:
        return 0.0
    pairs = sorted(
        (abs(d - t), di, ti)
        for di, d in enumerate(detected)
        for ti, t in enumerate(truth)
    )
    used_detections = set()
    used_truth = set()
    matched = 0
    for distance, di, ti in pairs:
        if distance > tolerance_deg:
            break
        if di in used_detections or ti in used_truth:
            continue
        used_detections.add(di)
        used_truth.add(ti)
        matched += 1
    return matched / len(truth)


def score_detection(result: DetectionResult, truth: Sequence[float],
                    tolerance_deg: float = 0.5) -> DetectionResult:
    """Attach truth and the matched-fraction accuracy to a detection result."""
    value = accuracy(result.detected_azimuths_deg, truth, tolerance_deg)
    return dataclasses.replace(
        result, truth_azimuths_deg=tuple(float(t) for t in truth), accuracy=value)


def write_spectrum_csv(spectrum: Pseudospectrum, path) -> None:
    """Spectrum CSV: one row per grid point, full round-trip precision."""
    angles = spectrum.grid.angles()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPECTRUM_CSV_COLUMNS)
        for az, value, value_db in zip(angles, spectrum.values, spectrum.values_db):
            writer.writerow([repr(float(az)), repr(float(value)), repr(float(value_db))])
