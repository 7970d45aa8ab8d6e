"""Seeded Monte-Carlo sweep harness for the simulation studies.

Each named scenario sweeps one axis of the base configuration and aggregates
per-trial detection accuracy, peak level, minimum sensitivity, and wall-clock
time. Trial randomness derives from (seed, trial_index) only, so the same
trial index sees the same noise realization at every sweep point (common
random numbers); re-running a sweep reproduces every record except the
wall-clock fields.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .array_model import SPEED_OF_LIGHT, ArrayGeometry, CarrierSpec, ula_positions
from .errors import ConfigurationError
from .music import AzimuthGrid, DetectionResult, detect_peaks, music_spectrum, score_detection
from .orbit import FeasibilityVerdict, OrbitMetrics, feasibility
from .signal_synth import NoiseSpec, Source, SourceSet, synthesize
from .subspace import eig_hermitian, sample_covariance, split_subspaces

SWEEP_CSV_COLUMNS = ("swept_param", "value", "mean_accuracy", "mean_peak_db",
                     "mean_min_sensitivity_db", "mean_time_s", "trials", "seed")

CANONICAL_SOURCES = tuple(Source(float(az), 1.0) for az in range(60, 80))
"""Twenty unit-power emitters one degree apart, 60 through 79 degrees."""

# Sub-streams hung off (seed, trial_index).
_STREAM_SYNTH = 0
_STREAM_SOURCES = 1

# Random per-trial emitters stay clear of the endfire directions, where an
# arccos readout turns a tiny spatial-frequency error into degrees of azimuth.
_RANDOM_AZIMUTH_LOW = 10.0
_RANDOM_AZIMUTH_HIGH = 170.0

SWEEP_AXES = ("separation", "aoa_count", "elements", "spacing", "frequency",
              "power", "snr")

SCENARIO_NAMES = ("beamwidth", "aoa_count", "elements", "spacing", "frequency",
                  "power", "snr", "timing")

TIMING_AXES = ("aoa_count", "elements", "spacing", "power")

SweptValue = Union[float, int, Tuple[float, float]]


def format_swept_value(value: SweptValue) -> str:
    if isinstance(value, tuple):
        low, high = value
        return f"{low}-{high}"
    return str(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """Base parameters plus exactly one swept axis."""

    name: str
    swept_axis: str
    swept_values: Tuple[SweptValue, ...]
    element_count: int = 50
    spacing_wavelengths: float = 0.5
    frequency_ghz: float = 32.0
    n_snapshots: int = 256
    grid: AzimuthGrid = AzimuthGrid()
    noise: NoiseSpec = NoiseSpec.from_snr_db(20.0)
    sources: Optional[Tuple[Source, ...]] = CANONICAL_SOURCES
    random_sources: int = 0
    trials: int = 100
    seed: int = 0
    tolerance_deg: float = 0.5
    propagation_speed: float = SPEED_OF_LIGHT
    threads: int = 1
    interleave_trials: bool = False

    def __post_init__(self):
        if self.swept_axis not in SWEEP_AXES:
            raise ConfigurationError(
                f"unknown sweep axis {self.swept_axis!r}; valid: {', '.join(SWEEP_AXES)}")
        if len(self.swept_values) < 1:
            raise ConfigurationError("sweep needs at least one value")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")
        if self.random_sources < 0:
            raise ConfigurationError("random_sources must be >= 0")
        if (self.sources is None) == (self.random_sources == 0):
            raise ConfigurationError(
                "configure either explicit sources or random_sources, not both")
        if self.tolerance_deg < 0:
            raise ConfigurationError("tolerance_deg must be >= 0")


@dataclass(frozen=True)
class TrialSetup:
    """Fully resolved parameters for one sweep point."""

    geometry: ArrayGeometry
    carrier: CarrierSpec
    grid: AzimuthGrid
    noise: NoiseSpec
    n_snapshots: int
    sources: Optional[SourceSet]
    random_sources: int
    tolerance_deg: float

    @property
    def source_count(self) -> int:
        return self.random_sources if self.sources is None else len(self.sources)


@dataclass(frozen=True)
class TrialOutcome:
    detection: DetectionResult
    elapsed_s: float


@dataclass(frozen=True)
class PointSummary:
    """Aggregates over the trials of one sweep point."""

    swept_param: str
    value: SweptValue
    mean_accuracy: float
    mean_peak_db: float
    mean_min_sensitivity_db: float
    mean_time_s: float
    trials: int
    accuracies: Tuple[float, ...] = field(repr=False)
    times_s: Tuple[float, ...] = field(repr=False)


@dataclass(frozen=True)
class SweepResult:
    scenario: str
    swept_axis: str
    seed: int
    points: Tuple[PointSummary, ...]
    config: ScenarioConfig

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SWEEP_CSV_COLUMNS)
            for pt in self.points:
                writer.writerow([
                    pt.swept_param,
                    format_swept_value(pt.value),
                    repr(pt.mean_accuracy),
                    repr(pt.mean_peak_db),
                    repr(pt.mean_min_sensitivity_db),
                    repr(pt.mean_time_s),
                    pt.trials,
                    self.seed,
                ])


def _point_sources(config: ScenarioConfig, value: SweptValue):
    """Sources for one sweep point (None means drawn per trial)."""
    if config.swept_axis == "separation":
        base = 60.0
        return (Source(base, 1.0), Source(base + float(value), 1.0))
    if config.swept_axis == "aoa_count":
        count = int(value)
        return tuple(Source(60.0 + i, 1.0) for i in range(count))
    if config.swept_axis == "power":
        angles = [s.azimuth_deg for s in (config.sources or CANONICAL_SOURCES)]
        if isinstance(value, tuple):
            powers = np.linspace(value[0], value[1], len(angles))
        else:
            powers = np.full(len(angles), float(value))
        return tuple(Source(az, float(p)) for az, p in zip(angles, powers))
    return config.sources


def resolve_point(config: ScenarioConfig, value: SweptValue) -> TrialSetup:
    """Apply one swept value to the base configuration."""
    element_count = config.element_count
    spacing_wavelengths = config.spacing_wavelengths
    frequency_ghz = config.frequency_ghz
    noise = config.noise
    if config.swept_axis == "elements":
        element_count = int(value)
    elif config.swept_axis == "spacing":
        spacing_wavelengths = float(value)
    elif config.swept_axis == "frequency":
        frequency_ghz = float(value)
    elif config.swept_axis == "snr":
        noise = NoiseSpec.from_snr_db(float(value))

    carrier = CarrierSpec(frequency_hz=frequency_ghz * 1e9,
                          propagation_speed=config.propagation_speed)
    geometry = ula_positions(element_count, spacing_wavelengths * carrier.wavelength_m)
    sources = _point_sources(config, value)
    return TrialSetup(
        geometry=geometry,
        carrier=carrier,
        grid=config.grid,
        noise=noise,
        n_snapshots=config.n_snapshots,
        sources=SourceSet(sources) if sources is not None else None,
        random_sources=config.random_sources,
        tolerance_deg=config.tolerance_deg,
    )


def _draw_sources(setup: TrialSetup, draw_seed) -> SourceSet:
    rng = np.random.default_rng(draw_seed)
    azimuths: list = []
    while len(azimuths) < setup.random_sources:
        azimuth = float(rng.uniform(_RANDOM_AZIMUTH_LOW, _RANDOM_AZIMUTH_HIGH))
        if all(abs(azimuth - a) > 1e-9 for a in azimuths):
            azimuths.append(azimuth)
    return SourceSet(tuple(Source(az, 1.0) for az in azimuths))


def run_trial(setup: TrialSetup, trial_seed) -> TrialOutcome:
    """One synthesize -> covariance -> split -> scan -> detect execution.

    ``trial_seed`` is an int or tuple; sub-streams for synthesis and for the
    per-trial source draw are derived from it. The elapsed time covers
    synthesis through peak detection only (scoring excluded).
    """
    base = (trial_seed,) if isinstance(trial_seed, (int, np.integer)) else tuple(trial_seed)
    sources = setup.sources
    if sources is None:
        sources = _draw_sources(setup, base + (_STREAM_SOURCES,))

    started = time.perf_counter()
    snapshots = synthesize(setup.geometry, setup.carrier, sources, setup.n_snapshots,
                           setup.noise, base + (_STREAM_SYNTH,))
    covariance = sample_covariance(snapshots)
    decomposition = eig_hermitian(covariance)
    split = split_subspaces(decomposition, len(sources))
    spectrum = music_spectrum(split, setup.geometry, setup.carrier, setup.grid)
    detection = detect_peaks(spectrum, len(sources))
    elapsed = time.perf_counter() - started

    detection = score_detection(detection, sources.azimuths(), setup.tolerance_deg)
    return TrialOutcome(detection=detection, elapsed_s=elapsed)


def _summarize(config: ScenarioConfig, value: SweptValue,
               outcomes: Sequence[TrialOutcome]) -> PointSummary:
    accuracies = tuple(o.detection.accuracy for o in outcomes)
    times = tuple(o.elapsed_s for o in outcomes)
    peak_means = [float(np.mean(o.detection.peak_db)) for o in outcomes
                  if o.detection.peak_db]
    min_sens = [o.detection.min_sensitivity_db for o in outcomes
                if o.detection.min_sensitivity_db is not None]
    return PointSummary(
        swept_param=config.swept_axis,
        value=value,
        mean_accuracy=float(np.mean(accuracies)),
        mean_peak_db=float(np.mean(peak_means)) if peak_means else float("nan"),
        mean_min_sensitivity_db=float(np.mean(min_sens)) if min_sens else float("nan"),
        mean_time_s=float(np.mean(times)),
        trials=config.trials,
        accuracies=accuracies,
        times_s=times,
    )


def _resolve_all(config: ScenarioConfig):
    setups = []
    for value in config.swept_values:
        try:
            setups.append(resolve_point(config, value))
        except (ConfigurationError, ValueError) as exc:
            raise ConfigurationError(
                f"sweep point {config.swept_axis}={format_swept_value(value)}: {exc}"
            ) from exc
    return setups


def run_sweep(config: ScenarioConfig) -> SweepResult:
    """Run trials x points; deterministic given the seed, except wall-clock.

    With ``interleave_trials`` the execution order cycles through the sweep
    points on every trial index instead of finishing one point before the
    next. Results are identical either way (each trial's seed depends only on
    its index); interleaving just spreads machine-load drift evenly across
    points so wall-clock comparisons stay fair.
    """
    setups = _resolve_all(config)
    outcomes_per_point = [[] for _ in setups]
    if config.threads > 1:
        for k, setup in enumerate(setups):
            seeds = [(config.seed, t) for t in range(config.trials)]
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                outcomes_per_point[k] = list(pool.map(lambda s: run_trial(setup, s),
                                                      seeds))
    elif config.interleave_trials:
        for t in range(config.trials):
            for k, setup in enumerate(setups):
                outcomes_per_point[k].append(run_trial(setup, (config.seed, t)))
    else:
        for k, setup in enumerate(setups):
            outcomes_per_point[k] = [run_trial(setup, (config.seed, t))
                                     for t in range(config.trials)]
    points = tuple(_summarize(config, value, outcomes)
                   for value, outcomes in zip(config.swept_values, outcomes_per_point))
    return SweepResult(scenario=config.name, swept_axis=config.swept_axis,
                       seed=config.seed, points=points, config=config)


def resolved_beamwidth(sweep: SweepResult, min_fraction: float = 0.95) -> Optional[float]:
    """Smallest separation at which both emitters are matched in at least
    ``min_fraction`` of trials; None when no swept separation qualifies."""
    if sweep.swept_axis != "separation":
        raise ValueError("beamwidth readout needs a separation sweep")
    for pt in sorted(sweep.points, key=lambda p: float(p.value)):
        fraction = float(np.mean([acc == 1.0 for acc in pt.accuracies]))
        if fraction >= min_fraction:
            return float(pt.value)
    return None


# ---------------------------------------------------------------------------
# Named scenarios

def _base(name, axis, values, **overrides) -> ScenarioConfig:
    return ScenarioConfig(name=name, swept_axis=axis, swept_values=tuple(values),
                          **overrides)


def scenario_config(name: str, seed: int = 0, **overrides) -> ScenarioConfig:
    """Default configuration for one named single-axis scenario.

    ``overrides`` replace ScenarioConfig fields (trials, n_snapshots,
    swept_values, noise, ...). The composite "timing" scenario is built by
    ``timing_scenario_configs``.
    """
    if name == "beamwidth":
        cfg = _base(name, "separation", [float(d) for d in range(1, 11)], seed=seed)
    elif name == "aoa_count":
        cfg = _base(name, "aoa_count", list(range(1, 21)), seed=seed)
    elif name == "elements":
        cfg = _base(name, "elements", [9, 20, 35, 50, 65, 80, 95, 105], seed=seed,
                    sources=None, random_sources=1)
    elif name == "spacing":
        cfg = _base(name, "spacing", [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0], seed=seed,
                    sources=None, random_sources=1)
    elif name == "frequency":
        cfg = _base(name, "frequency", [23.0, 24.5, 32.0, 56.0], seed=seed)
    elif name == "power":
        cfg = _base(name, "power",
                    [1.0, 0.1, 0.01, 0.001, 0.0001, (0.1, 0.9), (0.01, 0.09)],
                    seed=seed, noise=NoiseSpec.from_amplitude(50.0))
    elif name == "snr":
        # Two emitters near the resolution threshold of a small array, so the
        # scan actually transitions across the swept range instead of
        # saturating at either end.
        cfg = _base(name, "snr", [5.0, 10.0, 15.0, 20.0], seed=seed,
                    element_count=10, sources=(Source(65.0, 1.0), Source(68.0, 1.0)))
    elif name == "timing":
        raise ConfigurationError(
            "the timing scenario is composite; use timing_scenario_configs()")
    else:
        raise ConfigurationError(
            f"unknown scenario {name!r}; valid: {', '.join(SCENARIO_NAMES)}")
    return replace(cfg, **overrides) if overrides else cfg


def timing_scenario_configs(seed: int = 0, trials: int = 100, n_snapshots: int = 1024,
                            **overrides) -> Dict[str, ScenarioConfig]:
    """One timing sweep per axis. A larger snapshot count than the detection
    scenarios keeps the per-trial cost dominated by work that grows with the
    swept quantity rather than by fixed scan overhead."""
    single = (Source(60.0, 1.0),)
    common = dict(seed=seed, trials=trials, n_snapshots=n_snapshots,
                  interleave_trials=True, **overrides)
    return {
        "aoa_count": _base("timing", "aoa_count", [1, 10, 20], **common),
        "elements": _base("timing", "elements", [9, 50, 105], sources=single, **common),
        "spacing": _base("timing", "spacing", [0.5, 1.0, 2.0, 5.0], sources=single,
                         **common),
        "power": _base("timing", "power", [1.0, 0.1, 0.01, 0.001, 0.0001],
                       noise=NoiseSpec.from_amplitude(50.0), **common),
    }


# ---------------------------------------------------------------------------
# Timing report

@dataclass(frozen=True)
class AxisTiming:
    axis: str
    max_s: float
    mean_s: float


@dataclass(frozen=True)
class ComputeTimeSummary:
    axes: Tuple[AxisTiming, ...]
    overall_max_s: float
    verdict: FeasibilityVerdict

    def to_json_dict(self) -> dict:
        return {
            "axes": [{"axis": a.axis, "max_s": a.max_s, "mean_s": a.mean_s}
                     for a in self.axes],
            "overall_max_s": self.overall_max_s,
            "feasibility": self.verdict.to_json_dict(),
        }


def timing_report(sweeps: Mapping[str, SweepResult],
                  metrics: OrbitMetrics) -> ComputeTimeSummary:
    """Per-axis max/mean wall-clock plus the orbit-deadline comparison."""
    if not sweeps:
        raise ValueError("no timing sweeps supplied")
    axes = []
    for axis, sweep in sweeps.items():
        times = [t for pt in sweep.points for t in pt.times_s]
        if not times:
            raise ValueError(f"timing sweep {axis!r} holds no trials")
        axes.append(AxisTiming(axis=axis, max_s=max(times),
                               mean_s=float(np.mean(times))))
    overall = max(a.max_s for a in axes)
    return ComputeTimeSummary(axes=tuple(axes), overall_max_s=overall,
                              verdict=feasibility(overall, metrics))
