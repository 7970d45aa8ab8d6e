"""MUSIC direction-of-arrival estimation and scenario simulation for
inter-satellite-link geometry.

The pipeline: synthesize snapshots for a set of emitters, form the sample
covariance, split its eigenvectors into signal and noise subspaces, scan the
azimuth grid with the reciprocal noise-subspace projection, and read arrival
angles off the spectrum peaks. Scenario sweeps, orbit timing arithmetic, and
a CLI sit on top.
"""

__version__ = "0.1.0"

from .array_model import (SPEED_OF_LIGHT, SPEED_OF_LIGHT_ROUNDED, ArrayGeometry,
                          CarrierSpec, SteeringVector, aperture_length,
                          paper_total_dimension, phase_shift, steering_matrix,
                          steering_vector, ula_positions, wavelength)
from .errors import ConfigurationError, NumericalError
from .music import (PMUSIC_EPSILON, AzimuthGrid, DetectionResult, Pseudospectrum,
                    accuracy, detect_peaks, music_spectrum, score_detection,
                    write_spectrum_csv)
from .orbit import (EARTH_RADIUS_KM, PAPER_PI, FeasibilityVerdict, OrbitMetrics,
                    OrbitSpec, feasibility, orbit_metrics, spot_metrics)
from .scenarios import (CANONICAL_SOURCES, SCENARIO_NAMES, ComputeTimeSummary,
                        ScenarioConfig, SweepResult, TrialSetup, resolve_point,
                        resolved_beamwidth, run_sweep, run_trial, scenario_config,
                        timing_report, timing_scenario_configs)
from .signal_synth import (NoiseSpec, SnapshotMatrix, Source, SourceSet,
                           power_to_db, read_snapshots, synthesize,
                           write_snapshots)
from .subspace import (CovarianceMatrix, EigenDecomposition, SubspaceSplit,
                       eig_hermitian, sample_covariance, split_subspaces)

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT", "SPEED_OF_LIGHT_ROUNDED", "ArrayGeometry", "CarrierSpec",
    "SteeringVector", "aperture_length", "paper_total_dimension", "phase_shift",
    "steering_matrix", "steering_vector", "ula_positions", "wavelength",
    "ConfigurationError", "NumericalError",
    "PMUSIC_EPSILON", "AzimuthGrid", "DetectionResult", "Pseudospectrum",
    "accuracy", "detect_peaks", "music_spectrum", "score_detection",
    "write_spectrum_csv",
    "EARTH_RADIUS_KM", "PAPER_PI", "FeasibilityVerdict", "OrbitMetrics",
    "OrbitSpec", "feasibility", "orbit_metrics", "spot_metrics",
    "CANONICAL_SOURCES", "SCENARIO_NAMES", "ComputeTimeSummary", "ScenarioConfig",
    "SweepResult", "TrialSetup", "resolve_point", "resolved_beamwidth",
    "run_sweep", "run_trial", "scenario_config", "timing_report",
    "timing_scenario_configs",
    "NoiseSpec", "SnapshotMatrix", "Source", "SourceSet", "power_to_db",
    "read_snapshots", "synthesize", "write_snapshots",
    "CovarianceMatrix", "EigenDecomposition", "SubspaceSplit", "eig_hermitian",
    "sample_covariance", "split_subspaces",
]
