"""Run-configuration documents, validation, and the run manifest.

A run is described by a single JSON document; command-line flags override
individual fields. Unknown keys are rejected so typos cannot silently fall
back to defaults. The manifest written at the end of every run echoes the
fully resolved configuration (seed included), which is enough to reproduce
the run byte-for-byte apart from wall-clock fields.
"""

from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Optional, Tuple

from . import __version__
from .array_model import SPEED_OF_LIGHT, SPEED_OF_LIGHT_ROUNDED, CarrierSpec, ula_positions
from .errors import ConfigurationError
from .music import AzimuthGrid
from .scenarios import SweptValue
from .signal_synth import NoiseSpec, Source, SourceSet

CONSTANTS_MODES = ("exact", "paper-compat")

DEFAULT_CONFIG = {
    "element_count": 50,
    "spacing_wavelengths": 0.5,
    "frequency_ghz": 32.0,
    "n_snapshots": 256,
    "grid": {"start_deg": 0.0, "end_deg": 180.0, "step_deg": 1.0},
    "noise": {"snr_db": 20.0},
    "sources": [{"azimuth_deg": float(az), "power_w": 1.0} for az in range(60, 80)],
    "random_sources": 0,
    "polar_deg": 90.0,
    "trials": 100,
    "seed": None,
    "constants": "exact",
    "tolerance_deg": 0.5,
    "sweep": None,
    "threads": 1,
    "plots": True,
    "out_dir": "runs",
}

_GRID_KEYS = {"start_deg", "end_deg", "step_deg"}
_NOISE_KEYS = {"snr_db", "noise_amplitude"}
_SOURCE_KEYS = {"azimuth_deg", "power_w"}
_SWEEP_KEYS = {"axis", "values"}


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters plus which top-level keys were given."""

    element_count: int
    spacing_wavelengths: float
    frequency_ghz: float
    n_snapshots: int
    grid: AzimuthGrid
    noise: NoiseSpec
    sources: Tuple[Source, ...]
    random_sources: int
    polar_deg: float
    trials: int
    seed: Optional[int]
    constants: str
    tolerance_deg: float
    sweep_axis: Optional[str]
    sweep_values: Optional[Tuple[SweptValue, ...]]
    threads: int
    plots: bool
    out_dir: str
    provided: frozenset

    @property
    def propagation_speed(self) -> float:
        return SPEED_OF_LIGHT_ROUNDED if self.constants == "paper-compat" else SPEED_OF_LIGHT

    @property
    def paper_compat(self) -> bool:
        return self.constants == "paper-compat"

    def carrier(self) -> CarrierSpec:
        return CarrierSpec(frequency_hz=self.frequency_ghz * 1e9,
                           propagation_speed=self.propagation_speed)

    def geometry(self):
        carrier = self.carrier()
        return ula_positions(self.element_count,
                             self.spacing_wavelengths * carrier.wavelength_m)

    def source_set(self) -> SourceSet:
        if not self.sources:
            raise ConfigurationError("this command needs explicit sources")
        return SourceSet(self.sources)

    def to_document(self, resolved_seed: Optional[int] = None) -> dict:
        """Config echo as a loadable JSON document."""
        doc = {
            "element_count": self.element_count,
            "spacing_wavelengths": self.spacing_wavelengths,
            "frequency_ghz": self.frequency_ghz,
            "n_snapshots": self.n_snapshots,
            "grid": dataclasses.asdict(self.grid),
            "noise": self.noise.describe(),
            "sources": [dataclasses.asdict(s) for s in self.sources],
            "random_sources": self.random_sources,
            "polar_deg": self.polar_deg,
            "trials": self.trials,
            "seed": resolved_seed if resolved_seed is not None else self.seed,
            "constants": self.constants,
            "tolerance_deg": self.tolerance_deg,
            "sweep": None,
            "threads": self.threads,
            "plots": self.plots,
            "out_dir": self.out_dir,
        }
        if self.sweep_axis is not None:
            doc["sweep"] = {"axis": self.sweep_axis,
                            "values": [list(v) if isinstance(v, tuple) else v
                                       for v in self.sweep_values]}
        return doc


def _fail(origin: str, path: str, message: str) -> ConfigurationError:
    return ConfigurationError(f"{origin}: {path}: {message}")


def _expect_number(origin, path, value, minimum=None, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(origin, path, f"expected a number, got {value!r}")
    if minimum is not None:
        if strict and not value > minimum:
            raise _fail(origin, path, f"must be > {minimum}, got {value}")
        if not strict and not value >= minimum:
            raise _fail(origin, path, f"must be >= {minimum}, got {value}")
    return float(value)


def _expect_int(origin, path, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(origin, path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise _fail(origin, path, f"must be >= {minimum}, got {value}")
    return value


def _reject_unknown(origin, path, doc, allowed):
    unknown = set(doc) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        raise _fail(origin, f"{path}{key}" if path else key, "unknown key")


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"{path}: config file not found")
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def parse_config(doc: Optional[dict], origin: str = "config") -> RunConfig:
    """Validate a configuration document against the defaults.

    Raises ConfigurationError with a key-path diagnostic on the first
    violation; nothing is computed before validation finishes.
    """
    doc = {} if doc is None else doc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{origin}: top level must be a JSON object")
    _reject_unknown(origin, "", doc, DEFAULT_CONFIG)
    merged = copy.deepcopy(DEFAULT_CONFIG)
    merged.update(doc)

    element_count = _expect_int(origin, "element_count", merged["element_count"], minimum=2)
    spacing = _expect_number(origin, "spacing_wavelengths", merged["spacing_wavelengths"],
                             minimum=0.0, strict=True)
    frequency = _expect_number(origin, "frequency_ghz", merged["frequency_ghz"],
                               minimum=0.0, strict=True)
    n_snapshots = _expect_int(origin, "n_snapshots", merged["n_snapshots"], minimum=1)

    grid_doc = merged["grid"]
    if not isinstance(grid_doc, dict):
        raise _fail(origin, "grid", "expected an object")
    _reject_unknown(origin, "grid.", grid_doc, _GRID_KEYS)
    grid_args = {**DEFAULT_CONFIG["grid"], **grid_doc}
    try:
        grid = AzimuthGrid(
            start_deg=_expect_number(origin, "grid.start_deg", grid_args["start_deg"]),
            end_deg=_expect_number(origin, "grid.end_deg", grid_args["end_deg"]),
            step_deg=_expect_number(origin, "grid.step_deg", grid_args["step_deg"]),
        )
    except ValueError as exc:
        raise _fail(origin, "grid", str(exc))

    noise_doc = merged["noise"]
    if not isinstance(noise_doc, dict):
        raise _fail(origin, "noise", "expected an object")
    _reject_unknown(origin, "noise.", noise_doc, _NOISE_KEYS)
    try:
        noise = NoiseSpec(
            snr_db=noise_doc.get("snr_db"),
            noise_amplitude=noise_doc.get("noise_amplitude"),
        )
    except ValueError as exc:
        raise _fail(origin, "noise", str(exc))

    sources_doc = merged["sources"]
    if sources_doc is None:
        sources_doc = []
    if not isinstance(sources_doc, list):
        raise _fail(origin, "sources", "expected a list of objects")
    sources = []
    for i, entry in enumerate(sources_doc):
        if not isinstance(entry, dict):
            raise _fail(origin, f"sources[{i}]", "expected an object")
        _reject_unknown(origin, f"sources[{i}].", entry, _SOURCE_KEYS)
        if "azimuth_deg" not in entry:
            raise _fail(origin, f"sources[{i}]", "missing azimuth_deg")
        azimuth = _expect_number(origin, f"sources[{i}].azimuth_deg", entry["azimuth_deg"])
        if not 0.0 <= azimuth <= 180.0:
            raise _fail(origin, f"sources[{i}].azimuth_deg", "must lie in [0, 180]")
        power = _expect_number(origin, f"sources[{i}].power_w",
                               entry.get("power_w", 1.0), minimum=0.0, strict=True)
        sources.append(Source(azimuth_deg=azimuth, power_w=power))

    random_sources = _expect_int(origin, "random_sources", merged["random_sources"],
                                 minimum=0)
    polar_deg = _expect_number(origin, "polar_deg", merged["polar_deg"])
    if not 0.0 <= polar_deg <= 180.0:
        raise _fail(origin, "polar_deg", "must lie in [0, 180]")
    trials = _expect_int(origin, "trials", merged["trials"], minimum=1)

    seed = merged["seed"]
    if seed is not None:
        seed = _expect_int(origin, "seed", seed, minimum=0)

    constants = merged["constants"]
    if constants not in CONSTANTS_MODES:
        raise _fail(origin, "constants", f"must be one of {CONSTANTS_MODES}")

    tolerance = _expect_number(origin, "tolerance_deg", merged["tolerance_deg"],
                               minimum=0.0)

    sweep_axis = None
    sweep_values: Optional[Tuple[SweptValue, ...]] = None
    sweep_doc = merged["sweep"]
    if sweep_doc is not None:
        if not isinstance(sweep_doc, dict):
            raise _fail(origin, "sweep", "expected an object")
        _reject_unknown(origin, "sweep.", sweep_doc, _SWEEP_KEYS)
        if "axis" not in sweep_doc or "values" not in sweep_doc:
            raise _fail(origin, "sweep", "needs both axis and values")
        sweep_axis = sweep_doc["axis"]
        if not isinstance(sweep_axis, str):
            raise _fail(origin, "sweep.axis", "expected a string")
        raw_values = sweep_doc["values"]
        if not isinstance(raw_values, list) or not raw_values:
            raise _fail(origin, "sweep.values", "expected a non-empty list")
        values = []
        for i, v in enumerate(raw_values):
            if isinstance(v, list):
                if len(v) != 2:
                    raise _fail(origin, f"sweep.values[{i}]",
                                "a range value needs exactly [low, high]")
                low = _expect_number(origin, f"sweep.values[{i}][0]", v[0])
                high = _expect_number(origin, f"sweep.values[{i}][1]", v[1])
                values.append((low, high))
            else:
                values.append(_expect_number(origin, f"sweep.values[{i}]", v))
        sweep_values = tuple(values)

    threads = _expect_int(origin, "threads", merged["threads"], minimum=1)
    plots = merged["plots"]
    if not isinstance(plots, bool):
        raise _fail(origin, "plots", "expected true or false")
    out_dir = merged["out_dir"]
    if not isinstance(out_dir, str) or not out_dir:
        raise _fail(origin, "out_dir", "expected a non-empty string")

    if sources and random_sources:
        raise _fail(origin, "random_sources",
                    "cannot combine explicit sources with random_sources")
    # source count versus element count is checked where the pair is actually
    # used (sweeps ignore the default source list), before any computation
    if "sources" in doc and sources and len(sources) >= element_count:
        raise _fail(origin, "sources",
                    f"source count {len(sources)} must be below element_count "
                    f"{element_count} (the scan needs a non-empty noise subspace)")

    return RunConfig(
        element_count=element_count,
        spacing_wavelengths=spacing,
        frequency_ghz=frequency,
        n_snapshots=n_snapshots,
        grid=grid,
        noise=noise,
        sources=tuple(sources),
        random_sources=random_sources,
        polar_deg=polar_deg,
        trials=trials,
        seed=seed,
        constants=constants,
        tolerance_deg=tolerance,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        threads=threads,
        plots=plots,
        out_dir=out_dir,
        provided=frozenset(doc),
    )


def scenario_overrides(config: RunConfig) -> dict:
    """ScenarioConfig overrides for the top-level keys the user actually set."""
    mapping = {
        "element_count": config.element_count,
        "spacing_wavelengths": config.spacing_wavelengths,
        "frequency_ghz": config.frequency_ghz,
        "n_snapshots": config.n_snapshots,
        "grid": config.grid,
        "noise": config.noise,
        "trials": config.trials,
        "tolerance_deg": config.tolerance_deg,
        "threads": config.threads,
    }
    overrides = {key: value for key, value in mapping.items()
                 if key in config.provided}
    if "sources" in config.provided:
        overrides["sources"] = config.sources or None
    if "random_sources" in config.provided and config.random_sources:
        overrides["random_sources"] = config.random_sources
        overrides["sources"] = None
    overrides["propagation_speed"] = config.propagation_speed
    return overrides


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, command: str, config_doc: dict, seed: Optional[int],
                   constants: str, started_utc: str, finished_utc: str,
                   output_names) -> str:
    """Write manifest.json atomically; digests cover every emitted file."""
    manifest = {
        "tool": "islmusic",
        "version": __version__,
        "command": command,
        "constants_mode": constants,
        "seed": seed,
        "config": config_doc,
        "started_utc": started_utc,
        "finished_utc": finished_utc,
        "outputs": {name: f"sha256:{file_digest(os.path.join(out_dir, name))}"
                    for name in sorted(output_names)},
    }
    path = os.path.join(out_dir, "manifest.json")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)
    return path
