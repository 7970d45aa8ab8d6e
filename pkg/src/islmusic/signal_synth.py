"""Multi-source narrowband snapshot synthesis with seeded randomness.

Each snapshot column is sum_k s_k[n] * a(phi_k) + noise[n]. Source symbols
are unit-modulus with independent uniform phases scaled by sqrt(power), so
the per-snapshot source power equals the configured power exactly; noise is
circular complex Gaussian, independent per element and snapshot. All draws
flow from a single seed, so identical inputs give bit-identical matrices.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .array_model import ArrayGeometry, CarrierSpec, steering_matrix
from .errors import ConfigurationError

Seed = Union[int, Tuple[int, ...]]

SNAPSHOT_MAGIC = b"ISLX"
# 24-byte header: magic, u32 element count, u32 snapshot count, 4 reserved
# bytes (zero), u64 seed. Data follows as little-endian complex64 pairs in
# column-major (snapshot-major) order.
_SNAPSHOT_HEADER = struct.Struct("<4sII4xQ")


@dataclass(frozen=True)
class Source:
    """One emitter: arrival azimuth in degrees and received power in watts."""

    azimuth_deg: float
    power_w: float = 1.0


@dataclass(frozen=True)
class SourceSet:
    """An ordered collection of emitters with distinct azimuths."""

    sources: Tuple[Source, ...]

    def __post_init__(self):
        if len(self.sources) < 1:
            raise ConfigurationError("need at least one source")
        azimuths = [s.azimuth_deg for s in self.sources]
        for s in self.sources:
            if not (0.0 <= s.azimuth_deg <= 180.0):
                raise ConfigurationError(
                    f"source azimuth {s.azimuth_deg} outside [0, 180] degrees")
            if not (np.isfinite(s.power_w) and s.power_w > 0):
                raise ConfigurationError(f"source power must be positive, got {s.power_w}")
        if len(set(azimuths)) != len(azimuths):
            raise ConfigurationError("source azimuths must be pairwise distinct")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "SourceSet":
        return cls(tuple(Source(float(az), float(p)) for az, p in pairs))

    def __len__(self) -> int:
        return len(self.sources)

    def azimuths(self) -> np.ndarray:
        return np.array([s.azimuth_deg for s in self.sources])

    def powers(self) -> np.ndarray:
        return np.array([s.power_w for s in self.sources])


@dataclass(frozen=True)
class NoiseSpec:
    """Per-element noise level, either relative (SNR) or absolute.

    ``snr_db`` is the ratio of per-source received power to per-element noise
    power; with unequal source powers the mean source power is the reference.
    ``noise_amplitude`` pins the per-element noise power directly in the
    simulation's power unit (the compatibility reading of a "50 watt noise
    amplitude": the noise standard deviation sigma satisfies sigma^2 = 50).
    """

    snr_db: Optional[float] = None
    noise_amplitude: Optional[float] = None

    def __post_init__(self):
        if (self.snr_db is None) == (self.noise_amplitude is None):
            raise ConfigurationError("set exactly one of snr_db or noise_amplitude")
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ConfigurationError("snr_db must be finite")
        if self.noise_amplitude is not None and not (
                np.isfinite(self.noise_amplitude) and self.noise_amplitude >= 0):
            raise ConfigurationError("noise_amplitude must be >= 0")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseSpec":
        return cls(snr_db=float(snr_db))

    @classmethod
    def from_amplitude(cls, noise_amplitude: float) -> "NoiseSpec":
        return cls(noise_amplitude=float(noise_amplitude))

    def noise_power(self, source_powers: np.ndarray) -> float:
        if self.noise_amplitude is not None:
            return float(self.noise_amplitude)
        return float(np.mean(source_powers)) / 10.0 ** (self.snr_db / 10.0)

    def describe(self) -> dict:
        if self.noise_amplitude is not None:
            return {"noise_amplitude": self.noise_amplitude}
        return {"snr_db": self.snr_db}


@dataclass(frozen=True, eq=False)
class SnapshotMatrix:
    """M x N complex baseband samples: rows are elements, columns snapshots."""

    data: np.ndarray
    seed: Seed
    geometry_hash: str
    carrier: CarrierSpec

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] < 1:
            raise ConfigurationError("snapshot matrix must be M x N with M >= 2, N >= 1")
        if not np.all(np.isfinite(data)):
            raise ConfigurationError("snapshot matrix entries must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def element_count(self) -> int:
        return self.data.shape[0]

    @property
    def snapshot_count(self) -> int:
        return self.data.shape[1]


def synthesize(geometry: ArrayGeometry, carrier: CarrierSpec,
               sources: Union[SourceSet, Sequence[Tuple[float, float]]],
               n_snapshots: int, noise: NoiseSpec, seed: Seed) -> SnapshotMatrix:
    """Simulate the received snapshot matrix for the given emitter set.

    Deterministic for fixed inputs and seed. The random draws are ordered so
    that scaling every source power by a common factor rescales the output
    without changing the underlying phase/noise realization.
    """
    if not isinstance(sources, SourceSet):
        sources = SourceSet.from_pairs(sources)
    m = len(sources)
    big_m = geometry.element_count
    if m >= big_m:
        raise ConfigurationError(
            f"source count {m} must be below element count {big_m} "
            "(an empty noise subspace leaves nothing to scan against)")
    if n_snapshots < 1:
        raise ValueError(f"n_snapshots must be >= 1, got {n_snapshots}")

    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(m, n_snapshots))
    symbols = np.sqrt(sources.powers())[:, None] * np.exp(1j * phases)
    manifold = steering_matrix(geometry, carrier, sources.azimuths())
    gauss = (rng.standard_normal((big_m, n_snapshots))
             + 1j * rng.standard_normal((big_m, n_snapshots)))
    sigma = np.sqrt(noise.noise_power(sources.powers()) / 2.0)
    data = manifold @ symbols + sigma * gauss
    return SnapshotMatrix(data=data, seed=seed,
                          geometry_hash=geometry.content_hash(), carrier=carrier)


def power_to_db(power_w: float) -> float:
    """Power in dB relative to 1 watt: 10*log10(power)."""
    if not (np.isfinite(power_w) and power_w > 0):
        raise ValueError(f"power must be positive and finite, got {power_w}")
    return 10.0 * np.log10(power_w)


def _seed_to_u64(seed: Seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed) % 2**64
    folded = hashlib.sha256(repr(tuple(int(s) for s in seed)).encode()).digest()
    return int.from_bytes(folded[:8], "little")


def write_snapshots(path, snapshots: SnapshotMatrix) -> None:
    """Dump snapshots for cross-implementation comparison.

    Layout: 24-byte header (magic "ISLX", u32 M, u32 N, 4 reserved bytes,
    u64 seed) followed by M*N little-endian complex64 values in column-major
    order. Tuple seeds are folded to a u64 digest.
    """
    header = _SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, snapshots.element_count,
                                   snapshots.snapshot_count, _seed_to_u64(snapshots.seed))
    payload = np.asarray(snapshots.data, dtype="<c8").tobytes(order="F")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_snapshots(path) -> Tuple[np.ndarray, int]:
    """Read a snapshot dump; returns (M x N complex64 array, seed)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _SNAPSHOT_HEADER.size:
        raise ValueError("snapshot file too short for header")
    magic, m, n, seed = _SNAPSHOT_HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"bad snapshot magic {magic!r}")
    body = raw[_SNAPSHOT_HEADER.size:]
    expected = m * n * 8
    if len(body) != expected:
        raise ValueError(f"snapshot payload is {len(body)} bytes, expected {expected}")
    data = np.frombuffer(body, dtype="<c8").reshape((m, n), order="F")
    return data, seed
