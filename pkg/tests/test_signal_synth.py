import struct

import numpy as np
import pytest

from islmusic import (CarrierSpec, ConfigurationError, NoiseSpec, Source, SourceSet,
                      SPEED_OF_LIGHT_ROUNDED, power_to_db, read_snapshots, synthesize,
                      ula_positions, write_snapshots)
from islmusic.signal_synth import SNAPSHOT_MAGIC


CARRIER = CarrierSpec(32e9, SPEED_OF_LIGHT_ROUNDED)


def geom(m=8):
    return ula_positions(m, 0.5 * CARRIER.wavelength_m)


class TestSourceSet:
    def test_from_pairs(self):
        ss = SourceSet.from_pairs([(60.0, 1.0), (75.0, 2.0)])
        assert len(ss) == 2
        assert np.allclose(ss.azimuths(), [60.0, 75.0])
        assert np.allclose(ss.powers(), [1.0, 2.0])

    def test_rejects_duplicate_azimuths(self):
        with pytest.raises(ConfigurationError):
            SourceSet.from_pairs([(60.0, 1.0), (60.0, 1.0)])

    def test_rejects_out_of_range_azimuth(self):
        with pytest.raises(ConfigurationError):
            SourceSet.from_pairs([(200.0, 1.0)])

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ConfigurationError):
            SourceSet.from_pairs([(60.0, 0.0)])

    def test_rejects_empty(self):
        with pytest.raises(ConfigurationError):
            SourceSet(())


class TestNoiseSpec:
    def test_exactly_one_mode(self):
        with pytest.raises(ConfigurationError):
            NoiseSpec()
        with pytest.raises(ConfigurationError):
            NoiseSpec(snr_db=10.0, noise_amplitude=50.0)

    def test_snr_mode_power(self):
        noise = NoiseSpec.from_snr_db(20.0)
        assert noise.noise_power(np.array([1.0])) == pytest.approx(0.01)
        # mean source power is the SNR reference with unequal powers
        assert noise.noise_power(np.array([1.0, 3.0])) == pytest.approx(0.02)

    def test_amplitude_mode_power(self):
        noise = NoiseSpec.from_amplitude(50.0)
        assert noise.noise_power(np.array([1.0])) == 50.0

    def test_zero_amplitude_allowed(self):
        assert NoiseSpec.from_amplitude(0.0).noise_power(np.array([1.0])) == 0.0


class TestSynthesize:
    def test_broadside_noiseless_columns_proportional_to_ones(self):
        snap = synthesize(geom(), CARRIER, [(90.0, 1.0)], 16,
                          NoiseSpec.from_amplitude(0.0), seed=3)
        ref = snap.data[0]
        assert np.allclose(snap.data, np.tile(ref, (8, 1)), atol=1e-9)
        assert np.allclose(np.abs(ref), 1.0, atol=1e-12)

    def test_source_count_must_leave_noise_subspace(self):
        two = ula_positions(2, 0.003)
        with pytest.raises(ConfigurationError):
            synthesize(two, CARRIER, [(60.0, 1.0), (70.0, 1.0)], 8,
                       NoiseSpec.from_snr_db(20.0), seed=0)

    def test_snapshot_count_must_be_positive(self):
        with pytest.raises(ValueError):
            synthesize(geom(), CARRIER, [(60.0, 1.0)], 0,
                       NoiseSpec.from_snr_db(20.0), seed=0)

    def test_deterministic_for_fixed_seed(self):
        a = synthesize(geom(), CARRIER, [(60.0, 1.0)], 32, NoiseSpec.from_snr_db(10.0), 42)
        b = synthesize(geom(), CARRIER, [(60.0, 1.0)], 32, NoiseSpec.from_snr_db(10.0), 42)
        assert np.array_equal(a.data, b.data)

    def test_different_seeds_differ(self):
        a = synthesize(geom(), CARRIER, [(60.0, 1.0)], 32, NoiseSpec.from_snr_db(10.0), 1)
        b = synthesize(geom(), CARRIER, [(60.0, 1.0)], 32, NoiseSpec.from_snr_db(10.0), 2)
        assert not np.array_equal(a.data, b.data)

    def test_tuple_seeds_supported(self):
        a = synthesize(geom(), CARRIER, [(60.0, 1.0)], 8, NoiseSpec.from_snr_db(10.0), (5, 1))
        b = synthesize(geom(), CARRIER, [(60.0, 1.0)], 8, NoiseSpec.from_snr_db(10.0), (5, 1))
        assert np.array_equal(a.data, b.data)

    def test_power_scaling_rescales_snapshots_exactly(self):
        # quadrupling power doubles amplitude; seed fixes both draws, and the
        # factor is a power of two, so the rescaling is bit-exact
        kwargs = dict(n_snapshots=64, noise=NoiseSpec.from_snr_db(20.0), seed=11)
        base = synthesize(geom(), CARRIER, [(60.0, 1.0), (70.0, 1.0)], **kwargs)
        scaled = synthesize(geom(), CARRIER, [(60.0, 4.0), (70.0, 4.0)], **kwargs)
        assert np.array_equal(scaled.data, 2.0 * base.data)

    def test_empirical_noise_power_converges(self):
        # negligible source power isolates the noise term
        snap = synthesize(geom(4), CARRIER, [(60.0, 1e-20)], 10_000,
                          NoiseSpec.from_amplitude(50.0), seed=123)
        empirical = float(np.mean(np.abs(snap.data) ** 2))
        assert abs(empirical - 50.0) / 50.0 < 0.05

    def test_metadata_recorded(self):
        snap = synthesize(geom(), CARRIER, [(60.0, 1.0)], 8,
                          NoiseSpec.from_snr_db(10.0), seed=9)
        assert snap.seed == 9
        assert snap.geometry_hash == geom().content_hash()
        assert snap.carrier == CARRIER
        assert snap.element_count == 8
        assert snap.snapshot_count == 8


class TestPowerToDb:
    def test_one_watt_is_zero_db(self):
        assert power_to_db(1.0) == 0.0

    def test_90_milliwatt(self):
        assert power_to_db(0.09) == pytest.approx(-10.4576, abs=1e-4)

    def test_one_milliwatt(self):
        assert power_to_db(0.001) == pytest.approx(-30.0, abs=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            power_to_db(0.0)
        with pytest.raises(ValueError):
            power_to_db(-1.0)


class TestSnapshotDump:
    def test_round_trip(self, tmp_path):
        snap = synthesize(geom(), CARRIER, [(60.0, 1.0)], 12,
                          NoiseSpec.from_snr_db(10.0), seed=77)
        path = tmp_path / "snap.islx"
        write_snapshots(path, snap)
        data, seed = read_snapshots(path)
        assert seed == 77
        assert data.shape == (8, 12)
        assert data.dtype == np.dtype("<c8")
        assert np.allclose(data, snap.data.astype(np.complex64))

    def test_header_layout(self, tmp_path):
        snap = synthesize(geom(4), CARRIER, [(60.0, 1.0)], 3,
                          NoiseSpec.from_snr_db(10.0), seed=513)
        path = tmp_path / "snap.islx"
        write_snapshots(path, snap)
        raw = path.read_bytes()
        assert raw[:4] == SNAPSHOT_MAGIC
        magic, m, n, seed = struct.unpack_from("<4sII4xQ", raw)
        assert (m, n, seed) == (4, 3, 513)
        assert len(raw) == 24 + 4 * 3 * 8

    def test_column_major_order(self, tmp_path):
        snap = synthesize(geom(4), CARRIER, [(60.0, 1.0)], 3,
                          NoiseSpec.from_snr_db(10.0), seed=5)
        path = tmp_path / "snap.islx"
        write_snapshots(path, snap)
        raw = path.read_bytes()
        first, second = np.frombuffer(raw[24:24 + 16], dtype="<c8")
        assert first == np.complex64(snap.data[0, 0])
        assert second == np.complex64(snap.data[1, 0])  # next element, same snapshot

    def test_rejects_corrupt_magic(self, tmp_path):
        path = tmp_path / "bad.islx"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(ValueError):
            read_snapshots(path)
