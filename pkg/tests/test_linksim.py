import math

import numpy as np
import pytest

import geocast_lab as gl
from geocast_lab.errors import ParameterError

from conftest import (
    CARRIER_HZ,
    SPACING_M,
    altlin4,
    altlog4,
    two_proportion_z,
)

QAM16 = gl.Constellation("qam", 16)


def params(snr_db=25.0, n_bits=100_000, seed=11, pilots=None):
    return gl.LinkParams(snr_db, 50e6, n_bits, seed, preamble_pilots=pilots)


class TestSdfMapping:
    def test_cyclic_mapping(self):
        s = np.arange(6)
        subs = gl.sdf_map(s, 3)
        assert subs.shape == (3, 2)
        assert list(subs[0]) == [0, 3]
        assert list(subs[1]) == [1, 4]
        assert list(subs[2]) == [2, 5]

    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 4, 5):
            s = rng.standard_normal(20 * n) + 1j * rng.standard_normal(20 * n)
            assert np.array_equal(gl.sdf_demap(gl.sdf_map(s, n), n), s)

    def test_identity_for_single_antenna(self):
        s = np.arange(7.0)
        assert np.array_equal(gl.sdf_map(s, 1)[0], s)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            gl.sdf_map(np.arange(7), 3)
        with pytest.raises(ValueError):
            gl.sdf_demap(np.zeros((3, 4)), 4)


class TestLinkParams:
    def test_validation(self):
        with pytest.raises(ParameterError):
            gl.LinkParams(25.0, 0.0, 10, 1)
        with pytest.raises(ParameterError):
            gl.LinkParams(25.0, 50e6, 0, 1)
        with pytest.raises(ParameterError):
            gl.LinkParams(25.0, 50e6, 10, 1, preamble_pilots=0)

    def test_noise_calibration(self):
        p = params(snr_db=10.0)
        # complex noise variance is 1/gamma_s
        assert 2 * p.noise_std**2 == pytest.approx(0.1, rel=1e-12)
        assert params(snr_db=math.inf).noise_std == 0.0


class TestFdaSdfLink:
    def test_error_free_at_target_high_snr(self, target):
        layout, prof = altlog4()
        r = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, params())
        assert r.n_errors == 0 and r.n_bits == 100_000

    def test_noiseless_recovery_inside_zone(self, target):
        layout, prof = altlog4()
        phi0 = gl.noiseless_phase_threshold(QAM16).value
        p = params(snr_db=math.inf, n_bits=8_000)
        wf = gl.width_factors(prof, layout)
        w = gl.geocast_widths(wf, layout, target, phi0)
        inside = gl.PolarPosition(target.d_m + 0.25 * w.theta_d_m, target.theta_rad)
        assert gl.zone_predicate(inside, target, layout, prof, phi0)
        assert gl.simulate_fda_sdf(inside, target, layout, prof, QAM16, p).ber == 0.0
        outside = gl.PolarPosition(target.d_m + 0.75 * w.theta_d_m, target.theta_rad)
        assert not gl.zone_predicate(outside, target, layout, prof, phi0)
        assert gl.simulate_fda_sdf(outside, target, layout, prof, QAM16, p).ber > 0.0

    def test_forced_pi_rotation_gives_half(self, target):
        layout, prof = altlog4()
        p = params(snr_db=math.inf, n_bits=16_000)
        r = gl.simulate_fda_sdf(
            target, target, layout, prof, QAM16, p,
            branch_phase_override=np.full(4, math.pi),
        )
        assert r.ber == 0.5

    def test_net_rotation_equals_residual_phases(self, target):
        from geocast_lab.linksim import branch_rotations

        layout, prof = altlog4()
        pos = gl.PolarPosition(104.0, math.radians(-16.0))
        rot = branch_rotations(pos, target, layout, prof)
        res = gl.residual_phases(pos, target, layout, prof)
        assert np.max(np.abs(gl.wrap_phase(rot - res))) < 1e-9

    def test_sidelobe_statistically_equal_to_target(self, target):
        layout, prof = altlin4()
        cls = gl.classify_offsets(prof, layout)
        lat = gl.enumerate_zone_lattice(cls, target, layout, 0.0, 200.0, prof)
        side = [z for z in lat.centers if abs(z.d_m - 174.9481145) < 1e-3][0]
        pos = gl.PolarPosition(side.d_m, math.asin(side.sin_theta))
        p = params(snr_db=12.0, n_bits=100_000, seed=5)
        r_target = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, p)
        r_side = gl.simulate_fda_sdf(pos, target, layout, prof, QAM16, p)
        z = two_proportion_z(r_target.n_errors, r_side.n_errors, r_target.n_bits, r_side.n_bits)
        assert abs(z) < 4.0

    def test_non_frame_bit_counts_padded(self, target):
        layout, prof = altlog4()
        p = params(n_bits=20_001)  # not divisible by N log2 M
        r = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, p)
        assert r.n_bits == 20_001

    def test_deterministic(self, target):
        layout, prof = altlog4()
        pos = gl.PolarPosition(101.3, math.radians(-15.4))
        p = params(snr_db=14.0, n_bits=50_000, seed=77)
        a = gl.simulate_fda_sdf(pos, target, layout, prof, QAM16, p)
        b = gl.simulate_fda_sdf(pos, target, layout, prof, QAM16, p)
        assert a.ber == b.ber and a.n_errors == b.n_errors

    def test_preamble_converges_to_ideal(self, target):
        layout, prof = altlog4()
        bers = {}
        for pilots in (1, 16, 256, None):
            p = params(snr_db=14.0, n_bits=200_000, seed=99, pilots=pilots)
            bers[pilots] = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, p).ber
        assert bers[1] > bers[16] > bers[256]
        assert bers[256] == pytest.approx(bers[None], rel=0.25)


class TestBeamforming:
    def test_full_gain_at_target(self, target):
        layout, prof = altlog4()
        r = gl.simulate_beamforming(target, target, layout, prof, QAM16, params())
        assert abs(r.combined_gain) == pytest.approx(4.0, rel=1e-12)
        assert r.n_errors == 0

    def test_matches_sdf_at_target_bitwise(self, target):
        # at the target both links reduce to the same AWGN channel and the
        # keyed noise stream makes them bit-identical
        layout, prof = altlog4()
        p = params(snr_db=14.0, n_bits=96_000, seed=31)
        a = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, p)
        b = gl.simulate_beamforming(target, target, layout, prof, QAM16, p)
        assert a.n_errors == b.n_errors

    def test_calibration_statistical(self, target):
        layout, prof = altlog4()
        p1 = params(snr_db=14.0, n_bits=1_000_000, seed=41)
        p2 = params(snr_db=14.0, n_bits=1_000_000, seed=42)
        a = gl.simulate_fda_sdf(target, target, layout, prof, QAM16, p1)
        b = gl.simulate_beamforming(target, target, layout, prof, QAM16, p2)
        z = two_proportion_z(a.n_errors, b.n_errors, a.n_bits, b.n_bits)
        assert abs(z) < 4.0

    def test_null_gives_half_ber(self, target):
        # two antennas, offsets 0 and df: half a radial period flips the
        # relative phase to pi and the combined gain vanishes
        layout = gl.ArrayLayout(0, 1, SPACING_M, CARRIER_HZ)
        prof = gl.make_offset_profile(gl.CustomOffsets((0.0, 1e6)), layout)
        pos = gl.PolarPosition(
            target.d_m + gl.SPEED_OF_LIGHT / 2e6, target.theta_rad
        )
        r = gl.simulate_beamforming(pos, target, layout, prof, QAM16, params(n_bits=100_000))
        assert abs(r.combined_gain) < 1e-9
        assert r.ber == pytest.approx(0.5, abs=0.01)

    def test_target_gain_normalization_mode(self, target):
        layout, prof = altlog4()
        p = params(snr_db=14.0, n_bits=40_000, seed=8)
        r = gl.simulate_beamforming(
            target, target, layout, prof, QAM16, p, normalize_by_target_gain=True
        )
        # at the target both equalizations coincide
        r2 = gl.simulate_beamforming(target, target, layout, prof, QAM16, p)
        assert r.n_errors == r2.n_errors


class TestZonePredicate:
    def test_target_inside(self, target):
        layout, prof = altlog4()
        assert gl.zone_predicate(target, target, layout, prof, 0.215)

    def test_edge_outside(self, target):
        layout, prof = altlog4()
        phi = 0.21539805427800017
        wf = gl.width_factors(prof, layout)
        w = gl.geocast_widths(wf, layout, target, phi)
        pos = gl.PolarPosition(target.d_m + w.theta_d_m, target.theta_rad)
        assert not gl.zone_predicate(pos, target, layout, prof, phi)

    def test_lattice_center_inside(self, target):
        layout, prof = altlin4()
        cls = gl.classify_offsets(prof, layout)
        lat = gl.enumerate_zone_lattice(cls, target, layout, 0.0, 200.0, prof)
        for z in lat.centers:
            pos = gl.PolarPosition(z.d_m, math.asin(z.sin_theta))
            assert gl.zone_predicate(pos, target, layout, prof, 0.215)

    def test_threshold_domain(self, target):
        layout, prof = altlog4()
        with pytest.raises(ParameterError):
            gl.zone_predicate(target, target, layout, prof, 0.0)


class TestOrthogonality:
    def test_unit_diagonal_and_bound(self):
        layout, prof = altlog4()
        for oversampling in (256, 1024):
            dev = gl.validate_orthogonality(layout, prof, params(), oversampling)
            assert dev <= 10.0 / oversampling

    def test_halves_when_oversampling_doubles(self):
        layout, prof = altlog4()
        d1 = gl.validate_orthogonality(layout, prof, params(), 512)
        d2 = gl.validate_orthogonality(layout, prof, params(), 1024)
        assert d1 / d2 == pytest.approx(2.0, rel=1.0)  # within a factor 2 of halving

    def test_independent_of_offsets(self):
        rng = np.random.default_rng(4)
        layout = gl.edge_layout(5, SPACING_M, CARRIER_HZ)
        values = np.concatenate([[0.0], rng.uniform(-2e7, 2e7, 4)])
        prof = gl.make_offset_profile(gl.CustomOffsets(tuple(values)), layout)
        dev = gl.validate_orthogonality(layout, prof, params(), 512)
        assert dev <= 10.0 / 512

    def test_minimum_oversampling(self):
        layout, prof = altlog4()
        with pytest.raises(ParameterError):
            gl.validate_orthogonality(layout, prof, params(), 32)
