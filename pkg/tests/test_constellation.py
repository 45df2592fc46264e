import itertools
import math

import mpmath as mp
import numpy as np
import pytest

import geocast_lab as gl
from geocast_lab.constellation import decide_labels
from geocast_lab.errors import InfeasibleThresholdError, ParameterError

mp.mp.dps = 40

ALL_CONSTELLATIONS = [
    gl.Constellation("psk", 2),
    gl.Constellation("psk", 4),
    gl.Constellation("psk", 8),
    gl.Constellation("psk", 16),
    gl.Constellation("qam", 4),
    gl.Constellation("qam", 16),
    gl.Constellation("qam", 64),
    gl.Constellation("qam", 256),
]


def _qinv_mp(p: float) -> float:
    return float(mp.sqrt(2) * mp.erfinv(1 - 2 * mp.mpf(p)))


class TestMapping:
    def test_orders_validated(self):
        with pytest.raises(ParameterError):
            gl.Constellation("psk", 3)
        with pytest.raises(ParameterError):
            gl.Constellation("qam", 32)
        with pytest.raises(ParameterError):
            gl.Constellation("pam", 4)

    def test_bpsk_map(self):
        c = gl.Constellation("psk", 2)
        assert gl.modulate([0], c)[0] == pytest.approx(1.0)
        assert gl.modulate([1], c)[0] == pytest.approx(-1.0)

    def test_qpsk_gray_neighbors(self):
        c = gl.Constellation("psk", 4)
        syms = gl.modulate([0, 0, 0, 1, 1, 1, 1, 0], c)
        angles = np.angle(syms)
        order = np.argsort(angles)
        labels = np.array([0b00, 0b01, 0b11, 0b10])
        ring = labels[order]
        for a, b in zip(ring, np.roll(ring, -1)):
            assert bin(a ^ b).count("1") == 1

    def test_qam16_energy_and_amplitudes(self):
        c = gl.Constellation("qam", 16)
        energy = np.mean(np.abs(c.points) ** 2)
        assert energy == pytest.approx(1.0, abs=1e-12)
        expected = {round(v, 12) for v in (-3 / math.sqrt(10), -1 / math.sqrt(10),
                                           1 / math.sqrt(10), 3 / math.sqrt(10))}
        assert {round(v, 12) for v in c.points.real} == expected
        assert {round(v, 12) for v in c.points.imag} == expected

    @pytest.mark.parametrize("cons", ALL_CONSTELLATIONS, ids=lambda c: f"{c.family}{c.order}")
    def test_roundtrip(self, cons):
        rng = np.random.default_rng(11)
        bits = rng.integers(0, 2, 240 * cons.bits_per_symbol)
        out = gl.demodulate(gl.modulate(bits, cons), cons)
        assert np.array_equal(out, bits.astype(np.uint8))

    @pytest.mark.parametrize("cons", ALL_CONSTELLATIONS, ids=lambda c: f"{c.family}{c.order}")
    def test_gray_property_nearest_neighbors(self, cons):
        pts = cons.points
        d = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(d, np.inf)
        dmin = d.min()
        for i, j in itertools.combinations(range(cons.order), 2):
            if d[i, j] < dmin * (1 + 1e-9):
                assert bin(i ^ j).count("1") == 1

    def test_pi_rotation_flips_two_of_four_bits(self):
        c = gl.Constellation("qam", 16)
        labels = np.arange(16)
        rotated = c.points[labels] * np.exp(1j * np.pi)
        decided = decide_labels(rotated, c)
        assert np.all(c.hamming(labels, decided) == 2)

    def test_tie_breaks_to_lower_label(self):
        qpsk = gl.Constellation("psk", 4)
        assert decide_labels([0.0 + 0.0j], qpsk)[0] == 0
        qam = gl.Constellation("qam", 16)
        # equidistant between real levels -1/sqrt(10) and +1/sqrt(10)
        probe = 0.0 + 3j / math.sqrt(10)
        cands = np.flatnonzero(
            np.abs(np.abs(qam.points - probe) - np.abs(qam.points - probe).min()) < 1e-15
        )
        assert decide_labels([probe], qam)[0] == cands.min()


class TestThresholds:
    def test_noiseless_reference_values(self):
        assert gl.noiseless_phase_threshold(gl.Constellation("psk", 4)).value == pytest.approx(
            math.pi / 4, rel=1e-15
        )
        assert gl.noiseless_phase_threshold(gl.Constellation("qam", 4)).value == pytest.approx(
            math.pi / 4, rel=1e-15
        )
        # pi/4 - asin(2 / (3 sqrt 2))
        assert gl.noiseless_phase_threshold(gl.Constellation("qam", 16)).value == pytest.approx(
            0.29451548510813694, rel=1e-12
        )

    def test_awgn_qam16_reference_value(self):
        c = gl.Constellation("qam", 16)
        th = gl.awgn_phase_threshold(c, 10 ** 2.5, 4, 1e-3)
        # extended-precision evaluation of the corrected-threshold chain
        g = mp.mpf(10) ** mp.mpf("2.5")
        margin = mp.sqrt(mp.mpf(15) / (3 * g)) * mp.mpf(_qinv_mp(8 / 3 * 4e-3))
        exact = mp.pi / 4 - mp.asin((2 + margin) / (3 * mp.sqrt(2)))
        assert th.value == pytest.approx(float(exact), abs=1e-10)
        assert th.value == pytest.approx(0.21539805427800017, abs=1e-12)

    def test_awgn_approaches_noiseless_at_high_snr(self):
        for cons in (gl.Constellation("qam", 16), gl.Constellation("psk", 8)):
            hi = gl.awgn_phase_threshold(cons, 1e12, 4, 1e-3)
            assert hi.value == pytest.approx(
                gl.noiseless_phase_threshold(cons).value, abs=1e-5
            )

    def test_awgn_infeasible_at_low_snr(self):
        c = gl.Constellation("qam", 16)
        with pytest.raises(InfeasibleThresholdError):
            gl.awgn_phase_threshold(c, 10.0, 4, 1e-3)

    def test_awgn_infeasible_big_qinv_argument(self):
        c = gl.Constellation("psk", 16)
        with pytest.raises(InfeasibleThresholdError):
            gl.awgn_phase_threshold(c, 1e4, 200, 1e-3)  # log2(M) N pe >= 0.5

    def test_monotone_in_snr_and_target(self):
        c = gl.Constellation("qam", 16)
        snrs = [10 ** (db / 10) for db in (20, 22, 25, 30, 40)]
        vals = [gl.awgn_phase_threshold(c, g, 4, 1e-3).value for g in snrs]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        pes = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
        vals = [gl.awgn_phase_threshold(c, 10 ** 2.5, 4, p).value for p in pes]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestQInverse:
    def test_half_is_zero(self):
        assert gl.q_inverse(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_reference_points(self):
        # Q(2) computed with mpmath
        q2 = float(0.5 * mp.erfc(2 / mp.sqrt(2)))
        assert gl.q_inverse(q2) == pytest.approx(2.0, abs=1e-10)
        assert gl.q_inverse(0.0227501) == pytest.approx(2.0000005917322874, abs=1e-9)
        assert gl.q_inverse(0.0106667) == pytest.approx(2.302031426089092, abs=1e-9)

    def test_relative_accuracy_grid(self):
        for p in (1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.49, 0.7, 0.99):
            exact = _qinv_mp(p)
            got = gl.q_inverse(p)
            assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))

    def test_domain(self):
        for bad in (0.0, 1.0, -0.1, 1.3):
            with pytest.raises(ParameterError):
                gl.q_inverse(bad)


class TestThresholdRotationExperiment:
    def test_rotation_by_corrected_threshold_meets_designed_ber(self):
        """Rotating all symbols by the corrected threshold and adding noise
        at the design SNR should reproduce the branch error rate the
        threshold was derived for (N * pe_th) within a factor of 2.
        """
        c = gl.Constellation("qam", 16)
        gamma = 10 ** 2.5
        n_ant, pe_th = 4, 1e-3
        phi = gl.awgn_phase_threshold(c, gamma, n_ant, pe_th).value
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(2024)))
        n_bits = 10 ** 6
        n_sym = n_bits // c.bits_per_symbol
        labels = rng.integers(0, c.order, n_sym)
        noise = (rng.standard_normal(n_sym) + 1j * rng.standard_normal(n_sym)) * math.sqrt(
            1.0 / (2.0 * gamma)
        )
        rx = c.points[labels] * np.exp(1j * phi) + noise
        errors = int(c.hamming(labels, decide_labels(rx, c)).sum())
        ber = errors / n_bits
        target = n_ant * pe_th
        assert target / 2 <= ber <= target * 2, (
            f"measured BER {ber:.3e} vs designed branch rate {target:.3e} "
            f"(ratio {ber / target:.2f})"
        )
