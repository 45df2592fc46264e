"""Gray-coded PSK / square-QAM mapping and residual-phase thresholds.

The thresholds answer one question: how far may a received symbol rotate
before bit errors appear (noiseless case), or before the bit error rate
exceeds an operational target in AWGN. They feed directly into the
geographic zone-width formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import InfeasibleThresholdError, ParameterError


def _gray(x: int) -> int:
    return x ^ (x >> 1)


class Constellation:
    """Unit-average-energy Gray-coded constellation.

    Parameters
    ----------
    family : str
        ``"psk"`` or ``"qam"`` (square QAM).
    order : int
        Constellation size M. PSK admits powers of two (M >= 2), square QAM
        admits perfect squares that are powers of four (4, 16, 64, 256).

    The ``points`` table is indexed by the symbol label; Gray labeling
    guarantees nearest-neighbor labels differ in exactly one bit (per axis
    for QAM).
    """

    def __init__(self, family: str, order: int) -> None:
        if family not in ("psk", "qam"):
            raise ParameterError(f"unknown constellation family {family!r}")
        if family == "psk":
            if order < 2 or order & (order - 1):
                raise ParameterError("PSK order must be a power of two >= 2")
            points = np.empty(order, dtype=complex)
            for k in range(order):
                points[_gray(k)] = np.exp(2j * np.pi * k / order)
        else:
            side = math.isqrt(order)
            if order not in (4, 16, 64, 256) or side * side != order:
                raise ParameterError("square QAM order must be one of 4, 16, 64, 256")
            # Two independent Gray-coded amplitude axes, normalized to Es = 1.
            levels = (2.0 * np.arange(side) - (side - 1)) / math.sqrt(
                2.0 * (side * side - 1) / 3.0
            )
            half = side.bit_length() - 1
            points = np.empty(order, dtype=complex)
            for i in range(side):
                for j in range(side):
                    label = (_gray(i) << half) | _gray(j)
                    points[label] = levels[i] + 1j * levels[j]
        self.family = family
        self.order = order
        self.points = points
        self.bits_per_symbol = order.bit_length() - 1
        k = self.bits_per_symbol
        labels = np.arange(order, dtype=np.uint16)
        self._label_bits = (
            (labels[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1
        ).astype(np.uint8)
        self._popcount = np.array(
            [bin(x).count("1") for x in range(order)], dtype=np.int64
        )

    def __repr__(self) -> str:
        return f"Constellation({self.family!r}, {self.order})"

    def labels_to_bits(self, labels: np.ndarray) -> np.ndarray:
        "Expand symbol labels into a flat MSB-first bit array."
        return self._label_bits[np.asarray(labels)].reshape(-1)

    def bits_to_labels(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size % self.bits_per_symbol:
            raise ValueError("bit count must be a multiple of log2(M)")
        k = self.bits_per_symbol
        weights = 1 << np.arange(k - 1, -1, -1)
        return bits.reshape(-1, k).astype(np.int64) @ weights

    def hamming(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        "Per-symbol Hamming distance between two label arrays."
        return self._popcount[np.asarray(a) ^ np.asarray(b)]


def modulate(bits, constellation: Constellation) -> np.ndarray:
    """Map a bit sequence to unit-average-energy complex symbols.

    Raises ``ValueError`` when the bit count is not a multiple of log2(M).
    """
    labels = constellation.bits_to_labels(np.asarray(bits))
    return constellation.points[labels]


def decide_labels(symbols, constellation: Constellation) -> np.ndarray:
    """Nearest-point decision; ties resolve to the smaller label index."""
    rx = np.asarray(symbols, dtype=complex).reshape(-1)
    dist = np.abs(constellation.points[:, None] - rx[None, :])
    return np.argmin(dist, axis=0)


def demodulate(symbols, constellation: Constellation) -> np.ndarray:
    """Minimum-distance demodulation back to a flat bit array."""
    return constellation.labels_to_bits(decide_labels(symbols, constellation))


# ---------------------------------------------------------------------------
# Phase thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseThreshold:
    """Phase rotation budget before the BER target is violated.

    ``kind`` is ``"noiseless"`` or ``"awgn"``; the AWGN variant keeps the
    parameters it was corrected for.
    """

    value: float
    kind: str
    gamma_s: Optional[float] = None
    n_antennas: Optional[int] = None
    pe_th: Optional[float] = None


def q_inverse(p: float) -> float:
    """Inverse Gaussian tail function Q^-1(p) to ~1e-12 relative accuracy.

    Seeds from the complementary error function inverse, then applies a few
    guarded Newton corrections on Q(x) - p.
    """
    if not 0.0 < p < 1.0:
        raise ParameterError("q_inverse requires 0 < p < 1")
    x = math.sqrt(2.0) * float(special.erfcinv(2.0 * p))
    for _ in range(4):
        q = 0.5 * math.erfc(x / math.sqrt(2.0))
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf <= 0.0:
            break
        step = (q - p) / pdf
        # Guard against overshoot far in the tails.
        step = max(min(step, 1.0), -1.0)
        x += step
        if abs(step) <= 1e-14 * max(1.0, abs(x)):
            break
    return x


def noiseless_phase_threshold(constellation: Constellation) -> PhaseThreshold:
    """Smallest rotation that moves some symbol onto a decision bound."""
    m = constellation.order
    if constellation.family == "psk":
        value = math.pi / m
    else:
        root = math.sqrt(m)
        value = math.pi / 4 - math.asin((root - 2.0) / (math.sqrt(2.0) * (root - 1.0)))
    return PhaseThreshold(value, "noiseless")


def awgn_phase_threshold(
    constellation: Constellation, gamma_s: float, n_antennas: int, pe_th: float
) -> PhaseThreshold:
    """Rotation budget once an AWGN noise margin is reserved.

    ``gamma_s`` is the linear per-symbol SNR, ``n_antennas`` the number of
    array branches sharing the bit stream and ``pe_th`` the uncoded BER
    target. Raises :class:`InfeasibleThresholdError` when the SNR is too low
    to meet ``pe_th`` even without rotation.
    """
    if gamma_s <= 0:
        raise ParameterError("gamma_s must be positive")
    if not 0.0 < pe_th < 0.5:
        raise ParameterError("pe_th must lie in (0, 0.5)")
    m = constellation.order
    if constellation.family == "psk":
        arg = math.log2(m) * n_antennas * pe_th
        if arg >= 0.5:
            raise InfeasibleThresholdError("Q^-1 argument >= 0.5: margin undefined")
        margin = q_inverse(arg) / math.sqrt(2.0 * gamma_s)
        if margin > 1.0:
            raise InfeasibleThresholdError("SNR too low for the requested BER target")
        value = math.pi / m - math.asin(margin)
    else:
        root = math.sqrt(m)
        arg = (root * math.log2(root) / (root - 1.0)) * n_antennas * pe_th
        if arg >= 0.5:
            raise InfeasibleThresholdError("Q^-1 argument >= 0.5: margin undefined")
        margin_ratio = math.sqrt((m - 1.0) / (3.0 * gamma_s)) * q_inverse(arg)
        asin_arg = (root - 2.0 + margin_ratio) / (math.sqrt(2.0) * (root - 1.0))
        if asin_arg > 1.0:
            raise InfeasibleThresholdError("SNR too low for the requested BER target")
        value = math.pi / 4 - math.asin(asin_arg)
    if value <= 0.0:
        raise InfeasibleThresholdError(
            "noise margin consumes the whole noiseless phase budget"
        )
    return PhaseThreshold(value, "awgn", gamma_s=gamma_s, n_antennas=n_antennas, pe_th=pe_th)
