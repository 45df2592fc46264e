"""Array geometry, frequency offset profiles, delays and phase bookkeeping.

Everything downstream (zone analytics, link simulation, BER maps) consumes
the quantities defined here: a uniform linear array with an indexed
reference antenna, per-antenna carrier frequency offsets, propagation
delays toward a polar receiver position, the transmit steering phases that
null the net symbol rotation at a chosen target, and the residual phase
rotation observed anywhere else.

All values are SI (meters, seconds, Hz, radians). Angles are measured from
the array broadside; positive antenna indices sit at ``+n * spacing`` along
the array axis. All objects are immutable and safe to share across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, ParameterError

SPEED_OF_LIGHT = 299_792_458.0
"Speed of light in m/s (exact; not configurable so results reproduce bit-for-bit)."

# Narrowband design premise: offsets must stay far below the carrier.
MAX_OFFSET_FRACTION = 1e-2


@dataclass(frozen=True)
class ArrayLayout:
    """Uniform linear array with antennas indexed ``-n_below .. n_above``.

    Parameters
    ----------
    n_below : int
        Number of antennas below the reference (index 0) antenna.
    n_above : int
        Number of antennas above the reference antenna.
    spacing_m : float
        Inter-antenna spacing in meters.
    carrier_hz : float
        Base carrier frequency of the reference antenna, in Hz.
    """

    n_below: int
    n_above: int
    spacing_m: float
    carrier_hz: float

    def __post_init__(self) -> None:
        if self.n_below < 0 or self.n_above < 0:
            raise ParameterError("antenna counts must be non-negative")
        if self.n_antennas < 2:
            raise ParameterError("at least 2 antennas are required")
        if self.spacing_m <= 0:
            raise ParameterError("spacing must be positive")
        if self.carrier_hz <= 0:
            raise ParameterError("carrier frequency must be positive")

    @property
    def n_antennas(self) -> int:
        return self.n_below + self.n_above + 1

    @property
    def indices(self) -> np.ndarray:
        "Antenna indices ``-n_below .. n_above`` as an int array."
        return np.arange(-self.n_below, self.n_above + 1)

    @property
    def wavelength_m(self) -> float:
        "Carrier wavelength of the reference antenna."
        return SPEED_OF_LIGHT / self.carrier_hz


def edge_layout(n_antennas: int, spacing_m: float, carrier_hz: float) -> ArrayLayout:
    "Layout with the reference antenna at the array edge (indices 0..N-1)."
    return ArrayLayout(0, n_antennas - 1, spacing_m, carrier_hz)


def central_layout(n_antennas: int, spacing_m: float, carrier_hz: float) -> ArrayLayout:
    "Layout with a central reference antenna; requires an odd antenna count."
    if n_antennas % 2 != 1:
        raise ConfigurationError("a central reference requires an odd antenna count")
    half = n_antennas // 2
    return ArrayLayout(half, half, spacing_m, carrier_hz)


@dataclass(frozen=True)
class PolarPosition:
    """Receiver position: radial distance (m) and azimuth (rad) from broadside."""

    d_m: float
    theta_rad: float

    def __post_init__(self) -> None:
        if not self.d_m > 0:
            raise ParameterError("distance must be positive")
        if not -math.pi / 2 <= self.theta_rad <= math.pi / 2:
            raise ParameterError("azimuth must lie in [-pi/2, pi/2]")

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta_rad)


# The steering target is just a receiver position the transmitter aims at.
SteeringTarget = PolarPosition


# ---------------------------------------------------------------------------
# Offset recipes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricLinear:
    "Offsets ``n * delta_f``; requires a central reference antenna."
    delta_f_hz: float


@dataclass(frozen=True)
class AlternatingLinear:
    "Offsets ``+n*delta_f`` for odd n, ``-n*delta_f`` for even n; edge reference."
    delta_f_hz: float


@dataclass(frozen=True)
class SymmetricLogarithmic:
    """Offsets ``log_base(|n|+1) * delta_f`` (even-symmetric); central reference.

    The even symmetry is the unique reading that keeps the profile defined
    for negative indices while reproducing the closed-form width factors of
    the elementary-configuration table.
    """

    delta_f_hz: float
    base: float


@dataclass(frozen=True)
class AlternatingLogarithmic:
    "Offsets ``(-1)^(n+1) * log_base(n+1) * delta_f``; edge reference."
    delta_f_hz: float
    base: float


@dataclass(frozen=True)
class CustomOffsets:
    """Explicit per-antenna offsets in Hz, ordered ``-n_below .. n_above``.

    ``declared_rationality`` may be ``"rational"``, ``"irrational"`` or
    ``None`` (detect numerically with a bounded-denominator test).
    """

    values_hz: tuple
    declared_rationality: Union[str, None] = None


OffsetRecipe = Union[
    SymmetricLinear,
    AlternatingLinear,
    SymmetricLogarithmic,
    AlternatingLogarithmic,
    CustomOffsets,
]


@dataclass(frozen=True)
class OffsetProfile:
    """Per-antenna frequency offsets plus the recipe they were built from."""

    values_hz: tuple
    recipe: OffsetRecipe

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values_hz, dtype=float)


def _check_alternating_params(recipe, layout: ArrayLayout) -> None:
    if recipe.delta_f_hz <= 0:
        raise ParameterError("base offset delta_f must be positive")
    if layout.n_below != 0:
        raise ConfigurationError(
            "alternating recipes require an edge reference antenna (indices 0..N-1)"
        )


def _check_symmetric_params(recipe, layout: ArrayLayout) -> None:
    if recipe.delta_f_hz <= 0:
        raise ParameterError("base offset delta_f must be positive")
    if layout.n_below != layout.n_above:
        raise ConfigurationError(
            "symmetric recipes require a central reference antenna"
        )


def make_offset_profile(recipe: OffsetRecipe, layout: ArrayLayout) -> OffsetProfile:
    """Build the per-antenna offset list for ``recipe`` on ``layout``.

    The reference antenna (index 0) always carries offset exactly 0. Raises
    :class:`ConfigurationError` when the recipe's reference placement does
    not match the layout, and :class:`ParameterError` for out-of-range
    recipe parameters.
    """
    n = layout.indices
    if isinstance(recipe, SymmetricLinear):
        _check_symmetric_params(recipe, layout)
        values = n * recipe.delta_f_hz
    elif isinstance(recipe, AlternatingLinear):
        _check_alternating_params(recipe, layout)
        sign = np.where(n % 2 == 1, 1.0, -1.0)
        values = sign * n * recipe.delta_f_hz
    elif isinstance(recipe, SymmetricLogarithmic):
        _check_symmetric_params(recipe, layout)
        if recipe.base <= 1:
            raise ParameterError("logarithm base must exceed 1")
        values = np.log(np.abs(n) + 1) / math.log(recipe.base) * recipe.delta_f_hz
    elif isinstance(recipe, AlternatingLogarithmic):
        _check_alternating_params(recipe, layout)
        if recipe.base <= 1:
            raise ParameterError("logarithm base must exceed 1")
        sign = np.where(n % 2 == 1, 1.0, -1.0)
        values = sign * np.log(n + 1) / math.log(recipe.base) * recipe.delta_f_hz
    elif isinstance(recipe, CustomOffsets):
        values = np.asarray(recipe.values_hz, dtype=float)
        if values.shape != n.shape:
            raise ConfigurationError(
                f"expected {layout.n_antennas} offsets, got {values.size}"
            )
        if values[layout.n_below] != 0.0:
            raise ConfigurationError("the reference antenna offset must be exactly 0")
        if recipe.declared_rationality not in (None, "rational", "irrational"):
            raise ConfigurationError("declared_rationality must be rational/irrational/None")
    else:
        raise ConfigurationError(f"unknown offset recipe {recipe!r}")

    values = np.asarray(values, dtype=float) + 0.0  # normalizes -0.0
    if np.max(np.abs(values)) >= MAX_OFFSET_FRACTION * layout.carrier_hz:
        raise ConfigurationError(
            "offsets violate the narrowband premise |df| << carrier "
            f"(limit {MAX_OFFSET_FRACTION:g} * carrier)"
        )
    return OffsetProfile(tuple(float(v) for v in values), recipe)


# ---------------------------------------------------------------------------
# Phases and delays
# ---------------------------------------------------------------------------

def wrap_phase(phi):
    """Wrap phase(s) to the interval (-pi, pi]."""
    arr = np.asarray(phi, dtype=float)
    wrapped = arr - 2.0 * np.pi * np.ceil((arr - np.pi) / (2.0 * np.pi))
    if np.ndim(phi) == 0:
        return float(wrapped)
    return wrapped


def propagation_delays(
    pos: PolarPosition, layout: ArrayLayout, mode: str = "paraxial"
):
    """Per-antenna propagation delays toward ``pos``.

    Returns ``(tau, dtau)`` where ``tau[n]`` is the absolute delay and
    ``dtau[n] = tau[n] - tau[0]`` the difference to the reference antenna.
    ``mode="paraxial"`` uses the far-field linearization
    ``tau_n = d/c - n (b/c) sin(theta)``; ``mode="exact"`` evaluates the
    true Euclidean distance and exists only to quantify the approximation.
    """
    n = layout.indices
    if mode == "paraxial":
        dtau = -n * (layout.spacing_m / SPEED_OF_LIGHT) * math.sin(pos.theta_rad)
        tau = pos.d_m / SPEED_OF_LIGHT + dtau
    elif mode == "exact":
        y = n * layout.spacing_m
        dist = np.sqrt(pos.d_m**2 + y**2 - 2.0 * pos.d_m * y * math.sin(pos.theta_rad))
        tau = dist / SPEED_OF_LIGHT
        tau0 = pos.d_m / SPEED_OF_LIGHT
        dtau = tau - tau0
    else:
        raise ParameterError(f"unknown delay mode {mode!r}")
    return tau, dtau


def _channel_phase_cycles(
    pos: PolarPosition,
    layout: ArrayLayout,
    offsets: OffsetProfile,
    mode: str = "paraxial",
) -> np.ndarray:
    """Equalized channel phase per antenna, in radians (unwrapped).

    This is the rotation ``2 pi (f0 dtau_n + df_n tau_n)`` that the
    reference-channel equalizer leaves on antenna n's symbols. It equals
    ``2 pi (f_n tau_n - f0 tau_0)`` identically, but is computed from the
    small differences for numerical head-room.
    """
    tau, dtau = propagation_delays(pos, layout, mode)
    df = offsets.array
    return 2.0 * np.pi * (layout.carrier_hz * dtau + df * tau)


def steering_phases(
    target: SteeringTarget, layout: ArrayLayout, offsets: OffsetProfile
) -> np.ndarray:
    """Transmit phases that null the net symbol rotation at ``target``.

    Equivalent to ``2 pi [df_n d/c - f_n (n b / c) sin(theta)]`` evaluated at
    the target, wrapped to (-pi, pi]. The target evaluation always uses the
    paraxial delay model.
    """
    return wrap_phase(_channel_phase_cycles(target, layout, offsets, "paraxial"))


def residual_phases(
    pos: PolarPosition,
    target: SteeringTarget,
    layout: ArrayLayout,
    offsets: OffsetProfile,
    mode: str = "paraxial",
) -> np.ndarray:
    """Net phase rotation left on each antenna's equalized symbols at ``pos``.

    Zero (mod 2 pi) on every antenna means undistorted recovery. The value
    is ``steering - 2 pi (f0 dtau_n + df_n tau_n)`` with the delays taken at
    ``pos``; at ``pos == target`` it cancels exactly by construction.
    """
    steer = _channel_phase_cycles(target, layout, offsets, "paraxial")
    chan = _channel_phase_cycles(pos, layout, offsets, mode)
    return wrap_phase(steer - chan)


def narrowband_residual_phases(
    pos: PolarPosition,
    target: SteeringTarget,
    layout: ArrayLayout,
    offsets: OffsetProfile,
) -> np.ndarray:
    """Residual phases in the narrowband form the zone analytics use.

    ``2 pi (n b / lambda0) [sin(theta) - sin(theta_t)] - 2 pi (df_n / c) [d - d_t]``

    differs from :func:`residual_phases` only through the approximation
    ``f_n / c ~= 1 / lambda0`` in the angular term; the two agree exactly on
    radial-only displacements and to ``2 pi |df_n| (n b / c) |dsin|``
    otherwise.
    """
    n = layout.indices
    dsin = pos.sin_theta - target.sin_theta
    dd = pos.d_m - target.d_m
    df = offsets.array
    return wrap_phase(
        2.0 * np.pi * (n * layout.spacing_m / layout.wavelength_m) * dsin
        - 2.0 * np.pi * (df / SPEED_OF_LIGHT) * dd
    )


def residual_phase_field(
    d_m: Sequence[float],
    theta_rad: Sequence[float],
    target: SteeringTarget,
    layout: ArrayLayout,
    offsets: OffsetProfile,
    mode: str = "paraxial",
) -> np.ndarray:
    """Residual phases over a (d, theta) grid, shape ``(N, len(d), len(theta))``.

    Vectorized equivalent of calling :func:`residual_phases` at every grid
    point; used by predicate BER maps.
    """
    d = np.asarray(d_m, dtype=float)[None, :, None]
    sin_t = np.sin(np.asarray(theta_rad, dtype=float))[None, None, :]
    n = layout.indices[:, None, None]
    df = offsets.array[:, None, None]
    if mode == "paraxial":
        dtau = -n * (layout.spacing_m / SPEED_OF_LIGHT) * sin_t
        tau = d / SPEED_OF_LIGHT + dtau
    elif mode == "exact":
        y = n * layout.spacing_m
        dist = np.sqrt(d**2 + y**2 - 2.0 * d * y * sin_t)
        tau = dist / SPEED_OF_LIGHT
        dtau = tau - d / SPEED_OF_LIGHT
    else:
        raise ParameterError(f"unknown delay mode {mode!r}")
    chan = 2.0 * np.pi * (layout.carrier_hz * dtau + df * tau)
    steer = _channel_phase_cycles(target, layout, offsets, "paraxial")
    return wrap_phase(steer[:, None, None] - chan)
