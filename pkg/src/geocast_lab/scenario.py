"""One bundle of all run inputs, with JSON round-tripping.

A scenario fixes the array, offset recipe, steering target, constellation,
link parameters, BER threshold and map grid. The built-in default mirrors
the reference experiment: 16-QAM, 1e5 bits, target (100 m, -15 deg),
spacing 0.75 wavelengths, 3.6 GHz carrier, 50 MHz symbol rate, 1 MHz base
offset, log base 1.2, 25 dB SNR, BER threshold 1e-3.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Tuple

from .arraycore import (
    AlternatingLinear,
    AlternatingLogarithmic,
    ArrayLayout,
    CustomOffsets,
    OffsetProfile,
    OffsetRecipe,
    PolarPosition,
    SymmetricLinear,
    SymmetricLogarithmic,
    central_layout,
    edge_layout,
    make_offset_profile,
)
from .constellation import (
    Constellation,
    PhaseThreshold,
    awgn_phase_threshold,
    noiseless_phase_threshold,
)
from .errors import ConfigurationError
from .linksim import LinkParams

RECIPE_NAMES = (
    "symmetric-linear",
    "alternating-linear",
    "symmetric-logarithmic",
    "alternating-logarithmic",
    "custom",
)

_EDGE_RECIPES = ("alternating-linear", "alternating-logarithmic")
_CENTRAL_RECIPES = ("symmetric-linear", "symmetric-logarithmic")


@dataclass(frozen=True)
class Scenario:
    """Plain-field run description; see module docstring for the defaults."""

    recipe: str = "alternating-logarithmic"
    n_antennas: int = 4
    delta_f_hz: float = 1e6
    log_base: float = 1.2
    custom_offsets_hz: Optional[Tuple[float, ...]] = None
    declared_rationality: Optional[str] = None
    spacing_wavelengths: float = 0.75
    carrier_hz: float = 3.6e9
    symbol_rate_hz: float = 50e6
    constellation: str = "16-qam"
    n_bits: int = 100_000
    snr_db: float = 25.0
    pe_th: float = 1e-3
    target_d_m: float = 100.0
    target_theta_deg: float = -15.0
    d_lim_m: float = 180.0
    seed: int = 20817
    preamble_pilots: Optional[int] = None
    grid_d_min_m: Optional[float] = None
    grid_d_max_m: Optional[float] = None
    grid_theta_min_deg: Optional[float] = None
    grid_theta_max_deg: Optional[float] = None
    grid_n_d: int = 400
    grid_n_theta: int = 400
    bits_per_cell: int = 20_000

    # -- builders ---------------------------------------------------------

    def build_recipe(self) -> OffsetRecipe:
        if self.recipe == "symmetric-linear":
            return SymmetricLinear(self.delta_f_hz)
        if self.recipe == "alternating-linear":
            return AlternatingLinear(self.delta_f_hz)
        if self.recipe == "symmetric-logarithmic":
            return SymmetricLogarithmic(self.delta_f_hz, self.log_base)
        if self.recipe == "alternating-logarithmic":
            return AlternatingLogarithmic(self.delta_f_hz, self.log_base)
        if self.recipe == "custom":
            if self.custom_offsets_hz is None:
                raise ConfigurationError("custom recipe requires custom_offsets_hz")
            return CustomOffsets(tuple(self.custom_offsets_hz), self.declared_rationality)
        raise ConfigurationError(f"unknown recipe {self.recipe!r}; choose from {RECIPE_NAMES}")

    def build_layout(self) -> ArrayLayout:
        spacing = self.spacing_wavelengths * 299_792_458.0 / self.carrier_hz
        if self.recipe in _EDGE_RECIPES:
            return edge_layout(self.n_antennas, spacing, self.carrier_hz)
        if self.recipe in _CENTRAL_RECIPES:
            return central_layout(self.n_antennas, spacing, self.carrier_hz)
        # Custom profiles default to an edge reference.
        return edge_layout(self.n_antennas, spacing, self.carrier_hz)

    def build_profile(self) -> OffsetProfile:
        return make_offset_profile(self.build_recipe(), self.build_layout())

    def build_target(self) -> PolarPosition:
        return PolarPosition(self.target_d_m, math.radians(self.target_theta_deg))

    def build_constellation(self) -> Constellation:
        name = self.constellation.lower()
        try:
            if name.endswith("-psk"):
                return Constellation("psk", int(name[:-4]))
            if name.endswith("-qam"):
                return Constellation("qam", int(name[:-4]))
        except ValueError as exc:
            raise ConfigurationError(f"bad constellation {self.constellation!r}") from exc
        raise ConfigurationError(f"bad constellation {self.constellation!r} (want e.g. 16-qam, 8-psk)")

    def build_link_params(self, n_bits: Optional[int] = None) -> LinkParams:
        return LinkParams(
            gamma_s_db=self.snr_db,
            symbol_rate_hz=self.symbol_rate_hz,
            n_bits=self.n_bits if n_bits is None else n_bits,
            master_seed=self.seed,
            preamble_pilots=self.preamble_pilots,
        )

    def corrected_threshold(self) -> PhaseThreshold:
        return awgn_phase_threshold(
            self.build_constellation(),
            10.0 ** (self.snr_db / 10.0),
            self.n_antennas,
            self.pe_th,
        )

    def noiseless_threshold(self) -> PhaseThreshold:
        return noiseless_phase_threshold(self.build_constellation())

    def grid_bounds(self) -> Tuple[float, float, float, float]:
        "Grid limits (d_min, d_max, theta_min_rad, theta_max_rad) with defaults."
        d_min = self.grid_d_min_m if self.grid_d_min_m is not None else max(1.0, self.target_d_m - 50.0)
        d_max = self.grid_d_max_m if self.grid_d_max_m is not None else self.target_d_m + 50.0
        t_min = self.grid_theta_min_deg if self.grid_theta_min_deg is not None else self.target_theta_deg - 25.0
        t_max = self.grid_theta_max_deg if self.grid_theta_max_deg is not None else self.target_theta_deg + 25.0
        return d_min, d_max, math.radians(t_min), math.radians(t_max)

    def validate(self) -> "Scenario":
        "Cross-field validation; raises ConfigurationError on bad combinations."
        self.build_profile()
        self.build_target()
        self.build_constellation()
        self.build_link_params()
        if not 0.0 < self.pe_th < 0.5:
            raise ConfigurationError("pe_th must lie in (0, 0.5)")
        if self.d_lim_m <= self.target_d_m:
            raise ConfigurationError("d_lim must exceed the target distance")
        return self

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        data = asdict(self)
        if data["custom_offsets_hz"] is not None:
            data["custom_offsets_hz"] = list(data["custom_offsets_hz"])
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown scenario keys: {sorted(unknown)}")
        if "custom_offsets_hz" in data and data["custom_offsets_hz"] is not None:
            data = dict(data, custom_offsets_hz=tuple(data["custom_offsets_hz"]))
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def with_overrides(self, **kwargs) -> "Scenario":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


def default_scenario() -> Scenario:
    return Scenario()
