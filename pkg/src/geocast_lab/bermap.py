"""Spatial BER maps, zone detection and theory-vs-simulation comparison.

A map samples the link on a uniform (d, theta) grid, either by running the
Monte-Carlo simulator per cell, by evaluating the residual-phase predicate
analytically, or by running the beamforming baseline. Detection thresholds
the map, labels 4-connected components and measures the main zone's
footprint so it can be held against the closed-form predictions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from .arraycore import PolarPosition, residual_phase_field
from .errors import ParameterError
from .linksim import simulate_beamforming, simulate_fda_sdf
from .scenario import Scenario
from .zones import ZoneReport

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])

METHODS = ("monte-carlo", "predicate", "beamforming")


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell grid over distance and physical angle.

    Cell centers sit at ``lo + (i + 0.5) * width``; ``d_min`` may be 0 (the
    first cell center is still strictly positive).
    """

    d_min_m: float
    d_max_m: float
    theta_min_rad: float
    theta_max_rad: float
    n_d: int
    n_theta: int

    def __post_init__(self) -> None:
        if self.n_d < 2 or self.n_theta < 2:
            raise ParameterError("grids need at least 2 cells per axis")
        if self.d_min_m < 0 or self.d_max_m <= self.d_min_m:
            raise ParameterError("need 0 <= d_min < d_max")
        if self.theta_max_rad <= self.theta_min_rad:
            raise ParameterError("need theta_min < theta_max")

    @property
    def cell_d_m(self) -> float:
        return (self.d_max_m - self.d_min_m) / self.n_d

    @property
    def cell_theta_rad(self) -> float:
        return (self.theta_max_rad - self.theta_min_rad) / self.n_theta

    @property
    def d_centers(self) -> np.ndarray:
        return self.d_min_m + (np.arange(self.n_d) + 0.5) * self.cell_d_m

    @property
    def theta_centers(self) -> np.ndarray:
        return self.theta_min_rad + (np.arange(self.n_theta) + 0.5) * self.cell_theta_rad

    def nearest_cell(self, d_m: float, theta_rad: float) -> Tuple[int, int]:
        i = int(np.argmin(np.abs(self.d_centers - d_m)))
        j = int(np.argmin(np.abs(self.theta_centers - theta_rad)))
        return i, j


@dataclass(frozen=True)
class BerMap:
    """BER (or in/out-of-zone indicator) per grid cell.

    ``values[i, j]`` belongs to ``d_centers[i]``, ``theta_centers[j]``.
    Monte-Carlo values are exact multiples of 1/bits_per_cell; predicate
    maps store 0.0 inside the zone and 1.0 outside.
    """

    grid: GridSpec
    values: np.ndarray
    method: str
    bits_per_cell: Optional[int] = None
    threshold_rad: Optional[float] = None


def compute_ber_map(
    grid: GridSpec,
    scenario: Scenario,
    method: str = "monte-carlo",
    bits_per_cell: Optional[int] = None,
    threads: int = 1,
) -> BerMap:
    """Sample the scenario's link over the grid.

    ``method`` is one of ``monte-carlo`` (per-cell distributed-link
    simulation), ``predicate`` (analytic residual-phase test against the
    AWGN-corrected threshold; infeasible-threshold errors propagate) or
    ``beamforming`` (the summation baseline). Cells are independent and
    deterministically seeded, so the thread count never changes the result.
    """
    if method not in METHODS:
        raise ParameterError(f"unknown map method {method!r}; choose from {METHODS}")
    layout = scenario.build_layout()
    profile = scenario.build_profile()
    target = scenario.build_target()

    if method == "predicate":
        phi = scenario.corrected_threshold().value
        field = residual_phase_field(
            grid.d_centers, grid.theta_centers, target, layout, profile
        )
        inside = np.max(np.abs(field), axis=0) < phi
        values = np.where(inside, 0.0, 1.0)
        return BerMap(grid, values, method, threshold_rad=phi)

    constellation = scenario.build_constellation()
    n_bits = scenario.bits_per_cell if bits_per_cell is None else bits_per_cell
    params = scenario.build_link_params(n_bits=n_bits)
    d_centers, theta_centers = grid.d_centers, grid.theta_centers

    def run_cell(idx: Tuple[int, int]) -> float:
        pos = PolarPosition(d_centers[idx[0]], theta_centers[idx[1]])
        if method == "monte-carlo":
            return simulate_fda_sdf(pos, target, layout, profile, constellation, params).ber
        return simulate_beamforming(pos, target, layout, profile, constellation, params).ber

    cells = [(i, j) for i in range(grid.n_d) for j in range(grid.n_theta)]
    values = np.empty((grid.n_d, grid.n_theta), dtype=float)
    if threads <= 1:
        for idx in cells:
            values[idx] = run_cell(idx)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for idx, ber in zip(cells, pool.map(run_cell, cells, chunksize=64)):
                values[idx] = ber
    return BerMap(grid, values, method, bits_per_cell=n_bits)


# ---------------------------------------------------------------------------
# Zone detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZoneComponent:
    """One connected sub-threshold component, measured by cell footprint."""

    n_cells: int
    d_extent_m: float
    theta_extent_rad: float
    centroid_d_m: float
    centroid_theta_rad: float


@dataclass(frozen=True)
class ZoneMeasurement:
    """Detected zones in a BER map.

    ``main_zone`` is the component containing (or nearest to) the grid cell
    closest to the target; ``cut_widths`` are measured along the grid row
    and column through that cell. ``main_zone`` is None when no cell is
    below threshold.
    """

    main_zone: Optional[ZoneComponent]
    sidelobes: Tuple[ZoneComponent, ...]
    touches_boundary: bool
    cut_width_radial_m: float
    cut_width_azimuthal_rad: float


def _component(
    grid: GridSpec, cells_i: np.ndarray, cells_j: np.ndarray
) -> ZoneComponent:
    d = grid.d_centers[cells_i]
    t = grid.theta_centers[cells_j]
    return ZoneComponent(
        n_cells=int(cells_i.size),
        d_extent_m=float(d.max() - d.min()) + grid.cell_d_m,
        theta_extent_rad=float(t.max() - t.min()) + grid.cell_theta_rad,
        centroid_d_m=float(d.mean()),
        centroid_theta_rad=float(t.mean()),
    )


def _cut_length(mask_line: np.ndarray, at: int, cell: float) -> float:
    "Footprint length of the sub-threshold run through index `at` (0 if outside)."
    if not mask_line[at]:
        return 0.0
    lo = at
    while lo - 1 >= 0 and mask_line[lo - 1]:
        lo -= 1
    hi = at
    while hi + 1 < mask_line.size and mask_line[hi + 1]:
        hi += 1
    return (hi - lo + 1) * cell


def detect_zones(ber_map: BerMap, target: PolarPosition, pe_th: float) -> ZoneMeasurement:
    """Threshold the map strictly below ``pe_th`` and measure the zones.

    Components are 4-connected (no diagonal bridging). Returns an
    empty-zone measurement rather than raising when nothing is below
    threshold.
    """
    if not 0.0 <= pe_th < 0.5:
        raise ParameterError("pe_th must lie in [0, 0.5)")
    grid = ber_map.grid
    mask = ber_map.values < pe_th
    ti, tj = grid.nearest_cell(target.d_m, target.theta_rad)
    cut_r = _cut_length(mask[:, tj], ti, grid.cell_d_m)
    cut_a = _cut_length(mask[ti, :], tj, grid.cell_theta_rad)
    labels, n_comp = ndimage.label(mask, structure=_CROSS)
    if n_comp == 0:
        return ZoneMeasurement(None, (), False, cut_r, cut_a)

    if labels[ti, tj] != 0:
        main_label = int(labels[ti, tj])
    else:
        # Nearest component to the target cell, in cell-index distance.
        ii, jj = np.nonzero(labels)
        dist2 = (ii - ti) ** 2 + (jj - tj) ** 2
        main_label = int(labels[ii[np.argmin(dist2)], jj[np.argmin(dist2)]])

    main_cells = np.nonzero(labels == main_label)
    main = _component(grid, *main_cells)
    touches = bool(
        np.any(main_cells[0] == 0)
        or np.any(main_cells[0] == grid.n_d - 1)
        or np.any(main_cells[1] == 0)
        or np.any(main_cells[1] == grid.n_theta - 1)
    )
    sidelobes: List[ZoneComponent] = []
    for lab in range(1, n_comp + 1):
        if lab == main_label:
            continue
        sidelobes.append(_component(grid, *np.nonzero(labels == lab)))
    sidelobes.sort(key=lambda z: (z.centroid_d_m, z.centroid_theta_rad))
    return ZoneMeasurement(main, tuple(sidelobes), touches, cut_r, cut_a)


# ---------------------------------------------------------------------------
# Comparison against the analytic report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SidelobeMatch:
    predicted_d_m: float
    predicted_theta_rad: float
    measured_d_m: float
    measured_theta_rad: float
    distance_cells: float


@dataclass(frozen=True)
class TheoryComparison:
    """Relative width errors and sidelobe position matches.

    For fully coupled profiles the region extent is unbounded, so the
    comparison switches to the cut widths through the target (the
    ``via_cut_widths`` flag records this).
    """

    empty: bool
    via_cut_widths: bool
    radial_relative_error: Optional[float]
    azimuthal_relative_error: Optional[float]
    sidelobe_matches: Tuple[SidelobeMatch, ...]
    tolerance: float
    passed: Optional[bool]


def compare_theory(
    measurement: ZoneMeasurement,
    report: ZoneReport,
    grid: GridSpec,
    tolerance: float = 0.15,
) -> TheoryComparison:
    """Hold measured zone sizes and sidelobe positions against predictions."""
    if measurement.main_zone is None:
        return TheoryComparison(True, False, None, None, (), tolerance, None)

    via_cut = report.factors.method == "cut-fallback" or not report.polygon.bounded
    if via_cut:
        measured_d = measurement.cut_width_radial_m
        measured_t = measurement.cut_width_azimuthal_rad
    else:
        measured_d = measurement.main_zone.d_extent_m
        measured_t = measurement.main_zone.theta_extent_rad
    err_d = abs(measured_d - report.widths.theta_d_m) / report.widths.theta_d_m
    err_t = abs(measured_t - report.widths.theta_theta_rad) / report.widths.theta_theta_rad

    matches: List[SidelobeMatch] = []
    all_measured = ([measurement.main_zone] if measurement.main_zone else []) + list(
        measurement.sidelobes
    )
    for center in report.lattice.centers:
        if not (grid.d_min_m <= center.d_m <= grid.d_max_m):
            continue
        theta = center.theta_rad
        if not (grid.theta_min_rad <= theta <= grid.theta_max_rad):
            continue
        best = None
        for comp in all_measured:
            di = (comp.centroid_d_m - center.d_m) / grid.cell_d_m
            dj = (comp.centroid_theta_rad - theta) / grid.cell_theta_rad
            dist = math.hypot(di, dj)
            if best is None or dist < best:
                best = dist
                best_comp = comp
        if best is not None:
            matches.append(
                SidelobeMatch(
                    center.d_m, theta, best_comp.centroid_d_m, best_comp.centroid_theta_rad, best
                )
            )
    passed = err_d <= tolerance and err_t <= tolerance
    return TheoryComparison(False, via_cut, err_d, err_t, tuple(matches), tolerance, passed)
