"""Scenario-driven command line front end.

Commands
--------
offsets        per-antenna offsets, classification, periods, uniqueness (JSON/CSV)
zones          analytic zone report with lattice centers and polygon (JSON)
widths         width table over an antenna-count sweep (CSV)
map            BER map files: ber.csv, ber.ppm, zone_mask.ppm
orthogonality  waveform orthogonality validation report (JSON)
compare        Monte-Carlo map vs analytic predictions (JSON)

Every command is a pure function of (scenario file, flags, seed): repeated
runs produce byte-identical bytes, at any ``--threads`` value. Exit codes:
0 success, 2 configuration error, 3 infeasible threshold, 4 I/O error.

Map CSV format: header ``d_m,theta_deg,ber``, row-major by d then theta, 9
significant digits. PPM heatmaps are binary grayscale (P5, maxval 255),
``n_theta`` columns by ``n_d`` rows in the same order as the CSV: intensity
0 (black) for BER <= 1e-6, 255 (white) for BER >= 0.5, linear in log10(BER)
between; the zone mask marks sub-threshold cells with 255.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .bermap import BerMap, GridSpec, compute_ber_map, compare_theory, detect_zones
from .errors import ConfigurationError, InfeasibleThresholdError, ParameterError
from .linksim import validate_orthogonality
from .scenario import RECIPE_NAMES, Scenario, default_scenario
from .zones import analyze_zones, table1_reference

_FLOAT_FMT = "%.9g"


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


# ---------------------------------------------------------------------------
# Output writers
# ---------------------------------------------------------------------------

def _emit(text: str, out_dir: Optional[str], filename: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")
    if out_dir is not None:
        path = Path(out_dir) / filename
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")


def _json_text(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def map_csv_bytes(ber_map: BerMap) -> bytes:
    grid = ber_map.grid
    lines = ["d_m,theta_deg,ber"]
    theta_deg = np.degrees(grid.theta_centers)
    for i, d in enumerate(grid.d_centers):
        for j, t in enumerate(theta_deg):
            lines.append(f"{_fmt(d)},{_fmt(t)},{_fmt(ber_map.values[i, j])}")
    return ("\n".join(lines) + "\n").encode()


def _heat_intensity(values: np.ndarray) -> np.ndarray:
    "0 (black) at BER <= 1e-6, 255 (white) at BER >= 0.5, log10-linear between."
    floor, ceil = 1e-6, 0.5
    clipped = np.clip(values, floor, ceil)
    t = (np.log10(clipped) - math.log10(floor)) / (math.log10(ceil) - math.log10(floor))
    return np.round(255.0 * t).astype(np.uint8)


def ppm_bytes(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode() + pixels.astype(np.uint8).tobytes()


def write_map_files(ber_map: BerMap, pe_th: float, out_dir: str) -> List[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ber.csv").write_bytes(map_csv_bytes(ber_map))
    (out / "ber.ppm").write_bytes(ppm_bytes(_heat_intensity(ber_map.values)))
    mask = np.where(ber_map.values < pe_th, 255, 0).astype(np.uint8)
    (out / "zone_mask.ppm").write_bytes(ppm_bytes(mask))
    return ["ber.csv", "ber.ppm", "zone_mask.ppm"]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _scenario_from_args(args) -> Scenario:
    if args.scenario:
        scenario = Scenario.from_json(Path(args.scenario).read_text())
    else:
        scenario = default_scenario()
    overrides = dict(
        recipe=args.recipe,
        n_antennas=args.n_antennas,
        delta_f_hz=args.delta_f_hz,
        log_base=args.log_base,
        seed=args.seed,
    )
    if getattr(args, "bits_per_cell", None) is not None:
        overrides["bits_per_cell"] = args.bits_per_cell
    return scenario.with_overrides(**overrides).validate()


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("GEOCAST_LAB_THREADS")
    return max(1, int(env)) if env else 1


def _zone_report(scenario: Scenario, d_min: float, d_max: float):
    return analyze_zones(
        scenario.build_profile(),
        scenario.build_layout(),
        scenario.build_target(),
        scenario.corrected_threshold(),
        d_min,
        d_max,
        scenario.d_lim_m,
    )


def cmd_offsets(args) -> int:
    scenario = _scenario_from_args(args)
    layout = scenario.build_layout()
    profile = scenario.build_profile()
    report = _zone_report(scenario, 0.0, scenario.d_lim_m)
    if args.format == "csv":
        lines = ["antenna_index,offset_hz"]
        for n, v in zip(layout.indices, profile.array):
            lines.append(f"{int(n)},{_fmt(v)}")
        _emit("\n".join(lines), args.out_dir, "offsets.csv")
        return 0
    data = {
        "antenna_indices": [int(n) for n in layout.indices],
        "offsets_hz": [float(v) for v in profile.array],
        "spacing_m": layout.spacing_m,
        "wavelength_m": layout.wavelength_m,
        "classification": report.to_dict()["classification"],
        "radial_period_m": report.radial_period_m,
        "angular_period_sin": report.angular_period_sin,
        "uniqueness": report.to_dict()["uniqueness"],
    }
    _emit(_json_text(data), args.out_dir, "offsets.json")
    return 0


def cmd_zones(args) -> int:
    scenario = _scenario_from_args(args)
    d_min = args.d_min if args.d_min is not None else 0.0
    d_max = args.d_max if args.d_max is not None else scenario.d_lim_m
    report = _zone_report(scenario, d_min, d_max)
    data = report.to_dict()
    data["region"] = {"d_min_m": d_min, "d_max_m": d_max}
    _emit(_json_text(data), args.out_dir, "zones.json")
    return 0


def cmd_widths(args) -> int:
    scenario = _scenario_from_args(args)
    if args.n_sweep:
        lo, hi = (int(x) for x in args.n_sweep.split(":"))
        sweep = range(lo, hi + 1)
    else:
        sweep = [scenario.n_antennas]
    header = "recipe,n_antennas,f_d_s,f_theta,method,radial_width_m,azimuthal_width_deg"
    if args.compare_beamforming:
        header += ",bf_radial_width_m,bf_azimuthal_width_deg"
    lines = [header]
    for n in sweep:
        if scenario.recipe in ("symmetric-linear", "symmetric-logarithmic") and n % 2 == 0:
            continue
        sc = scenario.with_overrides(n_antennas=n)
        report = _zone_report(sc, 0.0, sc.d_lim_m)
        row = (
            f"{sc.recipe},{n},{_fmt(report.factors.f_d)},{_fmt(report.factors.f_theta)},"
            f"{report.factors.method},{_fmt(report.widths.theta_d_m)},"
            f"{_fmt(math.degrees(report.widths.theta_theta_rad))}"
        )
        if args.compare_beamforming:
            bf_d, bf_t = _beamforming_widths(sc)
            row += f",{_fmt(bf_d)},{_fmt(math.degrees(bf_t))}"
        lines.append(row)
    _emit("\n".join(lines), args.out_dir, "widths.csv")
    return 0


def _beamforming_widths(scenario: Scenario, n_cells: int = 33) -> tuple:
    "Measure baseline widths from a compact beamforming Monte-Carlo map."
    from .bermap import compute_ber_map as _cbm  # local alias for clarity

    layout = scenario.build_layout()
    profile = scenario.build_profile()
    target = scenario.build_target()
    span_d, span_sin = _beamforming_span(layout, profile, scenario)
    t_lo = math.asin(max(-1.0, target.sin_theta - span_sin))
    t_hi = math.asin(min(1.0, target.sin_theta + span_sin))
    grid = GridSpec(
        max(0.0, target.d_m - span_d), target.d_m + span_d, t_lo, t_hi, n_cells, n_cells
    )
    bmap = _cbm(grid, scenario, "beamforming", bits_per_cell=scenario.bits_per_cell)
    meas = detect_zones(bmap, target, scenario.pe_th)
    if meas.main_zone is None:
        return math.nan, math.nan
    return meas.main_zone.d_extent_m, meas.main_zone.theta_extent_rad


def _beamforming_span(layout, profile, scenario: Scenario) -> tuple:
    "Half-spans (m, sin) containing the baseline main lobe, from the gain cut."
    from .arraycore import SPEED_OF_LIGHT

    n = layout.indices
    df = profile.array
    gamma = 10.0 ** (scenario.snr_db / 10.0)

    def gain(dd, dsin):
        ph = (
            2.0 * np.pi * (n[:, None] * layout.spacing_m / layout.wavelength_m) * dsin[None, :]
            - 2.0 * np.pi * (df[:, None] / SPEED_OF_LIGHT) * dd[None, :]
        )
        return np.abs(np.exp(1j * ph).sum(axis=0)) / layout.n_antennas

    # Receiver needs |G|/N above the level where the local SNR meets pe_th.
    from .constellation import awgn_phase_threshold  # ensures feasibility is checked

    awgn_phase_threshold(
        scenario.build_constellation(), gamma, layout.n_antennas, scenario.pe_th
    )
    g_req = _gain_level_for_ber(scenario, gamma)
    for span in (2.0, 5.0, 10.0, 25.0, 60.0, 150.0):
        dd = np.linspace(-span, span, 2001)
        g = gain(dd, np.zeros_like(dd))
        run = _center_run(g > g_req)
        if run is not None and run[1] < len(dd) - 1 and run[0] > 0:
            span_d = max(abs(dd[run[0]]), abs(dd[run[1]])) * 1.8 + 3 * (dd[1] - dd[0])
            break
    else:
        span_d = 150.0
    for span in (0.02, 0.05, 0.1, 0.25, 0.5):
        ds = np.linspace(-span, span, 2001)
        g = gain(np.zeros_like(ds), ds)
        run = _center_run(g > g_req)
        if run is not None and run[1] < len(ds) - 1 and run[0] > 0:
            span_sin = max(abs(ds[run[0]]), abs(ds[run[1]])) * 1.8 + 3 * (ds[1] - ds[0])
            break
    else:
        span_sin = 0.5
    return span_d, span_sin


def _center_run(mask: np.ndarray):
    mid = mask.size // 2
    if not mask[mid]:
        return None
    lo = mid
    while lo - 1 >= 0 and mask[lo - 1]:
        lo -= 1
    hi = mid
    while hi + 1 < mask.size and mask[hi + 1]:
        hi += 1
    return lo, hi


def _gain_level_for_ber(scenario: Scenario, gamma: float) -> float:
    "Normalized gain at which the local AWGN BER reaches pe_th."
    from scipy import special
    from scipy.optimize import brentq

    cons = scenario.build_constellation()
    m = cons.order

    def ber(snr):
        if cons.family == "qam":
            a = math.sqrt(3.0 * snr / (m - 1.0))
            root = math.sqrt(m)
            return (
                2.0
                * (root - 1.0)
                / (root * math.log2(m))
                * 2.0
                * float(special.ndtr(-a))
            )
        return 2.0 / math.log2(m) * float(special.ndtr(-math.sqrt(2.0 * snr) * math.sin(math.pi / m)))

    snr_req = brentq(lambda s: ber(s) - scenario.pe_th, 1e-3, 1e9)
    return min(1.0, math.sqrt(snr_req / gamma))


def cmd_map(args) -> int:
    scenario = _scenario_from_args(args)
    d_min, d_max, t_min, t_max = scenario.grid_bounds()
    grid = GridSpec(d_min, d_max, t_min, t_max, scenario.grid_n_d, scenario.grid_n_theta)
    ber_map = compute_ber_map(
        grid, scenario, method=args.method, bits_per_cell=scenario.bits_per_cell,
        threads=_threads(args),
    )
    out_dir = args.out_dir or "."
    files = write_map_files(ber_map, scenario.pe_th, out_dir)
    sys.stdout.write("wrote " + ", ".join(str(Path(out_dir) / f) for f in files) + "\n")
    return 0


def cmd_orthogonality(args) -> int:
    scenario = _scenario_from_args(args)
    deviation = validate_orthogonality(
        scenario.build_layout(),
        scenario.build_profile(),
        scenario.build_link_params(),
        oversampling=args.oversampling,
    )
    data = {
        "oversampling": args.oversampling,
        "max_deviation": deviation,
        "bound": 10.0 / args.oversampling,
        "within_bound": bool(deviation <= 10.0 / args.oversampling),
    }
    _emit(_json_text(data), args.out_dir, "orthogonality.json")
    return 0


def cmd_compare(args) -> int:
    scenario = _scenario_from_args(args)
    d_min, d_max, t_min, t_max = scenario.grid_bounds()
    grid = GridSpec(d_min, d_max, t_min, t_max, scenario.grid_n_d, scenario.grid_n_theta)
    ber_map = compute_ber_map(
        grid, scenario, method=args.method, bits_per_cell=scenario.bits_per_cell,
        threads=_threads(args),
    )
    target = scenario.build_target()
    measurement = detect_zones(ber_map, target, scenario.pe_th)
    report = _zone_report(scenario, d_min, d_max)
    comp = compare_theory(measurement, report, grid, tolerance=args.tolerance)
    data = {
        "empty": comp.empty,
        "via_cut_widths": comp.via_cut_widths,
        "radial_relative_error": comp.radial_relative_error,
        "azimuthal_relative_error": comp.azimuthal_relative_error,
        "tolerance": comp.tolerance,
        "passed": comp.passed,
        "predicted": {
            "radial_width_m": report.widths.theta_d_m,
            "azimuthal_width_rad": report.widths.theta_theta_rad,
        },
        "measured": None
        if measurement.main_zone is None
        else {
            "d_extent_m": measurement.main_zone.d_extent_m,
            "theta_extent_rad": measurement.main_zone.theta_extent_rad,
            "cut_width_radial_m": measurement.cut_width_radial_m,
            "cut_width_azimuthal_rad": measurement.cut_width_azimuthal_rad,
            "touches_boundary": measurement.touches_boundary,
            "n_sidelobes": len(measurement.sidelobes),
        },
        "sidelobe_matches": [
            {
                "predicted_d_m": s.predicted_d_m,
                "predicted_theta_rad": s.predicted_theta_rad,
                "measured_d_m": s.measured_d_m,
                "measured_theta_rad": s.measured_theta_rad,
                "distance_cells": s.distance_cells,
            }
            for s in comp.sidelobe_matches
        ],
    }
    _emit(_json_text(data), args.out_dir, "compare.json")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geocast-lab",
        description="Range-angle geocast delivery zone analytics and simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_bits=False):
        p.add_argument("--scenario", help="JSON scenario file; flags override its values")
        p.add_argument("--recipe", choices=RECIPE_NAMES)
        p.add_argument("--n-antennas", dest="n_antennas", type=int)
        p.add_argument("--delta-f-hz", dest="delta_f_hz", type=float)
        p.add_argument("--log-base", dest="log_base", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, help="worker threads (wall time only)")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if with_bits:
            p.add_argument("--bits-per-cell", dest="bits_per_cell", type=int)

    p = sub.add_parser("offsets", help="offsets, classification and uniqueness report")
    common(p)
    p.set_defaults(func=cmd_offsets)

    p = sub.add_parser("zones", help="analytic zone report (JSON)")
    common(p)
    p.add_argument("--d-min", dest="d_min", type=float)
    p.add_argument("--d-max", dest="d_max", type=float)
    p.set_defaults(func=cmd_zones)

    p = sub.add_parser("widths", help="width table, optionally sweeping N (CSV)")
    common(p)
    p.add_argument("--n-sweep", dest="n_sweep", help="e.g. 3:15")
    p.add_argument(
        "--compare-beamforming",
        action="store_true",
        help="append measured beamforming baseline widths",
    )
    p.set_defaults(func=cmd_widths)

    p = sub.add_parser("map", help="BER map files (CSV + PPM)")
    common(p, with_bits=True)
    p.add_argument(
        "--method", choices=("monte-carlo", "predicate", "beamforming"), default="predicate"
    )
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("orthogonality", help="waveform orthogonality check")
    common(p)
    p.add_argument("--oversampling", type=int, default=1024)
    p.set_defaults(func=cmd_orthogonality)

    p = sub.add_parser("compare", help="Monte-Carlo map vs analytic predictions")
    common(p, with_bits=True)
    p.add_argument(
        "--method", choices=("monte-carlo", "predicate", "beamforming"), default="monte-carlo"
    )
    p.add_argument("--tolerance", type=float, default=0.15)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleThresholdError as exc:
        print(f"error: infeasible threshold: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
