import math

import numpy as np
import pytest

import geocast_lab as gl
from geocast_lab.bermap import GridSpec, compute_ber_map, compare_theory, detect_zones
from geocast_lab.errors import InfeasibleThresholdError, ParameterError
from geocast_lab.scenario import default_scenario

from conftest import CARRIER_HZ, SPACING_M, WAVELENGTH_M


def small_grid(d0=100.0, th0=-15.0, span_d=8.0, span_th=4.0, n=24):
    return GridSpec(
        d0 - span_d, d0 + span_d,
        math.radians(th0 - span_th), math.radians(th0 + span_th),
        n, n,
    )


class TestGridSpec:
    def test_cell_centers(self):
        g = GridSpec(0.0, 10.0, 0.0, 1.0, 5, 4)
        assert g.d_centers == pytest.approx([1.0, 3.0, 5.0, 7.0, 9.0])
        assert g.cell_theta_rad == pytest.approx(0.25)
        assert g.nearest_cell(5.2, 0.4) == (2, 1)

    def test_validation(self):
        with pytest.raises(ParameterError):
            GridSpec(0.0, 10.0, 0.0, 1.0, 1, 4)
        with pytest.raises(ParameterError):
            GridSpec(-1.0, 10.0, 0.0, 1.0, 4, 4)
        with pytest.raises(ParameterError):
            GridSpec(5.0, 5.0, 0.0, 1.0, 4, 4)


class TestComputeBerMap:
    def test_predicate_marks_target_cell(self):
        sc = default_scenario()
        m = compute_ber_map(small_grid(), sc, "predicate")
        i, j = m.grid.nearest_cell(100.0, math.radians(-15.0))
        assert m.values[i, j] == 0.0
        assert set(np.unique(m.values)) <= {0.0, 1.0}

    def test_monte_carlo_cells_match_direct_simulation(self):
        sc = default_scenario()
        g = GridSpec(99.0, 101.0, math.radians(-15.5), math.radians(-14.5), 2, 2)
        m = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=4000)
        for i, d in enumerate(g.d_centers):
            for j, t in enumerate(g.theta_centers):
                direct = gl.simulate_fda_sdf(
                    gl.PolarPosition(d, t),
                    sc.build_target(),
                    sc.build_layout(),
                    sc.build_profile(),
                    sc.build_constellation(),
                    sc.build_link_params(n_bits=4000),
                )
                assert m.values[i, j] == direct.ber
        assert np.all(np.abs(m.values * 4000 - np.round(m.values * 4000)) < 1e-9)

    def test_threads_do_not_change_values(self):
        sc = default_scenario()
        g = small_grid(n=6)
        a = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=2000, threads=1)
        b = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=2000, threads=4)
        assert np.array_equal(a.values, b.values)

    def test_monte_carlo_agrees_with_predicate(self):
        sc = default_scenario()
        g = GridSpec(
            90.0, 110.0, math.radians(-20.0), math.radians(-10.0), 40, 40
        )
        mc = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=20_000)
        pr = compute_ber_map(g, sc, "predicate")
        mc_zone = mc.values < sc.pe_th
        pr_zone = pr.values == 0.0
        disagree = np.mean(mc_zone != pr_zone)
        assert disagree < 0.03

    def test_infeasible_threshold_propagates(self):
        sc = default_scenario().with_overrides(snr_db=10.0)
        with pytest.raises(InfeasibleThresholdError):
            compute_ber_map(small_grid(n=4), sc, "predicate")

    def test_unknown_method(self):
        with pytest.raises(ParameterError):
            compute_ber_map(small_grid(n=4), default_scenario(), "magic")


class TestDetectZones:
    def test_single_zone_for_radially_unique_profile(self):
        sc = default_scenario()
        m = compute_ber_map(small_grid(span_d=25.0, span_th=12.0, n=80), sc, "predicate")
        z = detect_zones(m, sc.build_target(), sc.pe_th)
        assert z.main_zone is not None and not z.sidelobes
        assert z.main_zone.centroid_d_m == pytest.approx(100.0, abs=m.grid.cell_d_m)
        assert not z.touches_boundary

    def test_sidelobes_match_lattice(self):
        sc = default_scenario().with_overrides(recipe="alternating-linear")
        g = GridSpec(0.0, 200.0, math.radians(-60.0), math.radians(60.0), 220, 220)
        m = compute_ber_map(g, sc, "predicate")
        target = sc.build_target()
        z = detect_zones(m, target, sc.pe_th)
        layout, prof = sc.build_layout(), sc.build_profile()
        cls = gl.classify_offsets(prof, layout)
        lat = gl.enumerate_zone_lattice(cls, target, layout, 0.0, 200.0, prof)
        in_grid = [
            c for c in lat.centers
            if g.theta_min_rad <= c.theta_rad <= g.theta_max_rad
        ]
        assert 1 + len(z.sidelobes) == len(in_grid)
        side = [s for s in z.sidelobes if abs(s.centroid_d_m - 174.95) < 2.0]
        assert side and abs(math.degrees(side[0].centroid_theta_rad) - 4.27) < 1.0

    def test_zero_threshold_empty(self):
        sc = default_scenario()
        m = compute_ber_map(small_grid(n=6), sc, "predicate")
        z = detect_zones(m, sc.build_target(), 0.0)
        assert z.main_zone is None and z.cut_width_radial_m == 0.0

    def test_ridge_touches_boundary(self):
        sc = default_scenario().with_overrides(recipe="symmetric-linear", n_antennas=5)
        g = small_grid(span_d=8.0, span_th=4.0, n=60)
        m = compute_ber_map(g, sc, "predicate")
        z = detect_zones(m, sc.build_target(), sc.pe_th)
        assert z.touches_boundary
        assert z.cut_width_radial_m > 0.0

    def test_extent_at_least_one_cell(self):
        sc = default_scenario()
        m = compute_ber_map(small_grid(n=10), sc, "predicate")
        z = detect_zones(m, sc.build_target(), sc.pe_th)
        assert z.main_zone.d_extent_m >= m.grid.cell_d_m
        assert z.main_zone.theta_extent_rad >= m.grid.cell_theta_rad


class TestSymmetryAndZoom:
    def test_predicate_invariant_under_angular_period_shift(self):
        # paired positions one angular period apart classify identically
        # (sampled away from the zone boundary)
        layout = gl.edge_layout(4, 2.0 * WAVELENGTH_M, CARRIER_HZ)
        prof = gl.make_offset_profile(gl.AlternatingLogarithmic(1e6, 1.2), layout)
        target = gl.PolarPosition(100.0, math.radians(-15.0))
        phi = 0.21539805427800017
        t_sin = layout.wavelength_m / layout.spacing_m
        rng = np.random.default_rng(2)
        checked = 0
        for _ in range(300):
            d = rng.uniform(90.0, 110.0)
            s = rng.uniform(-0.45, 0.45)
            pos = gl.PolarPosition(d, math.asin(s))
            shifted = gl.PolarPosition(d, math.asin(s + t_sin))
            margin = np.max(np.abs(gl.residual_phases(pos, target, layout, prof)))
            if abs(margin - phi) < 0.05:
                continue
            assert gl.zone_predicate(pos, target, layout, prof, phi) == gl.zone_predicate(
                shifted, target, layout, prof, phi
            )
            checked += 1
        assert checked > 100

    def test_monotone_zoom(self):
        sc = default_scenario()
        target = sc.build_target()
        report = gl.analyze_zones(
            sc.build_profile(), sc.build_layout(), target,
            sc.corrected_threshold(), 0.0, 180.0, sc.d_lim_m,
        )
        errs = {}
        for n in (40, 80):
            g = small_grid(span_d=6.0, span_th=3.0, n=n)
            m = compute_ber_map(g, sc, "predicate")
            z = detect_zones(m, target, sc.pe_th)
            errs[n] = abs(z.main_zone.d_extent_m - report.widths.theta_d_m)
            cell = g.cell_d_m
            if n == 40:
                coarse_cell = cell
        assert errs[80] <= errs[40] + coarse_cell


class TestCompareTheory:
    def test_small_monte_carlo_map_matches_theory(self):
        sc = default_scenario()
        target = sc.build_target()
        g = small_grid(span_d=3.0, span_th=2.0, n=30)
        m = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=20_000)
        z = detect_zones(m, target, sc.pe_th)
        report = gl.analyze_zones(
            sc.build_profile(), sc.build_layout(), target,
            sc.corrected_threshold(), g.d_min_m, g.d_max_m, sc.d_lim_m,
        )
        comp = compare_theory(z, report, g)
        assert not comp.empty and not comp.via_cut_widths
        assert comp.radial_relative_error < 0.15
        assert comp.azimuthal_relative_error < 0.15
        assert comp.passed

    def test_coupled_profile_compares_cut_widths(self):
        sc = default_scenario().with_overrides(recipe="symmetric-linear", n_antennas=5)
        target = sc.build_target()
        g = small_grid(span_d=9.0, span_th=3.0, n=40)
        m = compute_ber_map(g, sc, "monte-carlo", bits_per_cell=20_000)
        z = detect_zones(m, target, sc.pe_th)
        report = gl.analyze_zones(
            sc.build_profile(), sc.build_layout(), target,
            sc.corrected_threshold(), g.d_min_m, g.d_max_m, sc.d_lim_m,
        )
        comp = compare_theory(z, report, g)
        assert comp.via_cut_widths
        assert comp.radial_relative_error < 0.15

    def test_empty_measurement(self):
        sc = default_scenario()
        g = small_grid(n=4)
        m = compute_ber_map(g, sc, "predicate")
        z = detect_zones(m, sc.build_target(), 0.0)
        report = gl.analyze_zones(
            sc.build_profile(), sc.build_layout(), sc.build_target(),
            sc.corrected_threshold(), 0.0, 180.0, sc.d_lim_m,
        )
        comp = compare_theory(z, report, g)
        assert comp.empty and comp.passed is None
