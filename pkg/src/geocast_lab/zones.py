"""Closed-form geography of delivery zones.

Where does a receiver recover the full datastream undistorted? The residual
phases vanish (mod 2 pi) on a lattice of points in the (d, sin theta) plane
whose structure is governed by integer arithmetic on the offset profile:

* profiles whose offsets are rational multiples of the smallest nonzero
  offset repeat radially and carry extra in-period zones counted by the gcd
  of an integer coefficient set,
* profiles with at least one irrational ratio are radially unique,
* every profile repeats in sin(theta) with period lambda0 / spacing.

This module classifies profiles, solves the underlying homogeneous linear
Diophantine system, enumerates zone centers, evaluates uniqueness bounds
and zone-width factors, and cross-checks the widths with an independent
half-plane-intersection polygon construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .arraycore import (
    SPEED_OF_LIGHT,
    AlternatingLinear,
    AlternatingLogarithmic,
    ArrayLayout,
    CustomOffsets,
    OffsetProfile,
    OffsetRecipe,
    PolarPosition,
    SteeringTarget,
    SymmetricLinear,
    SymmetricLogarithmic,
)
from .constellation import PhaseThreshold
from .errors import ConfigurationError, ParameterError

# Bounded-denominator rationality detection for custom profiles: a ratio is
# accepted as p/q when q <= RATIONALITY_MAX_DEN reproduces it to this
# relative accuracy. The same relative scale decides when a pair of strip
# boundaries counts as parallel.
RATIONALITY_MAX_DEN = 10**6
RATIONALITY_RTOL = 1e-9
_PARALLEL_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Offset classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OffsetClassification:
    """Integer structure of an offset profile.

    ``p``/``q`` give the reduced rational representation
    ``df_n = (p_n / q) df_ntilde`` when the profile is rational. ``d_gcd``
    is the gcd of the lattice coefficient set: the number of zones per
    spatial period when positive, 0 when the coefficient set is all-zero
    (fully coupled profile, a continuous ridge) and None when the system is
    empty (fewer than 3 antennas).
    """

    rational: bool
    n_tilde: int
    delta_f_tilde: float
    p: Optional[Tuple[int, ...]] = None
    q: Optional[int] = None
    d_gcd: Optional[int] = None
    angular_ref: int = 1
    rho: Optional[int] = None

    @property
    def coupled(self) -> bool:
        "True when the profile admits no isolated-zone lattice."
        return self.rational and (self.d_gcd is None or self.d_gcd == 0)


def _primitive_power(m: int) -> Tuple[int, int]:
    "Write integer m >= 2 as g**e with the smallest possible g."
    for e in range(m.bit_length() - 1, 0, -1):
        g = round(m ** (1.0 / e))
        for cand in (g - 1, g, g + 1):
            if cand >= 2 and cand**e == m:
                return cand, e
    return m, 1


def _exact_ratios(
    profile: OffsetProfile, layout: ArrayLayout, n_tilde: int
) -> Optional[Dict[int, Fraction]]:
    """Exact offset ratios df_n / df_ntilde, or None when irrational.

    Built-in recipes are resolved in integer arithmetic; linear recipes are
    rational by construction, logarithmic ones are rational only when all
    nonzero-offset antennas share a common primitive logarithm base.
    Custom profiles fall back to the bounded-denominator float test.
    """
    recipe = profile.recipe
    indices = layout.indices
    values = profile.array

    def alt_sign(n: int) -> int:
        return 1 if n % 2 == 1 else -1

    if isinstance(recipe, SymmetricLinear):
        return {int(n): Fraction(int(n), n_tilde) for n in indices}
    if isinstance(recipe, AlternatingLinear):
        s0 = alt_sign(n_tilde) * n_tilde
        return {int(n): Fraction(alt_sign(int(n)) * int(n), s0) for n in indices}
    if isinstance(recipe, (SymmetricLogarithmic, AlternatingLogarithmic)):
        alternating = isinstance(recipe, AlternatingLogarithmic)
        base_root: Optional[int] = None
        expo: Dict[int, int] = {}
        for n in indices:
            n = int(n)
            if n == 0:
                continue
            root, e = _primitive_power(abs(n) + 1)
            if base_root is None:
                base_root = root
            elif root != base_root:
                return None
            expo[n] = e
        ratios: Dict[int, Fraction] = {0: Fraction(0)} if 0 in indices else {}
        st = (alt_sign(n_tilde) if alternating else 1) * expo[n_tilde]
        for n, e in expo.items():
            s = (alt_sign(n) if alternating else 1) * e
            ratios[n] = Fraction(s, st)
        return ratios

    # Custom profile: declared intent first, numeric detection second.
    if isinstance(recipe, CustomOffsets) and recipe.declared_rationality == "irrational":
        return None
    f_tilde = values[list(indices).index(n_tilde)]
    ratios = {}
    for n, v in zip(indices, values):
        r = v / f_tilde
        frac = Fraction(r).limit_denominator(RATIONALITY_MAX_DEN)
        if abs(float(frac) - r) > RATIONALITY_RTOL * max(abs(r), 1e-300):
            if isinstance(recipe, CustomOffsets) and recipe.declared_rationality == "rational":
                raise ConfigurationError(
                    "profile declared rational but no bounded-denominator "
                    "representation was found"
                )
            return None
        ratios[int(n)] = frac
    return ratios


def classify_offsets(profile: OffsetProfile, layout: ArrayLayout) -> OffsetClassification:
    """Classify a profile as rational or irrational and extract its lattice data.

    Raises :class:`ParameterError` when every offset is zero (degenerate
    profile with no spatial selectivity).
    """
    indices = layout.indices
    values = profile.array
    nonzero = values != 0.0
    if not np.any(nonzero):
        raise ParameterError("degenerate profile: all frequency offsets are zero")

    mags = np.where(nonzero, np.abs(values), np.inf)
    best = np.min(mags)
    n_tilde = int(indices[np.flatnonzero(mags == best)[0]])
    f_tilde = float(values[list(indices).index(n_tilde)])

    ratios = _exact_ratios(profile, layout, n_tilde)
    if ratios is None:
        return OffsetClassification(False, n_tilde, f_tilde)

    q = math.lcm(*(r.denominator for r in ratios.values()))
    p = {n: int(r * q) for n, r in ratios.items()}
    r_ref = 1 if layout.n_above >= 1 else -1
    coeffs = [
        (n // r_ref) * p[r_ref] - p[n] if r_ref == 1 else (-n) * p[r_ref] - p[n]
        for n in map(int, indices)
        if n not in (0, r_ref)
    ]
    d_gcd: Optional[int] = math.gcd(*(abs(c) for c in coeffs)) if coeffs else None
    rho = p[r_ref] * r_ref
    p_tuple = tuple(p[int(n)] for n in indices)
    return OffsetClassification(
        True, n_tilde, f_tilde, p_tuple, q, d_gcd, angular_ref=r_ref, rho=rho
    )


# ---------------------------------------------------------------------------
# Homogeneous linear Diophantine system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HldeSolution:
    """Integer solution family of ``k_1/a_1 = ... = k_P/a_P``.

    ``kind`` is one of

    ``"lattice"``
        nontrivial solutions ``k_n = k * generator[n]``, k integer,
    ``"trivial-only"``
        some coefficient is certified non-integer,
    ``"coupled"``
        all coefficients vanish: the one-parameter family ``k_n = n k_1``,
    ``"under-determined"``
        the system is empty (too few antennas).
    """

    kind: str
    generator: Optional[Dict[int, int]] = None


def solve_hlde(coefficients: Mapping[int, Union[int, float]]) -> HldeSolution:
    """Solve the homogeneous linear Diophantine system with the given coefficients.

    Keys are antenna indices, values the per-antenna integer coefficients.
    Non-integer coefficients certify that only the trivial solution exists.
    The gcd treats zeros through gcd(x, 0) = |x| and the solution family is
    invariant under a common integer scaling of the coefficients.
    """
    if not coefficients:
        return HldeSolution("under-determined")
    ints: Dict[int, int] = {}
    for n, a in coefficients.items():
        if isinstance(a, (int, np.integer)):
            ints[int(n)] = int(a)
        elif isinstance(a, float) and a.is_integer():
            ints[int(n)] = int(a)
        else:
            return HldeSolution("trivial-only")
    g = math.gcd(*(abs(a) for a in ints.values()))
    if g == 0:
        return HldeSolution("coupled")
    return HldeSolution("lattice", {n: a // g for n, a in ints.items()})


# ---------------------------------------------------------------------------
# Zone locations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeLine:
    """Fully coupled profiles confine recovery to a family of parallel lines.

    Each line passes through the target with slope ``dsin_dd`` in the
    (d, sin theta) plane; successive lines are ``sin_spacing`` apart.
    """

    dsin_dd: float
    sin_spacing: float


@dataclass(frozen=True)
class BaseCaseZone:
    d_m: float
    sin_theta: float
    k_prime: int


@dataclass(frozen=True)
class BaseCaseZones:
    points: Tuple[BaseCaseZone, ...]
    coupled_ridge: bool = False
    ridge: Optional[RidgeLine] = None


def _ridge_line(
    classification: OffsetClassification,
    profile: OffsetProfile,
    layout: ArrayLayout,
) -> RidgeLine:
    r = classification.angular_ref
    df_r = float(profile.array[list(layout.indices).index(r)])
    slope = (layout.wavelength_m / (r * layout.spacing_m)) * (df_r / SPEED_OF_LIGHT)
    return RidgeLine(slope, layout.wavelength_m / layout.spacing_m)


def base_case_zones(
    classification: OffsetClassification,
    target: SteeringTarget,
    layout: ArrayLayout,
    profile: Optional[OffsetProfile] = None,
) -> BaseCaseZones:
    """Zone centers inside a single spatial period around the target.

    Rational profiles produce ``d_gcd`` evenly spaced centers per period;
    irrational profiles produce only the target itself. Fully coupled
    profiles return the ridge-line description instead of isolated points
    (``profile`` must then be supplied for the ridge slope).
    """
    s_steer = target.sin_theta
    if not classification.rational:
        return BaseCaseZones((BaseCaseZone(target.d_m, s_steer, 0),))
    if classification.coupled:
        if profile is None:
            raise ParameterError("coupled profiles need the offset profile for the ridge")
        return BaseCaseZones((), True, _ridge_line(classification, profile, layout))
    d_big = classification.d_gcd
    t_d = classification.q * SPEED_OF_LIGHT / abs(classification.delta_f_tilde)
    t_sin = layout.wavelength_m / layout.spacing_m
    points = []
    for k_prime in range(d_big):
        d = target.d_m + t_d * k_prime / d_big
        s = s_steer + t_sin * ((classification.rho * k_prime) % d_big) / d_big
        points.append(BaseCaseZone(d, s, k_prime))
    return BaseCaseZones(tuple(points))


def periodicities(
    classification: OffsetClassification, layout: ArrayLayout
) -> Tuple[Optional[float], float]:
    """(radial period in meters or None, angular period in sin theta)."""
    t_sin = layout.wavelength_m / layout.spacing_m
    if not classification.rational:
        return None, t_sin
    t_d = classification.q * SPEED_OF_LIGHT / abs(classification.delta_f_tilde)
    return t_d, t_sin


@dataclass(frozen=True)
class ZoneCenter:
    d_m: float
    sin_theta: float
    k_prime: int
    k_d: int
    k_theta: int

    @property
    def theta_rad(self) -> float:
        return math.asin(self.sin_theta)


@dataclass(frozen=True)
class ZoneLattice:
    """All zone centers inside a region, plus the generating periodicities."""

    centers: Tuple[ZoneCenter, ...]
    radial_period_m: Optional[float]
    angular_period_sin: float
    coupled_ridge: bool = False
    ridge: Optional[RidgeLine] = None


def enumerate_zone_lattice(
    classification: OffsetClassification,
    target: SteeringTarget,
    layout: ArrayLayout,
    d_min: float,
    d_max: float,
    profile: Optional[OffsetProfile] = None,
) -> ZoneLattice:
    """Zone centers with ``d_min <= d < d_max`` and ``|sin theta| <= 1``.

    Angular locations outside the physical sine range are excluded (they
    correspond to imaginary azimuths). Fully coupled profiles yield an
    empty center list with the ridge-line parameters flagged instead.
    """
    if d_min < 0 or d_max < d_min:
        raise ParameterError("need 0 <= d_min <= d_max")
    t_d, t_sin = periodicities(classification, layout)
    base = base_case_zones(classification, target, layout, profile)
    if base.coupled_ridge:
        return ZoneLattice((), t_d, t_sin, True, base.ridge)

    centers: List[ZoneCenter] = []
    for bp in base.points:
        if t_d is None:
            k_d_range: Sequence[int] = (0,)
        else:
            lo = math.floor((d_min - bp.d_m) / t_d) - 1
            hi = math.ceil((d_max - bp.d_m) / t_d) + 1
            k_d_range = range(lo, hi + 1)
        k_lo = math.floor((-1.0 - bp.sin_theta) / t_sin) - 1
        k_hi = math.ceil((1.0 - bp.sin_theta) / t_sin) + 1
        for k_d in k_d_range:
            d = bp.d_m + (0.0 if t_d is None else k_d * t_d)
            if not d_min <= d < d_max:
                continue
            for k_theta in range(k_lo, k_hi + 1):
                s = bp.sin_theta + k_theta * t_sin
                if abs(s) <= 1.0:
                    centers.append(ZoneCenter(d, s, bp.k_prime, k_d, k_theta))
    centers.sort(key=lambda z: (z.d_m, z.sin_theta))
    return ZoneLattice(tuple(centers), t_d, t_sin)


# ---------------------------------------------------------------------------
# Uniqueness bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniquenessReport:
    """Design bounds guaranteeing a single zone in ``[0, d_lim] x [-1, 1]``.

    For fully coupled profiles the isolated-zone analysis does not apply
    (``applicable`` is False); the reported bounds then refer to the
    half-period diagonal recurrence of the ridge family, which reproduces
    the elementary-configuration table.
    """

    applicable: bool
    delta_f_bound_hz: Optional[float]
    spacing_bound_m: float
    delta_f_satisfied: Optional[bool]
    spacing_satisfied: bool


def uniqueness_bounds(
    classification: OffsetClassification,
    target: SteeringTarget,
    layout: ArrayLayout,
    d_lim: float,
) -> UniquenessReport:
    """Evaluate the radial and azimuthal uniqueness bounds for a profile."""
    if d_lim <= target.d_m:
        raise ParameterError("d_lim must exceed the target distance")
    lam = layout.wavelength_m
    s_abs = abs(target.sin_theta)
    radial_min = min(
        SPEED_OF_LIGHT / target.d_m, SPEED_OF_LIGHT / (d_lim - target.d_m)
    )
    if not classification.rational:
        spacing_bound = lam / (1.0 + s_abs)
        return UniquenessReport(
            True, None, spacing_bound, None, layout.spacing_m < spacing_bound
        )
    if classification.coupled:
        # Ridge recurrence sits at half the radial and angular period.
        d_eff = 2
        df_bound = (classification.q / d_eff) * radial_min
        spacing_bound = (lam / d_eff) / (1.0 + s_abs)
        return UniquenessReport(
            False,
            df_bound,
            spacing_bound,
            abs(classification.delta_f_tilde) < df_bound,
            layout.spacing_m < spacing_bound,
        )
    d_big = classification.d_gcd
    df_bound = (classification.q / d_big) * radial_min
    spacing_bound = (lam / d_big) / (1.0 + s_abs)
    return UniquenessReport(
        True,
        df_bound,
        spacing_bound,
        abs(classification.delta_f_tilde) < df_bound,
        layout.spacing_m < spacing_bound,
    )


# ---------------------------------------------------------------------------
# Zone widths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WidthFactors:
    """Binding intersection factors for the zone width formulas.

    ``f_d`` has units of seconds (width per unit phase over c), ``f_theta``
    is dimensionless. ``method`` is "pair-intersection" for decoupled
    profiles, "cut-fallback" for fully coupled ones where every strip pair
    is parallel.
    """

    f_d: float
    pair_d: Optional[Tuple[int, int]]
    f_theta: float
    pair_theta: Optional[Tuple[int, int]]
    method: str


def width_factors(profile: OffsetProfile, layout: ArrayLayout) -> WidthFactors:
    """Minimize the pairwise intersection factors over all antenna pairs.

    For each ordered pair of non-reference antennas with non-parallel
    constraint strips the intersection sits at ``F_d = (|i|+|j|)/|D_ij|``
    radially and ``F_theta = (|df_i|+|df_j|)/|D_ij|`` angularly, with
    ``D_ij = j df_i - i df_j``. When every pair is parallel the zone is a
    ridge and the principal-axis cut widths ``1/max|df|`` and ``1/max|n|``
    apply instead.
    """
    idx = [int(n) for n in layout.indices if n != 0]
    if len(idx) < 2:
        raise ConfigurationError("under-determined: need at least 2 non-reference antennas")
    values = profile.array
    df = {int(n): float(v) for n, v in zip(layout.indices, values)}

    best_d: Optional[Tuple[float, Tuple[int, int]]] = None
    best_t: Optional[Tuple[float, Tuple[int, int]]] = None
    for i in idx:
        for j in idx:
            if i == j:
                continue
            den = j * df[i] - i * df[j]
            scale = max(abs(j * df[i]), abs(i * df[j]))
            if abs(den) <= _PARALLEL_RTOL * scale:
                continue
            f_d = (abs(i) + abs(j)) / abs(den)
            f_t = (abs(df[i]) + abs(df[j])) / abs(den)
            if best_d is None or f_d < best_d[0]:
                best_d = (f_d, (i, j))
            if best_t is None or f_t < best_t[0]:
                best_t = (f_t, (i, j))
    if best_d is None:
        f_d = 1.0 / float(np.max(np.abs(values)))
        f_t = 1.0 / max(abs(n) for n in idx)
        return WidthFactors(f_d, None, f_t, None, "cut-fallback")
    return WidthFactors(best_d[0], best_d[1], best_t[0], best_t[1], "pair-intersection")


@dataclass(frozen=True)
class WidthReport:
    """Predicted zone widths at a given phase threshold."""

    theta_d_m: float
    theta_theta_rad: float
    theta_theta_sin: float
    binding_pair_radial: Optional[Tuple[int, int]]
    binding_pair_angular: Optional[Tuple[int, int]]
    method: str
    clamped: bool


def _threshold_value(phi_th) -> float:
    value = phi_th.value if isinstance(phi_th, PhaseThreshold) else float(phi_th)
    if not 0.0 < value < math.pi:
        raise ParameterError("phase threshold must lie in (0, pi)")
    return value


def geocast_widths(
    factors: WidthFactors,
    layout: ArrayLayout,
    target: SteeringTarget,
    phi_th,
) -> WidthReport:
    """Radial and azimuthal zone widths for a phase threshold.

    The azimuthal width converts the sine-domain extent through asin around
    the steering angle, clamping (and flagging) when the zone runs past
    |sin theta| = 1.
    """
    phi = _threshold_value(phi_th)
    theta_d = 2.0 * SPEED_OF_LIGHT * factors.f_d * phi / (2.0 * math.pi)
    half_sin = (layout.wavelength_m / layout.spacing_m) * factors.f_theta * phi / (2.0 * math.pi)
    s = target.sin_theta
    hi, lo = s + half_sin, s - half_sin
    clamped = hi > 1.0 or lo < -1.0
    theta_theta = math.asin(min(1.0, max(-1.0, hi))) - math.asin(min(1.0, max(-1.0, lo)))
    return WidthReport(
        theta_d,
        theta_theta,
        2.0 * half_sin,
        factors.pair_d,
        factors.pair_theta,
        factors.method,
        clamped,
    )


# ---------------------------------------------------------------------------
# Polygon oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZonePolygon:
    """Exact sub-threshold region around the target in (delta_d, delta_sin).

    The region is the intersection of one band per non-reference antenna;
    it is a convex polygon whenever two bands are non-parallel and an
    unbounded strip otherwise (``bounded`` False, no vertices).
    """

    vertices: Tuple[Tuple[float, float], ...]
    bounded: bool

    @property
    def radial_extent_m(self) -> Optional[float]:
        if not self.bounded:
            return None
        xs = [v[0] for v in self.vertices]
        return max(xs) - min(xs)

    @property
    def sin_extent(self) -> Optional[float]:
        if not self.bounded:
            return None
        ys = [v[1] for v in self.vertices]
        return max(ys) - min(ys)


def _clip_halfplane(
    poly: List[Tuple[float, float]], a: Tuple[float, float], b: float
) -> List[Tuple[float, float]]:
    "Sutherland-Hodgman clip of a convex polygon against a.x <= b."
    out: List[Tuple[float, float]] = []
    m = len(poly)
    for k in range(m):
        cur, nxt = poly[k], poly[(k + 1) % m]
        g_cur = a[0] * cur[0] + a[1] * cur[1] - b
        g_nxt = a[0] * nxt[0] + a[1] * nxt[1] - b
        if g_cur <= 0:
            out.append(cur)
            if g_nxt > 0:
                t = g_cur / (g_cur - g_nxt)
                out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
        elif g_nxt <= 0:
            t = g_cur / (g_cur - g_nxt)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def _prune_vertices(poly: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    "Drop duplicate and collinear vertices left behind by clipping."
    out: List[Tuple[float, float]] = []
    for v in poly:
        if not out or math.hypot(v[0] - out[-1][0], v[1] - out[-1][1]) > 1e-15:
            out.append((float(v[0]), float(v[1])))
    if len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= 1e-15:
        out.pop()
    pruned: List[Tuple[float, float]] = []
    m = len(out)
    for k in range(m):
        p, v, q = out[(k - 1) % m], out[k], out[(k + 1) % m]
        ax, ay = v[0] - p[0], v[1] - p[1]
        bx, by = q[0] - v[0], q[1] - v[1]
        cross = ax * by - ay * bx
        if abs(cross) > 1e-12 * (math.hypot(ax, ay) * math.hypot(bx, by)):
            pruned.append(v)
    return pruned if len(pruned) >= 3 else out


def zone_polygon(profile: OffsetProfile, layout: ArrayLayout, phi_th) -> ZonePolygon:
    """Intersect the per-antenna sub-threshold bands by half-plane clipping.

    Serves as an independent geometric oracle for the pairwise width
    formulas: for decoupled profiles the polygon extents must match the
    predicted widths exactly.
    """
    phi = _threshold_value(phi_th)
    normals: List[Tuple[float, float]] = []
    for n, df in zip(layout.indices, profile.array):
        if n == 0:
            continue
        # band: |a . (dd, dsin)| <= phi
        normals.append(
            (-2.0 * math.pi * df / SPEED_OF_LIGHT,
             2.0 * math.pi * n * layout.spacing_m / layout.wavelength_m)
        )
    if len(normals) < 2:
        raise ConfigurationError("under-determined: need at least 2 non-reference antennas")

    best = (0.0, 0, 1)
    for i in range(len(normals)):
        for j in range(i + 1, len(normals)):
            cross = normals[i][0] * normals[j][1] - normals[i][1] * normals[j][0]
            norm = math.hypot(*normals[i]) * math.hypot(*normals[j])
            if norm > 0 and abs(cross) / norm > best[0]:
                best = (abs(cross) / norm, i, j)
    if best[0] <= _PARALLEL_RTOL:
        return ZonePolygon((), False)

    # Seed with the parallelogram of the best-conditioned pair.
    ai, aj = normals[best[1]], normals[best[2]]
    det = ai[0] * aj[1] - ai[1] * aj[0]
    seed = []
    for si, sj in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
        bi, bj = si * phi, sj * phi
        seed.append(((bi * aj[1] - bj * ai[1]) / det, (ai[0] * bj - aj[0] * bi) / det))
    if det < 0:
        seed.reverse()

    poly = seed
    for a in normals:
        poly = _clip_halfplane(poly, a, phi)
        poly = _clip_halfplane(poly, (-a[0], -a[1]), phi)
    return ZonePolygon(tuple(_prune_vertices(poly)), True)


# ---------------------------------------------------------------------------
# Elementary-configuration reference table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Table1Entry:
    """Closed forms for the four elementary recipes.

    ``radial_coeff`` multiplies ``c / d_steer`` (None when no radial bound
    is needed), ``angular_coeff`` multiplies ``lambda0 / (1 + |sin
    theta_steer|)``. ``f_d`` (seconds) and ``f_theta`` (dimensionless) are
    the width factors.
    """

    radial_coeff: Optional[float]
    angular_coeff: float
    f_d: float
    f_theta: float

    def radial_bound_hz(self, d_steer_m: float) -> Optional[float]:
        if self.radial_coeff is None:
            return None
        return self.radial_coeff * SPEED_OF_LIGHT / d_steer_m

    def spacing_bound_m(self, wavelength_m: float, sin_theta_steer: float) -> float:
        return self.angular_coeff * wavelength_m / (1.0 + abs(sin_theta_steer))


def table1_reference(recipe: OffsetRecipe, n_antennas: int) -> Table1Entry:
    """Evaluate the elementary-configuration closed forms verbatim.

    Radial bounds assume the usual ``d_lim < 2 d_steer`` simplification.
    Used as an independent oracle against the generic classification,
    uniqueness and width machinery.
    """
    if isinstance(recipe, CustomOffsets):
        raise ConfigurationError("closed forms exist only for the four built-in recipes")
    n = n_antennas
    if n < 3:
        raise ParameterError("closed forms require at least 3 antennas")
    if isinstance(recipe, (SymmetricLinear, SymmetricLogarithmic)) and n % 2 == 0:
        raise ConfigurationError("symmetric recipes require an odd antenna count")
    if isinstance(recipe, SymmetricLinear):
        return Table1Entry(
            0.5, 0.5, 2.0 / ((n - 1) * recipe.delta_f_hz), 2.0 / (n - 1)
        )
    if isinstance(recipe, AlternatingLinear):
        f = (2 * n - 3) / (2.0 * (n - 1) * (n - 2))
        return Table1Entry(0.25, 0.25, f / recipe.delta_f_hz, f)
    if isinstance(recipe, SymmetricLogarithmic):
        log_a = lambda x: math.log(x) / math.log(recipe.base)
        return Table1Entry(
            None, 1.0, 1.0 / (log_a((n + 1) / 2.0) * recipe.delta_f_hz), 2.0 / (n - 1)
        )
    if isinstance(recipe, AlternatingLogarithmic):
        log_a = lambda x: math.log(x) / math.log(recipe.base)
        big = (n - 2) * math.log(n) + (n - 1) * math.log(n - 1)
        f_d = (2 * n - 3) / (big / math.log(recipe.base)) / recipe.delta_f_hz
        f_theta = math.log(n * (n - 1)) / big
        return Table1Entry(None, 1.0, f_d, f_theta)
    raise ConfigurationError("closed forms exist only for the four built-in recipes")


# ---------------------------------------------------------------------------
# Aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZoneReport:
    """Everything the analytics predict about a steering scenario."""

    classification: OffsetClassification
    radial_period_m: Optional[float]
    angular_period_sin: float
    uniqueness: UniquenessReport
    factors: WidthFactors
    widths: WidthReport
    polygon: ZonePolygon
    lattice: ZoneLattice
    phi_threshold: float

    def to_dict(self) -> dict:
        c = self.classification
        return {
            "classification": {
                "rational": c.rational,
                "n_tilde": c.n_tilde,
                "delta_f_tilde_hz": c.delta_f_tilde,
                "p": list(c.p) if c.p is not None else None,
                "q": c.q,
                "d_gcd": c.d_gcd,
                "coupled": c.coupled,
            },
            "radial_period_m": self.radial_period_m,
            "angular_period_sin": self.angular_period_sin,
            "uniqueness": {
                "applicable": self.uniqueness.applicable,
                "delta_f_bound_hz": self.uniqueness.delta_f_bound_hz,
                "spacing_bound_m": self.uniqueness.spacing_bound_m,
                "delta_f_satisfied": self.uniqueness.delta_f_satisfied,
                "spacing_satisfied": self.uniqueness.spacing_satisfied,
            },
            "width_factors": {
                "f_d_s": self.factors.f_d,
                "pair_d": list(self.factors.pair_d) if self.factors.pair_d else None,
                "f_theta": self.factors.f_theta,
                "pair_theta": list(self.factors.pair_theta) if self.factors.pair_theta else None,
                "method": self.factors.method,
            },
            "widths": {
                "phi_threshold_rad": self.phi_threshold,
                "radial_m": self.widths.theta_d_m,
                "azimuthal_rad": self.widths.theta_theta_rad,
                "azimuthal_sin": self.widths.theta_theta_sin,
                "clamped": self.widths.clamped,
            },
            "polygon": {
                "bounded": self.polygon.bounded,
                "vertices": [list(v) for v in self.polygon.vertices],
                "radial_extent_m": self.polygon.radial_extent_m,
                "sin_extent": self.polygon.sin_extent,
            },
            "zone_centers": [
                {
                    "d_m": z.d_m,
                    "sin_theta": z.sin_theta,
                    "theta_rad": z.theta_rad,
                    "k_prime": z.k_prime,
                    "k_d": z.k_d,
                    "k_theta": z.k_theta,
                }
                for z in self.lattice.centers
            ],
            "coupled_ridge": self.lattice.coupled_ridge,
            "ridge": None
            if self.lattice.ridge is None
            else {
                "dsin_dd_per_m": self.lattice.ridge.dsin_dd,
                "sin_spacing": self.lattice.ridge.sin_spacing,
            },
        }


def analyze_zones(
    profile: OffsetProfile,
    layout: ArrayLayout,
    target: SteeringTarget,
    phi_th,
    d_min: float,
    d_max: float,
    d_lim: float,
) -> ZoneReport:
    """Run the full analytic chain for one scenario."""
    phi = _threshold_value(phi_th)
    classification = classify_offsets(profile, layout)
    t_d, t_sin = periodicities(classification, layout)
    lattice = enumerate_zone_lattice(classification, target, layout, d_min, d_max, profile)
    return ZoneReport(
        classification,
        t_d,
        t_sin,
        uniqueness_bounds(classification, target, layout, d_lim),
        (factors := width_factors(profile, layout)),
        geocast_widths(factors, layout, target, phi),
        zone_polygon(profile, layout, phi),
        lattice,
        phi,
    )
