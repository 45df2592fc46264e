"""Range-angle geocasting analytics and simulation toolkit.

Predicts where a frequency-diverse array with distributed (spatially
focused) data transmission delivers its bitstream undistorted, and checks
those predictions with symbol-level Monte-Carlo BER maps, including a
power-focusing beamforming baseline.
"""

from .arraycore import (
    SPEED_OF_LIGHT,
    AlternatingLinear,
    AlternatingLogarithmic,
    ArrayLayout,
    CustomOffsets,
    OffsetProfile,
    PolarPosition,
    SteeringTarget,
    SymmetricLinear,
    SymmetricLogarithmic,
    central_layout,
    edge_layout,
    make_offset_profile,
    narrowband_residual_phases,
    propagation_delays,
    residual_phase_field,
    residual_phases,
    steering_phases,
    wrap_phase,
)
from .bermap import (
    BerMap,
    GridSpec,
    TheoryComparison,
    ZoneMeasurement,
    compare_theory,
    compute_ber_map,
    detect_zones,
)
from .constellation import (
    Constellation,
    PhaseThreshold,
    awgn_phase_threshold,
    demodulate,
    modulate,
    noiseless_phase_threshold,
    q_inverse,
)
from .errors import (
    ConfigurationError,
    GeocastError,
    InfeasibleThresholdError,
    ParameterError,
)
from .linksim import (
    LinkParams,
    sdf_demap,
    sdf_map,
    simulate_beamforming,
    simulate_fda_sdf,
    validate_orthogonality,
    zone_predicate,
)
from .scenario import Scenario, default_scenario
from .zones import (
    OffsetClassification,
    Table1Entry,
    UniquenessReport,
    WidthFactors,
    WidthReport,
    ZoneLattice,
    ZonePolygon,
    ZoneReport,
    analyze_zones,
    base_case_zones,
    classify_offsets,
    enumerate_zone_lattice,
    geocast_widths,
    periodicities,
    solve_hlde,
    table1_reference,
    uniqueness_bounds,
    width_factors,
    zone_polygon,
)

__version__ = "0.1.0"
