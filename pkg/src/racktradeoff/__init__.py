"""Exact storage/repair-bandwidth tradeoff curves for rack-aware regenerating codes.

Computes piecewise-linear threshold curves, minimum-mincut income selection,
and reference-model comparisons, all in exact rational arithmetic, and
verifies them against an information-flow-graph max-flow oracle.
"""

from .config import RackSpec, SystemConfig, load_config, parse_and_validate
from .errors import (
    BelowMBR,
    Disconnected,
    EmptyCoeffList,
    EmptyIncome,
    EnumerationTooLarge,
    InvalidConfig,
    InvalidModelParams,
    InvalidScenario,
    NotTwoRack,
    PreconditionUnmet,
    SchemaError,
)
from .flowgraph import (
    FlowGraph,
    Scenario,
    VerificationReport,
    analytic_min_cut,
    build_flow_graph,
    min_cut_value,
    oracle_min_mincut,
    verify,
)
from .incomes import (
    CoeffList,
    IncomeSequence,
    IncomeTerm,
    candidate_sequence,
    feasibility_trim,
    general_income_pool,
    min_mincut_incomes,
    rack_coeff_list,
    trim_bound,
    two_rack_components,
    two_rack_min_incomes,
)
from .threshold import (
    ThresholdCurve,
    ThresholdSegment,
    TradeoffPoint,
    alpha_star,
    basic_reference_curve,
    extremal_points,
    rack_curve,
    reference_curve,
    repair_metrics,
    special_case_curve,
    special_case_knees,
    static_reference_curve,
    threshold_curve,
)

__version__ = "0.1.0"
