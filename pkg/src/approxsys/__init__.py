"""Enumerable approximation systems over exact rational arithmetic.

Functions between semi-computable spaces are represented as enumerable sets
of index quadruples; evaluation, conversion between representations, system
transformations, and extraction are all deterministic dovetailed procedures
over exact rationals.
"""

from .core import (
    DYADIC,
    HARMONIC,
    ApproxSysError,
    PrecisionSchedule,
    Rat,
    REnum,
    StepCapExceeded,
    custom_schedule,
    dovetail_product,
    dovetail_union,
    find_m_below,
    format_rat,
    member_by_stage,
    pair,
    parse_rat,
    tuple_decode,
    tuple_encode,
    unpair,
)
from .spaces import (
    BallIndex,
    DiscreteNatSpace,
    FiniteInstance,
    InvalidIndexError,
    NonnegRationalPairSpace,
    RationalVectorSpace,
    formally_included,
    point_in_ball,
)
from .names import (
    AlphaName,
    ExactWitness,
    IntervalWitness,
    SetName,
    canonical_set_name,
    check_name_contract,
    constant_name,
    gamma_U_alpha,
    gamma_beta_V,
    pair_names,
    reschedule,
    sqrt_name,
)
from .systems import (
    CheckBounds,
    MetricSystem,
    Report,
    TopologicalSystem,
    UVApproxSystem,
    add_system,
    affine_system,
    check_metric,
    check_topological,
    check_uv_condition,
    const_system,
    empty_system,
    halving_system,
    id_system,
    is_saturated,
    lift_point_system,
    maximal_uv_system,
    mul_system,
    project_system,
    saturate,
    sq_system,
)
from .engines import (
    EnumOperatorSet,
    ConstantOperator,
    IdentityOperator,
    RecursiveOperator,
    apply_topological,
    build_r,
    enum_apply,
    evaluate_metric,
    extract_metric_system,
    hk_closure,
    intersection_h,
    metric_to_topological,
    topological_to_metric,
)

__version__ = "0.1.0"
