"""Numerical laboratory for Jensen-type operator and trace inequalities."""
from .columns import (
    ColumnClass,
    OperatorColumn,
    PinchingSystem,
    augment_to_unital,
    canonical_dilation,
    gram_and_classify,
    pinching_system,
    random_contractive_column,
    random_unital_column,
)
from .errors import *  # noqa: F401,F403
from .functions import (
    BendatShermanRep,
    ScalarFunction,
    bs_eval,
    bs_eval_matrix,
    catalog,
    lookup,
    parse_expression,
    random_bs,
)
from .inequalities import (
    ChainReport,
    DefectReport,
    TraceReport,
    isometry_defect,
    jensen_operator_defect,
    monomial_identity_residual,
    operator_convexity_defect,
    pinching_defect,
    replay_pinching_chain,
    scalar_jensen_gap,
    trace_jensen_report,
    two_point_reduction,
)
from .prober import Counterexample, ProbeConfig, ProbeReport, pad_counterexample, probe, refine
from .spectral import (
    DEFAULT_TOL,
    Interval,
    SpectralDecomposition,
    ToleranceProfile,
    apply_function,
    davis_property_check,
    eigendecompose,
    loewner_defect,
    random_hermitian_in,
    random_isometry,
    random_unitary,
)
from .states import (
    AtomicField,
    BlockTraceAlgebra,
    State,
    centralizer_test,
    commuting_state,
    conditional_expectation,
    field_jensen_gap,
    random_atomic_field,
)

__version__ = "0.1.0"
