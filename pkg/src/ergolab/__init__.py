"""Exact-arithmetic laboratory for Cesaro averaging of positive operators.

The package builds two families of operators whose averaging behaviour is
delicate enough to need exact verification: operators on null sequences
presented by infinite weighted ladder graphs, and a block-diagonal family of
2x2 doubly stochastic matrices on bounded sequences.  Norms, orbits, Cesaro
averages and fixed-space certificates are all computed in arbitrary
precision rational arithmetic; every headline claim is re-derivable through
at least two independent routes.
"""

from .core import (
    Rational,
    SparseVector,
    as_rational,
    cesaro_geometric,
    cesaro_geometric_sum,
    fraction_str,
    l1_norm,
    sup_norm,
)
from .graphop import (
    C0Graph,
    Path,
    PathCount,
    apply,
    apply_adjoint,
    count_paths_to,
    enumerate_paths,
    graph_from_edges,
    operator_norm_truncated,
    power_apply,
    power_norm_truncated,
    verify_c0_conditions,
)
from .ladder import (
    LadderFamilyGraph,
    bottom_weight,
    make_counterexample,
    make_g0,
    make_gk,
    orbit_predicate,
    rung_position,
    vertex_label,
)
from .blockdiag import (
    Block2x2,
    BlockOperator,
    b_coeff,
    block_cesaro,
    multiplication_fixed_check,
    sup_deviation,
    t_block,
    witness_apply,
)
from .ergodic import (
    BudgetExceeded,
    CesaroTrace,
    CheckResult,
    FixedSpaceCertificate,
    OperatorHandle,
    cesaro_apply,
    cesaro_trace,
    fixed_space_certificate,
    graph_handle,
    power_mean_ergodic_check,
    renorm_estimate,
    replay_certificate,
    scalar_rotation_check,
    weak_compactness_witness,
)
from .sweeps import combined_cesaro_sup_norms

__version__ = "0.1.0"

__all__ = [
    "Rational",
    "SparseVector",
    "as_rational",
    "cesaro_geometric",
    "cesaro_geometric_sum",
    "fraction_str",
    "l1_norm",
    "sup_norm",
    "C0Graph",
    "Path",
    "PathCount",
    "apply",
    "apply_adjoint",
    "count_paths_to",
    "enumerate_paths",
    "graph_from_edges",
    "operator_norm_truncated",
    "power_apply",
    "power_norm_truncated",
    "verify_c0_conditions",
    "LadderFamilyGraph",
    "bottom_weight",
    "make_counterexample",
    "make_g0",
    "make_gk",
    "orbit_predicate",
    "rung_position",
    "vertex_label",
    "Block2x2",
    "BlockOperator",
    "b_coeff",
    "block_cesaro",
    "multiplication_fixed_check",
    "sup_deviation",
    "t_block",
    "witness_apply",
    "BudgetExceeded",
    "CesaroTrace",
    "CheckResult",
    "FixedSpaceCertificate",
    "OperatorHandle",
    "cesaro_apply",
    "cesaro_trace",
    "fixed_space_certificate",
    "graph_handle",
    "power_mean_ergodic_check",
    "renorm_estimate",
    "replay_certificate",
    "scalar_rotation_check",
    "weak_compactness_witness",
    "combined_cesaro_sup_norms",
]
