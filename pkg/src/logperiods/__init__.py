"""Exact arithmetic for interpolated logarithmic periods and their module theory.

The package verifies, at finite truncation level and with exact rational
arithmetic only, the analytic constructions attached to a filtered
phi-module: interpolated log periods and their norm bounds, convergent
product truncations with certified tails, the Newton/Hodge-Tate/Smith
polygon machinery, and the level recursion whose columns generate the
logarithmic module, together with its determinant, congruence,
membership, elementary-divisor, and slope-trace identities.
"""

from .cyclotomic import (
    CycloVector,
    CyclotomicElement,
    cyclo_valuation,
    eval_at_special_point,
    membership_in_filtration,
)
from .iwasawa import (
    SlopeTrace,
    ZState,
    advance,
    column_divisibility_check,
    default_interval,
    det_identity_check,
    divisor_check,
    initial_state,
    membership_check,
    run_recursion,
    slope_trace,
    theta_operator,
    theta_surjectivity_check,
    top_weight_prime,
)
from .lowdim import (
    dim2_euler_condition_check,
    dim2_interval,
    dim2_module,
    euler_operator,
    lambda_degree_check,
    offdiag_closed_form,
    offdiag_evaluation_check,
    offdiag_sequence,
    pollack_diagonal_check,
    refinement_recursion,
    refinement_structure_report,
)
from .padic import beta, beta_tilde, n_zero, rho0_log, rho_level_log, valuation
from .periods import (
    IntervalPair,
    MuLambdaReport,
    TruncatedProduct,
    XiTilde,
    amice_velu_bound_check,
    build_xitilde,
    check_norm_bounds,
    check_special_values,
    truncate_Xi,
    type_check,
    unit_quotient,
    valuation_at_higher_level,
    xitilde_poly,
)
from .phimod import (
    FilteredPhiModule,
    Polygon,
    Refinement,
    hodge_polygon,
    newton_polygon,
    refinement_check,
    smith_polygon,
    smith_valuations,
    strongly_divisible_check,
    tate_twist,
    weakly_admissible_check,
)
from .polyring import (
    DivisorSequence,
    Interval,
    PolyMatrix,
    RationalPoly,
    crt,
    gauss_log_norm,
    lambda_invariant,
    mlog,
    mu_invariant,
    omega,
    omega_prod,
    omega_twisted,
    resultant,
    smith_form,
    twist,
    xi,
    xi_twisted,
)

__version__ = "0.1.0"
