"""Differential algebra for permutable entire functions.

The package turns an existence statement into running code: every entire
function built from the usual closed forms satisfies an algebraic
differential equation, and permutability of two functions under
composition lets that equation travel between them.  Exact arithmetic
(Gaussian rationals, polynomials in z, their fraction field) backs the
symbolic half; sampled complex evaluation backs the growth half.
"""

from .scalars import (
    Frac,
    GaussianRational,
    Poly,
    ScalarError,
    frac_str,
    frac_value,
    gauss_str,
    poly_str,
)
from .series import PowerSeries, SeriesError
from .expr import (
    DefinitionEnvironment,
    EMPTY_ENV,
    ExprError,
    ParseError,
    differentiate,
    eval_numeric,
    expand_series,
    expression_of_frac,
    frac_of_expression,
    inline,
    nth_derivative,
    parse,
    scalar_of,
    substitute,
    to_text,
)
from .diffpoly import (
    DiffPoly,
    DiffPolyError,
    ade_text,
    apply_to_series,
    derivative_stack,
    holds_on,
    mono_rank,
    mono_weight,
    normalize,
    parse_ade,
    residual_series,
)
from .chain_rewrite import (
    derivative_transfer,
    max_support_weight,
    support_monomials,
    transfer_support,
    verify_transfer,
)
from .discovery import (
    BoundExhausted,
    DiscoveryError,
    RelationResult,
    SearchOutcome,
    VerificationError,
    candidate_monomials,
    exact_nullspace,
    find_ade,
    numeric_nullspace,
    relation_search,
)
from .pipeline import (
    PermutabilityReport,
    TransferReport,
    check_permutable,
    compose_ade,
    iterate_ade,
    transfer_ade,
)
from .growth import (
    BakerReport,
    GrowthError,
    baker_scan,
    characteristic,
    characteristic_sandwich,
    compose_iterate,
    growth_suite,
    is_transcendental,
    log_convexity,
    max_modulus,
)

__version__ = "0.1.0"

__all__ = [
    "Frac",
    "GaussianRational",
    "Poly",
    "ScalarError",
    "frac_str",
    "frac_value",
    "gauss_str",
    "poly_str",
    "PowerSeries",
    "SeriesError",
    "DefinitionEnvironment",
    "EMPTY_ENV",
    "ExprError",
    "ParseError",
    "differentiate",
    "eval_numeric",
    "expand_series",
    "expression_of_frac",
    "frac_of_expression",
    "inline",
    "nth_derivative",
    "parse",
    "scalar_of",
    "substitute",
    "to_text",
    "DiffPoly",
    "DiffPolyError",
    "ade_text",
    "apply_to_series",
    "derivative_stack",
    "holds_on",
    "mono_rank",
    "mono_weight",
    "normalize",
    "parse_ade",
    "residual_series",
    "derivative_transfer",
    "max_support_weight",
    "support_monomials",
    "transfer_support",
    "verify_transfer",
    "BoundExhausted",
    "DiscoveryError",
    "RelationResult",
    "SearchOutcome",
    "VerificationError",
    "candidate_monomials",
    "exact_nullspace",
    "find_ade",
    "numeric_nullspace",
    "relation_search",
    "PermutabilityReport",
    "TransferReport",
    "check_permutable",
    "compose_ade",
    "iterate_ade",
    "transfer_ade",
    "BakerReport",
    "GrowthError",
    "baker_scan",
    "characteristic",
    "characteristic_sandwich",
    "compose_iterate",
    "growth_suite",
    "is_transcendental",
    "log_convexity",
    "max_modulus",
]
