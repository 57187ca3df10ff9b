"""eps-expansion of generalized hypergeometric functions and Appell F4."""

from .engine import (
    Adaptive,
    Appell4Request,
    ExpansionRequest,
    Fixed,
    LaurentSeries,
    LinearParam,
    classify_lower,
    combine_factors,
    expand_appell_f4,
    expand_pfq,
    factor_vector,
    run_adaptive,
)
from .numerics import Backend, from_literal, to_decimal_string
from .pochhammer import p_deriv, p_deriv_row, q_deriv, q_deriv_row, q_hat_deriv, q_hat_row, stirling

__all__ = [
    "Adaptive",
    "Appell4Request",
    "Backend",
    "ExpansionRequest",
    "Fixed",
    "LaurentSeries",
    "LinearParam",
    "classify_lower",
    "combine_factors",
    "expand_appell_f4",
    "expand_pfq",
    "factor_vector",
    "from_literal",
    "p_deriv",
    "p_deriv_row",
    "q_deriv",
    "q_deriv_row",
    "q_hat_deriv",
    "q_hat_row",
    "run_adaptive",
    "stirling",
    "to_decimal_string",
]
