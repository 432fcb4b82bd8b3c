"""Linear rewriting with strategies.

Abstract rewriting on vector spaces with a chosen basis (parallel S-normal
forms, S-confluence, decreasingness, the single-step relation and its
confluence checks), and its instance on rational Weyl algebras, where
involutive divisions give strategies and completion makes them confluent.
"""

from .errors import (
    CyclicOrder,
    DimensionMismatch,
    DivisionByZero,
    FuelExhausted,
    IncompatibleVerb,
    IndexOutOfRange,
    LinrewError,
    NonTerminatingClosure,
    NotAutoreduced,
    NotCertified,
    NotInU,
    NotMonic,
    NotSConfluent,
    ParseError,
    RoundBudgetExhausted,
    StrictFlagRequired,
    ValidationError,
    WindowTooSmall,
    ZeroOperator,
)
from .involutive import (
    Custom,
    Division,
    InvolutiveSystem,
    Janet,
    Pommaret,
    Thomas,
    all_multiplicative,
    check_autoreduced,
    check_division_axioms,
    check_involutive,
    check_involutive_strategy,
    complete,
    involutive_divides,
    involutive_divisor,
    involutive_window,
    left_autoreduced,
    multiplicative_variables,
    strategy_snf,
)
from .linspace import LinComb, format_lincomb, parse_lincomb
from .rewrite import (
    Prestrategy,
    RewritingSystem,
    Rule,
    Verdict,
    all_normal_forms,
    apply_r_S,
    certify_strategy,
    check_decreasing,
    check_local_confluence,
    check_s_confluence,
    joinable,
    quotient_basis,
    serialize_parallel,
    snf,
    span_membership,
    step_R,
)
from .scalar import QQ_FIELD, RationalFunctionField, derivative, partial_derivative
from .weyl import MonomialOrder, ThetaSystem, WeylAlgebra, theta_nf, weyl_mul

__version__ = "0.1.0"

__all__ = [
    "Custom",
    "CyclicOrder",
    "DimensionMismatch",
    "Division",
    "DivisionByZero",
    "FuelExhausted",
    "IncompatibleVerb",
    "IndexOutOfRange",
    "InvolutiveSystem",
    "Janet",
    "LinComb",
    "LinrewError",
    "MonomialOrder",
    "NonTerminatingClosure",
    "NotAutoreduced",
    "NotCertified",
    "NotInU",
    "NotMonic",
    "NotSConfluent",
    "ParseError",
    "Pommaret",
    "Prestrategy",
    "QQ_FIELD",
    "RationalFunctionField",
    "RewritingSystem",
    "RoundBudgetExhausted",
    "Rule",
    "StrictFlagRequired",
    "ThetaSystem",
    "Thomas",
    "ValidationError",
    "Verdict",
    "WeylAlgebra",
    "WindowTooSmall",
    "ZeroOperator",
    "all_multiplicative",
    "all_normal_forms",
    "apply_r_S",
    "certify_strategy",
    "check_autoreduced",
    "check_decreasing",
    "check_division_axioms",
    "check_involutive",
    "check_involutive_strategy",
    "check_local_confluence",
    "check_s_confluence",
    "complete",
    "derivative",
    "format_lincomb",
    "involutive_divides",
    "involutive_divisor",
    "involutive_window",
    "joinable",
    "left_autoreduced",
    "multiplicative_variables",
    "parse_lincomb",
    "partial_derivative",
    "quotient_basis",
    "serialize_parallel",
    "snf",
    "span_membership",
    "step_R",
    "strategy_snf",
    "theta_nf",
    "weyl_mul",
]
