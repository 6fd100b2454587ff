"""Symbolic expression core: parsing, normal forms, calculus and evaluation."""

from .calculus import differentiate, substitute
from .evaluate import (
    EvaluationDomainError,
    compile_float,
    compile_interval,
    eval_float,
    eval_interval,
    eval_point,
)
from .interval import (
    Interval,
    IntervalBox,
    IntervalDomainError,
    PossibleDivisionByZero,
    PossibleLogNonpositive,
)
from .nodes import (
    MINUS_ONE,
    ONE,
    VARIABLES,
    X1,
    X2,
    Z,
    ZERO,
    Exp,
    Expr,
    Log,
    Parameter,
    Power,
    Product,
    Quotient,
    RationalConstant,
    Sum,
    Variable,
    as_expr,
    const,
)
from .parser import ExprSyntaxError, UnknownFunctionError, parse, parse_raw
from .printer import to_text
from .rational import RationalForm, normalize, numerator_denominator, rational_form
from .zero import ZeroTest, ZeroTestError, is_identically_zero, zero_test

__all__ = [
    "Exp",
    "EvaluationDomainError",
    "Expr",
    "ExprSyntaxError",
    "Interval",
    "IntervalBox",
    "IntervalDomainError",
    "Log",
    "MINUS_ONE",
    "ONE",
    "Parameter",
    "PossibleDivisionByZero",
    "PossibleLogNonpositive",
    "Power",
    "Product",
    "Quotient",
    "RationalConstant",
    "RationalForm",
    "Sum",
    "UnknownFunctionError",
    "VARIABLES",
    "Variable",
    "X1",
    "X2",
    "Z",
    "ZERO",
    "ZeroTest",
    "ZeroTestError",
    "as_expr",
    "compile_float",
    "compile_interval",
    "const",
    "differentiate",
    "eval_float",
    "eval_interval",
    "eval_point",
    "is_identically_zero",
    "normalize",
    "numerator_denominator",
    "parse",
    "parse_raw",
    "rational_form",
    "substitute",
    "to_text",
    "zero_test",
]
