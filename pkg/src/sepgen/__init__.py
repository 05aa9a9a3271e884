"""Minimal generating sets of separable algebras over finite fields."""

from .counting import (
    BoundPair,
    burnside_identity_check,
    divisors,
    etale_bounds,
    group_order_c,
    matrix_bounds,
    moebius,
    n_etale,
    rank_count,
)
from .errors import FieldMismatch, Infeasible, IntegralityError, InvalidInput, SepgenError
from .finite_field import ExtensionField, FieldElement, PrimePower, make_field
from .gencalc import AlgebraSpec, GenResult, gen_algebra, gen_pure_etale, gen_pure_matrix, intervals
from .matrix_algebra import MatrixAlgebra, MatrixTuple, generates_full, span_closure_dim
from .oracle import OracleResult, count_etale, count_matrix, estimate_matrix_fraction

__version__ = "0.1.0"
