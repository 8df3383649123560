"""Permanents, permanental rank and permanull subspaces over GF(p^m), p odd."""

__version__ = "0.1.0"

from .errors import BudgetExceededError, MatrixFormatError
from .field import FieldElement, FieldSpec, enumerate_field, field_from_order, field_new
from .linalg import (
    Matrix,
    StandardForm,
    Subspace,
    Vector,
    contains,
    enumerate_subspaces,
    hyperplane,
    parse_matrix,
    rank,
    rref,
    span,
    standard_form,
)
from .permanent import PrkResult, classify_nx2, cofactor_expand, has_full_prk, per_3x2, per_naive, per_ryser, prk
from .rng import RNG_ID, make_rng, sample_uniform, substream

__all__ = [
    "BudgetExceededError",
    "FieldElement",
    "FieldSpec",
    "Matrix",
    "MatrixFormatError",
    "PrkResult",
    "RNG_ID",
    "StandardForm",
    "Subspace",
    "Vector",
    "classify_nx2",
    "cofactor_expand",
    "contains",
    "enumerate_field",
    "enumerate_subspaces",
    "field_from_order",
    "field_new",
    "has_full_prk",
    "hyperplane",
    "make_rng",
    "parse_matrix",
    "per_3x2",
    "per_naive",
    "per_ryser",
    "prk",
    "rank",
    "rref",
    "sample_uniform",
    "span",
    "standard_form",
    "substream",
]
