"""Symbolic Chern-class calculus with exact rational arithmetic."""

from .bundles import (
    Abstract,
    Dual,
    HalfTwist,
    Line,
    Sum,
    Sym,
    Tensor,
    TensorLine,
    Trivial,
    clutched_sum_class,
    free_ring,
    splitting_oracle,
    total_chern,
)
from .catalog import preset, run_examples
from .degeneracy import (
    SymmetricMapSpec,
    degeneracy_codim,
    harris_tu_class,
    hodge_enumeration,
    parity_constraint,
)
from .errors import CharclassError
from .graded_ring import GradedClass, RingSpec, add, component, mul, pair, substitute
from .parser import Session, parse_class, parse_program
from .rh_check import RHScenario, Variant, Verdict, check, check_many
from .schubert import Permutation, divided_difference, schubert_poly

__version__ = "0.1.0"

__all__ = [
    "Abstract", "Dual", "HalfTwist", "Line", "Sum", "Sym", "Tensor", "TensorLine", "Trivial",
    "clutched_sum_class", "free_ring", "splitting_oracle", "total_chern", "preset",
    "run_examples", "SymmetricMapSpec", "degeneracy_codim", "harris_tu_class",
    "hodge_enumeration", "parity_constraint", "CharclassError", "GradedClass", "RingSpec",
    "add", "component", "mul", "pair", "substitute", "Session", "parse_class",
    "parse_program", "RHScenario", "Variant", "Verdict", "check", "check_many",
    "Permutation", "divided_difference", "schubert_poly", "__version__",
]
