"""Arc-consistency for multidimensional array constraints ``x = a[y1,...,yn]``."""

from .arrac import NotArcConsistent, arrac_fixpoint, arrac_run, supporting_cells
from .core import (
    ArrayDef,
    ArrayEq,
    CSPModel,
    Domain,
    EmptyInitialDomain,
    InvalidIndex,
    ModelError,
    NonLinearConstraint,
    PropagationStats,
    ValueNotInDomain,
    VarEq,
    VarNeq,
    instantiate,
    validate_model,
)
from .crossword import CrosswordSpec, NoFittingWord, build_crossword
from .dsl import ParseError, format_model, parse_model
from .expressions import decompose
from .oracle import SearchSpaceTooLarge, ac_closure_oracle, enumerate_solutions
from .rules import rsarr_closure
from .solver import SearchOptions, solve

__all__ = [
    "ArrayDef",
    "ArrayEq",
    "CSPModel",
    "CrosswordSpec",
    "Domain",
    "EmptyInitialDomain",
    "InvalidIndex",
    "ModelError",
    "NoFittingWord",
    "NonLinearConstraint",
    "NotArcConsistent",
    "ParseError",
    "PropagationStats",
    "SearchOptions",
    "SearchSpaceTooLarge",
    "ValueNotInDomain",
    "VarEq",
    "VarNeq",
    "ac_closure_oracle",
    "arrac_fixpoint",
    "arrac_run",
    "build_crossword",
    "decompose",
    "enumerate_solutions",
    "format_model",
    "instantiate",
    "parse_model",
    "rsarr_closure",
    "solve",
    "supporting_cells",
    "validate_model",
]
