"""Norms ``||f||_H = (int f^H)^(1/|H|)`` defined by hypergraph pairs."""

from ._backend import NAME as BACKEND
from .engine import (
    Budget,
    BudgetExceeded,
    ContractionPlan,
    NormReport,
    integrate,
    integrate_batch,
    integrate_mixed,
    integrate_planned,
    norm,
    norm_report,
    plan,
    power_kernel,
    tensor_function,
)
from .measure import DiscreteMeasureSpace, GridFunction, diagonal_function
from .pair import (
    DimensionMismatch,
    HypergraphPair,
    add,
    conjugate,
    delta,
    disjoint_union,
    factorize,
    isomorphic,
    is_minimal,
    project,
    scale,
    sub,
    tensor,
)

__version__ = "0.1.0"
