"""Convex approximation sets for multi-objective combinatorial optimisation
via inner approximation with weighted-sum oracles."""

from .core import (
    EpsilonSpec,
    RunConfig,
    RunResult,
    compose_eps,
    find_initial_solution,
    inner_approximate,
    postprocess,
    solve,
)
from .oracles import ORACLES, OracleQuality, make_oracle
from .polytope import (
    Halfspace,
    Orientation,
    Polyhedron,
    contains,
    extreme_filter,
    facet_enumeration,
    insert_point,
    vertex_enumeration,
)

__all__ = [
    "EpsilonSpec", "RunConfig", "RunResult", "compose_eps", "find_initial_solution",
    "inner_approximate", "postprocess", "solve", "ORACLES", "OracleQuality", "make_oracle",
    "Halfspace", "Orientation", "Polyhedron", "contains", "extreme_filter",
    "facet_enumeration", "insert_point", "vertex_enumeration",
]
__version__ = "0.1.0"
