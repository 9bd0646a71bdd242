"""Thurston pullback realization of marked self-maps, with its exact side facts."""
from .hmap import H_EXACT, choose_k, h_eval, h_orbit, h_preimages, hn_critical_values
from .hpoly import HPolyResult, h_poly_for_set
from .multiplicity import MultiplicityPlan, achievable_local_degrees, multiplicity_plan
from .solver import (
    Configuration,
    MarkedSelfMap,
    PullbackState,
    ThurstonFailure,
    ThurstonOptions,
    ThurstonResult,
    parse_point,
    pullback_step,
    solve_thurston,
)
from .table import TABLE, canonical_pattern, functional_graph, match_fixture, verify_table_case

__all__ = [
    "H_EXACT",
    "choose_k",
    "h_eval",
    "h_orbit",
    "h_preimages",
    "hn_critical_values",
    "HPolyResult",
    "h_poly_for_set",
    "MultiplicityPlan",
    "achievable_local_degrees",
    "multiplicity_plan",
    "Configuration",
    "MarkedSelfMap",
    "PullbackState",
    "ThurstonFailure",
    "ThurstonOptions",
    "ThurstonResult",
    "parse_point",
    "pullback_step",
    "solve_thurston",
    "TABLE",
    "canonical_pattern",
    "functional_graph",
    "match_fixture",
    "verify_table_case",
]
