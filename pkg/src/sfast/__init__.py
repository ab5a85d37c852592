"""Kernelization engine for subset feedback arc set in tournaments."""

from ._kernels import BACKEND_NAME as _backend_name
from .core import (
    Instance,
    Interval,
    IntervalPartition,
    Tournament,
    VertexOrder,
    affected_arcs,
    backward_arcs,
    backward_count,
    build_tournament,
    cost,
    has_t_cycle,
    in_t_cycle,
    interval_partition,
    maximal_nonterminal_intervals,
    order_from_solution,
    reverse_arc,
    solution_from_order,
    transitive_tournament,
    verify_solution,
)
from .reduce import (
    BoundSet,
    KernelResult,
    RichPartition,
    RuleApplication,
    Status,
    classify_rich,
    forward_flow,
    kernelize,
    replay_trace,
    rule1_trivial_no,
    rule2_trivial_yes,
    rule3_delete_bypassed,
    rule4_force_arc,
    rule5_rich_replace,
    rule6_size_no,
)
from .regular import RegularizationReport, is_regular, regularize
from .solve import (
    SolveOutcome,
    decide,
    exact_branch,
    exact_order,
    exact_subset,
    heuristic_order,
)

__version__ = "0.1.0"


def backend_name() -> str:
    """Which kernel backend is active (see SFAST_BACKEND)."""
    return _backend_name
