"""Exact optimum oracles and heuristic order providers.

Three independent exact methods (arc-subset enumeration, triangle
branching with arc reversal, full order enumeration) supply ground truth
for the reduction pipeline; the heuristic provider supplies working
orders. Desk scale only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import (
    Arc,
    Instance,
    Tournament,
    VertexOrder,
    affected_arcs,
)
from .errors import Infeasible, TooLarge

EXACT_ORDER_LIMIT = 8


@dataclass(frozen=True)
class SolveOutcome:
    optimum: int
    witness: frozenset[Arc]
    nodes_explored: int


def _sorted_arcs(t: Tournament) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.argwhere(t.adj)
    if pairs.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    idx = np.lexsort((pairs[:, 1], pairs[:, 0]))
    pairs = pairs[idx]
    return pairs[:, 0].astype(np.int64), pairs[:, 1].astype(np.int64)


def exact_subset(inst: Instance, cap: int | None = None) -> SolveOutcome:
    """Enumerate arc subsets by increasing size; first verifying set wins.

    Subsets of equal size are tried in lexicographic order of the arc
    list sorted by (tail, head). Raises Infeasible when nothing of size
    <= cap works; with the default cap the search always succeeds since
    removing every arc leaves no cycle.
    """
    tails, heads = _sorted_arcs(inst.tournament)
    m = int(tails.size)
    if cap is None:
        cap = m
    explored = 0
    for size in range(min(cap, m) + 1):
        found, comb, tried = K.find_feedback_subset(
            inst.tournament.adj, inst.terminal_mask, tails, heads, size
        )
        explored += int(tried)
        if found:
            witness = frozenset(
                (int(tails[i]), int(heads[i])) for i in comb
            )
            return SolveOutcome(size, witness, explored)
    raise Infeasible(cap)


def decide(inst: Instance) -> bool:
    """YES/NO at the instance's own budget."""
    try:
        exact_subset(inst, cap=inst.budget)
        return True
    except Infeasible:
        return False


def _scc_topo_order(adj: np.ndarray) -> tuple[int, ...]:
    labels = K.scc_labels(adj)
    return tuple(sorted(range(adj.shape[0]), key=lambda v: (-labels[v], v)))


def exact_branch(inst: Instance) -> SolveOutcome:
    """Iterative deepening over the budget; at each node branch on the
    three arcs of the lexicographically smallest terminal triangle,
    reversing one arc per child. A leaf is a tournament with no terminal
    on a cycle."""
    mask = inst.terminal_mask
    nodes = 0

    def dfs(adj: np.ndarray, budget: int):
        nonlocal nodes
        if not K.has_t_cycle_dense(adj, mask):
            return adj
        if budget == 0:
            return None
        t, a, b = K.first_t_triangle(adj, mask)
        nodes += 1
        for u, v in ((t, a), (a, b), (b, t)):
            child = adj.copy()
            child[u, v] = False
            child[v, u] = True
            leaf = dfs(child, budget - 1)
            if leaf is not None:
                return leaf
        return None

    depth = 0
    while True:
        leaf = dfs(inst.tournament.adj, depth)
        if leaf is not None:
            order = VertexOrder(_scc_topo_order(leaf))
            witness = affected_arcs(inst, order)
            return SolveOutcome(depth, frozenset(witness), nodes)
        depth += 1


def exact_order(inst: Instance, limit: int = EXACT_ORDER_LIMIT) -> SolveOutcome:
    """Minimize cost over all n! orders; optimum equals the minimum
    feedback set size by the order <-> solution correspondence."""
    n = inst.n
    if n > limit:
        raise TooLarge(f"n={n} exceeds the order-enumeration limit {limit}")
    best_cost, best_perm = K.best_order(inst.tournament.adj, inst.terminal_mask)
    order = VertexOrder(tuple(int(v) for v in best_perm))
    witness = affected_arcs(inst, order)
    return SolveOutcome(int(best_cost), frozenset(witness), math.factorial(n))


def heuristic_order(inst: Instance) -> VertexOrder:
    """Deterministic provider: in-degree ascending (ties by id), then
    first-improvement single-vertex relocations until no move strictly
    decreases the cost. No quality guarantee is claimed."""
    n = inst.n
    indeg = inst.tournament.adj.sum(axis=0)
    start = np.array(sorted(range(n), key=lambda v: (indeg[v], v)), dtype=np.int64)
    seq = K.hill_climb(inst.tournament.adj, inst.terminal_mask, start)
    return VertexOrder(tuple(int(v) for v in seq))
