from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from sfast import (
    BoundSet,
    Instance,
    Tournament,
    VertexOrder,
    affected_arcs,
    build_tournament,
    maximal_nonterminal_intervals,
)

FIXTURES = Path(__file__).parent / "fixtures"

FIG1_N = 15
FIG1_BACKWARD = ((9, 5), (14, 12), (4, 2), (10, 0), (14, 5))
FIG1_AFFECTED = frozenset({(4, 2), (10, 0), (14, 5)})
FIG1_TERMINALS = frozenset({0, 4, 10, 11})


def make_fig1(budget=3):
    reversed_pairs = {frozenset(p) for p in FIG1_BACKWARD}
    arcs = [
        (i, j)
        for i in range(FIG1_N)
        for j in range(i + 1, FIG1_N)
        if frozenset((i, j)) not in reversed_pairs
    ]
    arcs.extend(FIG1_BACKWARD)
    return Instance(build_tournament(FIG1_N, arcs), FIG1_TERMINALS, budget)


def make_three_cycle(terminals=(0,), budget=1):
    return Instance(
        build_tournament(3, [(0, 1), (1, 2), (2, 0)]), set(terminals), budget
    )


def make_funnel(n=30, budget=1):
    """Single terminal 0 whose only in-arc comes from n-1, which itself
    has a single in-arc from n-2; everything else transitive. Every
    vertex lies on a terminal cycle, yet the one affected arc can never
    carry more than one forward path, so only the replacement rule can
    shrink the instance."""
    t, u, z = 0, n - 1, n - 2
    arcs = [(u, t), (z, u)]
    arcs += [(t, j) for j in range(1, n - 1)]
    arcs += [(u, j) for j in range(1, n - 2)]
    arcs += [(j, z) for j in range(1, n - 2)]
    arcs += [(i, j) for i in range(1, n - 2) for j in range(i + 1, n - 2)]
    return Instance(build_tournament(n, arcs), {t}, budget)


def random_adjacency(rng, n):
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                adj[i, j] = True
            else:
                adj[j, i] = True
    return adj


def random_instance(rng, n_max, k_max, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    k = int(rng.integers(0, k_max + 1))
    adj = random_adjacency(rng, n)
    terminals = {int(v) for v in range(n) if rng.random() < 0.5}
    return Instance(Tournament(adj), terminals, k)


def random_order(rng, n):
    return VertexOrder(tuple(int(v) for v in rng.permutation(n)))


def arc_list(inst):
    return sorted(inst.tournament.arcs())


@st.composite
def instances(draw, max_n=7, max_k=3, min_n=1):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    m = n * (n - 1) // 2
    bits = draw(st.lists(st.booleans(), min_size=m, max_size=m))
    terminals = draw(st.sets(st.integers(0, n - 1), max_size=n))
    k = draw(st.integers(0, max_k))
    adj = np.zeros((n, n), dtype=bool)
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            if bits[idx]:
                adj[j, i] = True
            else:
                adj[i, j] = True
            idx += 1
    return Instance(Tournament(adj), frozenset(terminals), k)


def terminal_location_ok(inst: Instance, order: VertexOrder, bounds: BoundSet) -> bool:
    """Every terminal under an affected span sits within the terminal
    radius of one span endpoint."""
    radius = bounds.terminal_radius
    for u, v in affected_arcs(inst, order):
        lo, hi = order.rank(v), order.rank(u)
        for t in inst.terminals:
            p = order.rank(t)
            if lo <= p <= hi and not (p <= lo + radius or p >= hi - radius):
                return False
    return True


def border_domination_ok(inst: Instance, order: VertexOrder) -> bool:
    """Every unaffected vertex of a maximal non-terminal interval is
    beaten by the whole left part and beats the whole right part."""
    adj = inst.tournament.adj
    affected_vs = {w for arc in affected_arcs(inst, order) for w in arc}
    for itv in maximal_nonterminal_intervals(inst, order):
        left = order.sequence[:itv.lo]
        right = order.sequence[itv.hi + 1:]
        for v in itv.vertices(order):
            if v in affected_vs:
                continue
            if any(not adj[u, v] for u in left):
                return False
            if any(not adj[v, w] for w in right):
                return False
    return True


@pytest.fixture
def fig1():
    return make_fig1()


@pytest.fixture
def fig1_path():
    return FIXTURES / "fig1.sfast"
