from collections import deque

import numpy as np
import pytest

import bruteforce as bf
from conftest import (
    arc_list,
    make_fig1,
    make_three_cycle,
    random_instance,
)
from sfast import (
    Instance,
    build_tournament,
    cost,
    exact_branch,
    exact_order,
    exact_subset,
    heuristic_order,
    transitive_tournament,
    verify_solution,
)
from sfast.errors import Infeasible, TooLarge


def test_subset_transitive():
    inst = Instance(transitive_tournament(5), {0, 3}, 0)
    out = exact_subset(inst)
    assert out.optimum == 0 and out.witness == frozenset()


def test_subset_three_cycle():
    out = exact_subset(make_three_cycle(terminals=(0,)))
    assert out.optimum == 1
    assert verify_solution(make_three_cycle(terminals=(0,)), out.witness)


def test_subset_infeasible_cap():
    with pytest.raises(Infeasible):
        exact_subset(make_three_cycle(terminals=(0,), budget=0), cap=0)


def test_subset_fig1_regression():
    # frozen on first computation; the witness differs from the affected
    # arcs of the identity order but has the same size
    out = exact_subset(make_fig1())
    assert out.optimum == 3
    assert out.witness == frozenset({(2, 3), (10, 0), (14, 5)})
    assert out.nodes_explored == 116894
    assert verify_solution(make_fig1(), out.witness)


def test_branch_transitive_zero_nodes():
    out = exact_branch(Instance(transitive_tournament(6), {1, 4}, 0))
    assert out.optimum == 0
    assert out.nodes_explored == 0


def test_branch_three_cycle_regression():
    out = exact_branch(make_three_cycle(terminals=(0,)))
    assert out.optimum == 1
    assert out.nodes_explored == 1


def test_branch_fig1_regression():
    out = exact_branch(make_fig1())
    assert out.optimum == 3
    assert out.nodes_explored == 16
    assert verify_solution(make_fig1(), out.witness)


def test_two_arc_disjoint_terminal_triangles():
    arcs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    arcs += [(i, j) for i in range(3) for j in range(3, 6)]
    inst = Instance(build_tournament(6, arcs), {0, 3}, 2)
    assert exact_subset(inst).optimum == 2
    assert exact_branch(inst).optimum == 2


def test_branch_agrees_with_subset():
    rng = np.random.default_rng(31)
    for _ in range(80):
        inst = random_instance(rng, 9, 3)
        assert exact_branch(inst).optimum == exact_subset(inst).optimum


def test_order_agrees_with_subset_and_bruteforce():
    rng = np.random.default_rng(32)
    for _ in range(50):
        inst = random_instance(rng, 6, 3)
        out = exact_order(inst)
        assert out.optimum == exact_subset(inst).optimum
        assert out.optimum == bf.min_cost_order(
            inst.n, arc_list(inst), inst.terminals
        )
        assert verify_solution(inst.with_budget(out.optimum), out.witness)


def test_order_too_large():
    inst = Instance(transitive_tournament(9), {0}, 0)
    with pytest.raises(TooLarge):
        exact_order(inst)


def test_order_no_terminals_zero():
    t = make_three_cycle(terminals=()).tournament
    inst = Instance(t, set(), 0)
    assert exact_order(inst).optimum == 0


def test_order_all_terminals_is_plain_feedback():
    # with every vertex terminal, minimizing cost is the plain
    # feedback-arc-set objective: compare to backward-count enumeration
    rng = np.random.default_rng(33)
    from itertools import permutations

    for _ in range(20):
        inst = random_instance(rng, 5, 3)
        inst = Instance(inst.tournament, set(range(inst.n)), inst.budget)
        arcs = arc_list(inst)
        brute = min(
            bf.backward_count(arcs, perm) for perm in permutations(range(inst.n))
        )
        assert exact_order(inst).optimum == brute


def test_heuristic_transitive_recovers_topological():
    inst = Instance(transitive_tournament(8), {2, 5}, 0)
    order = heuristic_order(inst)
    assert tuple(order) == tuple(range(8))
    assert cost(inst, order) == 0


def test_heuristic_three_cycle():
    inst = make_three_cycle(terminals=(0,))
    order = heuristic_order(inst)
    assert tuple(order) == (0, 1, 2)
    assert cost(inst, order) == 1


def test_heuristic_always_upper_bounds_optimum():
    rng = np.random.default_rng(34)
    for _ in range(60):
        inst = random_instance(rng, 8, 3)
        order = heuristic_order(inst)
        assert sorted(order) == list(range(inst.n))
        assert cost(inst, order) >= exact_subset(inst).optimum


def _min_reversals_bfs(inst):
    """Independent check of the deepening search: breadth-first search
    over tournament states, one arc reversal per edge."""
    mask = inst.terminal_mask
    start = inst.tournament.adj

    def key(adj):
        return adj.tobytes()

    def t_cycle_free(adj):
        n = adj.shape[0]
        arcs = [(u, v) for u in range(n) for v in range(n) if adj[u, v]]
        return not bf.t_cycle_exists(n, arcs, inst.terminals)

    seen = {key(start)}
    queue = deque([(start, 0)])
    while queue:
        adj, depth = queue.popleft()
        if t_cycle_free(adj):
            return depth
        n = adj.shape[0]
        for t in sorted(inst.terminals):
            for a in range(n):
                if not adj[t, a]:
                    continue
                for b in range(n):
                    if adj[a, b] and adj[b, t]:
                        for u, v in ((t, a), (a, b), (b, t)):
                            child = adj.copy()
                            child[u, v] = False
                            child[v, u] = True
                            k = key(child)
                            if k not in seen:
                                seen.add(k)
                                queue.append((child, depth + 1))
    raise AssertionError("state space exhausted without a solution")


def test_deepening_matches_unbounded_state_search():
    rng = np.random.default_rng(35)
    checked = 0
    for _ in range(40):
        inst = random_instance(rng, 5, 2)
        optimum = exact_subset(inst).optimum
        if optimum > 3:
            continue
        assert exact_branch(inst).optimum == _min_reversals_bfs(inst)
        checked += 1
    assert checked >= 20
