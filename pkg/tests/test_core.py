from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from conftest import (
    FIG1_AFFECTED,
    FIG1_BACKWARD,
    arc_list,
    instances,
    make_three_cycle,
    random_adjacency,
    random_instance,
    random_order,
)
from sfast import (
    Instance,
    Interval,
    Tournament,
    VertexOrder,
    affected_arcs,
    backward_arcs,
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
from sfast.errors import (
    MalformedTournament,
    NotAFeedbackSet,
    NotAnArc,
)
from sfast.solve import exact_subset


# ------------------------------------------------------------ construction


def test_build_transitive_three():
    t = build_tournament(3, [(0, 1), (1, 2), (0, 2)])
    assert t.has_arc(0, 1) and t.has_arc(1, 2) and t.has_arc(0, 2)
    assert not t.has_arc(1, 0)


def test_build_three_cycle():
    t = build_tournament(3, [(0, 1), (1, 2), (2, 0)])
    assert t.has_arc(2, 0) and not t.has_arc(0, 2)


def test_build_rejects_missing_pair():
    with pytest.raises(MalformedTournament):
        build_tournament(3, [(0, 1), (1, 2)])


def test_build_rejects_duplicate_and_both_orientations():
    with pytest.raises(MalformedTournament):
        build_tournament(2, [(0, 1), (0, 1)])
    with pytest.raises(MalformedTournament):
        build_tournament(2, [(0, 1), (1, 0)])


def test_build_rejects_self_loop_and_range():
    with pytest.raises(MalformedTournament):
        build_tournament(2, [(0, 0), (0, 1)])
    with pytest.raises(MalformedTournament):
        build_tournament(2, [(0, 2), (0, 1)])


def test_tournament_rejects_tampered_matrix():
    adj = np.zeros((2, 2), dtype=bool)  # no arc at all for the pair
    with pytest.raises(MalformedTournament):
        Tournament(adj)


def test_adjacency_is_frozen():
    t = transitive_tournament(3)
    with pytest.raises(ValueError):
        t.adj[0, 1] = False


# ------------------------------------------------------- orders & intervals


def test_vertex_order_roundtrip():
    order = VertexOrder((2, 0, 1))
    assert order.rank(2) == 0 and order.rank(0) == 1 and order.rank(1) == 2
    assert tuple(order) == (2, 0, 1)


def test_vertex_order_rejects_non_permutation():
    with pytest.raises(ValueError):
        VertexOrder((0, 0, 1))
    with pytest.raises(ValueError):
        VertexOrder((0, 2))


@given(st.permutations(list(range(8))))
def test_position_inverts_sequence(seq):
    order = VertexOrder(tuple(seq))
    for rank, v in enumerate(order.sequence):
        assert order.position[v] == rank


# ------------------------------------------------------------ backward arcs


def test_backward_fig1_identity(fig1):
    got = backward_arcs(fig1.tournament, VertexOrder.identity(15))
    assert got == frozenset(FIG1_BACKWARD)


def test_backward_transitive_identity_empty():
    t = transitive_tournament(6)
    assert backward_arcs(t, VertexOrder.identity(6)) == frozenset()


def test_backward_transitive_reversed_all():
    t = transitive_tournament(5)
    rev = VertexOrder(tuple(reversed(range(5))))
    assert len(backward_arcs(t, rev)) == 10


# ------------------------------------------------------------ affected arcs


def test_affected_fig1_identity(fig1):
    got = affected_arcs(fig1, VertexOrder.identity(15))
    assert got == FIG1_AFFECTED
    # span of 10 -> 6 (1-based) holds no terminal, so it stays unaffected
    assert (9, 5) not in got


def test_affected_empty_terminals():
    inst = Instance(transitive_tournament(5), set(), 0)
    rev = VertexOrder(tuple(reversed(range(5))))
    assert affected_arcs(inst, rev) == frozenset()


@settings(max_examples=60)
@given(instances(max_n=6), st.data())
def test_affected_subset_of_backward(inst, data):
    seq = data.draw(st.permutations(list(range(inst.n))))
    order = VertexOrder(tuple(seq))
    aff = affected_arcs(inst, order)
    back = backward_arcs(inst.tournament, order)
    assert aff <= back
    assert all(inst.tournament.has_arc(u, v) for u, v in back)


# --------------------------------------------------------------------- cost


def test_cost_fig1_identity(fig1):
    assert cost(fig1, VertexOrder.identity(15)) == 3


def test_cost_transitive_zero():
    inst = Instance(transitive_tournament(7), {1, 3}, 0)
    assert cost(inst, VertexOrder.identity(7)) == 0


def test_cost_three_cycle_enumerated():
    # every order pays at least one affected arc; five of the six pay
    # exactly one, while (1, 0, 2) wedges the terminal between two
    # backward spans and pays two
    inst = make_three_cycle(terminals=(0,))
    arcs = arc_list(inst)
    seen = {}
    for perm in permutations(range(3)):
        c = cost(inst, VertexOrder(perm))
        assert c == bf.order_cost(arcs, perm, inst.terminals)
        seen[perm] = c
    assert min(seen.values()) == 1
    assert seen[(1, 0, 2)] == 2
    assert sorted(seen.values()) == [1, 1, 1, 1, 1, 2]


@settings(max_examples=60)
@given(instances(max_n=6), st.data())
def test_cost_matches_bruteforce(inst, data):
    seq = tuple(data.draw(st.permutations(list(range(inst.n)))))
    assert cost(inst, VertexOrder(seq)) == bf.order_cost(
        arc_list(inst), seq, inst.terminals
    )


# ---------------------------------------------------------------- intervals


def test_intervals_fig1_identity(fig1):
    got = maximal_nonterminal_intervals(fig1, VertexOrder.identity(15))
    assert got == [Interval(1, 3), Interval(5, 9), Interval(12, 14)]


def test_intervals_all_terminals():
    inst = Instance(transitive_tournament(4), {0, 1, 2, 3}, 0)
    assert maximal_nonterminal_intervals(inst, VertexOrder.identity(4)) == []


def test_intervals_no_terminals():
    inst = Instance(transitive_tournament(4), set(), 0)
    got = maximal_nonterminal_intervals(inst, VertexOrder.identity(4))
    assert got == [Interval(0, 3)]


def test_interval_partition_fig1(fig1):
    order = VertexOrder.identity(15)
    part = interval_partition(fig1, order, Interval(5, 9))
    assert part.left == Interval(0, 4)
    assert part.right == Interval(10, 14)
    with pytest.raises(ValueError):
        interval_partition(fig1, order, Interval(5, 8))  # not maximal
    with pytest.raises(ValueError):
        interval_partition(fig1, order, Interval(4, 9))  # holds a terminal


def test_interval_partition_covers_everything():
    rng = np.random.default_rng(5)
    for _ in range(20):
        inst = random_instance(rng, 9, 2)
        order = random_order(rng, inst.n)
        for itv in maximal_nonterminal_intervals(inst, order):
            part = interval_partition(inst, order, itv)
            pieces = [p for p in (part.left, part.middle, part.right) if p]
            ranks = [r for p in pieces for r in range(p.lo, p.hi + 1)]
            assert sorted(ranks) == list(range(inst.n))


# ------------------------------------------------------------------- cycles


def test_in_t_cycle_fig1_v3(fig1):
    # triangle v3 -> v4 -> v5 -> v3 with terminal v5 (1-based)
    assert in_t_cycle(fig1, 2)
    assert bf.vertex_on_t_cycle(15, arc_list(fig1), fig1.terminals, 2)


def test_in_t_cycle_transitive_false():
    inst = Instance(transitive_tournament(5), {2}, 0)
    assert not any(in_t_cycle(inst, v) for v in range(5))


def test_in_t_cycle_no_terminals_false():
    inst = make_three_cycle(terminals=(), budget=0)
    assert not any(in_t_cycle(inst, v) for v in range(3))


def test_in_t_cycle_matches_cycle_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(120):
        inst = random_instance(rng, 7, 2)
        arcs = arc_list(inst)
        for v in range(inst.n):
            assert in_t_cycle(inst, v) == bf.vertex_on_t_cycle(
                inst.n, arcs, inst.terminals, v
            )


def test_has_t_cycle_cases(fig1):
    assert has_t_cycle(fig1)
    assert not has_t_cycle(Instance(transitive_tournament(6), {0, 5}, 0))
    assert has_t_cycle(make_three_cycle(terminals=(0,)))
    assert not has_t_cycle(make_three_cycle(terminals=()))


def test_has_t_cycle_matches_cycle_enumeration():
    rng = np.random.default_rng(12)
    for _ in range(120):
        inst = random_instance(rng, 7, 2)
        assert has_t_cycle(inst) == bf.t_cycle_exists(
            inst.n, arc_list(inst), inst.terminals
        )


# --------------------------------------------------- order <-> solution


def test_solution_from_order_fig1(fig1):
    sol = solution_from_order(fig1, VertexOrder.identity(15))
    assert sol == FIG1_AFFECTED
    assert verify_solution(fig1, sol)


def test_solution_from_order_transitive_empty():
    inst = Instance(transitive_tournament(5), {0}, 0)
    assert solution_from_order(inst, VertexOrder.identity(5)) == frozenset()


def test_solution_from_order_three_cycle():
    inst = make_three_cycle(terminals=(0,))
    assert solution_from_order(inst, VertexOrder((0, 1, 2))) == {(2, 0)}


def test_order_from_solution_fig1(fig1):
    order = order_from_solution(fig1, FIG1_AFFECTED)
    assert cost(fig1, order) <= 3


def test_order_from_solution_transitive():
    inst = Instance(transitive_tournament(5), {1}, 0)
    order = order_from_solution(inst, frozenset())
    assert tuple(order) == (0, 1, 2, 3, 4)
    assert cost(inst, order) == 0


def test_order_from_solution_three_cycle():
    inst = make_three_cycle(terminals=(0,))
    order = order_from_solution(inst, {(2, 0)})
    assert tuple(order) == (0, 1, 2)
    assert cost(inst, order) <= 1


def test_order_from_solution_rejects_non_feedback():
    inst = make_three_cycle(terminals=(0,))
    with pytest.raises(NotAFeedbackSet):
        order_from_solution(inst, frozenset())


def test_order_solution_roundtrip_small():
    # both directions of the order <-> solution correspondence
    rng = np.random.default_rng(21)
    for _ in range(40):
        inst = random_instance(rng, 6, 3)
        for perm in permutations(range(inst.n)):
            order = VertexOrder(perm)
            sol = solution_from_order(inst, order)
            assert len(sol) == cost(inst, order)
            assert verify_solution(inst.with_budget(len(sol)), sol)
        if inst.n >= 2:
            # random feedback sets map back to orders of no larger cost
            arcs = arc_list(inst)
            for _ in range(5):
                take = {a for a in arcs if rng.random() < 0.4}
                adj_rest = [a for a in arcs if a not in take]
                if bf.t_cycle_exists(inst.n, adj_rest, inst.terminals):
                    continue
                order = order_from_solution(inst, take)
                assert cost(inst, order) <= len(take)


# ------------------------------------------------------------- reverse_arc


def test_reverse_arc_example():
    t = transitive_tournament(3)
    flipped = reverse_arc(t, (0, 1))
    assert flipped.has_arc(1, 0) and flipped.has_arc(0, 2) and flipped.has_arc(1, 2)


def test_reverse_arc_is_involution():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(2, 8))
        t = Tournament(random_adjacency(rng, n))
        arcs = list(t.arcs())
        e = arcs[int(rng.integers(0, len(arcs)))]
        assert reverse_arc(reverse_arc(t, e), tuple(reversed(e))) == t


def test_reverse_arc_rejects_non_arc():
    t = transitive_tournament(3)
    with pytest.raises(NotAnArc):
        reverse_arc(t, (1, 0))


def test_reverse_arc_drops_three_cycle_optimum():
    inst = make_three_cycle(terminals=(0,))
    assert exact_subset(inst).optimum == 1
    flipped = Instance(reverse_arc(inst.tournament, (2, 0)), {0}, 1)
    assert exact_subset(flipped).optimum == 0


# --------------------------------------------------------- verify_solution


def test_verify_fig1_budget_three(fig1):
    assert verify_solution(fig1, FIG1_AFFECTED)


def test_verify_empty_set_with_cycle_false():
    assert not verify_solution(make_three_cycle(terminals=(0,)), frozenset())


def test_verify_budget_overflow_false(fig1):
    four = set(FIG1_BACKWARD[:4])
    assert not verify_solution(fig1.with_budget(3), four)
    assert verify_solution(fig1.with_budget(5), set(FIG1_BACKWARD))


def test_verify_rejects_non_arcs(fig1):
    with pytest.raises(NotAnArc):
        verify_solution(fig1, {(0, 10)})
