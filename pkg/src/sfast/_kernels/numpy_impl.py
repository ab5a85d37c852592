"""Pure NumPy backend for the hot kernels.

Every function here has a twin in numba_impl with identical semantics and
deterministic tie-breaking; the test suite cross-checks them. Inputs are
plain ndarrays: adj is an (n, n) bool matrix with adj[u, v] meaning arc
u -> v, is_term is an (n,) bool mask, orders are (n,) int64 rank -> vertex.
"""

from __future__ import annotations

import itertools

import numpy as np

BACKEND_NAME = "numpy"

_ORDER_CHUNK = 20160  # permutations per vectorized batch


def count_backward_affected(adj, is_term, order):
    """Count backward arcs and affected arcs (span touches a terminal)."""
    n = order.shape[0]
    if n < 2:
        return 0, 0
    sub = adj[np.ix_(order, order)]
    lo, hi = np.nonzero(np.triu(sub.T, 1))  # arc order[hi] -> order[lo], lo < hi
    nb = int(lo.size)
    if nb == 0:
        return 0, 0
    tp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(is_term[order], out=tp[1:])
    na = int(((tp[hi + 1] - tp[lo]) > 0).sum())
    return nb, na


def scc_labels(adj):
    """Tarjan strongly connected components; labels in emission order.

    Emission order is reverse topological: if there is an arc between two
    components, the target component gets the smaller label.
    """
    n = adj.shape[0]
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    labels = np.full(n, -1, dtype=np.int64)
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            advanced = False
            while i < n:
                if adj[v, i]:
                    w = i
                    if index[w] == -1:
                        work[-1] = (v, i + 1)
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack[w] = True
                        work.append((w, 0))
                        advanced = True
                        break
                    if on_stack[w] and index[w] < low[v]:
                        low[v] = index[w]
                i += 1
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    labels[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                p = work[-1][0]
                if low[v] < low[p]:
                    low[p] = low[v]
    return labels


def has_t_cycle_dense(adj, is_term):
    """True iff some terminal lies on a directed cycle.

    Uses boolean-matrix reachability closure, deliberately a different
    method than the Tarjan-based numba twin.
    """
    if not is_term.any():
        return False
    reach = adj.copy()
    while True:
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return bool((np.diagonal(reach) & is_term).any())


def first_t_triangle(adj, is_term):
    """Lexicographically smallest (t, a, b) with t terminal and arcs
    t->a, a->b, b->t; (-1, -1, -1) when none exists."""
    n = adj.shape[0]
    for t in range(n):
        if not is_term[t]:
            continue
        outs = np.flatnonzero(adj[t])
        ins = np.flatnonzero(adj[:, t])
        if outs.size == 0 or ins.size == 0:
            continue
        hits = np.argwhere(adj[np.ix_(outs, ins)])
        if hits.size:
            i, j = hits[0]
            return int(t), int(outs[i]), int(ins[j])
    return -1, -1, -1


def _chunked(iterable, size):
    it = iter(iterable)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def best_order(adj, is_term):
    """Minimum affected-arc count over all n! orders, plus the
    lexicographically smallest order achieving it."""
    n = adj.shape[0]
    if n < 2:
        return 0, np.arange(n, dtype=np.int64)
    best_cost = None
    best_perm = None
    for chunk in _chunked(itertools.permutations(range(n)), _ORDER_CHUNK):
        perms = np.array(chunk, dtype=np.int64)
        tp = np.zeros((perms.shape[0], n + 1), dtype=np.int64)
        np.cumsum(is_term[perms], axis=1, out=tp[:, 1:])
        costs = np.zeros(perms.shape[0], dtype=np.int64)
        for lo in range(n):
            for hi in range(lo + 1, n):
                backward = adj[perms[:, hi], perms[:, lo]]
                costs += backward & ((tp[:, hi + 1] - tp[:, lo]) > 0)
        i = int(np.argmin(costs))
        if best_cost is None or costs[i] < best_cost:
            best_cost = int(costs[i])
            best_perm = perms[i].copy()
    return best_cost, best_perm


_SUBSET_BATCH = 4096


def find_feedback_subset(adj, is_term, tails, heads, size):
    """First (lexicographic by arc index) size-subset of the given arcs
    whose removal leaves no terminal on a cycle.

    Combinations are screened in batches with stacked boolean matmuls;
    the hit index and explored count match a one-at-a-time scan exactly.
    Returns (found, combination, subsets_explored).
    """
    n = adj.shape[0]
    if size == 0:
        found = not has_t_cycle_dense(adj, is_term)
        return found, np.empty(0, dtype=np.int64), 1
    explored = 0
    gen = itertools.combinations(range(tails.shape[0]), size)
    while True:
        chunk = list(itertools.islice(gen, _SUBSET_BATCH))
        if not chunk:
            return False, np.empty(0, dtype=np.int64), explored
        idx = np.array(chunk, dtype=np.int64)
        stack = np.broadcast_to(adj, (idx.shape[0], n, n)).copy()
        rows = np.arange(idx.shape[0])[:, None]
        stack[rows, tails[idx], heads[idx]] = False
        reach = stack
        while True:
            nxt = reach | (reach @ reach)
            if np.array_equal(nxt, reach):
                break
            reach = nxt
        diag = np.diagonal(reach, axis1=1, axis2=2)
        good = ~((diag & is_term).any(axis=1))
        hits = np.flatnonzero(good)
        if hits.size:
            first = int(hits[0])
            return True, idx[first], explored + first + 1
        explored += idx.shape[0]


def _affected_count(adj, is_term, order):
    return count_backward_affected(adj, is_term, order)[1]


def _relocate(order, i, j):
    v = order[i]
    rest = np.delete(order, i)
    return np.insert(rest, j, v)


def hill_climb(adj, is_term, order):
    """First-improvement descent over single-vertex relocations."""
    order = np.array(order, dtype=np.int64, copy=True)
    n = order.shape[0]
    cur = _affected_count(adj, is_term, order)
    improved = True
    while improved and cur > 0:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                cand = _relocate(order, i, j)
                c = _affected_count(adj, is_term, cand)
                if c < cur:
                    order, cur = cand, c
                    improved = True
                    break
            if improved:
                break
    return order


def regularize_order(adj, is_term, order):
    """Local search: scan non-terminal intervals by (left endpoint
    ascending, length ascending); per interval try the left-endpoint move
    before the right-endpoint one; restart after every move.

    Each move strictly decreases the backward-arc count, so the number of
    moves is bounded by the initial count. Returns (order, moves).
    """
    order = np.array(order, dtype=np.int64, copy=True)
    n = order.shape[0]
    moves = 0
    while True:
        applied = False
        for l in range(n):
            if is_term[order[l]]:
                continue
            out_l = 0
            for r in range(l + 1, n):
                if is_term[order[r]]:
                    break
                if adj[order[l], order[r]]:
                    out_l += 1
                width = r - l
                if 2 * out_l < width:
                    # left endpoint loses to the majority: send it past r
                    v = order[l]
                    order[l:r] = order[l + 1:r + 1].copy()
                    order[r] = v
                    moves += 1
                    applied = True
                    break
                in_r = int(adj[order[l:r], order[r]].sum())
                if 2 * in_r < width:
                    v = order[r]
                    order[l + 1:r + 1] = order[l:r].copy()
                    order[l] = v
                    moves += 1
                    applied = True
                    break
            if applied:
                break
        if not applied:
            return order, moves
