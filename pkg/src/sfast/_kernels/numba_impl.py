"""Numba backend: @njit ports of the numpy_impl kernels.

Same signatures, same deterministic scan orders. Compiled lazily on first
call and cached on disk, so the first process pays the JIT cost once.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def count_backward_affected(adj, is_term, order):
    n = order.shape[0]
    tp = np.zeros(n + 1, dtype=np.int64)
    for r in range(n):
        tp[r + 1] = tp[r] + (1 if is_term[order[r]] else 0)
    nb = 0
    na = 0
    for lo in range(n):
        for hi in range(lo + 1, n):
            if adj[order[hi], order[lo]]:
                nb += 1
                if tp[hi + 1] - tp[lo] > 0:
                    na += 1
    return nb, na


@njit(**_OPTS)
def scc_labels(adj):
    n = adj.shape[0]
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.bool_)
    labels = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    call_v = np.empty(n, dtype=np.int64)
    call_i = np.empty(n, dtype=np.int64)
    sp = 0
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        depth = 0
        call_v[0] = root
        call_i[0] = 0
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        while depth >= 0:
            v = call_v[depth]
            i = call_i[depth]
            advanced = False
            while i < n:
                if adj[v, i]:
                    w = i
                    if index[w] == -1:
                        call_i[depth] = i + 1
                        depth += 1
                        call_v[depth] = w
                        call_i[depth] = 0
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        on_stack[w] = True
                        advanced = True
                        break
                    if on_stack[w] and index[w] < low[v]:
                        low[v] = index[w]
                i += 1
            if advanced:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack[sp - 1]
                    sp -= 1
                    on_stack[w] = False
                    labels[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            depth -= 1
            if depth >= 0:
                p = call_v[depth]
                if low[v] < low[p]:
                    low[p] = low[v]
    return labels


@njit(**_OPTS)
def has_t_cycle_dense(adj, is_term):
    n = adj.shape[0]
    if n == 0:
        return False
    labels = scc_labels(adj)
    sizes = np.zeros(n, dtype=np.int64)
    for v in range(n):
        sizes[labels[v]] += 1
    for v in range(n):
        if is_term[v] and sizes[labels[v]] >= 2:
            return True
    return False


@njit(**_OPTS)
def first_t_triangle(adj, is_term):
    n = adj.shape[0]
    for t in range(n):
        if not is_term[t]:
            continue
        for a in range(n):
            if not adj[t, a]:
                continue
            for b in range(n):
                if adj[a, b] and adj[b, t]:
                    return t, a, b
    return -1, -1, -1


@njit(**_OPTS)
def _next_permutation(perm):
    n = perm.shape[0]
    i = n - 2
    while i >= 0 and perm[i] >= perm[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while perm[j] <= perm[i]:
        j -= 1
    perm[i], perm[j] = perm[j], perm[i]
    lo = i + 1
    hi = n - 1
    while lo < hi:
        perm[lo], perm[hi] = perm[hi], perm[lo]
        lo += 1
        hi -= 1
    return True


@njit(**_OPTS)
def _cost_of(adj, is_term, order, tp):
    n = order.shape[0]
    tp[0] = 0
    for r in range(n):
        tp[r + 1] = tp[r] + (1 if is_term[order[r]] else 0)
    cost = 0
    for lo in range(n):
        for hi in range(lo + 1, n):
            if adj[order[hi], order[lo]] and tp[hi + 1] - tp[lo] > 0:
                cost += 1
    return cost


@njit(**_OPTS)
def best_order(adj, is_term):
    n = adj.shape[0]
    perm = np.arange(n)
    best = np.arange(n)
    tp = np.zeros(n + 1, dtype=np.int64)
    best_cost = _cost_of(adj, is_term, perm, tp)
    while _next_permutation(perm):
        c = _cost_of(adj, is_term, perm, tp)
        if c < best_cost:
            best_cost = c
            best[:] = perm
    return best_cost, best


@njit(**_OPTS)
def find_feedback_subset(adj, is_term, tails, heads, size):
    m = tails.shape[0]
    work = adj.copy()
    explored = 0
    if size == 0:
        explored = 1
        found = not has_t_cycle_dense(work, is_term)
        return found, np.empty(0, dtype=np.int64), explored
    if size > m:
        return False, np.empty(0, dtype=np.int64), explored
    comb = np.arange(size)
    while True:
        for j in range(size):
            work[tails[comb[j]], heads[comb[j]]] = False
        explored += 1
        good = not has_t_cycle_dense(work, is_term)
        for j in range(size):
            work[tails[comb[j]], heads[comb[j]]] = True
        if good:
            return True, comb.copy(), explored
        j = size - 1
        while j >= 0 and comb[j] == m - size + j:
            j -= 1
        if j < 0:
            return False, np.empty(0, dtype=np.int64), explored
        comb[j] += 1
        for jj in range(j + 1, size):
            comb[jj] = comb[jj - 1] + 1


@njit(**_OPTS)
def hill_climb(adj, is_term, order):
    n = order.shape[0]
    cur_order = order.copy()
    cand = np.empty(n, dtype=np.int64)
    tp = np.zeros(n + 1, dtype=np.int64)
    cur = _cost_of(adj, is_term, cur_order, tp)
    improved = True
    while improved and cur > 0:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                v = cur_order[i]
                if j < i:
                    cand[:j] = cur_order[:j]
                    cand[j] = v
                    cand[j + 1:i + 1] = cur_order[j:i]
                    cand[i + 1:] = cur_order[i + 1:]
                else:
                    cand[:i] = cur_order[:i]
                    cand[i:j] = cur_order[i + 1:j + 1]
                    cand[j] = v
                    cand[j + 1:] = cur_order[j + 1:]
                c = _cost_of(adj, is_term, cand, tp)
                if c < cur:
                    cur_order[:] = cand
                    cur = c
                    improved = True
                    break
            if improved:
                break
    return cur_order


@njit(**_OPTS)
def regularize_order(adj, is_term, order):
    n = order.shape[0]
    out = order.copy()
    moves = 0
    while True:
        applied = False
        for l in range(n):
            if is_term[out[l]]:
                continue
            out_l = 0
            for r in range(l + 1, n):
                if is_term[out[r]]:
                    break
                if adj[out[l], out[r]]:
                    out_l += 1
                width = r - l
                if 2 * out_l < width:
                    v = out[l]
                    for p in range(l, r):
                        out[p] = out[p + 1]
                    out[r] = v
                    moves += 1
                    applied = True
                    break
                in_r = 0
                for p in range(l, r):
                    if adj[out[p], out[r]]:
                        in_r += 1
                if 2 * in_r < width:
                    v = out[r]
                    for p in range(r, l, -1):
                        out[p] = out[p - 1]
                    out[l] = v
                    moves += 1
                    applied = True
                    break
            if applied:
                break
        if not applied:
            return out, moves
