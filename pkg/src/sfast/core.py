"""Tournament data model: instances, vertex orders, backward and affected
arcs, interval structure, and the order <-> solution correspondence.

Vertices are dense integers 0..n-1. All types are immutable after
construction and every operation is a pure function, so values can be
shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from . import _kernels as K
from .errors import MalformedTournament, NotAFeedbackSet, NotAnArc

Arc = tuple[int, int]


class Tournament:
    """Complete orientation on n labeled vertices: exactly one arc per
    unordered pair, no self-arcs."""

    __slots__ = ("n", "adj")

    def __init__(self, adj: np.ndarray, *, _validate: bool = True):
        adj = np.ascontiguousarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise MalformedTournament("adjacency matrix must be square")
        if _validate:
            n = adj.shape[0]
            if adj.diagonal().any():
                raise MalformedTournament("self-arc present")
            both = adj & adj.T
            if both.any():
                u, v = np.argwhere(both)[0]
                raise MalformedTournament(f"both orientations of pair {{{u}, {v}}} present")
            neither = ~(adj | adj.T | np.eye(n, dtype=bool))
            if neither.any():
                u, v = np.argwhere(neither)[0]
                raise MalformedTournament(f"pair {{{u}, {v}}} has no arc")
        adj.setflags(write=False)
        self.adj = adj
        self.n = adj.shape[0]

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def arcs(self) -> Iterator[Arc]:
        """All arcs sorted by (tail, head)."""
        for u, v in np.argwhere(self.adj):
            yield int(u), int(v)

    def out_neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[v])

    def in_neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adj[:, v])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Tournament)
            and self.n == other.n
            and np.array_equal(self.adj, other.adj)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self) -> str:
        return f"Tournament(n={self.n})"


def build_tournament(n: int, arcs: Iterable[Arc]) -> Tournament:
    """Validated construction from an arc list; exactly one orientation
    per pair is required."""
    if n < 0:
        raise MalformedTournament("vertex count must be non-negative")
    adj = np.zeros((n, n), dtype=bool)
    for u, v in arcs:
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedTournament(f"arc ({u}, {v}) out of range 0..{n - 1}")
        if u == v:
            raise MalformedTournament(f"self-arc ({u}, {v})")
        if adj[u, v] or adj[v, u]:
            raise MalformedTournament(f"pair {{{u}, {v}}} oriented twice")
        adj[u, v] = True
    return Tournament(adj)


def transitive_tournament(n: int) -> Tournament:
    """Acyclic tournament with arc u -> v for every u < v."""
    adj = np.triu(np.ones((n, n), dtype=bool), 1)
    return Tournament(adj, _validate=False)


def reverse_arc(t: Tournament, e: Arc) -> Tournament:
    """Identical tournament except e is flipped. Involution."""
    u, v = e
    if not (0 <= u < t.n and 0 <= v < t.n) or not t.adj[u, v]:
        raise NotAnArc(f"({u}, {v}) is not an arc")
    adj = t.adj.copy()
    adj[u, v] = False
    adj[v, u] = True
    return Tournament(adj, _validate=False)


@dataclass(frozen=True)
class Instance:
    """A tournament, a terminal set, and a budget k >= 0."""

    tournament: Tournament
    terminals: frozenset[int]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        n = self.tournament.n
        if any(not (0 <= t < n) for t in self.terminals):
            raise ValueError("terminals must be vertices of the tournament")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        mask = np.zeros(n, dtype=bool)
        for t in self.terminals:
            mask[t] = True
        mask.setflags(write=False)
        object.__setattr__(self, "_terminal_mask", mask)

    @property
    def n(self) -> int:
        return self.tournament.n

    @property
    def terminal_mask(self) -> np.ndarray:
        return self._terminal_mask

    def with_budget(self, k: int) -> "Instance":
        return Instance(self.tournament, self.terminals, k)


@dataclass(frozen=True)
class VertexOrder:
    """Permutation of the vertices; sequence[i] is the vertex at rank i
    and position is its exact inverse."""

    sequence: tuple[int, ...]
    position: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(int(v) for v in self.sequence))
        n = len(self.sequence)
        pos = [-1] * n
        for i, v in enumerate(self.sequence):
            if not (0 <= v < n) or pos[v] != -1:
                raise ValueError("sequence is not a permutation of 0..n-1")
            pos[v] = i
        object.__setattr__(self, "position", tuple(pos))
        arr = np.array(self.sequence, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "_array", arr)

    @classmethod
    def identity(cls, n: int) -> "VertexOrder":
        return cls(tuple(range(n)))

    def rank(self, v: int) -> int:
        return self.position[v]

    def as_array(self) -> np.ndarray:
        return self._array

    def __len__(self) -> int:
        return len(self.sequence)

    def __iter__(self):
        return iter(self.sequence)


@dataclass(frozen=True)
class Interval:
    """Inclusive rank interval [lo, hi] of an order."""

    lo: int
    hi: int

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1

    def contains_rank(self, r: int) -> bool:
        return self.lo <= r <= self.hi

    def vertices(self, order: VertexOrder) -> tuple[int, ...]:
        return order.sequence[self.lo:self.hi + 1]


@dataclass(frozen=True)
class IntervalPartition:
    """(left, middle, right) split of an order around a maximal
    non-terminal interval; left/right may be empty."""

    left: Optional[Interval]
    middle: Interval
    right: Optional[Interval]


def _check_order(inst: Instance, order: VertexOrder) -> None:
    if len(order) != inst.n:
        raise ValueError("order does not permute the instance's vertices")


def backward_arcs(t: Tournament, order: VertexOrder) -> frozenset[Arc]:
    """Arcs whose head precedes the tail in the order."""
    if len(order) != t.n:
        raise ValueError("order does not permute the tournament's vertices")
    seq = order.as_array()
    sub = t.adj[np.ix_(seq, seq)]
    lo, hi = np.nonzero(np.triu(sub.T, 1))
    return frozenset((int(seq[h]), int(seq[l])) for l, h in zip(lo, hi))


def affected_arcs(inst: Instance, order: VertexOrder) -> frozenset[Arc]:
    """Backward arcs whose span (endpoints inclusive) holds a terminal."""
    _check_order(inst, order)
    seq = order.as_array()
    n = inst.n
    if n < 2:
        return frozenset()
    sub = inst.tournament.adj[np.ix_(seq, seq)]
    lo, hi = np.nonzero(np.triu(sub.T, 1))
    tp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(inst.terminal_mask[seq], out=tp[1:])
    keep = (tp[hi + 1] - tp[lo]) > 0
    return frozenset(
        (int(seq[h]), int(seq[l])) for l, h in zip(lo[keep], hi[keep])
    )


def backward_count(inst: Instance, order: VertexOrder) -> int:
    _check_order(inst, order)
    nb, _ = K.count_backward_affected(
        inst.tournament.adj, inst.terminal_mask, order.as_array()
    )
    return int(nb)


def cost(inst: Instance, order: VertexOrder) -> int:
    """Number of affected arcs with respect to the order."""
    _check_order(inst, order)
    _, na = K.count_backward_affected(
        inst.tournament.adj, inst.terminal_mask, order.as_array()
    )
    return int(na)


def maximal_nonterminal_intervals(inst: Instance, order: VertexOrder) -> list[Interval]:
    """Rank-maximal terminal-free runs, left to right."""
    _check_order(inst, order)
    out = []
    start = None
    for r, v in enumerate(order.sequence):
        if inst.terminal_mask[v]:
            if start is not None:
                out.append(Interval(start, r - 1))
                start = None
        elif start is None:
            start = r
    if start is not None:
        out.append(Interval(start, inst.n - 1))
    return out


def interval_partition(inst: Instance, order: VertexOrder, middle: Interval) -> IntervalPartition:
    """I-partition around a maximal non-terminal interval."""
    _check_order(inst, order)
    n = inst.n
    seq = order.sequence
    mask = inst.terminal_mask
    if any(mask[v] for v in middle.vertices(order)):
        raise ValueError("middle interval contains a terminal")
    if middle.lo > 0 and not mask[seq[middle.lo - 1]]:
        raise ValueError("middle interval is not maximal on the left")
    if middle.hi < n - 1 and not mask[seq[middle.hi + 1]]:
        raise ValueError("middle interval is not maximal on the right")
    left = Interval(0, middle.lo - 1) if middle.lo > 0 else None
    right = Interval(middle.hi + 1, n - 1) if middle.hi < n - 1 else None
    return IntervalPartition(left, middle, right)


def scc_labels(t: Tournament) -> np.ndarray:
    """Strongly-connected-component labels; components in reverse
    topological emission order (see kernels)."""
    return K.scc_labels(t.adj)


def in_t_cycle(inst: Instance, v: int) -> bool:
    """True iff v lies on a directed cycle through a terminal.

    In a tournament any strong component of size >= 2 is hamiltonian, so
    two vertices share a cycle iff they share a component: the check
    reduces to v's component having size >= 2 and meeting T.
    """
    labels = K.scc_labels(inst.tournament.adj)
    sizes = np.bincount(labels, minlength=labels.size)
    if sizes[labels[v]] < 2:
        return False
    return any(labels[t] == labels[v] for t in inst.terminals)


def has_t_cycle(inst: Instance) -> bool:
    """True iff some cycle passes through a terminal: some terminal's
    strong component has size >= 2."""
    if not inst.terminals or inst.n < 2:
        return False
    return bool(K.has_t_cycle_dense(inst.tournament.adj, inst.terminal_mask))


def _check_arcs(t: Tournament, s: Iterable[Arc]) -> list[Arc]:
    out = []
    for u, v in s:
        if not (0 <= u < t.n and 0 <= v < t.n) or not t.adj[u, v]:
            raise NotAnArc(f"({u}, {v}) is not an arc")
        out.append((int(u), int(v)))
    return out


def _adj_without(t: Tournament, s: Iterable[Arc]) -> np.ndarray:
    adj = t.adj.copy()
    for u, v in s:
        adj[u, v] = False
    return adj


def solution_from_order(inst: Instance, order: VertexOrder) -> frozenset[Arc]:
    """The affected arcs; removing them leaves no cycle through a
    terminal."""
    return affected_arcs(inst, order)


def order_from_solution(inst: Instance, s: Iterable[Arc]) -> VertexOrder:
    """Order whose cost is at most |s|, built from the topological order
    of the strong components once s is removed."""
    arcs = _check_arcs(inst.tournament, s)
    adj = _adj_without(inst.tournament, arcs)
    labels = K.scc_labels(adj)
    sizes = np.bincount(labels, minlength=labels.size) if labels.size else labels
    for t in inst.terminals:
        if sizes[labels[t]] >= 2:
            raise NotAFeedbackSet("a terminal still lies on a cycle")
    # emission order is reverse topological: descending label is a
    # topological order of the condensation
    verts = sorted(range(inst.n), key=lambda v: (-labels[v], v))
    return VertexOrder(tuple(verts))


def verify_solution(inst: Instance, s: Iterable[Arc]) -> bool:
    """True iff |s| <= budget and removing s leaves no terminal cycle."""
    arcs = _check_arcs(inst.tournament, set(s))
    if len(arcs) > inst.budget:
        return False
    if not inst.terminals:
        return True
    adj = _adj_without(inst.tournament, arcs)
    return not bool(K.has_t_cycle_dense(adj, inst.terminal_mask))
