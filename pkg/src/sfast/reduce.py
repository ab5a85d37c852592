"""Reduction rules, rich-vertex classification, size bounds, and the
kernelization pipeline with an auditable trace.

All bound arithmetic is parameterized by the realized cost of the working
regular order rather than an assumed approximation guarantee; the rules
stay answer-preserving for any order provider, and only the final kernel
size depends on provider quality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Union

import numpy as np

from . import _kernels as K
from .core import (
    Arc,
    Instance,
    Interval,
    Tournament,
    VertexOrder,
    affected_arcs,
    cost,
    has_t_cycle,
    interval_partition,
    maximal_nonterminal_intervals,
    order_from_solution,
    reverse_arc,
)
from .errors import (
    NotBackward,
    OrderNotRegular,
    PreconditionViolated,
    ProviderFailure,
    TerminalNotInSpan,
)
from .regular import is_regular, regularize
from .solve import exact_branch, heuristic_order

TRACE_SCHEMA = 1


class Status(Enum):
    TRIVIAL_YES = "yes"
    TRIVIAL_NO = "no"
    REDUCED = "reduced"


@dataclass(frozen=True)
class BoundSet:
    """All rule thresholds as functions of the working order's cost and
    the budget."""

    order_cost: int
    budget: int

    @property
    def rich_threshold(self) -> int:
        """Minimum in- and out-degree inside an interval for a vertex to
        count as rich."""
        return self.order_cost + 2 * self.budget + 1

    @property
    def terminal_radius(self) -> int:
        """How far from an affected span's endpoint a terminal can sit
        once the flow rule is exhausted."""
        return 2 * self.order_cost + 2 * self.budget + 2

    @property
    def inserted_count(self) -> int:
        """Fresh non-terminals inserted by the replacement rule."""
        return 2 * self.rich_threshold + self.budget + 1

    @property
    def interval_cap(self) -> int:
        """Maximum interval length once the replacement rule is
        exhausted: non-rich + affected rich + inserted."""
        return 4 * self.rich_threshold + self.order_cost + self.inserted_count

    @property
    def size_cap(self) -> int:
        """Vertex count above which a reduced instance must be NO:
        covered spans plus the terminal-free gaps between them."""
        return (2 * self.order_cost + 1) * self.interval_cap + self.order_cost * (
            2 * self.terminal_radius + 2
        )


@dataclass(frozen=True)
class RichPartition:
    """Per maximal non-terminal interval: rich (balanced degrees),
    in-rich (few out-neighbors), out-rich (few in-neighbors), and the
    rich vertices touching an affected arc."""

    interval: Interval
    rich: frozenset[int]
    in_rich: frozenset[int]
    out_rich: frozenset[int]
    affected_rich: frozenset[int]


@dataclass(frozen=True)
class RuleApplication:
    rule: int
    n_before: int
    n_after: int
    budget_before: int
    budget_after: int
    params: dict
    touched: tuple
    effect: dict


@dataclass(frozen=True)
class KernelResult:
    status: Status
    instance: Optional[Instance]
    final_order: Optional[VertexOrder]
    bounds: Optional[BoundSet]
    trace: tuple[RuleApplication, ...] = field(default=())


Provider = Union[str, Callable[[Instance], object]]


# ---------------------------------------------------------------- rules 1-3


def rule1_trivial_no(inst: Instance) -> Optional[Status]:
    """Budget exhausted while a terminal cycle remains."""
    if inst.budget <= 0 and has_t_cycle(inst):
        return Status.TRIVIAL_NO
    return None


def rule2_trivial_yes(inst: Instance) -> Optional[Status]:
    """No terminal cycle at all."""
    if inst.budget >= 0 and not has_t_cycle(inst):
        return Status.TRIVIAL_YES
    return None


def _compact(inst: Instance, deleted: set[int]) -> tuple[Instance, list[int]]:
    """Drop the given vertices; survivors keep their relative id order.
    Returns the new instance and the survivor list (old ids, index = new
    id)."""
    survivors = [v for v in range(inst.n) if v not in deleted]
    adj = inst.tournament.adj[np.ix_(survivors, survivors)]
    remap = {v: i for i, v in enumerate(survivors)}
    terminals = {remap[t] for t in inst.terminals if t not in deleted}
    return Instance(Tournament(adj, _validate=False), terminals, inst.budget), survivors


def rule3_delete_bypassed(inst: Instance) -> Optional[tuple[Instance, tuple[int, ...]]]:
    """Delete every vertex that lies on no terminal cycle (all at once;
    removing one such vertex cannot put another on a cycle)."""
    n = inst.n
    if n == 0:
        return None
    labels = K.scc_labels(inst.tournament.adj)
    sizes = np.bincount(labels, minlength=n)
    has_terminal = np.zeros(n, dtype=bool)
    for t in inst.terminals:
        has_terminal[labels[t]] = True
    bypassed = {
        v for v in range(n)
        if sizes[labels[v]] < 2 or not has_terminal[labels[v]]
    }
    if not bypassed:
        return None
    nxt, _ = _compact(inst, bypassed)
    return nxt, tuple(sorted(bypassed))


# ------------------------------------------------------------------- rule 4


def _maxflow_forward(inst: Instance, order: VertexOrder, s: int, t: int) -> int:
    """Unit-capacity max flow from s to t over the forward arcs of the
    order (BFS augmenting paths)."""
    n = inst.n
    pos = np.array(order.position, dtype=np.int64)
    cap = (inst.tournament.adj & (pos[:, None] < pos[None, :])).astype(np.int8)
    flow = 0
    while True:
        parent = np.full(n, -1, dtype=np.int64)
        parent[s] = s
        queue = [s]
        qi = 0
        while qi < len(queue) and parent[t] == -1:
            a = queue[qi]
            qi += 1
            for b in np.flatnonzero(cap[a] > 0):
                if parent[b] == -1:
                    parent[b] = a
                    queue.append(b)
        if parent[t] == -1:
            return flow
        b = t
        while b != s:
            a = int(parent[b])
            cap[a, b] -= 1
            cap[b, a] += 1
            b = a
        flow += 1


def forward_flow(inst: Instance, order: VertexOrder, e: Arc, t: int) -> int:
    """Maximum number of arc-disjoint forward-arc paths from the span's
    left endpoint through t to its right endpoint.

    Forward paths climb ranks, so the two halves are automatically
    arc-disjoint and the value is the minimum of the two unit-capacity
    flows; when t is a span endpoint the corresponding half degenerates
    and a single flow remains.
    """
    u, v = e
    if not inst.tournament.has_arc(u, v) or order.rank(u) <= order.rank(v):
        raise NotBackward(f"({u}, {v}) is not a backward arc of the order")
    lo, hi = order.rank(v), order.rank(u)
    if t not in inst.terminals or not (lo <= order.rank(t) <= hi):
        raise TerminalNotInSpan(f"{t} is not a terminal inside the span of ({u}, {v})")
    if t == v or t == u:
        return _maxflow_forward(inst, order, v, u)
    return min(
        _maxflow_forward(inst, order, v, t),
        _maxflow_forward(inst, order, t, u),
    )


def find_forced_arc(inst: Instance, order: VertexOrder) -> Optional[tuple[Arc, int, int]]:
    """First (affected arc, terminal) pair whose forward flow reaches
    budget + 1; arcs scanned by (tail, head), terminals by rank."""
    affected = sorted(affected_arcs(inst, order))
    need = inst.budget + 1
    for e in affected:
        u, v = e
        lo, hi = order.rank(v), order.rank(u)
        terms = sorted(
            (t for t in inst.terminals if lo <= order.rank(t) <= hi),
            key=order.rank,
        )
        for t in terms:
            f = forward_flow(inst, order, e, t)
            if f >= need:
                return e, t, f
    return None


def rule4_force_arc(inst: Instance, order: VertexOrder) -> Optional[tuple[Instance, Arc]]:
    """Reverse the first affected arc that closes budget + 1 arc-disjoint
    terminal cycles and pay one unit of budget.

    With budget 0 a qualifying arc implies a terminal cycle, so the
    trivial-NO rule already classifies the instance; this rule then
    declines rather than produce a negative budget.
    """
    hit = find_forced_arc(inst, order)
    if hit is None or inst.budget < 1:
        return None
    e, _, _ = hit
    nxt = Instance(
        reverse_arc(inst.tournament, e), inst.terminals, inst.budget - 1
    )
    return nxt, e


# ------------------------------------------------------- rich classification


def _classify_interval(inst: Instance, order: VertexOrder, itv: Interval,
                       d: int, affected_vs: set[int]) -> RichPartition:
    verts = itv.vertices(order)
    vs = np.array(verts, dtype=np.int64)
    sub = inst.tournament.adj[np.ix_(vs, vs)]
    outdeg = sub.sum(axis=1)
    indeg = sub.sum(axis=0)
    rich, in_rich, out_rich = set(), set(), set()
    for i, v in enumerate(verts):
        # both degree tests can hold only on intervals shorter than 2d;
        # few-out-neighbors takes precedence to keep the three sets a
        # partition
        if outdeg[i] <= d - 1:
            in_rich.add(v)
        elif indeg[i] <= d - 1:
            out_rich.add(v)
        else:
            rich.add(v)
    return RichPartition(
        itv,
        frozenset(rich),
        frozenset(in_rich),
        frozenset(out_rich),
        frozenset(rich & affected_vs),
    )


def classify_rich(inst: Instance, order: VertexOrder, bounds: BoundSet) -> list[RichPartition]:
    """Rich / in-rich / out-rich partition of every maximal non-terminal
    interval at the bound set's degree threshold."""
    if not is_regular(inst, order):
        raise OrderNotRegular("rich classification requires a regular order")
    d = bounds.rich_threshold
    affected_vs = {w for arc in affected_arcs(inst, order) for w in arc}
    return [
        _classify_interval(inst, order, itv, d, affected_vs)
        for itv in maximal_nonterminal_intervals(inst, order)
    ]


# ------------------------------------------------------------------- rule 5


def _apply_rule5(inst: Instance, order: VertexOrder, bounds: BoundSet,
                 part: RichPartition) -> tuple[Instance, VertexOrder, dict]:
    """The seven replacement steps on one interval. Returns the new
    instance, the new working order, and the replayable effect."""
    d = bounds.rich_threshold
    ell = bounds.inserted_count
    itv = part.interval
    ipart = interval_partition(inst, order, itv)
    interval_set = set(itv.vertices(order))
    deleted = part.rich - part.affected_rich
    adj_old = inst.tournament.adj

    survivors = [v for v in range(inst.n) if v not in deleted]
    remap = {v: i for i, v in enumerate(survivors)}
    s = len(survivors)
    total = s + ell
    adj = np.zeros((total, total), dtype=bool)
    adj[:s, :s] = adj_old[np.ix_(survivors, survivors)]
    fresh = list(range(s, total))  # fresh[i] realizes the (i+1)-th insert

    added: list[Arc] = []

    def add(a: int, b: int) -> None:
        adj[a, b] = True
        added.append((a, b))

    for i in range(ell):
        for j in range(i + 1, ell):
            add(fresh[i], fresh[j])

    for u in sorted(part.out_rich):
        x = sum(1 for w in np.flatnonzero(adj_old[:, u]) if w in deleted)
        nu = remap[u]
        for i in range(ell):
            if d <= i < d + x:
                add(fresh[i], nu)  # restput the lost in-neighbors
            else:
                add(nu, fresh[i])

    for w in sorted(part.in_rich):
        y = sum(1 for z in np.flatnonzero(adj_old[w]) if z in deleted)
        nw = remap[w]
        for i in range(ell):
            if d <= i < d + y:
                add(nw, fresh[i])  # restore the lost out-neighbors
            else:
                add(fresh[i], nw)

    for vp in sorted(part.affected_rich):
        nv = remap[vp]
        for i in range(ell):
            if i < d:
                add(fresh[i], nv)
            else:
                add(nv, fresh[i])

    left_vs = ipart.left.vertices(order) if ipart.left else ()
    right_vs = ipart.right.vertices(order) if ipart.right else ()
    for u in left_vs:
        nu = remap[u]
        for i in range(ell):
            add(nu, fresh[i])
    for w in right_vs:
        nw = remap[w]
        for i in range(ell):
            add(fresh[i], nw)

    tournament = Tournament(adj)  # completeness re-validated on purpose
    terminals = {remap[t] for t in inst.terminals}
    nxt = Instance(tournament, terminals, inst.budget)

    new_seq = []
    for rank, v in enumerate(order.sequence):
        if v in deleted:
            continue
        new_seq.append(remap[v])
        if rank == itv.hi:
            new_seq.extend(fresh)
    new_order = VertexOrder(tuple(new_seq))

    effect = {
        "deleted": [int(v) for v in sorted(deleted)],
        "inserted": ell,
        "new_arcs": [[int(a), int(b)] for a, b in added],
    }
    return nxt, new_order, effect


def _check_basic_reduced(inst: Instance, order: VertexOrder) -> None:
    if rule1_trivial_no(inst) or rule2_trivial_yes(inst):
        raise PreconditionViolated("instance resolves trivially")
    if rule3_delete_bypassed(inst) is not None:
        raise PreconditionViolated("a vertex lies on no terminal cycle")
    if find_forced_arc(inst, order) is not None:
        raise PreconditionViolated("an affected arc is still forced")


def rule5_rich_replace(inst: Instance, order: VertexOrder, bounds: BoundSet,
                       *, check: bool = True) -> Optional[tuple[Instance, VertexOrder]]:
    """Replace the unaffected rich vertices of the first over-long
    maximal non-terminal interval by a fixed-size fresh block."""
    if check:
        if not is_regular(inst, order):
            raise PreconditionViolated("order is not regular")
        _check_basic_reduced(inst, order)
    hit = _scan_rule5(inst, order, bounds)
    if hit is None:
        return None
    nxt, new_order, _ = hit
    return nxt, new_order


def _scan_rule5(inst: Instance, order: VertexOrder, bounds: BoundSet):
    d = bounds.rich_threshold
    affected_vs = {w for arc in affected_arcs(inst, order) for w in arc}
    for itv in maximal_nonterminal_intervals(inst, order):
        if itv.length >= bounds.interval_cap + 1:
            part = _classify_interval(inst, order, itv, d, affected_vs)
            return _apply_rule5(inst, order, bounds, part)
    return None


# ------------------------------------------------------------------- rule 6


def rule6_size_no(inst: Instance, bounds: BoundSet,
                  order: Optional[VertexOrder] = None) -> Optional[Status]:
    """Too many vertices for any YES instance at these bounds. When an
    order is supplied, the rule's preconditions are validated against it."""
    if order is not None:
        if not is_regular(inst, order):
            raise PreconditionViolated("order is not regular")
        if cost(inst, order) > bounds.order_cost:
            raise PreconditionViolated("order cost exceeds the recorded bound")
        for itv in maximal_nonterminal_intervals(inst, order):
            if itv.length > bounds.interval_cap:
                raise PreconditionViolated("interval exceeds the length cap")
    if inst.n > bounds.size_cap:
        return Status.TRIVIAL_NO
    return None


# ----------------------------------------------------------------- pipeline


def _resolve_provider(provider: Provider) -> Callable[[Instance], object]:
    if provider == "heuristic":
        return heuristic_order
    if provider == "exact":
        def exact_provider(inst: Instance):
            outcome = exact_branch(inst)
            return order_from_solution(inst, outcome.witness)
        return exact_provider
    if callable(provider):
        return provider
    raise ValueError(f"unknown provider {provider!r}")


def _working_order(inst: Instance, provider_fn) -> VertexOrder:
    raw = provider_fn(inst)
    try:
        order = raw if isinstance(raw, VertexOrder) else VertexOrder(tuple(raw))
        if len(order) != inst.n:
            raise ValueError
    except (ValueError, TypeError) as exc:
        raise ProviderFailure("provider did not return a permutation of the vertices") from exc
    return regularize(inst, order).result


def kernelize(inst: Instance, provider: Provider = "heuristic") -> KernelResult:
    """Run the rules to a fixpoint.

    Loop: exhaust the trivial/deletion/forced-arc rules (recomputing and
    regularizing the working order before every forced-arc scan); then
    derive bounds from the realized order cost and try the replacement
    rule, restarting on any change; finally consult the size rule. The
    trace replays to the output exactly.
    """
    provider_fn = _resolve_provider(provider)
    trace: list[RuleApplication] = []
    current = inst

    def record(rule, after, params, touched, effect, *, status=None):
        trace.append(
            RuleApplication(
                rule=rule,
                n_before=current.n,
                n_after=after.n if after is not None else current.n,
                budget_before=current.budget,
                budget_after=after.budget if after is not None else current.budget,
                params=dict(params),
                touched=tuple(touched),
                effect=dict(effect),
            )
        )

    while True:
        order = None
        while True:
            if rule1_trivial_no(current):
                record(1, None, {}, (), {"status": "no"})
                return KernelResult(Status.TRIVIAL_NO, None, None, None, tuple(trace))
            if rule2_trivial_yes(current):
                record(2, None, {}, (), {"status": "yes"})
                return KernelResult(Status.TRIVIAL_YES, None, None, None, tuple(trace))
            r3 = rule3_delete_bypassed(current)
            if r3 is not None:
                nxt, deleted = r3
                survivors = [v for v in range(current.n) if v not in set(deleted)]
                record(
                    3, nxt, {}, deleted,
                    {"deleted": list(deleted),
                     "mapping": {str(v): i for i, v in enumerate(survivors)}},
                )
                current = nxt
                continue
            order = _working_order(current, provider_fn)
            hit = find_forced_arc(current, order)
            if hit is not None and current.budget >= 1:
                e, t, flow = hit
                nxt = Instance(
                    reverse_arc(current.tournament, e),
                    current.terminals,
                    current.budget - 1,
                )
                record(
                    4, nxt,
                    {"terminal": int(t), "flow": int(flow)},
                    (e,),
                    {"arc": [int(e[0]), int(e[1])]},
                )
                current = nxt
                continue
            break

        b = cost(current, order)
        bounds = BoundSet(b, current.budget)
        hit5 = _scan_rule5(current, order, bounds)
        if hit5 is not None:
            nxt, new_order, effect = hit5
            record(
                5, nxt,
                {"order_cost": b, "rich_threshold": bounds.rich_threshold,
                 "interval_cap": bounds.interval_cap},
                tuple(effect["deleted"]),
                effect,
            )
            current = nxt
            continue
        if rule6_size_no(current, bounds, order):
            record(
                6, None,
                {"order_cost": b, "size_cap": bounds.size_cap},
                (), {"status": "no"},
            )
            return KernelResult(Status.TRIVIAL_NO, None, order, bounds, tuple(trace))
        return KernelResult(Status.REDUCED, current, order, bounds, tuple(trace))


# ------------------------------------------------------------------- replay


def apply_record(inst: Instance, rec: RuleApplication) -> tuple[Optional[Status], Optional[Instance]]:
    """Re-apply one trace record to an instance."""
    if rec.rule in (1, 6):
        return Status.TRIVIAL_NO, None
    if rec.rule == 2:
        return Status.TRIVIAL_YES, None
    if rec.rule == 3:
        nxt, _ = _compact(inst, set(rec.effect["deleted"]))
        return None, nxt
    if rec.rule == 4:
        u, v = rec.effect["arc"]
        nxt = Instance(
            reverse_arc(inst.tournament, (u, v)), inst.terminals, inst.budget - 1
        )
        return None, nxt
    if rec.rule == 5:
        base, _ = _compact(inst, set(rec.effect["deleted"]))
        s = base.n
        total = s + rec.effect["inserted"]
        adj = np.zeros((total, total), dtype=bool)
        adj[:s, :s] = base.tournament.adj
        for a, b in rec.effect["new_arcs"]:
            adj[a, b] = True
        return None, Instance(Tournament(adj), base.terminals, inst.budget)
    raise ValueError(f"unknown rule id {rec.rule}")


def iter_replay(inst: Instance, trace) -> Iterator[tuple[RuleApplication, Instance, Optional[Instance], Optional[Status]]]:
    """Yield (record, before, after, status) along a trace."""
    current = inst
    for rec in trace:
        status, nxt = apply_record(current, rec)
        yield rec, current, nxt, status
        if status is not None:
            return
        current = nxt


def replay_trace(inst: Instance, trace) -> tuple[Status, Optional[Instance]]:
    """Replay a full trace; returns the terminal status (REDUCED when the
    trace ends without a trivial verdict) and the final instance."""
    current = inst
    for rec, _, nxt, status in iter_replay(inst, trace):
        if status is not None:
            return status, None
        current = nxt
    return Status.REDUCED, current
