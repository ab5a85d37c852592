"""Regular orders and the regularization local search.

An order is regular when, for every contiguous terminal-free interval
[l, r] (all sub-runs, not only maximal ones), the left endpoint beats at
least ceil((r-l)/2) of the interval and the right endpoint loses to at
least ceil((r-l)/2) of it. Regularization rearranges vertices inside
terminal-free runs only, so it keeps every terminal at its rank, keeps
the cost, and never increases the backward-arc count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import Instance, VertexOrder, backward_count, _check_order


@dataclass(frozen=True)
class RegularizationReport:
    result: VertexOrder
    moves: int
    backward_before: int
    backward_after: int


def is_regular(inst: Instance, order: VertexOrder) -> bool:
    """Check the endpoint conditions on every non-terminal interval.

    Kept independent of the kernel backends so it can validate their
    output: plain cumulative-sum arithmetic per terminal-free run.
    """
    _check_order(inst, order)
    seq = order.as_array()
    mask = inst.terminal_mask[seq]
    adj = inst.tournament.adj
    n = inst.n
    start = 0
    while start < n:
        if mask[start]:
            start += 1
            continue
        end = start
        while end + 1 < n and not mask[end + 1]:
            end += 1
        run = seq[start:end + 1]
        m = run.size
        if m >= 2:
            sub = adj[np.ix_(run, run)].astype(np.int64)
            out_cum = np.cumsum(sub, axis=1)   # out_cum[l, r]: out-nbrs of run[l] in run[l..r]
            in_cum = np.cumsum(sub, axis=0)    # in_cum[l, r]: in-nbrs of run[r] in run[l..r]
            for l in range(m):
                base = out_cum[l, l - 1] if l > 0 else 0
                for r in range(l + 1, m):
                    width = r - l
                    if 2 * (out_cum[l, r] - base) < width:
                        return False
                    in_r = in_cum[r, r] - (in_cum[l - 1, r] if l > 0 else 0)
                    if 2 * in_r < width:
                        return False
        start = end + 1
    return True


def regularize(inst: Instance, order: VertexOrder) -> RegularizationReport:
    """Local search to a regular order.

    While some non-terminal interval [l, r] has its left endpoint losing
    to the interval majority, the endpoint moves just past r; symmetric
    move for the right endpoint. Each move strictly decreases the
    backward-arc count, which bounds the number of moves. Cost and
    terminal ranks are preserved exactly.
    """
    _check_order(inst, order)
    before = backward_count(inst, order)
    seq, moves = K.regularize_order(
        inst.tournament.adj, inst.terminal_mask, order.as_array()
    )
    result = VertexOrder(tuple(int(v) for v in seq))
    after = backward_count(inst, result)
    return RegularizationReport(result, int(moves), before, after)
