"""Generic state elimination for absorption probabilities.

Works over any field-like value type (exact rationals, rational functions):
eliminating a transient state v reroutes each u -> v -> w path as
p_uv * p_vw / (1 - p_vv) and accumulates v's absorption mass into its
predecessors.  Back-substitution afterwards recovers per-state values.
"""

from __future__ import annotations

import time
from typing import Callable, Iterable, Mapping

from ..errors import CellTimeout, StructuralZeroDenominator


def topological_order(nodes: Iterable[int], succs: Mapping[int, Iterable[int]]):
    """Kahn topological order of the induced subgraph, or None if cyclic."""
    nodes = set(nodes)
    indeg = {u: 0 for u in nodes}
    for u in nodes:
        for v in succs.get(u, ()):
            if v in nodes and v != u:
                indeg[v] += 1
            elif v == u:
                return None  # self-loop counts as a cycle here
    ready = sorted(u for u in nodes if indeg[u] == 0)
    order = []
    from heapq import heapify, heappop, heappush

    heapify(ready)
    while ready:
        u = heappop(ready)
        order.append(u)
        for v in succs.get(u, ()):
            if v in nodes and v != u:
                indeg[v] -= 1
                if indeg[v] == 0:
                    heappush(ready, v)
    if len(order) != len(nodes):
        return None
    return order


def eliminate_absorption(
    rows: dict[int, dict[int, object]],
    mass: dict[int, object],
    order: list[int],
    one,
    *,
    deadline: float | None = None,
) -> dict[int, tuple[dict[int, object], object, object]]:
    """Eliminate `order` states in place; return back-substitution snapshots.

    `rows[u]` maps transient successors to transition values, `mass[u]` is
    u's direct mass into the absorbing target.  The snapshot for an
    eliminated state v holds (its row at elimination time, its direct mass,
    the 1/(1-selfloop) factor) so per-state values can be recovered in
    reverse order.
    """
    preds: dict[int, set[int]] = {u: set() for u in rows}
    for u, row in rows.items():
        for v in row:
            if v in preds:
                preds[v].add(u)
    snapshots: dict[int, tuple[dict[int, object], object, object]] = {}

    for v in order:
        if deadline is not None and time.monotonic() > deadline:
            raise CellTimeout("state elimination exceeded its time budget")
        row = rows.pop(v)
        self_p = row.pop(v, None)
        preds[v].discard(v)
        if self_p is None:
            factor = one
        else:
            denom = one - self_p
            if _is_zero(denom):
                raise StructuralZeroDenominator(
                    f"state {v} has self-loop probability identically 1"
                )
            factor = one / denom
        v_mass = mass.pop(v) * factor
        v_row = {w: p * factor for w, p in row.items()}
        snapshots[v] = (v_row, v_mass, factor)
        for w in row:
            preds[w].discard(v)
        for u in preds.pop(v):
            row_u = rows[u]
            p_uv = row_u.pop(v)
            mass[u] = mass[u] + p_uv * v_mass
            for w, p_vw in v_row.items():
                if w in row_u:
                    row_u[w] = row_u[w] + p_uv * p_vw
                else:
                    row_u[w] = p_uv * p_vw
                    preds[w].add(u)
    return snapshots


def back_substitute(snapshots, values: dict[int, object], order: list[int]) -> None:
    """Fill `values` for eliminated states, processing `order` in reverse."""
    for v in reversed(order):
        v_row, v_mass, _ = snapshots[v]
        x = v_mass
        for w, p in v_row.items():
            x = x + p * values[w]
        values[v] = x


def min_degree_order(rows: dict[int, dict[int, object]], skip: set[int]) -> list[int]:
    """Eliminate low-connectivity states first; the main lever against
    fill-in blowup during symbolic elimination."""
    preds: dict[int, set[int]] = {u: set() for u in rows}
    for u, row in rows.items():
        for v in row:
            if v in preds and v != u:
                preds[v].add(u)
    remaining = {u for u in rows if u not in skip}
    succs = {u: set(w for w in rows[u] if w != u) for u in rows}
    order = []
    import heapq

    heap = [(len(preds[u]) * len(succs[u]), u) for u in remaining]
    heapq.heapify(heap)
    done: set[int] = set()
    while heap:
        cost, u = heapq.heappop(heap)
        if u in done or u not in remaining:
            continue
        current = len([p for p in preds[u] if p not in done]) * len(
            [s for s in succs[u] if s not in done]
        )
        if current > cost:
            heapq.heappush(heap, (current, u))
            continue
        done.add(u)
        order.append(u)
        # connect neighbours (approximation of fill-in; exactness not needed)
        live_preds = [p for p in preds[u] if p not in done and p in rows]
        live_succs = [s for s in succs[u] if s not in done and s in rows]
        for p in live_preds:
            succs[p].discard(u)
            succs[p].update(live_succs)
            heapq.heappush(heap, (len(preds[p]) * len(succs[p]), p))
        for s in live_succs:
            preds[s].discard(u)
            preds[s].update(live_preds)
    return order


def _is_zero(value) -> bool:
    return value == 0
