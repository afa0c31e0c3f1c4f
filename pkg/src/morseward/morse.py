"""Algebraic Morse reduction of a chain complex along discrete vector fields.

A vector field on ``d_n`` splits the (n-1)-cells into sources and critical
cells and the n-cells into targets and critical cells. The square block
``d21`` (sources x targets) is invertible over the integers once the field
is admissible, and eliminating it yields a smaller complex with the same
homology. Everything outside degrees ``n-1`` and ``n`` is untouched.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .chain import (
    FilteredComplex,
    Reduction,
    compose_reductions,
    identity_reduction,
    permutation_reduction,
    sort_by_filtration,
)
from .dvf import VectorField, check_vector_field, filtered_max_dvf, max_admissible_dvf, relation_graph
from .exceptions import InadmissibleFieldError, MalformedFieldError
from .intlinalg import IntMatrix

__all__ = [
    "CellPartition",
    "partition_cells",
    "d21_block",
    "invert_d21",
    "reduce_one_degree",
    "reduce_complex",
    "reduce_filtered_complex",
]

Vec = Dict[int, int]


def _add_into(target: Vec, source: Vec, k: int) -> None:
    for key, v in source.items():
        nv = target.get(key, 0) + k * v
        if nv:
            target[key] = nv
        else:
            target.pop(key, None)


@dataclass(frozen=True)
class CellPartition:
    """Positions of sources, targets and critical cells for one degree pair."""

    sources: Tuple[int, ...]
    targets: Tuple[int, ...]
    critical_low: Tuple[int, ...]
    critical_high: Tuple[int, ...]


def partition_cells(M: IntMatrix, V: VectorField) -> CellPartition:
    src = set(V.sources)
    tgt = set(V.targets)
    return CellPartition(
        tuple(V.sources),
        tuple(V.targets),
        tuple(r for r in range(M.rows) if r not in src),
        tuple(c for c in range(M.cols) if c not in tgt),
    )


def _validated(M: IntMatrix, V: VectorField) -> None:
    report = check_vector_field(M, V)
    if not report.ok:
        raise MalformedFieldError("; ".join(report.violations))


def _topological_sources(M: IntMatrix, V: VectorField) -> List[int]:
    """Sources ordered so that every source comes after the sources it relates to."""
    graph = relation_graph(M, V)
    order: List[int] = []
    state: Dict[int, int] = {}
    for root in V.sources:
        if root in state:
            continue
        state[root] = 1
        stack = [(root, iter(graph[root]))]
        path = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                order.append(node)
                stack.pop()
                path.pop()
                continue
            if nxt not in graph:
                continue
            s = state.get(nxt)
            if s == 1:
                cycle = path[path.index(nxt):] + [nxt]
                shown = " > ".join(str(a + 1) for a in cycle)
                raise InadmissibleFieldError(f"vector field is not admissible: loop {shown}", cycle)
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(graph[nxt])))
                path.append(nxt)
    return order


def _inverse_columns(M: IntMatrix, V: VectorField, order: Sequence[int]) -> Dict[int, Vec]:
    """``d21^{-1}(σ)`` for every source σ as a vector over target columns."""
    pair = V.as_dict()
    inv: Dict[int, Vec] = {}
    for s in order:
        t = pair[s]
        col = M.column(t)
        eps = col[s]
        out: Vec = {t: 1}
        for r, v in col.items():
            if r != s and r in pair:
                _add_into(out, inv[r], -v)
        if eps != 1:
            out = {k: -x for k, x in out.items()}
        inv[s] = out
    return inv


def d21_block(M: IntMatrix, V: VectorField) -> IntMatrix:
    """The square block of ``M`` on sources x targets, both in vector order."""
    return M.submatrix(V.sources, V.targets)


def invert_d21(M: IntMatrix, V: VectorField) -> IntMatrix:
    """Exact integer inverse of :func:`d21_block` for an admissible field.

    Row ``k`` of the result corresponds to the k-th target and column
    ``k`` to the k-th source. Raises :class:`InadmissibleFieldError` when
    the field has a loop.
    """
    _validated(M, V)
    order = _topological_sources(M, V)
    inv = _inverse_columns(M, V, order)
    tpos = {t: k for k, t in enumerate(V.targets)}
    cols = [{tpos[t]: v for t, v in inv[s].items()} for s in V.sources]
    return IntMatrix(len(V), len(V), cols)


def reduce_one_degree(C: FilteredComplex, n: int, V: VectorField) -> Reduction:
    """Reduction of ``C`` along an admissible field on ``d_n``.

    The reduced complex keeps the critical cells (ids, filtration indices
    and labels unchanged). ``d'_n = d33 - d31 d21^{-1} d23``. Maps are built
    lazily; ``apply_f``/``apply_g`` work without materializing them.
    """
    M = C.boundary(n)
    _validated(M, V)
    if n < 1 or n > C.max_dim:
        return identity_reduction(C)
    order = _topological_sources(M, V)
    rank = {s: k for k, s in enumerate(order)}
    pair = V.as_dict()
    part = partition_cells(M, V)
    crit_low = {r: k for k, r in enumerate(part.critical_low)}
    crit_high = {c: k for k, c in enumerate(part.critical_high)}
    source_set = set(pair)

    # phi(σ) = d31 d21^{-1}(σ), in new low positions
    phi: Dict[int, Vec] = {}
    for s in order:
        t = pair[s]
        col = M.column(t)
        eps = col[s]
        out: Vec = {}
        for r, v in col.items():
            if r == s:
                continue
            if r in source_set:
                _add_into(out, phi[r], -v)
            else:
                nr = crit_low[r]
                nv = out.get(nr, 0) + v
                if nv:
                    out[nr] = nv
                else:
                    out.pop(nr, None)
        phi[s] = out if eps == 1 else {k: -x for k, x in out.items()}

    new_cols: List[Vec] = []
    for c in part.critical_high:
        out = {}
        for r, v in M.column(c).items():
            if r in source_set:
                _add_into(out, phi[r], -v)
            else:
                nr = crit_low[r]
                nv = out.get(nr, 0) + v
                if nv:
                    out[nr] = nv
                else:
                    out.pop(nr, None)
        new_cols.append(out)

    bases = [list(C.cells(k)) for k in range(C.max_dim + 1)]
    bases[n - 1] = [C.cells(n - 1)[r] for r in part.critical_low]
    bases[n] = [C.cells(n)[c] for c in part.critical_high]
    bounds = dict(C.boundaries)
    bounds[n] = IntMatrix(len(part.critical_low), len(part.critical_high), new_cols)
    if n + 1 <= C.max_dim:
        bounds[n + 1] = C.boundary(n + 1).submatrix(list(part.critical_high), list(range(C.size(n + 1))))
    if n - 1 >= 1:
        bounds[n - 1] = C.boundary(n - 1).submatrix(list(range(C.size(n - 2))), list(part.critical_low))
    D = FilteredComplex(bases, bounds, steps=C.steps)

    def solve_targets(y: Vec) -> Vec:
        """``d21^{-1} y`` for ``y`` supported on sources, by flowing down the order."""
        y = {k: v for k, v in y.items() if v}
        heap = [-rank[s] for s in y]
        heapq.heapify(heap)
        out: Vec = {}
        while heap:
            s = order[-heapq.heappop(heap)]
            a = y.pop(s, 0)
            if not a:
                continue
            t = pair[s]
            col = M.column(t)
            coef = a * col[s]
            out[t] = coef
            for r, v in col.items():
                if r != s and r in source_set:
                    prev = y.get(r, 0)
                    nv = prev - coef * v
                    if nv:
                        if not prev:
                            heapq.heappush(heap, -rank[r])
                        y[r] = nv
                    else:
                        y.pop(r, None)
        return out

    low_cells = part.critical_low
    high_cells = part.critical_high

    def f_action(k: int, vec: Vec) -> Vec:
        if k == n - 1:
            out: Vec = {}
            for r, v in vec.items():
                if r in source_set:
                    _add_into(out, phi[r], -v)
                else:
                    nv = out.get(crit_low[r], 0) + v
                    if nv:
                        out[crit_low[r]] = nv
                    else:
                        out.pop(crit_low[r], None)
            return out
        if k == n:
            return {crit_high[c]: v for c, v in vec.items() if c in crit_high and v}
        return {p: v for p, v in vec.items() if v}

    def g_action(k: int, vec: Vec) -> Vec:
        if k == n:
            out = {high_cells[p]: v for p, v in vec.items() if v}
            y: Vec = {}
            for p, v in vec.items():
                for r, w in M.column(high_cells[p]).items():
                    if r in source_set:
                        y[r] = y.get(r, 0) + v * w
            _add_into(out, solve_targets(y), -1)
            return out
        if k == n - 1:
            return {low_cells[p]: v for p, v in vec.items() if v}
        return {p: v for p, v in vec.items() if v}

    top = C.max_dim

    def f_maps():
        maps = {}
        for k in range(top + 1):
            if k in (n - 1, n):
                cols = [f_action(k, {p: 1}) for p in range(C.size(k))]
                maps[k] = IntMatrix(D.size(k), C.size(k), cols)
            else:
                maps[k] = IntMatrix.identity(C.size(k))
        return maps

    def g_maps():
        maps = {}
        for k in range(top + 1):
            if k in (n - 1, n):
                cols = [g_action(k, {p: 1}) for p in range(D.size(k))]
                maps[k] = IntMatrix(C.size(k), D.size(k), cols)
            else:
                maps[k] = IntMatrix.identity(C.size(k))
        return maps

    inv_cache: Dict[str, Dict[int, Vec]] = {}

    def inverse() -> Dict[int, Vec]:
        if "inv" not in inv_cache:
            inv_cache["inv"] = _inverse_columns(M, V, order)
        return inv_cache["inv"]

    def h_maps():
        maps = {k: IntMatrix.zeros(C.size(k + 1), C.size(k)) for k in range(top + 1)}
        inv = inverse()
        cols = [dict(inv[r]) if r in source_set else {} for r in range(C.size(n - 1))]
        maps[n - 1] = IntMatrix(C.size(n), C.size(n - 1), cols)
        return maps

    low, high = C.cells(n - 1), C.cells(n)
    if all(low[s].filt == high[t].filt for s, t in V):
        order_h = 0
    else:
        inv = inverse()
        order_h = max(
            (high[t].filt - low[s].filt for s, col in inv.items() for t in col),
            default=0,
        )
        order_h = max(order_h, 0)

    stats = {
        "degree": n,
        "vectors": len(V),
        "field": V,
        "order": order_h,
    }
    return Reduction(C, D, f_maps, g_maps, h_maps, order_h, f_action=f_action, g_action=g_action, stats=stats)


def _summary(rho: Reduction, fields: Dict[int, VectorField], C: FilteredComplex) -> Reduction:
    rho.stats = {
        "vectors": {n: len(V) for n, V in fields.items()},
        "fields": fields,
        "input_counts": C.counts(),
        "critical_counts": rho.dst.counts(),
        "input_cells": C.num_cells,
        "critical_cells": rho.dst.num_cells,
    }
    return rho


def reduce_complex(C: FilteredComplex, fields: Optional[Dict[int, VectorField]] = None) -> Reduction:
    """Reduce every degree in turn with a greedy maximal field, ignoring the filtration.

    ``fields`` may supply the field to use for some degrees; its indices
    refer to the boundary matrix as it stands when that degree is reached.
    """
    rho = identity_reduction(C)
    used: Dict[int, VectorField] = {}
    for n in range(1, C.max_dim + 1):
        M = rho.dst.boundary(n)
        V = fields[n] if fields and n in fields else max_admissible_dvf(M)
        used[n] = V
        if len(V):
            rho = compose_reductions(rho, reduce_one_degree(rho.dst, n, V))
    return _summary(rho, used, C)


def reduce_filtered_complex(C: FilteredComplex, threads: int = 1) -> Reduction:
    """Filtration-preserving reduction with homotopy order 0.

    Bases are first sorted by filtration index; then each degree is reduced
    with the concatenation of per-step maximal fields, so every vector pairs
    cells that appear at the same step.
    """
    D, perms = sort_by_filtration(C)
    rho = identity_reduction(C) if D is C else permutation_reduction(C, D, perms)
    used: Dict[int, VectorField] = {}
    for n in range(1, D.max_dim + 1):
        cur = rho.dst
        V = filtered_max_dvf(cur.boundary(n), cur.filts(n - 1), cur.filts(n), threads=threads)
        used[n] = V
        if len(V):
            rho = compose_reductions(rho, reduce_one_degree(cur, n, V))
    return _summary(rho, used, C)
