"""Discrete vector fields on a single boundary matrix.

A vector ``(a, b)`` pairs row ``a`` (a face) with column ``b`` (a cell)
where ``M[a, b] = ±1``. Indices are 0-based in code; ``to_text`` renders
them 1-based as ``(a;b)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from .exceptions import FiltrationError, MalformedFieldError
from .intlinalg import IntMatrix

__all__ = [
    "VectorField",
    "FieldReport",
    "Admissibility",
    "check_vector_field",
    "relation_graph",
    "is_admissible",
    "source_order",
    "max_admissible_dvf",
    "filtered_max_dvf",
]


@dataclass(frozen=True)
class VectorField:
    vectors: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple((int(a), int(b)) for a, b in self.vectors))

    @classmethod
    def from_one_based(cls, pairs: Iterable[Tuple[int, int]]) -> "VectorField":
        return cls(tuple((a - 1, b - 1) for a, b in pairs))

    def one_based(self) -> List[Tuple[int, int]]:
        return [(a + 1, b + 1) for a, b in self.vectors]

    @property
    def sources(self) -> List[int]:
        return [a for a, _ in self.vectors]

    @property
    def targets(self) -> List[int]:
        return [b for _, b in self.vectors]

    def as_dict(self) -> Dict[int, int]:
        return dict(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.vectors + other.vectors)

    def to_text(self) -> str:
        return "{" + ", ".join(f"({a};{b})" for a, b in self.one_based()) + "}"


@dataclass
class FieldReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


class Admissibility(NamedTuple):
    admissible: bool
    cycle: Optional[List[int]]

    def __bool__(self) -> bool:
        return self.admissible


def check_vector_field(M: IntMatrix, V: VectorField) -> FieldReport:
    """Bounds, unit entries and pairwise distinct sources and targets."""
    report = FieldReport()
    seen_a: Set[int] = set()
    seen_b: Set[int] = set()
    for a, b in V:
        if not (0 <= a < M.rows and 0 <= b < M.cols):
            report.violations.append(f"vector ({a + 1};{b + 1}) out of bounds for a {M.rows}x{M.cols} matrix")
            continue
        if M[a, b] not in (1, -1):
            report.violations.append(f"entry M[{a + 1},{b + 1}] = {M[a, b]} is not ±1")
        if a in seen_a:
            report.violations.append(f"source {a + 1} used twice")
        if b in seen_b:
            report.violations.append(f"target {b + 1} used twice")
        seen_a.add(a)
        seen_b.add(b)
    return report


def relation_graph(M: IntMatrix, V: VectorField) -> Dict[int, List[int]]:
    """Edges ``a -> a'`` for each vector ``(a;b)`` and each other face ``a'`` of ``b``."""
    graph: Dict[int, List[int]] = {}
    for a, b in V:
        graph[a] = [r for r in sorted(M.column(b)) if r != a]
    return graph


def _find_cycle(graph: Dict[int, List[int]]) -> Optional[List[int]]:
    WHITE, GREY, BLACK = 0, 1, 2
    color: Dict[int, int] = {}
    for root in sorted(graph):
        if color.get(root, WHITE) != WHITE:
            continue
        stack = [(root, iter(graph.get(root, ())))]
        path = [root]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
                path.pop()
                continue
            c = color.get(nxt, WHITE)
            if c == GREY:
                return path[path.index(nxt):] + [nxt]
            if c == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(graph.get(nxt, ()))))
                path.append(nxt)
    return None


def is_admissible(M: IntMatrix, V: VectorField) -> Admissibility:
    """Loop test on the relation graph; returns a witness loop when inadmissible."""
    report = check_vector_field(M, V)
    if not report.ok:
        raise MalformedFieldError("; ".join(report.violations))
    cycle = _find_cycle(relation_graph(M, V))
    return Admissibility(cycle is None, cycle)


def source_order(M: IntMatrix, V: VectorField) -> Set[Tuple[int, int]]:
    """Pairs ``(a, a')`` of source rows with ``a > a'`` in the generated partial order."""
    graph = relation_graph(M, V)
    sources = set(V.sources)
    out: Set[Tuple[int, int]] = set()
    for a in sources:
        seen: Set[int] = set()
        stack = list(graph.get(a, ()))
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(graph.get(x, ()))
        out.update((a, x) for x in seen if x in sources and x != a)
    return out


def _reaches(graph: Dict[int, List[int]], starts: Sequence[int], goal: int) -> bool:
    seen: Set[int] = set()
    stack = list(starts)
    while stack:
        x = stack.pop()
        if x == goal:
            return True
        if x in seen:
            continue
        seen.add(x)
        nxt = graph.get(x)
        if nxt:
            stack.extend(nxt)
    return False


def max_admissible_dvf(M: IntMatrix) -> VectorField:
    """Greedy maximal admissible vector field in reading order.

    Rows are visited in increasing order; for each row the first free
    column with a ±1 entry whose other faces do not already reach the row
    is taken. Relations toward rows that are not (yet) sources are
    recorded immediately.
    """
    rows = M.row_dicts()
    cols = M.columns
    graph: Dict[int, List[int]] = {}
    has_in: Set[int] = set()
    used_cols: Set[int] = set()
    vectors: List[Tuple[int, int]] = []
    for a in range(M.rows):
        row = rows[a]
        for b in sorted(row):
            if b in used_cols or row[b] not in (1, -1):
                continue
            faces = [r for r in cols[b] if r != a]
            if a in has_in and _reaches(graph, faces, a):
                continue
            graph[a] = faces
            has_in.update(faces)
            used_cols.add(b)
            vectors.append((a, b))
            break
    return VectorField(tuple(vectors))


def filtered_max_dvf(
    M: IntMatrix,
    row_filts: Sequence[int],
    col_filts: Sequence[int],
    threads: int = 1,
) -> VectorField:
    """Concatenation of maximal admissible fields of the diagonal filtration blocks.

    Every vector pairs a row and a column of equal filtration index. Blocks
    are independent and may be processed by ``threads`` workers; the result
    is concatenated in increasing filtration order either way.
    """
    if len(row_filts) != M.rows or len(col_filts) != M.cols:
        raise FiltrationError("filtration indices must be given for every row and column")
    for (r, c), _ in M.entries():
        if row_filts[r] > col_filts[c]:
            raise FiltrationError(
                f"entry ({r + 1},{c + 1}) links row filtration {row_filts[r]} to column filtration {col_filts[c]}"
            )
    levels = sorted(set(row_filts) & set(col_filts))
    rows_by: Dict[int, List[int]] = {}
    cols_by: Dict[int, List[int]] = {}
    for r, f in enumerate(row_filts):
        rows_by.setdefault(f, []).append(r)
    for c, f in enumerate(col_filts):
        cols_by.setdefault(f, []).append(c)

    def block(level: int) -> List[Tuple[int, int]]:
        rs, cs = rows_by[level], cols_by[level]
        sub = M.submatrix(rs, cs)
        return [(rs[a], cs[b]) for a, b in max_admissible_dvf(sub)]

    if threads > 1 and len(levels) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, levels))
    else:
        parts = [block(level) for level in levels]
    return VectorField(tuple(v for part in parts for v in part))
