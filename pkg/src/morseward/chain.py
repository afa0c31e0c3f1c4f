"""Filtered free chain complexes, chains and reductions between complexes."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from .exceptions import ComplexFormatError, ComplexMismatchError, DimensionMismatchError, FiltrationError
from .intlinalg import IntMatrix

__all__ = [
    "Cell",
    "FilteredComplex",
    "ChainVector",
    "Reduction",
    "Equivalence",
    "ComplexReport",
    "ReductionReport",
    "validate_complex",
    "apply_boundary",
    "validate_reduction",
    "compose_reductions",
    "identity_reduction",
    "subcomplex_at",
    "sort_by_filtration",
    "dumps_complex",
    "loads_complex",
]


@dataclass(frozen=True)
class Cell:
    """A basis cell. ``filt`` is the first filtration step containing it."""

    id: Hashable
    dim: int
    filt: int = 1
    label: Any = None


class FilteredComplex:
    """Finite free chain complex with a distinguished, filtered basis.

    Parameters
    ----------
    bases : sequence of sequence of Cell
        ``bases[n]`` lists the n-cells in matrix order.
    boundaries : mapping int -> IntMatrix
        ``boundaries[n]`` is ``d_n`` with shape ``(len(bases[n-1]), len(bases[n]))``.
        Missing degrees are zero maps.
    steps : int, optional
        Number of filtration steps ``m``; defaults to the largest cell index.
    """

    def __init__(
        self,
        bases: Sequence[Sequence[Cell]],
        boundaries: Optional[Mapping[int, IntMatrix]] = None,
        steps: Optional[int] = None,
    ):
        self._bases: Tuple[Tuple[Cell, ...], ...] = tuple(tuple(b) for b in bases)
        while self._bases and not self._bases[-1]:
            self._bases = self._bases[:-1]
        boundaries = dict(boundaries or {})
        self._boundaries: Dict[int, IntMatrix] = {}
        for n in range(1, len(self._bases)):
            shape = (len(self._bases[n - 1]), len(self._bases[n]))
            d = boundaries.pop(n, None)
            if d is None:
                d = IntMatrix.zeros(*shape)
            elif d.shape != shape:
                raise DimensionMismatchError(f"d_{n} has shape {d.shape}, expected {shape}")
            self._boundaries[n] = d
        for n, d in boundaries.items():
            if not d.is_zero() and d.cols:
                raise DimensionMismatchError(f"boundary given for degree {n} outside the complex")
        max_filt = max((c.filt for b in self._bases for c in b), default=0)
        self.steps = max_filt if steps is None else steps
        self._index: Dict[int, Dict[Hashable, int]] = {}
        self._lock = threading.Lock()
        self._cache: Dict[Any, Any] = {}

    # -- structure ---------------------------------------------------------

    @property
    def max_dim(self) -> int:
        return len(self._bases) - 1

    @property
    def bases(self) -> Tuple[Tuple[Cell, ...], ...]:
        return self._bases

    def cells(self, n: int) -> Tuple[Cell, ...]:
        if 0 <= n < len(self._bases):
            return self._bases[n]
        return ()

    def size(self, n: int) -> int:
        return len(self.cells(n))

    def counts(self) -> List[int]:
        return [len(b) for b in self._bases]

    @property
    def num_cells(self) -> int:
        return sum(self.counts())

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in enumerate(self.counts()))

    def boundary(self, n: int) -> IntMatrix:
        """``d_n`` from degree n to degree n-1; empty or zero outside the complex."""
        d = self._boundaries.get(n)
        if d is not None:
            return d
        return IntMatrix.zeros(self.size(n - 1), self.size(n))

    @property
    def boundaries(self) -> Dict[int, IntMatrix]:
        return dict(self._boundaries)

    def filts(self, n: int) -> List[int]:
        return [c.filt for c in self.cells(n)]

    def index(self, n: int) -> Dict[Hashable, int]:
        """Map cell id -> position within degree n."""
        idx = self._index.get(n)
        if idx is None:
            idx = {c.id: i for i, c in enumerate(self.cells(n))}
            self._index[n] = idx
        return idx

    def cell(self, cell_id: Hashable) -> Cell:
        for n in range(len(self._bases)):
            pos = self.index(n).get(cell_id)
            if pos is not None:
                return self._bases[n][pos]
        raise KeyError(cell_id)

    def positions_upto(self, n: int, i: int) -> List[int]:
        """Positions of n-cells with filtration index at most ``i``."""
        return [p for p, c in enumerate(self.cells(n)) if c.filt <= i]

    def cached(self, key, compute: Callable[[], Any]):
        """Compute-once cache attached to this (immutable) complex."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)

    # -- chains ------------------------------------------------------------

    def chain(self, n: int, coeffs: Mapping[Hashable, int]) -> "ChainVector":
        idx = self.index(n)
        for k in coeffs:
            if k not in idx:
                raise KeyError(f"cell {k!r} is not an {n}-cell of this complex")
        return ChainVector(n, {k: v for k, v in coeffs.items() if v})

    def chain_from_positions(self, n: int, vec: Mapping[int, int]) -> "ChainVector":
        cells = self.cells(n)
        return ChainVector(n, {cells[p].id: v for p, v in vec.items() if v})

    def positions_of(self, x: "ChainVector") -> Dict[int, int]:
        idx = self.index(x.degree)
        return {idx[k]: v for k, v in x.coeffs.items() if v}

    # -- comparison --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return (
            self.steps == other.steps
            and self._bases == other._bases
            and self._boundaries == other._boundaries
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"FilteredComplex(counts={self.counts()}, steps={self.steps})"


@dataclass(frozen=True)
class ChainVector:
    """Integer combination of cells of one degree, keyed by cell id."""

    degree: int
    coeffs: Dict[Hashable, int] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())

    def support(self) -> List[Hashable]:
        return [k for k, v in self.coeffs.items() if v]

    def __add__(self, other: "ChainVector") -> "ChainVector":
        if other.degree != self.degree:
            raise DimensionMismatchError("cannot add chains of different degrees")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return ChainVector(self.degree, out)

    def __neg__(self) -> "ChainVector":
        return ChainVector(self.degree, {k: -v for k, v in self.coeffs.items()})

    def scale(self, k: int) -> "ChainVector":
        return ChainVector(self.degree, {c: k * v for c, v in self.coeffs.items() if k * v})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainVector):
            return NotImplemented
        a = {k: v for k, v in self.coeffs.items() if v}
        b = {k: v for k, v in other.coeffs.items() if v}
        return self.degree == other.degree and a == b

    __hash__ = None  # type: ignore[assignment]


def apply_boundary(C: FilteredComplex, x: ChainVector) -> ChainVector:
    """Boundary of a chain; a 0-chain maps to the empty chain of degree -1."""
    if x.degree <= 0:
        return ChainVector(x.degree - 1, {})
    out = C.boundary(x.degree).apply(C.positions_of(x))
    return C.chain_from_positions(x.degree - 1, out)


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass
class ComplexReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_complex(C: FilteredComplex) -> ComplexReport:
    """Check d∘d = 0, filtration monotonicity and basis consistency."""
    report = ComplexReport()
    seen: Dict[Hashable, int] = {}
    for n, cells in enumerate(C.bases):
        for c in cells:
            if c.dim != n:
                report.violations.append(f"cell {c.id!r} listed in degree {n} has dim {c.dim}")
            if c.id in seen:
                report.violations.append(f"cell id {c.id!r} appears twice")
            seen[c.id] = n
            if not 1 <= c.filt <= max(C.steps, 1):
                report.violations.append(f"cell {c.id!r} has filtration index {c.filt} outside [1, {C.steps}]")
    for n in range(1, C.max_dim + 1):
        d = C.boundary(n)
        rows, cols = C.cells(n - 1), C.cells(n)
        for (r, j), _ in d.entries():
            if rows[r].filt > cols[j].filt:
                report.violations.append(
                    f"d_{n}: face {rows[r].id!r} (filt {rows[r].filt}) of {cols[j].id!r} (filt {cols[j].filt}) breaks the filtration"
                )
    for n in range(2, C.max_dim + 1):
        prod = C.boundary(n - 1) @ C.boundary(n)
        for j, col in enumerate(prod.columns):
            if col:
                report.violations.append(
                    f"d_{n - 1} d_{n} != 0 at column {j} (cell {C.cells(n)[j].id!r})"
                )
    return report


# ---------------------------------------------------------------------------
# Reductions

MapSpec = Union[Mapping[int, IntMatrix], Callable[[], Mapping[int, IntMatrix]]]
Action = Callable[[int, Dict[int, int]], Dict[int, int]]


class Reduction:
    """A reduction ``src ⇒⇒ dst`` given by ``(f, g, h)``.

    ``f[n]`` maps src degree n to dst degree n, ``g[n]`` the other way and
    ``h[n]`` maps src degree n to src degree n+1. Each of ``f, g, h`` may be
    given as a callable producing the per-degree dict; it is then evaluated
    on first access. ``f_action``/``g_action`` optionally apply the maps to
    a single position vector without building matrices.
    """

    def __init__(
        self,
        src: FilteredComplex,
        dst: FilteredComplex,
        f: MapSpec,
        g: MapSpec,
        h: MapSpec,
        homotopy_order: int = 0,
        *,
        f_action: Optional[Action] = None,
        g_action: Optional[Action] = None,
        stats: Optional[dict] = None,
    ):
        self.src = src
        self.dst = dst
        self.homotopy_order = homotopy_order
        self._specs = {"f": f, "g": g, "h": h}
        self._maps: Dict[str, Dict[int, IntMatrix]] = {}
        self._lock = threading.Lock()
        self._f_action = f_action
        self._g_action = g_action
        self.stats = stats or {}

    def _resolve(self, name: str) -> Dict[int, IntMatrix]:
        with self._lock:
            got = self._maps.get(name)
            if got is None:
                spec = self._specs[name]
                got = dict(spec() if callable(spec) else spec)
                self._maps[name] = got
            return got

    @property
    def f(self) -> Dict[int, IntMatrix]:
        return self._resolve("f")

    @property
    def g(self) -> Dict[int, IntMatrix]:
        return self._resolve("g")

    @property
    def h(self) -> Dict[int, IntMatrix]:
        return self._resolve("h")

    @property
    def top_degree(self) -> int:
        return max(self.src.max_dim, self.dst.max_dim)

    def f_at(self, n: int) -> IntMatrix:
        m = self.f.get(n)
        return m if m is not None else IntMatrix.zeros(self.dst.size(n), self.src.size(n))

    def g_at(self, n: int) -> IntMatrix:
        m = self.g.get(n)
        return m if m is not None else IntMatrix.zeros(self.src.size(n), self.dst.size(n))

    def h_at(self, n: int) -> IntMatrix:
        m = self.h.get(n)
        return m if m is not None else IntMatrix.zeros(self.src.size(n + 1), self.src.size(n))

    def apply_f(self, n: int, vec: Dict[int, int]) -> Dict[int, int]:
        if self._f_action is not None and "f" not in self._maps:
            return self._f_action(n, vec)
        return self.f_at(n).apply(vec)

    def apply_g(self, n: int, vec: Dict[int, int]) -> Dict[int, int]:
        if self._g_action is not None and "g" not in self._maps:
            return self._g_action(n, vec)
        return self.g_at(n).apply(vec)

    def map_chain_back(self, x: ChainVector) -> ChainVector:
        """``g`` applied to a chain of ``dst``, as a chain of ``src``."""
        return self.src.chain_from_positions(x.degree, self.apply_g(x.degree, self.dst.positions_of(x)))

    def map_chain_forward(self, x: ChainVector) -> ChainVector:
        return self.dst.chain_from_positions(x.degree, self.apply_f(x.degree, self.src.positions_of(x)))

    def __repr__(self) -> str:
        return f"Reduction({self.src.counts()} => {self.dst.counts()}, order={self.homotopy_order})"


@dataclass
class ReductionReport:
    violations: List[str] = field(default_factory=list)
    measured_order: int = 0
    declared_order: int = 0
    f_filtered: bool = True
    g_filtered: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _max_entry(M: IntMatrix) -> Optional[Tuple[Tuple[int, int], int]]:
    best = None
    for pos, v in M.entries():
        if best is None or abs(v) > abs(best[1]):
            best = (pos, v)
    return best


def _filtration_shift(M: IntMatrix, rows: Sequence[Cell], cols: Sequence[Cell]) -> Optional[int]:
    shift = None
    for (r, c), _ in M.entries():
        s = rows[r].filt - cols[c].filt
        if shift is None or s > shift:
            shift = s
    return shift


def validate_reduction(rho: Reduction) -> ReductionReport:
    """Check the five reduction identities and the chain-map property.

    Every failing identity is reported with the location of its largest
    discrepancy. The homotopy order of ``h`` is measured from the
    filtration indices and compared with the declared one.
    """
    C, D = rho.src, rho.dst
    report = ReductionReport(declared_order=rho.homotopy_order)
    top = rho.top_degree

    def check(name: str, n: int, lhs: IntMatrix, rhs: IntMatrix) -> None:
        if lhs.shape != rhs.shape:
            report.violations.append(f"{name} in degree {n}: shape {lhs.shape} vs {rhs.shape}")
            return
        diff = lhs - rhs
        worst = _max_entry(diff)
        if worst is not None:
            (r, c), v = worst
            report.violations.append(f"{name} fails in degree {n}: max |diff| = {abs(v)} at ({r}, {c})")

    for n in range(0, top + 1):
        f, g, h = rho.f_at(n), rho.g_at(n), rho.h_at(n)
        for label, M, shape in (
            ("f", f, (D.size(n), C.size(n))),
            ("g", g, (C.size(n), D.size(n))),
            ("h", h, (C.size(n + 1), C.size(n))),
        ):
            if M.shape != shape:
                report.violations.append(f"{label}_{n} has shape {M.shape}, expected {shape}")
        if report.violations:
            continue
        check("(1) f g = id", n, f @ g, IntMatrix.identity(D.size(n)))
        lhs = g @ f + C.boundary(n + 1) @ h
        if n >= 1:
            lhs = lhs + rho.h_at(n - 1) @ C.boundary(n)
        check("(2) g f + d h + h d = id", n, lhs, IntMatrix.identity(C.size(n)))
        check("(3) f h = 0", n, rho.f_at(n + 1) @ h, IntMatrix.zeros(D.size(n + 1), C.size(n)))
        check("(4) h g = 0", n, h @ g, IntMatrix.zeros(C.size(n + 1), D.size(n)))
        check("(5) h h = 0", n, rho.h_at(n + 1) @ h, IntMatrix.zeros(C.size(n + 2), C.size(n)))
        if n >= 1:
            check("f is a chain map", n, D.boundary(n) @ f, rho.f_at(n - 1) @ C.boundary(n))
            check("g is a chain map", n, C.boundary(n) @ g, rho.g_at(n - 1) @ D.boundary(n))
        shift = _filtration_shift(h, C.cells(n + 1), C.cells(n))
        if shift is not None and shift > report.measured_order:
            report.measured_order = shift
        fs = _filtration_shift(f, D.cells(n), C.cells(n))
        if fs is not None and fs > 0:
            report.f_filtered = False
        gs = _filtration_shift(g, C.cells(n), D.cells(n))
        if gs is not None and gs > 0:
            report.g_filtered = False
    if report.measured_order > rho.homotopy_order:
        report.violations.append(
            f"homotopy order {report.measured_order} exceeds declared order {rho.homotopy_order}"
        )
    return report


def identity_reduction(C: FilteredComplex) -> Reduction:
    top = C.max_dim
    ident = {n: IntMatrix.identity(C.size(n)) for n in range(top + 1)}
    zero = {n: IntMatrix.zeros(C.size(n + 1), C.size(n)) for n in range(top + 1)}
    return Reduction(
        C,
        C,
        ident,
        ident,
        zero,
        0,
        f_action=lambda n, v: dict(v),
        g_action=lambda n, v: dict(v),
    )


def compose_reductions(rho1: Reduction, rho2: Reduction) -> Reduction:
    """Composite ``C ⇒⇒ E`` of ``rho1: C ⇒⇒ D`` and ``rho2: D ⇒⇒ E``.

    ``f = f2 f1``, ``g = g1 g2`` and ``h = h1 + g1 h2 f1``; matrices are
    only multiplied out when first requested.
    """
    if rho1.dst is not rho2.src and rho1.dst != rho2.src:
        raise ComplexMismatchError("target of the first reduction is not the source of the second")
    top = max(rho1.top_degree, rho2.top_degree)

    def f():
        return {n: rho2.f_at(n) @ rho1.f_at(n) for n in range(top + 1)}

    def g():
        return {n: rho1.g_at(n) @ rho2.g_at(n) for n in range(top + 1)}

    def h():
        return {
            n: rho1.h_at(n) + rho1.g_at(n + 1) @ (rho2.h_at(n) @ rho1.f_at(n))
            for n in range(top + 1)
        }

    stats = {"parts": [rho1.stats, rho2.stats]}
    return Reduction(
        rho1.src,
        rho2.dst,
        f,
        g,
        h,
        max(rho1.homotopy_order, rho2.homotopy_order),
        f_action=lambda n, v: rho2.apply_f(n, rho1.apply_f(n, v)),
        g_action=lambda n, v: rho1.apply_g(n, rho2.apply_g(n, v)),
        stats=stats,
    )


@dataclass(frozen=True)
class Equivalence:
    """Span ``left.dst ⇐⇐ mid ⇒⇒ right.dst`` of two reductions."""

    mid: FilteredComplex
    left: Reduction
    right: Reduction

    def __post_init__(self):
        if self.left.src is not self.mid or self.right.src is not self.mid:
            if self.left.src != self.mid or self.right.src != self.mid:
                raise ComplexMismatchError("both reductions of an equivalence must start at mid")


# ---------------------------------------------------------------------------
# Filtration utilities


def subcomplex_at(C: FilteredComplex, i: int) -> FilteredComplex:
    """The subcomplex ``C^i`` of cells with filtration index at most ``i``."""
    if not 0 <= i <= C.steps:
        raise FiltrationError(f"filtration index {i} outside [0, {C.steps}]")
    if i == C.steps:
        return C
    keep = [C.positions_upto(n, i) for n in range(C.max_dim + 1)]
    bases = [[C.cells(n)[p] for p in keep[n]] for n in range(C.max_dim + 1)]
    bounds = {n: C.boundary(n).submatrix(keep[n - 1], keep[n]) for n in range(1, C.max_dim + 1)}
    return FilteredComplex(bases, bounds, steps=i)


def _permutation_matrix(perm: Sequence[int]) -> IntMatrix:
    # column k has its 1 in row perm[k]: maps new position k to old position perm[k]
    return IntMatrix._wrap(len(perm), len(perm), [{p: 1} for p in perm])


def sort_by_filtration(C: FilteredComplex) -> Tuple[FilteredComplex, List[List[int]]]:
    """Stable reorder of every basis by filtration index.

    Returns the sorted complex and, per degree, the list of original
    positions in the new order.
    """
    perms = [sorted(range(C.size(n)), key=lambda p, n=n: C.cells(n)[p].filt) for n in range(C.max_dim + 1)]
    if all(p == list(range(len(p))) for p in perms):
        return C, perms
    bases = [[C.cells(n)[p] for p in perms[n]] for n in range(C.max_dim + 1)]
    bounds = {n: C.boundary(n).submatrix(perms[n - 1], perms[n]) for n in range(1, C.max_dim + 1)}
    return FilteredComplex(bases, bounds, steps=C.steps), perms


def permutation_reduction(C: FilteredComplex, D: FilteredComplex, perms: Sequence[Sequence[int]]) -> Reduction:
    """Isomorphism ``C ⇒⇒ D`` where ``D`` reorders the bases of ``C`` by ``perms``."""
    P = {n: _permutation_matrix(perms[n]) for n in range(len(perms))}
    inv = [dict((old, new) for new, old in enumerate(p)) for p in perms]
    g = dict(P)
    f = {n: P[n].T for n in P}
    h = {n: IntMatrix.zeros(C.size(n + 1), C.size(n)) for n in P}
    return Reduction(
        C,
        D,
        f,
        g,
        h,
        0,
        f_action=lambda n, v: {inv[n][p]: x for p, x in v.items()},
        g_action=lambda n, v: {perms[n][p]: x for p, x in v.items()},
    )


# ---------------------------------------------------------------------------
# Text serialization

_HEADER = "morseward-complex 1"


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


def _compact(x) -> str:
    return json.dumps(x, separators=(",", ":"))


def dumps_complex(C: FilteredComplex) -> str:
    """Line-oriented text form: cells first, then nonzero boundary entries."""
    lines = [_HEADER, f"steps {C.steps}"]
    for n, cells in enumerate(C.bases):
        for c in cells:
            lines.append(f"cell {n} {c.filt} {_compact(c.id)} {_compact(c.label)}")
    for n in range(1, C.max_dim + 1):
        rows, cols = C.cells(n - 1), C.cells(n)
        for (r, j), v in C.boundary(n).entries():
            lines.append(f"bd {_compact(cols[j].id)} {_compact(rows[r].id)} {v}")
    return "\n".join(lines) + "\n"


def loads_complex(text: str) -> FilteredComplex:
    """Inverse of :func:`dumps_complex`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0] != _HEADER:
        raise ComplexFormatError("not a morseward complex file")
    steps = None
    by_dim: Dict[int, List[Cell]] = {}
    entries: List[Tuple[Hashable, Hashable, int]] = []
    for ln in lines[1:]:
        try:
            kind, entry = _parse_line(ln)
        except (ValueError, json.JSONDecodeError) as exc:
            raise ComplexFormatError(f"bad line {ln[:60]!r}: {exc}") from None
        if kind == "steps":
            steps = entry
        elif kind == "cell":
            by_dim.setdefault(entry.dim, []).append(entry)
        else:
            entries.append(entry)
    top = max(by_dim, default=-1)
    bases = [by_dim.get(n, []) for n in range(top + 1)]
    where = {c.id: (n, p) for n, cells in enumerate(bases) for p, c in enumerate(cells)}
    if len(where) != sum(len(b) for b in bases):
        raise ComplexFormatError("duplicate cell ids")
    cols: Dict[int, List[Dict[int, int]]] = {n: [{} for _ in bases[n]] for n in range(1, top + 1)}
    for cid, fid, v in entries:
        if cid not in where or fid not in where:
            raise ComplexFormatError(f"boundary entry refers to an unknown cell: {cid!r} / {fid!r}")
        n, j = where[cid]
        m, r = where[fid]
        if m != n - 1:
            raise ComplexFormatError(f"face {fid!r} of {cid!r} has the wrong degree")
        cols[n][j][r] = v
    bounds = {n: IntMatrix(len(bases[n - 1]), len(bases[n]), cols[n]) for n in range(1, top + 1)}
    return FilteredComplex(bases, bounds, steps=steps)


_DECODER = json.JSONDecoder()


def _json_fields(text: str, count: int) -> list:
    out, pos = [], 0
    for _ in range(count):
        while pos < len(text) and text[pos] == " ":
            pos += 1
        value, pos = _DECODER.raw_decode(text, pos)
        out.append(value)
    if text[pos:].strip():
        raise ValueError("trailing characters")
    return out


def _parse_line(ln: str):
    kind, _, rest = ln.partition(" ")
    if kind == "steps":
        return kind, int(rest)
    if kind == "cell":
        dim, filt, cid, label = _json_fields(rest, 4)
        return kind, Cell(_tuplify(cid), int(dim), int(filt), _tuplify(label))
    if kind == "bd":
        cid, fid, v = _json_fields(rest, 3)
        return kind, (_tuplify(cid), _tuplify(fid), int(v))
    raise ValueError(f"unknown line kind {kind!r}")
