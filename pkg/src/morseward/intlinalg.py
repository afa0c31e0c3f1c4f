"""Exact integer matrices, normal forms and lattices.

Everything here works with Python integers, so coefficients never wrap.
Matrices are stored sparsely as one ``{row: value}`` dict per column; the
dicts are treated as read-only once a matrix is built.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exceptions import ContainmentError, DimensionMismatchError

Column = Dict[int, int]

__all__ = [
    "IntMatrix",
    "SNFResult",
    "Lattice",
    "AbelianGroup",
    "smith_normal_form",
    "hermite_basis",
    "integer_kernel",
    "solve_integer",
    "lattice_intersection",
    "quotient_presentation",
    "preimage_lattice",
    "rank",
]


def _axpy(target: Column, q: int, source: Column) -> None:
    """In place ``target -= q * source``."""
    for k, v in source.items():
        nv = target.get(k, 0) - q * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def _nearest_quotient(a: int, b: int) -> int:
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


class IntMatrix:
    """Sparse matrix with unbounded integer entries.

    Parameters
    ----------
    rows, cols : int
        Shape of the matrix. Either may be zero.
    columns : sequence of dict, optional
        One ``{row_index: value}`` mapping per column. Zero values are
        dropped.
    """

    __slots__ = ("rows", "cols", "_columns")

    def __init__(self, rows: int, cols: int, columns: Optional[Sequence[Column]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.rows = rows
        self.cols = cols
        if columns is None:
            self._columns: Tuple[Column, ...] = tuple({} for _ in range(cols))
        else:
            if len(columns) != cols:
                raise DimensionMismatchError(f"expected {cols} columns, got {len(columns)}")
            cleaned = []
            for col in columns:
                c = {}
                for r, v in col.items():
                    if not 0 <= r < rows:
                        raise IndexError(f"row index {r} out of range for {rows} rows")
                    v = int(v)
                    if v:
                        c[r] = v
                cleaned.append(c)
            self._columns = tuple(cleaned)

    @classmethod
    def _wrap(cls, rows: int, cols: int, columns: Sequence[Column]) -> "IntMatrix":
        # trusted fast path: columns already clean and in range
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._columns = tuple(columns)
        return m

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = len(data)
        if rows == 0:
            return cls(0, cols or 0)
        ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise DimensionMismatchError("ragged dense matrix")
        columns = [{} for _ in range(ncols)]
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                v = int(v)
                if v:
                    columns[j][i] = v
        return cls._wrap(rows, ncols, columns)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Dict[Tuple[int, int], int]) -> "IntMatrix":
        columns: List[Column] = [{} for _ in range(cols)]
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry {(r, c)} out of range for shape {(rows, cols)}")
            if v:
                columns[c][r] = int(v)
        return cls._wrap(rows, cols, columns)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._wrap(rows, cols, [{} for _ in range(cols)])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls._wrap(n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def columns(self) -> Tuple[Column, ...]:
        return self._columns

    def column(self, j: int) -> Column:
        return self._columns[j]

    def __getitem__(self, key: Tuple[int, int]) -> int:
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry {key} out of range for shape {self.shape}")
        return self._columns[c].get(r, 0)

    def entries(self) -> Iterable[Tuple[Tuple[int, int], int]]:
        for c, col in enumerate(self._columns):
            for r in sorted(col):
                yield (r, c), col[r]

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self._columns)

    def is_zero(self) -> bool:
        return not any(self._columns)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(col == {j: 1} for j, col in enumerate(self._columns))

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for c, col in enumerate(self._columns):
            for r, v in col.items():
                out[r][c] = v
        return out

    def row_dicts(self) -> List[Column]:
        """Rows as ``{col: value}`` dicts."""
        rows: List[Column] = [{} for _ in range(self.rows)]
        for c, col in enumerate(self._columns):
            for r, v in col.items():
                rows[r][c] = v
        return rows

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix._wrap(self.cols, self.rows, self.row_dicts())

    def apply(self, vector) -> Column:
        """Multiply by a vector given as a dense sequence or a sparse dict."""
        items = vector.items() if isinstance(vector, dict) else enumerate(vector)
        out: Column = {}
        for j, x in items:
            if x:
                if not 0 <= j < self.cols:
                    raise DimensionMismatchError(f"vector index {j} out of range")
                _axpy(out, -x, self._columns[j])
        return out

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [self.apply(col) for col in other._columns]
        return IntMatrix._wrap(self.rows, other.cols, cols)

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        cols = []
        for a, b in zip(self._columns, other._columns):
            c = dict(a)
            _axpy(c, -1, b)
            cols.append(c)
        return IntMatrix._wrap(self.rows, self.cols, cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        cols = []
        for a, b in zip(self._columns, other._columns):
            c = dict(a)
            _axpy(c, 1, b)
            cols.append(c)
        return IntMatrix._wrap(self.rows, self.cols, cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._wrap(self.rows, self.cols, [{r: -v for r, v in c.items()} for c in self._columns])

    def scale(self, k: int) -> "IntMatrix":
        if k == 0:
            return IntMatrix.zeros(self.rows, self.cols)
        return IntMatrix._wrap(self.rows, self.cols, [{r: k * v for r, v in c.items()} for c in self._columns])

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "IntMatrix":
        """Rows and columns picked (and reordered) by index lists."""
        pos = {r: i for i, r in enumerate(row_indices)}
        cols = []
        for j in col_indices:
            src = self._columns[j]
            cols.append({pos[r]: v for r, v in src.items() if r in pos})
        return IntMatrix._wrap(len(row_indices), len(col_indices), cols)

    @staticmethod
    def hstack(blocks: Sequence["IntMatrix"], rows: Optional[int] = None) -> "IntMatrix":
        if not blocks:
            return IntMatrix.zeros(rows or 0, 0)
        nrows = blocks[0].rows
        if any(b.rows != nrows for b in blocks):
            raise DimensionMismatchError("hstack blocks must share a row count")
        cols: List[Column] = []
        for b in blocks:
            cols.extend(b._columns)
        return IntMatrix._wrap(nrows, len(cols), cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._columns == other._columns

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            return f"IntMatrix({self.to_dense()})"
        return f"IntMatrix(shape={self.shape}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == S`` with unimodular ``U`` and ``V``.

    ``U_inv`` and ``V_inv`` are the exact inverses, tracked alongside so
    that generators of cokernels can be read off without a second solve.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> List[int]:
        return [self.S[i, i] for i in range(min(self.S.shape))]

    @property
    def invariant_factors(self) -> List[int]:
        return [d for d in self.diagonal if d]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _identity_rows(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _min_pivot(a: List[List[int]], t: int, m: int, n: int) -> Optional[Tuple[int, int]]:
    best = None
    best_abs = 0
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v:
                av = v if v > 0 else -v
                if best is None or av < best_abs:
                    best, best_abs = (i, j), av
                    if av == 1:
                        return best
    return best


def smith_normal_form(A: IntMatrix) -> SNFResult:
    """Smith normal form with both transforms and their inverses.

    Pivots are chosen as the nonzero entry of least absolute value (ties:
    lowest row, then lowest column), which keeps intermediate growth modest
    and the output deterministic.
    """
    m, n = A.shape
    a = A.to_dense()
    U = _identity_rows(m)
    Ui = _identity_rows(m)
    V = _identity_rows(n)
    Vi = _identity_rows(n)

    def row_op(i: int, t: int, q: int) -> None:
        # row_i -= q * row_t
        ai, at = a[i], a[t]
        for k in range(n):
            if at[k]:
                ai[k] -= q * at[k]
        ui, ut = U[i], U[t]
        for k in range(m):
            if ut[k]:
                ui[k] -= q * ut[k]
        for row in Ui:
            if row[i]:
                row[t] += q * row[i]

    def col_op(j: int, t: int, q: int) -> None:
        # col_j -= q * col_t
        for row in a:
            if row[t]:
                row[j] -= q * row[t]
        for row in V:
            if row[t]:
                row[j] -= q * row[t]
        vt, vj = Vi[t], Vi[j]
        for k in range(n):
            if vj[k]:
                vt[k] += q * vj[k]

    def swap_rows(i: int, t: int) -> None:
        if i != t:
            a[i], a[t] = a[t], a[i]
            U[i], U[t] = U[t], U[i]
            for row in Ui:
                row[i], row[t] = row[t], row[i]

    def swap_cols(j: int, t: int) -> None:
        if j != t:
            for row in a:
                row[j], row[t] = row[t], row[j]
            for row in V:
                row[j], row[t] = row[t], row[j]
            Vi[j], Vi[t] = Vi[t], Vi[j]

    t = 0
    while t < min(m, n):
        piv = _min_pivot(a, t, m, n)
        if piv is None:
            break
        swap_rows(piv[0], t)
        swap_cols(piv[1], t)
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        row_op(i, t, q)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        col_op(j, t, q)
                    if a[t][j]:
                        clean = False
            if not clean:
                # a smaller remainder appeared in row t or column t
                best_abs, where = abs(p), None
                for i in range(t + 1, m):
                    v = abs(a[i][t])
                    if v and v < best_abs:
                        best_abs, where = v, ("r", i)
                for j in range(t + 1, n):
                    v = abs(a[t][j])
                    if v and v < best_abs:
                        best_abs, where = v, ("c", j)
                if where is not None:
                    if where[0] == "r":
                        swap_rows(where[1], t)
                    else:
                        swap_cols(where[1], t)
                continue
            if p not in (1, -1):
                bad = None
                for i in range(t + 1, m):
                    row = a[i]
                    for j in range(t + 1, n):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    # row_t += row_bad
                    row_op(t, bad, -1)
                    continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
            for row in Ui:
                row[t] = -row[t]
        t += 1

    return SNFResult(
        U=IntMatrix.from_dense(U, m),
        S=IntMatrix.from_dense(a, n),
        V=IntMatrix.from_dense(V, n),
        U_inv=IntMatrix.from_dense(Ui, m),
        V_inv=IntMatrix.from_dense(Vi, n),
    )


# ---------------------------------------------------------------------------
# Column echelon machinery shared by Hermite, kernel and solve


def _echelon(columns: Sequence[Column], trackers: Optional[Sequence[Column]] = None):
    """Unimodular column reduction of sparse columns.

    Returns ``(pivots, zero_trackers)`` where ``pivots`` is a list of
    ``(lead_row, column, tracker)`` sorted by strictly increasing lead row,
    every pivot column vanishing above its lead and having a positive lead
    entry. ``zero_trackers`` holds the trackers of columns that reduced to
    zero. Trackers record the combination of input columns that produced
    each output column.
    """
    cols: List[Column] = [dict(c) for c in columns]
    trs: Optional[List[Column]] = [dict(t) for t in trackers] if trackers is not None else None
    buckets: Dict[int, List[int]] = {}
    heap: List[int] = []
    zero_trackers: List[Column] = []

    def place(idx: int) -> None:
        c = cols[idx]
        if not c:
            if trs is not None:
                zero_trackers.append(trs[idx])
            return
        lead = min(c)
        bucket = buckets.get(lead)
        if bucket is None:
            buckets[lead] = [idx]
            heapq.heappush(heap, lead)
        else:
            bucket.append(idx)

    for idx in range(len(cols)):
        place(idx)

    pivots = []
    while heap:
        r = heapq.heappop(heap)
        group = buckets.pop(r)
        while len(group) > 1:
            k = min(group, key=lambda g: abs(cols[g][r]))
            ck = cols[k]
            pk = ck[r]
            survivors = [k]
            for o in group:
                if o == k:
                    continue
                co = cols[o]
                q = _nearest_quotient(co[r], pk)
                _axpy(co, q, ck)
                if trs is not None:
                    _axpy(trs[o], q, trs[k])
                if r in co:
                    survivors.append(o)
                else:
                    place(o)
            group = survivors
        idx = group[0]
        c = cols[idx]
        if c[r] < 0:
            cols[idx] = c = {k: -v for k, v in c.items()}
            if trs is not None:
                trs[idx] = {k: -v for k, v in trs[idx].items()}
        pivots.append((r, c, trs[idx] if trs is not None else None))
    return pivots, zero_trackers


def _hermite_reduce(pivots) -> None:
    """Reduce entries in pivot rows of earlier columns into ``[0, pivot)``."""
    for l, (r, col, tr) in enumerate(pivots):
        p = col[r]
        for l2 in range(l):
            c2 = pivots[l2][1]
            x = c2.get(r)
            if x:
                q = x // p
                if q:
                    _axpy(c2, q, col)
                    t2 = pivots[l2][2]
                    if t2 is not None:
                        _axpy(t2, q, tr)


def _solve_echelon(leads: Sequence[int], cols: Sequence[Column], b: Column) -> Optional[List[int]]:
    res = dict(b)
    y = [0] * len(cols)
    for l, (r, col) in enumerate(zip(leads, cols)):
        v = res.get(r)
        if v:
            q, rem = divmod(v, col[r])
            if rem:
                return None
            y[l] = q
            _axpy(res, q, col)
    return None if res else y


# ---------------------------------------------------------------------------
# Lattices


def _as_column(v, dim: int) -> Column:
    if isinstance(v, dict):
        for k in v:
            if not 0 <= k < dim:
                raise DimensionMismatchError(f"index {k} outside ambient dimension {dim}")
        return {k: int(x) for k, x in v.items() if x}
    if len(v) != dim:
        raise DimensionMismatchError(f"vector of length {len(v)} in ambient dimension {dim}")
    return {i: int(x) for i, x in enumerate(v) if x}


class Lattice:
    """Subgroup of ``Z^ambient_dim`` stored in column Hermite form.

    The basis is canonical: pivot rows strictly increase, pivots are
    positive, each basis column vanishes above its pivot row, and entries
    of earlier columns in a pivot row lie in ``[0, pivot)``. Two lattices
    are equal exactly when their bases are equal.
    """

    __slots__ = ("ambient_dim", "_leads", "_cols")

    def __init__(self, ambient_dim: int, generators: Iterable = ()):
        self.ambient_dim = ambient_dim
        cols = [_as_column(g, ambient_dim) for g in generators]
        pivots, _ = _echelon(cols)
        _hermite_reduce(pivots)
        self._leads = tuple(p[0] for p in pivots)
        self._cols = tuple(p[1] for p in pivots)

    @classmethod
    def _from_pivots(cls, ambient_dim: int, pivots) -> "Lattice":
        lat = cls.__new__(cls)
        lat.ambient_dim = ambient_dim
        lat._leads = tuple(p[0] for p in pivots)
        lat._cols = tuple(p[1] for p in pivots)
        return lat

    @classmethod
    def full(cls, n: int) -> "Lattice":
        return cls._from_pivots(n, [(i, {i: 1}, None) for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Lattice":
        return cls._from_pivots(n, [])

    @classmethod
    def from_matrix(cls, gens: IntMatrix) -> "Lattice":
        return cls(gens.rows, gens.columns)

    @property
    def rank(self) -> int:
        return len(self._cols)

    @property
    def basis(self) -> IntMatrix:
        return IntMatrix._wrap(self.ambient_dim, len(self._cols), self._cols)

    @property
    def basis_columns(self) -> Tuple[Column, ...]:
        return self._cols

    def basis_vectors(self) -> List[Tuple[int, ...]]:
        return [tuple(c.get(i, 0) for i in range(self.ambient_dim)) for c in self._cols]

    def is_full(self) -> bool:
        return self.rank == self.ambient_dim and all(c[r] == 1 for r, c in zip(self._leads, self._cols))

    def coordinates(self, v) -> Optional[List[int]]:
        """Coefficients of ``v`` in the basis, or ``None`` if ``v`` is not in the lattice."""
        return _solve_echelon(self._leads, self._cols, _as_column(v, self.ambient_dim))

    def __contains__(self, v) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("ambient dimensions differ")
        return all(_solve_echelon(self._leads, self._cols, c) is not None for c in other._cols)

    def __add__(self, other: "Lattice") -> "Lattice":
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("ambient dimensions differ")
        return Lattice(self.ambient_dim, list(self._cols) + list(other._cols))

    def index_in(self, other: "Lattice") -> Optional[int]:
        """``[other : self]`` when finite, else ``None``."""
        grp = quotient_presentation(other, self)
        return grp.order

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self._cols == other._cols

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Lattice(ambient_dim={self.ambient_dim}, basis={self.basis_vectors()})"


def hermite_basis(gens: IntMatrix) -> Lattice:
    """Canonical column Hermite basis of the integer span of the columns."""
    return Lattice.from_matrix(gens)


def integer_kernel(A: IntMatrix) -> Lattice:
    """Lattice ``{x in Z^cols : A x = 0}``."""
    trackers = [{j: 1} for j in range(A.cols)]
    _, kernel = _echelon(A.columns, trackers)
    return Lattice(A.cols, kernel)


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[List[int]]:
    """An integer solution of ``A x = b``, or ``None`` when none exists."""
    if len(b) != A.rows:
        raise DimensionMismatchError(f"right-hand side has length {len(b)}, matrix has {A.rows} rows")
    trackers = [{j: 1} for j in range(A.cols)]
    pivots, _ = _echelon(A.columns, trackers)
    y = _solve_echelon([p[0] for p in pivots], [p[1] for p in pivots], _as_column(b, A.rows))
    if y is None:
        return None
    x: Column = {}
    for coef, (_, _, tr) in zip(y, pivots):
        if coef:
            _axpy(x, -coef, tr)
    return [x.get(j, 0) for j in range(A.cols)]


def lattice_intersection(L1: Lattice, L2: Lattice) -> Lattice:
    """Canonical basis of ``L1 ∩ L2``."""
    if L1.ambient_dim != L2.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {L1.ambient_dim} vs {L2.ambient_dim}")
    n = L1.ambient_dim
    if L1.rank == 0 or L2.rank == 0:
        return Lattice.zero(n)
    if L2.is_full():
        return L1
    if L1.is_full():
        return L2
    r1 = L1.rank
    cols = list(L1._cols) + [{k: -v for k, v in c.items()} for c in L2._cols]
    trackers = [{j: 1} for j in range(len(cols))]
    _, kernel = _echelon(cols, trackers)
    gens = []
    for kv in kernel:
        v: Column = {}
        for j, x in kv.items():
            if j < r1:
                _axpy(v, -x, L1._cols[j])
        gens.append(v)
    return Lattice(n, gens)


def preimage_lattice(F: IntMatrix, L: Lattice) -> Lattice:
    """``{x in Z^cols : F x in L}``."""
    if F.rows != L.ambient_dim:
        raise DimensionMismatchError("map codomain does not match lattice ambient dimension")
    p = F.cols
    cols = list(F.columns) + [{k: -v for k, v in c.items()} for c in L.basis_columns]
    trackers = [{j: 1} for j in range(len(cols))]
    _, kernel = _echelon(cols, trackers)
    gens = [{j: x for j, x in kv.items() if j < p} for kv in kernel]
    return Lattice(p, gens)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^rank ⊕ Z_{t1} ⊕ Z_{t2} ⊕ ...`` with ``t1 | t2 | ...``.

    Generators are listed torsion summands first (in factor order), then
    the free summands. Equality compares the isomorphism type only.
    """

    rank: int = 0
    torsion: Tuple[int, ...] = ()
    generators: tuple = field(default=(), compare=False)
    basis_coords: tuple = field(default=(), compare=False, repr=False)

    @property
    def invariants(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.rank, self.torsion)

    @property
    def order(self) -> Optional[int]:
        if self.rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def labels(self) -> List[str]:
        """One ``"Z_d"`` or ``"Z"`` label per cyclic summand, in generator order."""
        return [f"Z_{d}" for d in self.torsion] + ["Z"] * self.rank

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z_{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def quotient_presentation(numerator: Lattice, denominator: Lattice) -> AbelianGroup:
    """Invariant factor presentation of ``numerator / denominator``.

    ``generators`` are ambient-coordinate tuples, ``basis_coords`` the same
    generators in coordinates of the numerator's Hermite basis.
    """
    if numerator.ambient_dim != denominator.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    r = numerator.rank
    rel_cols = []
    for c in denominator.basis_columns:
        y = _solve_echelon(numerator._leads, numerator._cols, c)
        if y is None:
            raise ContainmentError("denominator lattice is not contained in the numerator")
        rel_cols.append({i: v for i, v in enumerate(y) if v})
    Y = IntMatrix._wrap(r, len(rel_cols), rel_cols)
    snf = smith_normal_form(Y)
    diag = snf.diagonal
    torsion, free = [], []
    for l in range(r):
        d = diag[l] if l < len(diag) else 0
        if d == 1:
            continue
        (free if d == 0 else torsion).append((l, d))
    order = torsion + free
    Uinv = snf.U_inv
    gens, coords = [], []
    dim = numerator.ambient_dim
    for l, _ in order:
        y = Uinv.column(l)
        v: Column = {}
        for i, x in y.items():
            _axpy(v, -x, numerator._cols[i])
        gens.append(tuple(v.get(k, 0) for k in range(dim)))
        coords.append(tuple(y.get(k, 0) for k in range(r)))
    return AbelianGroup(
        rank=len(free),
        torsion=tuple(d for _, d in torsion),
        generators=tuple(gens),
        basis_coords=tuple(coords),
    )


# ---------------------------------------------------------------------------
# Ranks over fields


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def rank(A: IntMatrix, characteristic: int = 0) -> int:
    """Rank over ``Q`` (characteristic 0) or over ``Z/p`` for a prime ``p``."""
    if characteristic == 0:
        pivots, _ = _echelon(A.columns)
        return len(pivots)
    p = characteristic
    if not _is_prime(p):
        raise ValueError(f"characteristic must be 0 or a prime, got {p}")
    pivot_cols: Dict[int, Column] = {}
    r = 0
    for col in A.columns:
        c = {k: v % p for k, v in col.items() if v % p}
        while c:
            lead = min(c)
            pc = pivot_cols.get(lead)
            if pc is None:
                inv = pow(c[lead], -1, p)
                pivot_cols[lead] = {k: (v * inv) % p for k, v in c.items()}
                r += 1
                break
            q = c[lead]
            for k, v in pc.items():
                nv = (c.get(k, 0) - q * v) % p
                if nv:
                    c[k] = nv
                else:
                    c.pop(k, None)
    return r
