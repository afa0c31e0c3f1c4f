"""Brute-force reference computations used to cross-check the main pipeline.

Nothing here touches vector fields, reductions or the summand presentations
of :mod:`morseward.persist`. Groups are quotients of lattices of cycles and
boundaries inside the full chain group, straight from their definitions.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .chain import Cell, FilteredComplex
from .exceptions import FiltrationError, MorsewardError
from .image import DigitalImage
from .intlinalg import (
    AbelianGroup,
    IntMatrix,
    Lattice,
    integer_kernel,
    lattice_intersection,
    quotient_presentation,
    rank,
    smith_normal_form,
)

__all__ = [
    "OracleSizeError",
    "DirectPersistence",
    "direct_persistence",
    "direct_persistent_group",
    "direct_triple_group",
    "direct_bd_group",
    "direct_barcode",
    "snf_homology",
    "standard_field_barcode",
    "RandomComplexSpec",
    "random_filtered_complex",
    "default_seed",
    "ridge_image",
]

DEFAULT_GUARD = 1000


class OracleSizeError(MorsewardError, ValueError):
    """The complex is too large for brute-force computation."""


def default_seed() -> int:
    return int(os.environ.get("MORSEWARD_SEED", "20140101"))


def _guard(C: FilteredComplex, limit: int) -> None:
    if C.num_cells > limit:
        raise OracleSizeError(f"complex has {C.num_cells} cells; the oracle is limited to {limit}")


class _Lattices:
    """Cycle lattices ``Z_i`` and boundary lattices ``B_j`` in the chain group of one degree."""

    def __init__(self, C: FilteredComplex, n: int):
        self.C, self.n = C, n
        self.dim = C.size(n)
        self._z: Dict[int, Lattice] = {}
        self._b: Dict[int, Lattice] = {}
        self._sum: Dict[Tuple[int, int], Lattice] = {}

    def Z(self, i: int) -> Lattice:
        if i not in self._z:
            cols = [p for p, c in enumerate(self.C.cells(self.n)) if c.filt <= i]
            d = self.C.boundary(self.n)
            sub = IntMatrix(d.rows, len(cols), [d.column(p) for p in cols])
            ker = integer_kernel(sub)
            self._z[i] = Lattice(self.dim, [{cols[k]: x for k, x in v.items()} for v in ker.basis_columns])
        return self._z[i]

    def B(self, j: int) -> Lattice:
        if j not in self._b:
            d = self.C.boundary(self.n + 1)
            cells = self.C.cells(self.n + 1)
            self._b[j] = Lattice(self.dim, [d.column(p) for p, c in enumerate(cells) if c.filt <= j])
        return self._b[j]

    def ZB(self, i: int, j: int) -> Lattice:
        """``Z_i + B_j``."""
        if (i, j) not in self._sum:
            self._sum[(i, j)] = self.Z(i) + self.B(j)
        return self._sum[(i, j)]


def _lattices(C: FilteredComplex, n: int) -> _Lattices:
    return C.cached(("oracle-lattices", n), lambda: _Lattices(C, n))


def _strip(g: AbelianGroup) -> AbelianGroup:
    return AbelianGroup(g.rank, g.torsion)


def direct_persistent_group(C: FilteredComplex, i: int, j: int, n: int, guard: int = DEFAULT_GUARD) -> AbelianGroup:
    """``(Z_i + B_j) / B_j``."""
    _guard(C, guard)
    L = _lattices(C, n)
    return _strip(quotient_presentation(L.ZB(i, j), L.B(j)))


def direct_triple_group(C: FilteredComplex, i: int, j: int, k: int, n: int, guard: int = DEFAULT_GUARD) -> AbelianGroup:
    """``((Z_i + B_j) ∩ (Z_{i-1} + B_k)) / B_j``."""
    _guard(C, guard)
    L = _lattices(C, n)
    num = lattice_intersection(L.ZB(i, j), L.ZB(i - 1, k))
    return _strip(quotient_presentation(num, L.B(j)))


def direct_bd_group(C: FilteredComplex, i: int, k: Optional[int], n: int, guard: int = DEFAULT_GUARD) -> AbelianGroup:
    """Born at ``i``, dying entering ``k`` (``None``: surviving to the last step)."""
    _guard(C, guard)
    L = _lattices(C, n)
    if k is None:
        m = C.steps
        return _strip(quotient_presentation(L.ZB(i, m), L.ZB(i - 1, m)))
    base = L.ZB(i, i)
    num = lattice_intersection(base, L.ZB(i - 1, k))
    den = lattice_intersection(base, L.ZB(i - 1, k - 1))
    return _strip(quotient_presentation(num, den))


@dataclass(frozen=True)
class DirectPersistence:
    persistent: AbelianGroup
    triple: AbelianGroup
    bd: Optional[AbelianGroup]


def direct_persistence(C: FilteredComplex, i: int, j: int, k: int, n: int,
                       guard: int = DEFAULT_GUARD) -> DirectPersistence:
    """``H^{i,j}_n``, ``H^{i,j,k}_n`` and ``BD^{i,k}_n`` (the latter only when ``i < k``)."""
    _guard(C, guard)
    for x in (i, j, k):
        if not 0 <= x <= C.steps:
            raise FiltrationError(f"index {x} outside [0, {C.steps}]")
    if not (1 <= i <= j <= k):
        raise FiltrationError(f"need 1 <= i <= j <= k, got ({i}, {j}, {k})")
    bd = direct_bd_group(C, i, k, n, guard) if i < k else None
    return DirectPersistence(
        direct_persistent_group(C, i, j, n, guard),
        direct_triple_group(C, i, j, k, n, guard),
        bd,
    )


def direct_barcode(C: FilteredComplex, guard: int = DEFAULT_GUARD) -> Counter:
    """Multiset ``(n, birth, death, label)`` of integer bars."""
    _guard(C, guard)
    bars: Counter = Counter()
    m = C.steps
    for n in range(C.max_dim + 1):
        for i in range(1, m + 1):
            for k in list(range(i + 1, m + 1)) + [None]:
                g = direct_bd_group(C, i, k, n, guard)
                for label in g.labels():
                    bars[(n, i, k, label)] += 1
    return bars


def snf_homology(C: FilteredComplex, n: int) -> AbelianGroup:
    """Homology of the whole complex from ranks and the Smith form of ``d_{n+1}``."""
    r_n = rank(C.boundary(n)) if n >= 1 else 0
    d = C.boundary(n + 1)
    diag = smith_normal_form(d).diagonal if d.rows and d.cols else []
    torsion = tuple(x for x in diag if x > 1)
    betti = C.size(n) - r_n - sum(1 for x in diag if x)
    return AbelianGroup(betti, torsion)


def standard_field_barcode(C: FilteredComplex, characteristic: int = 0) -> Counter:
    """Classical column-reduction barcode over Q or Z/p.

    Returns the multiset of ``(n, birth, death)`` with ``death=None`` for
    essential classes; zero-length pairs are dropped.
    """
    order = sorted(
        ((c.filt, n, p) for n in range(C.max_dim + 1) for p, c in enumerate(C.cells(n))),
    )
    where = {(n, p): idx for idx, (_, n, p) in enumerate(order)}
    filt = [f for f, _, _ in order]
    dims = [n for _, n, _ in order]

    def norm(x):
        return Fraction(x) if characteristic == 0 else x % characteristic

    def inv(x):
        return 1 / x if characteristic == 0 else pow(x, -1, characteristic)

    cols: List[Dict[int, object]] = []
    for f, n, p in order:
        col = {}
        if n >= 1:
            for r, v in C.boundary(n).column(p).items():
                x = norm(v)
                if x:
                    col[where[(n - 1, r)]] = x
        cols.append(col)
    low_owner: Dict[int, int] = {}
    pairs: Dict[int, int] = {}
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            owner = low_owner.get(low)
            if owner is None:
                break
            other = cols[owner]
            q = col[low] * inv(other[low])
            for r, v in other.items():
                nv = norm(col.get(r, 0) - q * v)
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
        if col:
            low = max(col)
            low_owner[low] = j
            pairs[low] = j
    bars: Counter = Counter()
    killers = set(pairs.values())
    for idx in range(len(order)):
        if idx in pairs:
            b, d = filt[idx], filt[pairs[idx]]
            if d > b:
                bars[(dims[idx], b, d)] += 1
        elif idx not in killers:
            bars[(dims[idx], filt[idx], None)] += 1
    return bars


# ---------------------------------------------------------------------------
# Random complexes


@dataclass(frozen=True)
class RandomComplexSpec:
    """Bounds for :func:`random_filtered_complex`.

    ``max_cells`` caps the number of cells per degree; ``torsion`` is the
    chance that a 2-cell wraps a cycle with a coefficient of absolute value 2.
    """

    max_cells: Tuple[int, ...] = (8, 12, 6)
    max_dim: int = 2
    steps: int = 4
    seed: int = 0
    torsion: float = 0.25
    loop_edges: float = 0.1


def random_filtered_complex(spec: RandomComplexSpec) -> FilteredComplex:
    """Random valid filtered complex, deterministic in ``spec.seed``.

    Edges join two vertices or, occasionally, close up on a single vertex
    (zero boundary). A 2-cell is glued along a random integer combination
    of 1-cycles of the edges born no later than itself. Filtration indices
    never decrease from a face to its coface.
    """
    rng = random.Random(spec.seed)
    caps = list(spec.max_cells) + [0] * 3
    m = spec.steps
    nv = rng.randint(0, caps[0])
    vfilt = [rng.randint(1, m) for _ in range(nv)]
    bases: List[List[Cell]] = [[Cell(("v", k), 0, f) for k, f in enumerate(vfilt)]]
    bounds: Dict[int, IntMatrix] = {}
    if spec.max_dim >= 1 and nv:
        ne = rng.randint(0, caps[1])
        ecols, efilt = [], []
        for _ in range(ne):
            if nv == 1 or rng.random() < spec.loop_edges:
                u = rng.randrange(nv)
                ecols.append({})
                lo = vfilt[u]
            else:
                u, w = sorted(rng.sample(range(nv), 2))
                ecols.append({u: -1, w: 1})
                lo = max(vfilt[u], vfilt[w])
            efilt.append(rng.randint(lo, m))
        bases.append([Cell(("e", k), 1, f) for k, f in enumerate(efilt)])
        bounds[1] = IntMatrix(nv, ne, ecols)
        if spec.max_dim >= 2 and ne:
            nt = rng.randint(0, caps[2])
            tcols, tfilt = [], []
            for _ in range(nt):
                t = rng.randint(1, m)
                alive = [p for p in range(ne) if efilt[p] <= t]
                sub = IntMatrix(nv, len(alive), [ecols[p] for p in alive])
                ker = integer_kernel(sub).basis_columns
                if not ker:
                    continue
                col: Dict[int, int] = {}
                for _ in range(rng.randint(1, 2)):
                    z = rng.choice(ker)
                    coef = rng.choice((2, -2)) if rng.random() < spec.torsion else rng.choice((1, -1))
                    for k, x in z.items():
                        pos = alive[k]
                        nv_ = col.get(pos, 0) + coef * x
                        if nv_:
                            col[pos] = nv_
                        else:
                            col.pop(pos, None)
                tcols.append(col)
                tfilt.append(t)
            bases.append([Cell(("t", k), 2, f) for k, f in enumerate(tfilt)])
            bounds[2] = IntMatrix(ne, len(tcols), tcols)
    while bases and not bases[-1]:
        bases.pop()
    bounds = {n: d for n, d in bounds.items() if n < len(bases)}
    return FilteredComplex(bases, bounds, steps=m)


# ---------------------------------------------------------------------------
# Synthetic images


def ridge_image(height: int = 300, width: int = 300, spacing: int = 9, thickness: int = 2) -> DigitalImage:
    """Concentric elliptic ridges crossed by a vertical and a horizontal bar.

    Every union of leading rows is connected, so a row sweep never merges
    components; each ridge ring encloses holes that appear when the sweep
    closes them.
    """
    cy, cx = (height - 1) / 2, (width - 1) / 2
    ry, rx = height / 2 - 2, width / 2 - 2
    mask = [[False] * width for _ in range(height)]
    for r in range(height):
        for c in range(width):
            u, v = (r - cy) / ry, (c - cx) / rx
            rad = (u * u + v * v) ** 0.5 * min(ry, rx)
            if rad > min(ry, rx):
                continue
            on_ring = rad % spacing < thickness
            on_bar = abs(c - cx) < thickness / 2 + 0.5 or abs(r - cy) < thickness / 2 + 0.5
            mask[r][c] = on_ring or on_bar
    return DigitalImage.from_mask(mask)
