"""Integer persistent homology of filtered complexes.

``H_n(K^i)`` is presented as ``Z^p`` modulo the diagonal relation lattice
spanned by ``d_l e_l`` over its torsion summands. Persistent groups, the
triple groups ``H^{i,j,k}`` and the born/die groups ``BD^{i,k}`` are all
lattices inside such a presentation, so their invariant factors come from
Hermite and Smith normal forms.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .chain import ChainVector, Equivalence, FilteredComplex, Reduction, validate_reduction
from .exceptions import FiltrationError, InvariantViolation, TransferError
from .intlinalg import (
    AbelianGroup,
    IntMatrix,
    Lattice,
    integer_kernel,
    lattice_intersection,
    preimage_lattice,
    quotient_presentation,
    rank as field_rank,
    smith_normal_form,
    solve_integer,
)

__all__ = [
    "Homology",
    "InducedMap",
    "Bar",
    "Barcode",
    "homology_at",
    "homology_presentation",
    "induced_map",
    "persistent_group",
    "triple_group",
    "bd_group",
    "bd_group_via",
    "field_betti",
    "field_mu",
    "field_barcode",
    "barcode",
    "persistent_generators",
    "TransferWitness",
    "theorem1_transfer",
    "transfer_persistent_groups",
    "INF",
]

INF = None  # death of a bar that never dies


# ---------------------------------------------------------------------------
# Homology of one filtration step


class Homology:
    """Presentation of ``H_n(K^i)`` with class coordinates for cycles.

    Summands are ordered torsion first, then free, as in :class:`AbelianGroup`.
    Cycles are position vectors over all n-cells of the complex.
    """

    def __init__(self, C: FilteredComplex, i: int, n: int):
        self.i, self.n = i, n
        dim = C.size(n)
        self.ambient_dim = dim
        cols_i = C.positions_upto(n, i)
        kernel = integer_kernel(C.boundary(n).submatrix(range(C.size(n - 1)), cols_i))
        lifted = [{cols_i[k]: x for k, x in col.items()} for col in kernel.basis_columns]
        self.cycles = Lattice(dim, lifted)
        rel_cols = []
        bd = C.boundary(n + 1)
        for p in C.positions_upto(n + 1, i):
            y = self.cycles.coordinates(bd.column(p))
            if y is None:
                raise InvariantViolation(f"boundary column {p} in degree {n + 1} is not a cycle")
            rel_cols.append({k: v for k, v in enumerate(y) if v})
        r = self.cycles.rank
        snf = smith_normal_form(IntMatrix(r, len(rel_cols), rel_cols))
        diag = snf.diagonal
        torsion, free = [], []
        for l in range(r):
            d = diag[l] if l < len(diag) else 0
            if d != 1:
                (free if d == 0 else torsion).append((l, d))
        self._summands = torsion + free
        self._U = snf.U
        self.orders: Tuple[int, ...] = tuple(d for _, d in self._summands)
        gens = []
        basis = self.cycles.basis_columns
        for l, _ in self._summands:
            v: Dict[int, int] = {}
            for k, x in snf.U_inv.column(l).items():
                for pos, w in basis[k].items():
                    nv = v.get(pos, 0) + x * w
                    if nv:
                        v[pos] = nv
                    else:
                        v.pop(pos, None)
            gens.append(v)
        self.generators: List[Dict[int, int]] = gens
        self.group = AbelianGroup(rank=len(free), torsion=tuple(d for _, d in torsion))

    @property
    def p(self) -> int:
        return len(self._summands)

    def relations(self) -> Lattice:
        return Lattice(self.p, [{l: d} for l, d in enumerate(self.orders) if d])

    def classes(self, cycle: Dict[int, int]) -> List[int]:
        """Coordinates of the class of ``cycle``; torsion entries reduced."""
        y = self.cycles.coordinates(cycle)
        if y is None:
            raise InvariantViolation(f"chain is not a cycle of K^{self.i} in degree {self.n}")
        yd = {k: v for k, v in enumerate(y) if v}
        out = []
        for (l, d) in self._summands:
            row = sum(self._U[l, k] * v for k, v in yd.items())
            out.append(row % d if d else row)
        return out

    def cycle_of(self, coords: Sequence[int]) -> Dict[int, int]:
        v: Dict[int, int] = {}
        for x, g in zip(coords, self.generators):
            if x:
                for pos, w in g.items():
                    nv = v.get(pos, 0) + x * w
                    if nv:
                        v[pos] = nv
                    else:
                        v.pop(pos, None)
        return v


def _check_step(C: FilteredComplex, *idx: int) -> None:
    for i in idx:
        if not 0 <= i <= C.steps:
            raise FiltrationError(f"filtration index {i} outside [0, {C.steps}]")


def homology_presentation(C: FilteredComplex, i: int, n: int) -> Homology:
    _check_step(C, i)
    return C.cached(("homology", i, n), lambda: Homology(C, i, n))


def _with_generators(C: FilteredComplex, group: AbelianGroup, n: int, cycles) -> AbelianGroup:
    chains = tuple(C.chain_from_positions(n, v) for v in cycles)
    return AbelianGroup(group.rank, group.torsion, chains, group.basis_coords)


def homology_at(C: FilteredComplex, i: int, n: int) -> AbelianGroup:
    """``H_n(K^i)`` with a cycle representative for every summand."""
    H = homology_presentation(C, i, n)
    return _with_generators(C, H.group, n, H.generators)


# ---------------------------------------------------------------------------
# Induced maps and persistent groups


@dataclass(frozen=True)
class InducedMap:
    i: int
    j: int
    n: int
    matrix: IntMatrix
    source_orders: Tuple[int, ...]
    target_orders: Tuple[int, ...]

    def __call__(self, coords: Sequence[int]) -> List[int]:
        out = self.matrix.apply(list(coords))
        return [out.get(r, 0) % d if d else out.get(r, 0) for r, d in enumerate(self.target_orders)]


def _induced(C: FilteredComplex, i: int, j: int, n: int) -> InducedMap:
    Hi = homology_presentation(C, i, n)
    Hj = homology_presentation(C, j, n)
    cols = []
    for g in Hi.generators:
        c = Hj.classes(g)
        cols.append({r: v for r, v in enumerate(c) if v})
    F = IntMatrix(Hj.p, Hi.p, cols)
    rel_j = Hj.relations()
    for l, d in enumerate(Hi.orders):
        if d and any(d * v for v in cols[l].values()):
            image = [d * cols[l].get(r, 0) for r in range(Hj.p)]
            if image not in rel_j:
                raise InvariantViolation(f"f^{{{i},{j}}}_{n} does not respect the relation of summand {l}")
    return InducedMap(i, j, n, F, Hi.orders, Hj.orders)


def induced_map(C: FilteredComplex, i: int, j: int, n: int) -> InducedMap:
    """``f^{i,j}_n`` in summand coordinates of ``H_n(K^i)`` and ``H_n(K^j)``."""
    _check_step(C, i, j)
    if i > j:
        raise FiltrationError(f"induced map needs i <= j, got {i} > {j}")
    return C.cached(("induced", i, j, n), lambda: _induced(C, i, j, n))


def _image_lattice(C: FilteredComplex, i: int, j: int, n: int) -> Lattice:
    """``im f^{i,j}_n`` plus the relations of ``H_n(K^j)``, in its presentation."""

    def compute():
        Hj = homology_presentation(C, j, n)
        rel = Hj.relations()
        if i == 0:
            return rel
        F = induced_map(C, i, j, n).matrix
        return Lattice(Hj.p, list(F.columns) + list(rel.basis_columns))

    return C.cached(("image", i, j, n), compute)


def _lift_to_step(C: FilteredComplex, i: int, j: int, n: int, coords: Sequence[int]) -> Dict[int, int]:
    """A cycle of ``K^i`` whose class in ``H_n(K^j)`` has the given coordinates."""
    Hj = homology_presentation(C, j, n)
    if i == j:
        return Hj.cycle_of(coords)
    Hi = homology_presentation(C, i, n)
    F = induced_map(C, i, j, n).matrix
    rel = [{l: d} if d else {} for l, d in enumerate(Hj.orders)]
    A = IntMatrix(Hj.p, Hi.p + Hj.p, list(F.columns) + rel)
    x = solve_integer(A, list(coords))
    if x is None:
        raise InvariantViolation(f"class {list(coords)} is not born by step {i}")
    return Hi.cycle_of(x[: Hi.p])


def _group(C: FilteredComplex, num: Lattice, den: Lattice, birth: int, j: int, n: int) -> AbelianGroup:
    grp = quotient_presentation(num, den)
    cycles = [_lift_to_step(C, birth, j, n, g) for g in grp.generators] if birth > 0 else []
    out = _with_generators(C, grp, n, cycles)
    return out


def persistent_group(C: FilteredComplex, i: int, j: int, n: int) -> AbelianGroup:
    """``H^{i,j}_n``, the image of ``H_n(K^i)`` in ``H_n(K^j)``.

    Generators are cycles of ``K^i``.
    """
    _check_step(C, i, j)
    if i > j:
        raise FiltrationError(f"persistent group needs i <= j, got {i} > {j}")
    Hj = homology_presentation(C, j, n)
    return _group(C, _image_lattice(C, i, j, n), Hj.relations(), i, j, n)


def _triple_lattice(C: FilteredComplex, i: int, j: int, k: int, n: int) -> Lattice:
    def compute():
        A = _image_lattice(C, i, j, n)
        if j == k:
            return lattice_intersection(A, _image_lattice(C, i - 1, j, n))
        F = induced_map(C, j, k, n).matrix
        B = preimage_lattice(F, _image_lattice(C, i - 1, k, n))
        return lattice_intersection(A, B)

    return C.cached(("triple", i, j, k, n), compute)


def _check_triple(C: FilteredComplex, i: int, j: int, k: int) -> None:
    _check_step(C, i, j, k)
    if i < 1 or not i <= j <= k:
        raise FiltrationError(f"triple group needs 1 <= i <= j <= k, got ({i}, {j}, {k})")


def triple_group(C: FilteredComplex, i: int, j: int, k: int, n: int) -> AbelianGroup:
    """``H^{i,j,k}_n``: classes of ``H^{i,j}_n`` that lie in ``H^{i-1,k}_n`` by step ``k``."""
    _check_triple(C, i, j, k)
    Hj = homology_presentation(C, j, n)
    return _group(C, _triple_lattice(C, i, j, k, n), Hj.relations(), i, j, n)


def bd_group_via(C: FilteredComplex, i: int, j: int, k: int, n: int) -> AbelianGroup:
    """``H^{i,j,k}_n / H^{i,j,k-1}_n`` for ``i <= j < k``; isomorphic to ``BD^{i,k}_n``."""
    _check_triple(C, i, j, k)
    if j >= k:
        raise FiltrationError(f"need j < k, got j={j}, k={k}")
    num = _triple_lattice(C, i, j, k, n)
    den = _triple_lattice(C, i, j, k - 1, n)
    return _group(C, num, den, i, j, n)


def bd_group(C: FilteredComplex, i: int, k: Optional[int], n: int) -> AbelianGroup:
    """Classes born at ``i`` dying entering ``k``; ``k=None`` for classes never dying.

    The infinite case is ``H^{i,m}_n / H^{i-1,m}_n``.
    """
    if k is INF:
        _check_step(C, i)
        if i < 1:
            raise FiltrationError("birth index must be at least 1")
        m = C.steps
        num = _image_lattice(C, i, m, n)
        den = _image_lattice(C, i - 1, m, n)
        return _group(C, num, den, i, m, n)
    _check_step(C, i, k)
    if not 1 <= i < k:
        raise FiltrationError(f"BD group needs 1 <= i < k, got i={i}, k={k}")
    return bd_group_via(C, i, i, k, n)


# ---------------------------------------------------------------------------
# Field coefficients


def field_betti(C: FilteredComplex, i: int, j: int, n: int, characteristic: int = 0) -> int:
    """Rank of ``H^{i,j}_n`` with coefficients in Q or Z/p."""
    _check_step(C, i, j)
    if i == 0:
        return 0
    rows_i = set(C.positions_upto(n, i))
    cols_i = C.positions_upto(n, i)
    dn = C.boundary(n).submatrix(range(C.size(n - 1)), cols_i)
    z = len(cols_i) - field_rank(dn, characteristic)
    cols_j = C.positions_upto(n + 1, j)
    dn1 = C.boundary(n + 1).submatrix(range(C.size(n)), cols_j)
    outside = [r for r in range(C.size(n)) if r not in rows_i]
    b = field_rank(dn1, characteristic) - field_rank(dn1.submatrix(outside, range(len(cols_j))), characteristic)
    return z - b


def field_mu(C: FilteredComplex, i: int, k: int, n: int, characteristic: int = 0) -> int:
    """Number of field-coefficient bars ``[i, k)`` in degree ``n``."""
    _check_step(C, i, k)
    if not 1 <= i < k:
        raise FiltrationError(f"mu needs 1 <= i < k, got i={i}, k={k}")

    def b(a, c):
        return field_betti(C, a, c, n, characteristic)

    return (b(i, k - 1) - b(i, k)) - (b(i - 1, k - 1) - b(i - 1, k))


def field_barcode(C: FilteredComplex, characteristic: int = 0) -> Counter:
    """Multiset of ``(n, birth, death)`` over a field; ``death=None`` for infinite bars."""
    bars: Counter = Counter()
    m = C.steps
    for n in range(C.max_dim + 1):
        for i in range(1, m + 1):
            for k in range(i + 1, m + 1):
                mu = field_mu(C, i, k, n, characteristic)
                if mu:
                    bars[(n, i, k)] += mu
            inf = field_betti(C, i, m, n, characteristic) - field_betti(C, i - 1, m, n, characteristic)
            if inf:
                bars[(n, i, None)] += inf
    return bars


# ---------------------------------------------------------------------------
# Barcodes


@dataclass(frozen=True)
class Bar:
    dim: int
    birth: int
    death: Optional[int]
    label: str = "Z"
    generator: Optional[Tuple[Tuple[object, int], ...]] = field(default=None, compare=True)

    def __post_init__(self):
        if self.death is not None and self.death < self.birth:
            raise ValueError(f"bar dies at {self.death} before its birth at {self.birth}")
        if self.label != "Z":
            if not self.label.startswith("Z_") or int(self.label[2:]) < 2:
                raise ValueError(f"bad bar label {self.label!r}")

    @property
    def is_torsion(self) -> bool:
        return self.label != "Z"

    def sort_key(self):
        return (self.dim, self.birth, math.inf if self.death is None else self.death, self.label)

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "birth": self.birth, "death": self.death, "label": self.label}
        if self.generator is not None:
            out["generator"] = [[_jsonable(c), v] for c, v in self.generator]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Bar":
        gen = d.get("generator")
        if gen is not None:
            gen = tuple((_tuplify(c), int(v)) for c, v in gen)
        return cls(int(d["dim"]), int(d["birth"]), None if d["death"] is None else int(d["death"]), d["label"], gen)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


@dataclass(frozen=True)
class Barcode:
    steps: int
    bars: Tuple[Bar, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bars", tuple(sorted(self.bars, key=Bar.sort_key)))

    def in_degree(self, n: int) -> List[Bar]:
        return [b for b in self.bars if b.dim == n]

    def free_part(self) -> Counter:
        """``(n, birth, death)`` multiset of the Z-labelled bars."""
        return Counter((b.dim, b.birth, b.death) for b in self.bars if not b.is_torsion)

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps({"steps": self.steps, "bars": [b.to_dict() for b in self.bars]}, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Barcode":
        d = json.loads(text)
        return cls(int(d["steps"]), tuple(Bar.from_dict(b) for b in d["bars"]))

    def to_svg(self, width: int = 640) -> str:
        return _barcode_svg(self, width)


def _barcode_svg(bc: Barcode, width: int) -> str:
    margin, label_w, row_h, gap = 20, 48, 14, 26
    m = max(bc.steps, 1)
    plot_w = width - 2 * margin - label_w
    unit = plot_w / (m + 0.5)

    def x_at(t: float) -> float:
        return margin + label_w + (t - 1) * unit

    degrees = sorted({b.dim for b in bc.bars}) or [0]
    parts: List[str] = []
    y = margin
    for n in degrees:
        bars = bc.in_degree(n)
        band_h = max(len(bars), 1) * row_h + 8
        parts.append(f'<text x="{margin}" y="{y + band_h / 2 + 4:.1f}" font-size="12">H{n}</text>')
        parts.append(
            f'<rect x="{margin + label_w - 4}" y="{y}" width="{plot_w + 8}" height="{band_h}" '
            f'fill="none" stroke="#bbbbbb"/>'
        )
        for r, b in enumerate(bars):
            yy = y + 4 + r * row_h + row_h / 2
            x0 = x_at(b.birth)
            color = "#c0392b" if b.is_torsion else "#1f4e79"
            if b.death is None:
                x1 = x_at(m + 0.5)
                parts.append(
                    f'<line x1="{x0:.1f}" y1="{yy:.1f}" x2="{x1 - 6:.1f}" y2="{yy:.1f}" stroke="{color}" stroke-width="3"/>'
                )
                parts.append(
                    f'<polygon points="{x1:.1f},{yy:.1f} {x1 - 8:.1f},{yy - 5:.1f} {x1 - 8:.1f},{yy + 5:.1f}" fill="{color}"/>'
                )
            else:
                x1 = x_at(b.death)
                parts.append(
                    f'<line x1="{x0:.1f}" y1="{yy:.1f}" x2="{x1:.1f}" y2="{yy:.1f}" stroke="{color}" stroke-width="3"/>'
                )
            if b.is_torsion:
                parts.append(
                    f'<text x="{x0 + 2:.1f}" y="{yy - 3:.1f}" font-size="9" fill="{color}">{b.label}</text>'
                )
        y += band_h + gap
    axis_y = y - gap + 12
    for t in range(1, m + 1):
        parts.append(f'<text x="{x_at(t) - 3:.1f}" y="{axis_y:.1f}" font-size="10">{t}</text>')
    height = axis_y + margin
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height:.0f}" '
        f'viewBox="0 0 {width} {height:.0f}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *parts, "</svg>"]) + "\n"


def _bars_of(group: AbelianGroup, n: int, i: int, k: Optional[int], generators, reduction) -> List[Bar]:
    out = []
    for label, gen in zip(group.labels(), group.generators or [None] * len(group.labels())):
        rep = None
        if generators and gen is not None:
            chain = reduction.map_chain_back(gen) if reduction is not None else gen
            rep = tuple(sorted(chain.coeffs.items(), key=lambda kv: repr(kv[0])))
        out.append(Bar(n, i, k, label, rep))
    return out


def barcode(C: FilteredComplex, *, generators: bool = False, reduction: Optional[Reduction] = None) -> Barcode:
    """One bar per invariant factor of every ``BD^{i,k}_n`` (``k`` finite or infinite).

    When ``reduction`` is given, ``C`` must be its target; bar generators are
    then mapped back to the reduction's source complex.
    """
    if reduction is not None and reduction.dst is not C:
        raise ValueError("the complex must be the target of the supplied reduction")
    m = C.steps
    bars: List[Bar] = []
    for n in range(C.max_dim + 1):
        for i in range(1, m + 1):
            for k in list(range(i + 1, m + 1)) + [INF]:
                g = bd_group(C, i, k, n)
                if not g.is_trivial():
                    bars.extend(_bars_of(g, n, i, k, generators, reduction))
    return Barcode(m, tuple(bars))


# ---------------------------------------------------------------------------
# Generators and transfer through reductions


def _require_order(rho: Reduction, bound: int, what: str) -> None:
    if rho.homotopy_order > bound:
        raise TransferError(
            f"{what}: homotopy order {rho.homotopy_order} exceeds {bound}", measured_order=rho.homotopy_order
        )


def persistent_generators(rho: Reduction, i: int, j: int, n: int) -> List[ChainVector]:
    """Generators of ``H^{i,j}_n`` computed on the reduced complex, as cycles of ``rho.src``."""
    _require_order(rho, 0, "persistent generators need a filtration-compatible reduction")
    grp = persistent_group(rho.dst, i, j, n)
    return [rho.map_chain_back(g) for g in grp.generators]


@dataclass(frozen=True)
class TransferWitness:
    i: int
    j: int
    n: int
    order: int
    left_group: AbelianGroup
    right_group: AbelianGroup
    forward: IntMatrix
    backward: IntMatrix


def _measured_order(rho: Reduction) -> Tuple[int, bool]:
    rep = validate_reduction(rho)
    return max(rep.measured_order, 0), rep.f_filtered and rep.g_filtered


def _transfer_matrix(rho_from: Reduction, rho_to: Reduction, i: int, j: int, n: int) -> IntMatrix:
    """Classes of ``f_to g_from`` applied to the persistent generators of ``rho_from.dst``."""
    A, B = rho_from.dst, rho_to.dst
    grp = persistent_group(A, i, j, n)
    Hb = homology_presentation(B, j, n)
    cols = []
    for gen in grp.generators:
        mid = rho_from.apply_g(n, A.positions_of(gen))
        img = rho_to.apply_f(n, mid)
        cols.append({r: v for r, v in enumerate(Hb.classes(img)) if v})
    return IntMatrix(Hb.p, len(cols), cols)


def transfer_persistent_groups(eq: Equivalence, i: int, j: int, n: int) -> TransferWitness:
    """Isomorphism ``H^{i,j}_n(left.dst) -> H^{i,j}_n(right.dst)`` through an equivalence.

    Allowed when both homotopies have order ``s <= j - i`` and ``f``, ``g``
    are filtered; the maps are ``f_right g_left`` and ``f_left g_right``.
    """
    s_left, filt_left = _measured_order(eq.left)
    s_right, filt_right = _measured_order(eq.right)
    s = max(s_left, s_right)
    if not (filt_left and filt_right):
        raise TransferError("equivalence maps are not filtered morphisms", measured_order=s)
    if j - i < s:
        raise TransferError(f"homotopy order {s} exceeds j - i = {j - i}", measured_order=s)
    A, B = eq.left.dst, eq.right.dst
    ga = persistent_group(A, i, j, n)
    gb = persistent_group(B, i, j, n)
    if ga != gb:
        raise InvariantViolation(f"persistent groups differ under transfer: {ga} vs {gb}")
    fwd = _transfer_matrix(eq.left, eq.right, i, j, n)
    bwd = _transfer_matrix(eq.right, eq.left, i, j, n)
    for M, target in ((fwd, B), (bwd, A)):
        span = Lattice(M.rows, list(M.columns) + list(homology_presentation(target, j, n).relations().basis_columns))
        if span != _image_lattice(target, i, j, n):
            raise InvariantViolation("transfer map is not onto the persistent group")
    return TransferWitness(i, j, n, s, ga, gb, fwd, bwd)


theorem1_transfer = transfer_persistent_groups
