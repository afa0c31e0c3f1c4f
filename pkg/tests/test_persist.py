import xml.etree.ElementTree as ET
from collections import Counter

import pytest
from hypothesis import assume, given

from conftest import random_complex, seeds
from morseward.chain import Cell, Equivalence, FilteredComplex, apply_boundary, identity_reduction
from morseward.dvf import VectorField
from morseward.exceptions import FiltrationError, TransferError
from morseward.image import build_simplicial, parse_image
from morseward.intlinalg import IntMatrix, rank
from morseward.morse import reduce_filtered_complex, reduce_one_degree
from morseward.persist import (
    INF,
    Bar,
    Barcode,
    barcode,
    bd_group,
    bd_group_via,
    field_barcode,
    field_mu,
    homology_at,
    homology_presentation,
    induced_map,
    persistent_generators,
    persistent_group,
    theorem1_transfer,
    transfer_persistent_groups,
    _triple_lattice,
    triple_group,
)


def normalized(M: IntMatrix, orders):
    return [[v % d if d else v for v in row] for row, d in zip(M.to_dense(), orders)]


def torsion_free(C):
    return all(not homology_at(C, i, n).torsion for i in range(1, C.steps + 1) for n in range(C.max_dim + 1))


def two_point_complex():
    """Vertices a, b at step 1 joined by an edge e at step 2."""
    return FilteredComplex(
        [[Cell("a", 0, 1), Cell("b", 0, 1)], [Cell("e", 1, 2)]],
        {1: IntMatrix.from_dense([[-1], [1]])},
    )


# -- fixed examples ------------------------------------------------------------


def test_torsion_bars(torsion_E):
    bc = barcode(torsion_E)
    assert [(b.dim, b.birth, b.death, b.label) for b in bc.bars] == [
        (0, 1, None, "Z"),
        (1, 1, 2, "Z"),
        (1, 1, None, "Z_2"),
    ]
    assert str(bd_group(torsion_E, 1, 2, 1)) == "Z"
    assert str(bd_group(torsion_E, 1, INF, 1)) == "Z_2"
    assert str(persistent_group(torsion_E, 1, 2, 1)) == "Z_2"


def test_torsion_field_bars(torsion_E):
    assert field_mu(torsion_E, 1, 2, 1) == 1
    assert field_barcode(torsion_E, 0)[(1, 1, 2)] == 1
    # mod 2 the loop survives, so there is no finite bar
    assert field_barcode(torsion_E, 2)[(1, 1, 2)] == 0
    assert field_barcode(torsion_E, 2)[(1, 1, None)] == 1


def test_framed_blob_groups(framed_blob):
    assert str(homology_at(framed_blob, 4, 0)) == "Z^7"
    assert str(homology_at(framed_blob, 4, 1)) == "Z^4"
    assert str(persistent_group(framed_blob, 1, 4, 0)) == "Z^4"
    assert str(persistent_group(framed_blob, 2, 4, 1)) == "Z^2"


def test_homology_generators_are_cycles(framed_blob):
    H = homology_at(framed_blob, 4, 1)
    for g in H.generators:
        assert apply_boundary(framed_blob, g).is_zero()


def test_index_errors(torsion_E):
    with pytest.raises(FiltrationError):
        persistent_group(torsion_E, 2, 1, 0)
    with pytest.raises(FiltrationError):
        persistent_group(torsion_E, 0, 3, 0)
    with pytest.raises(FiltrationError):
        bd_group(torsion_E, 2, 2, 0)
    with pytest.raises(FiltrationError):
        bd_group(torsion_E, 0, INF, 0)
    with pytest.raises(FiltrationError):
        triple_group(torsion_E, 1, 2, 1, 0)


# -- algebraic laws ------------------------------------------------------------


@given(seeds)
def test_functoriality(seed):
    C = random_complex(seed)
    m = C.steps
    for n in range(C.max_dim + 1):
        for i in range(1, m + 1):
            assert induced_map(C, i, i, n).matrix.is_identity()
            for j in range(i, m + 1):
                for k in range(j, m + 1):
                    direct = induced_map(C, i, k, n)
                    via = induced_map(C, j, k, n).matrix @ induced_map(C, i, j, n).matrix
                    assert normalized(direct.matrix, direct.target_orders) == normalized(via, direct.target_orders)


@given(seeds)
def test_persistent_rank_is_image_rank(seed):
    C = random_complex(seed)
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps + 1):
            for j in range(i, C.steps + 1):
                F = induced_map(C, i, j, n)
                Hj = homology_presentation(C, j, n)
                free_rows = [r for r, d in enumerate(Hj.orders) if d == 0]
                image_rank = rank(F.matrix.submatrix(free_rows, range(F.matrix.cols)))
                assert persistent_group(C, i, j, n).rank == image_rank


@given(seeds)
def test_bd_group_independent_of_middle_index(seed):
    C = random_complex(seed, steps=4)
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps + 1):
            for k in range(i + 1, C.steps + 1):
                ref = bd_group(C, i, k, n)
                for j in range(i, k):
                    assert bd_group_via(C, i, j, k, n) == ref


@given(seeds)
def test_triple_group_boundary_cases(seed):
    C = random_complex(seed, steps=4)
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps + 1):
            for j in range(i, C.steps + 1):
                # with k = j the preimage condition cuts H^{i,j} down to H^{i-1,j}
                assert triple_group(C, i, j, j, n) == persistent_group(C, i - 1, j, n)


@given(seeds)
def test_free_bars_match_field_bars(seed):
    C = random_complex(seed)
    assume(torsion_free(C))
    assert barcode(C).free_part() == field_barcode(C, 0)


@given(seeds)
def test_mu_is_rank_of_bd_without_torsion(seed):
    C = random_complex(seed)
    assume(torsion_free(C))
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps):
            for k in range(i + 1, C.steps + 1):
                assert field_mu(C, i, k, n) == bd_group(C, i, k, n).rank


@given(seeds)
def test_reduction_preserves_barcode(seed):
    C = random_complex(seed)
    rho = reduce_filtered_complex(C)
    assert barcode(rho.dst) == barcode(C)


# -- generators and transfer -----------------------------------------------------


def test_barcode_generators_live_in_the_source(framed_blob):
    rho = reduce_filtered_complex(framed_blob)
    bc = barcode(rho.dst, generators=True, reduction=rho)
    assert Counter((b.dim, b.birth, b.death) for b in bc.bars) == barcode(rho.dst).free_part()
    for bar in bc.bars:
        chain = framed_blob.chain(bar.dim, dict(bar.generator))
        assert apply_boundary(framed_blob, chain).is_zero()
        assert max(framed_blob.cell(c).filt for c in chain.coeffs) <= bar.birth


def test_barcode_rejects_foreign_reduction():
    C = build_simplicial(parse_image("#\n"))
    rho = reduce_filtered_complex(C)
    assert rho.dst.num_cells == 1
    with pytest.raises(ValueError):
        barcode(C, reduction=rho)


def test_persistent_generators_map_to_cycles(framed_blob):
    rho = reduce_filtered_complex(framed_blob)
    gens = persistent_generators(rho, 2, 4, 1)
    assert len(gens) == 2
    H = homology_presentation(framed_blob, 4, 1)
    coords = [H.classes(framed_blob.positions_of(g)) for g in gens]
    assert rank(IntMatrix.from_dense(coords)) == 2


def test_order_one_reduction_blocks_generators():
    C = two_point_complex()
    rho = reduce_one_degree(C, 1, VectorField(((1, 0),)))
    assert rho.homotopy_order == 1
    with pytest.raises(TransferError) as err:
        persistent_generators(rho, 1, 2, 0)
    assert err.value.measured_order == 1


def test_transfer_respects_homotopy_order():
    C = two_point_complex()
    rho = reduce_one_degree(C, 1, VectorField(((1, 0),)))
    eq = Equivalence(C, rho, identity_reduction(C))
    assert theorem1_transfer is transfer_persistent_groups
    with pytest.raises(TransferError):
        transfer_persistent_groups(eq, 1, 1, 0)
    w = transfer_persistent_groups(eq, 1, 2, 0)
    assert w.order == 1
    assert str(w.left_group) == "Z"
    assert w.forward.to_dense() in ([[1]], [[-1]])


@given(seeds)
def test_transfer_between_reductions(seed):
    C = random_complex(seed)
    eq = Equivalence(C, reduce_filtered_complex(C), identity_reduction(C))
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps + 1):
            w = transfer_persistent_groups(eq, i, C.steps, n)
            assert w.left_group == w.right_group


# -- serialization -------------------------------------------------------------


def test_bar_validation():
    with pytest.raises(ValueError):
        Bar(0, 3, 2)
    with pytest.raises(ValueError):
        Bar(0, 1, 2, "Z_1")
    with pytest.raises(ValueError):
        Bar(0, 1, 2, "Q")


def test_json_round_trip(torsion_E):
    bc = barcode(reduce_filtered_complex(torsion_E).dst)
    text = bc.to_json()
    assert '"death": null' in text
    assert Barcode.from_json(text) == bc


def test_json_round_trip_with_generators(framed_blob):
    rho = reduce_filtered_complex(framed_blob)
    bc = barcode(rho.dst, generators=True, reduction=rho)
    assert Barcode.from_json(bc.to_json()) == bc


def test_svg_is_well_formed(torsion_E):
    svg = barcode(torsion_E).to_svg()
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert svg.count("<polygon") == 2
    assert "Z_2" in svg
    assert ET.fromstring(Barcode(3).to_svg()).tag.endswith("svg")


def test_torsion_groups_by_step(torsion_E):
    assert str(homology_at(torsion_E, 2, 1)) == "Z_2"
    F = induced_map(torsion_E, 1, 2, 1)
    assert F.target_orders == (2,)
    assert F([1]) == [1]
    assert str(triple_group(torsion_E, 1, 1, 2, 1)) == "Z"


@given(seeds)
def test_triple_lattices_grow_with_k(seed):
    C = random_complex(seed, steps=4)
    m = C.steps
    for n in range(C.max_dim + 1):
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                for k in range(j, m):
                    assert _triple_lattice(C, i, j, k + 1, n).contains_lattice(_triple_lattice(C, i, j, k, n))


@given(seeds)
def test_generators_are_born_in_time_and_round_trip(seed):
    C = random_complex(seed)
    rho = reduce_filtered_complex(C)
    for n in range(C.max_dim + 1):
        for i in range(1, C.steps + 1):
            reduced = persistent_group(rho.dst, i, C.steps, n).generators
            for x, g in zip(reduced, persistent_generators(rho, i, C.steps, n)):
                assert all(C.cell(c).filt <= i for c in g.coeffs)
                assert rho.map_chain_forward(g) == x
