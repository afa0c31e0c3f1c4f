import pytest
from hypothesis import given

from conftest import FRAME_FILES, random_complex, seeds, torsion_complex
from morseward.chain import (
    Cell,
    ChainVector,
    Equivalence,
    FilteredComplex,
    Reduction,
    apply_boundary,
    compose_reductions,
    dumps_complex,
    identity_reduction,
    loads_complex,
    permutation_reduction,
    sort_by_filtration,
    subcomplex_at,
    validate_complex,
    validate_reduction,
)
from morseward.exceptions import ComplexFormatError, ComplexMismatchError, DimensionMismatchError, FiltrationError
from morseward.image import build_simplicial, read_image
from morseward.intlinalg import IntMatrix
from morseward.oracle import snf_homology


def triangle() -> FilteredComplex:
    """Boundary of a 2-simplex filled in at step 2."""
    verts = [Cell(v, 0, 1) for v in "abc"]
    edges = [Cell("ab", 1, 1), Cell("ac", 1, 1), Cell("bc", 1, 1)]
    tri = [Cell("abc", 2, 2)]
    d1 = IntMatrix.from_dense([[-1, -1, 0], [1, 0, -1], [0, 1, 1]])
    d2 = IntMatrix.from_dense([[1], [-1], [1]])
    return FilteredComplex([verts, edges, tri], {1: d1, 2: d2})


def test_complex_structure():
    C = triangle()
    assert C.counts() == [3, 3, 1]
    assert C.steps == 2 and C.max_dim == 2
    assert C.euler_characteristic() == 1
    assert C.cell("bc").dim == 1
    assert validate_complex(C).ok


def test_shape_mismatch_rejected():
    with pytest.raises(DimensionMismatchError):
        FilteredComplex([[Cell("a", 0)], [Cell("e", 1)]], {1: IntMatrix.zeros(2, 1)})


def test_validate_complex_reports_each_problem():
    bad = FilteredComplex(
        [[Cell("a", 0, 2), Cell("a", 0, 1)], [Cell("e", 1, 1)], [Cell("t", 2, 1)]],
        {1: IntMatrix.from_dense([[1], [1]]), 2: IntMatrix.from_dense([[1]])},
    )
    text = " | ".join(validate_complex(bad).violations)
    assert "appears twice" in text
    assert "breaks the filtration" in text
    assert "d_1 d_2 != 0" in text


def test_chain_vectors_and_boundary():
    C = triangle()
    x = C.chain(1, {"ab": 1, "bc": 1})
    assert apply_boundary(C, x) == C.chain(0, {"a": -1, "c": 1})
    assert (x + -x).is_zero()
    assert x.scale(2).coeffs == {"ab": 2, "bc": 2}
    with pytest.raises(KeyError):
        C.chain(1, {"zz": 1})
    with pytest.raises(DimensionMismatchError):
        x + C.chain(0, {"a": 1})


def test_subcomplex_at():
    C = triangle()
    assert subcomplex_at(C, 1).counts() == [3, 3]
    assert subcomplex_at(C, 2) is C
    assert subcomplex_at(C, 0).counts() == []
    with pytest.raises(FiltrationError):
        subcomplex_at(C, 3)


def test_identity_reduction_validates():
    rep = validate_reduction(identity_reduction(triangle()))
    assert rep.ok and rep.measured_order == 0


def test_validate_reduction_flags_broken_homotopy():
    C = triangle()
    good = identity_reduction(C)
    h = dict(good.h)
    h[0] = IntMatrix.from_dense([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    broken = Reduction(C, C, good.f, good.g, h, 0)
    rep = validate_reduction(broken)
    assert not rep.ok
    assert any("(2)" in v for v in rep.violations)
    assert any("(3)" in v for v in rep.violations)


def test_compose_with_identity_and_mismatch():
    C, E = triangle(), torsion_complex()
    rho = compose_reductions(identity_reduction(C), identity_reduction(C))
    assert validate_reduction(rho).ok
    with pytest.raises(ComplexMismatchError):
        compose_reductions(identity_reduction(C), identity_reduction(E))


def test_equivalence_requires_common_source():
    C, E = triangle(), torsion_complex()
    Equivalence(C, identity_reduction(C), identity_reduction(C))
    with pytest.raises(ComplexMismatchError):
        Equivalence(C, identity_reduction(C), identity_reduction(E))


@given(seeds)
def test_sort_by_filtration_is_a_valid_reduction(seed):
    C = random_complex(seed)
    D, perms = sort_by_filtration(C)
    for n in range(D.max_dim + 1):
        assert D.filts(n) == sorted(D.filts(n))
    if D is not C:
        assert validate_reduction(permutation_reduction(C, D, perms)).ok


@given(seeds)
def test_text_round_trip(seed):
    C = random_complex(seed)
    assert loads_complex(dumps_complex(C)) == C


def test_text_format_errors():
    with pytest.raises(ComplexFormatError):
        loads_complex("")
    with pytest.raises(ComplexFormatError):
        loads_complex("morseward-complex 1\nbogus 1\n")
    with pytest.raises(ComplexFormatError):
        loads_complex('morseward-complex 1\ncell 0 1 "a" null\nbd "x" "a" 1\n')


def test_text_ids_with_spaces_survive():
    C = FilteredComplex([[Cell("a b", 0, 1, "some label")]])
    assert loads_complex(dumps_complex(C)) == C


def test_chain_vector_equality_ignores_zeros():
    assert ChainVector(1, {"a": 1, "b": 0}) == ChainVector(1, {"a": 1})


def test_first_step_is_first_frame(framed_blob):
    frame1 = build_simplicial(read_image(FRAME_FILES[0]))
    assert subcomplex_at(framed_blob, 1).counts() == frame1.counts()


@given(seeds)
def test_sorting_preserves_homology(seed):
    C = random_complex(seed)
    D, _ = sort_by_filtration(C)
    for n in range(C.max_dim + 1):
        assert snf_homology(D, n) == snf_homology(C, n)
