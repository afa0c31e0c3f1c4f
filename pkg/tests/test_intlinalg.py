import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from conftest import int_matrices
from morseward.exceptions import ContainmentError, DimensionMismatchError
from morseward.intlinalg import (
    AbelianGroup,
    IntMatrix,
    Lattice,
    hermite_basis,
    integer_kernel,
    lattice_intersection,
    preimage_lattice,
    quotient_presentation,
    rank,
    smith_normal_form,
    solve_integer,
)


def naive_matmul(A, B):
    a, b = A.to_dense(), B.to_dense()
    return [[sum(a[i][k] * b[k][j] for k in range(A.cols)) for j in range(B.cols)] for i in range(A.rows)]


# -- IntMatrix ---------------------------------------------------------------


def test_dense_round_trip_and_shape():
    A = IntMatrix.from_dense([[1, 0, 2], [0, -3, 0]])
    assert A.shape == (2, 3)
    assert A.to_dense() == [[1, 0, 2], [0, -3, 0]]
    assert A.nnz == 3
    assert A.T.to_dense() == [[1, 0], [0, -3], [2, 0]]
    assert A[1, 1] == -3 and A[0, 1] == 0


def test_zero_entries_are_not_stored():
    A = IntMatrix.from_entries(2, 2, {(0, 0): 0, (1, 1): 4})
    assert A.nnz == 1
    assert IntMatrix.identity(3).is_identity()
    assert IntMatrix.zeros(2, 5).is_zero()


@given(int_matrices(), st.data())
def test_matmul_matches_schoolbook(A, data):
    B = data.draw(int_matrices(max_cols=5, rows=A.cols))
    assert (A @ B).to_dense() == naive_matmul(A, B)


def test_shape_errors():
    with pytest.raises(DimensionMismatchError):
        IntMatrix.identity(2) @ IntMatrix.identity(3)
    with pytest.raises(DimensionMismatchError):
        IntMatrix.identity(2) + IntMatrix.identity(3)


def test_apply_and_submatrix():
    A = IntMatrix.from_dense([[1, 2], [3, 4], [5, 6]])
    assert A.apply([1, -1]) == {0: -1, 1: -1, 2: -1}
    assert A.submatrix([2, 0], [1]).to_dense() == [[6], [2]]


# -- Smith normal form ---------------------------------------------------------


def test_snf_textbook_example():
    A = IntMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_normal_form(A)
    assert snf.diagonal == [2, 6, 12]
    assert (snf.U @ A @ snf.V) == snf.S


def test_snf_of_reduced_differential_is_identity():
    snf = smith_normal_form(IntMatrix.from_dense([[-1, 0], [-2, 1]]))
    assert snf.diagonal == [1, 1]


@given(int_matrices(max_rows=6, max_cols=6, lo=-9, hi=9))
def test_snf_properties(A):
    snf = smith_normal_form(A)
    assert snf.U @ A @ snf.V == snf.S
    assert (snf.U @ snf.U_inv).is_identity() and (snf.V @ snf.V_inv).is_identity()
    for (r, c), _ in snf.S.entries():
        assert r == c
    d = snf.invariant_factors
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert snf.diagonal[len(d):] == [0] * (len(snf.diagonal) - len(d))


@given(int_matrices(max_rows=5, max_cols=5, lo=-6, hi=6))
def test_snf_invariants_agree_with_sympy(A):
    assume(A.rows and A.cols)
    ours = smith_normal_form(A).invariant_factors
    theirs = [abs(int(x)) for x in invariant_factors(Matrix(A.to_dense()), domain=ZZ) if x != 0]
    assert ours == sorted(theirs)


# -- lattices ------------------------------------------------------------------


def test_hermite_basis_is_canonical():
    L = hermite_basis(IntMatrix.from_dense([[2, 0, 1], [0, 2, 1]]))
    assert L.basis_vectors() == [(1, 1), (0, 2)]
    assert L == Lattice(2, [(1, 1), (2, 0)])


@given(int_matrices(max_rows=4, max_cols=5), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_lattice_membership_of_combinations(A, coeffs):
    L = Lattice.from_matrix(A)
    v = A.apply(coeffs[: A.cols])
    assert v in L
    assert L.rank == rank(A)


@given(int_matrices(max_rows=4, max_cols=6))
def test_hermite_basis_independent_of_generator_order(A):
    L1 = Lattice(A.rows, A.columns)
    L2 = Lattice(A.rows, list(reversed(A.columns)) + [{}])
    assert L1 == L2


def test_integer_kernel_examples():
    assert integer_kernel(IntMatrix.from_dense([[2, 4]])).basis_vectors() in ([(2, -1)], [(-2, 1)])
    K = integer_kernel(IntMatrix.from_dense([[1, 1]]))
    assert K.rank == 1 and (1, -1) in K


@given(int_matrices(max_rows=4, max_cols=6))
def test_integer_kernel_is_saturated(A):
    K = integer_kernel(A)
    for col in K.basis_columns:
        assert not A.apply(col)
    assert K.rank == A.cols - rank(A)
    # Z^n / ker is torsion free exactly when the kernel is saturated
    assert quotient_presentation(Lattice.full(A.cols), K).torsion == ()


def test_solve_integer_examples():
    A = IntMatrix.from_dense([[1, 0], [0, 2]])
    assert solve_integer(A, [1, 4]) == [1, 2]
    assert solve_integer(A, [1, 3]) is None
    with pytest.raises(DimensionMismatchError):
        solve_integer(A, [1])


@given(int_matrices(max_rows=4, max_cols=5), st.lists(st.integers(-4, 4), min_size=5, max_size=5))
def test_solve_integer_solves_consistent_systems(A, x):
    b = A.apply(x[: A.cols])
    sol = solve_integer(A, [b.get(r, 0) for r in range(A.rows)])
    assert sol is not None
    assert A.apply(sol) == b


def test_lattice_intersection_example():
    L = lattice_intersection(Lattice(2, [(2, 0), (0, 1)]), Lattice(2, [(1, 0), (0, 2)]))
    assert L == Lattice(2, [(2, 0), (0, 2)])


@given(st.data(), st.integers(0, 3), st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_lattice_intersection_membership(data, r, v):
    A = data.draw(int_matrices(max_cols=3, rows=r))
    B = data.draw(int_matrices(max_cols=3, rows=r))
    L1, L2 = Lattice.from_matrix(A), Lattice.from_matrix(B)
    inter = lattice_intersection(L1, L2)
    assert L1.contains_lattice(inter) and L2.contains_lattice(inter)
    vec = v[: A.rows]
    assert (vec in inter) == (vec in L1 and vec in L2)


@given(st.data(), st.integers(0, 3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_preimage_lattice_membership(data, r, x):
    F = data.draw(int_matrices(max_cols=3, rows=r))
    B = data.draw(int_matrices(max_cols=3, rows=r))
    L = Lattice.from_matrix(B)
    P = preimage_lattice(F, L)
    vec = x[: F.cols]
    image = F.apply(vec)
    assert (vec in P) == ([image.get(r, 0) for r in range(F.rows)] in L)


def test_quotient_presentation_example():
    G = quotient_presentation(Lattice.full(2), Lattice(2, [(2, 0), (0, 4)]))
    assert G.invariants == (0, (2, 4))
    assert G.labels() == ["Z_2", "Z_4"]
    assert str(G) == "Z_2 + Z_4"


def test_quotient_requires_containment():
    with pytest.raises(ContainmentError):
        quotient_presentation(Lattice(2, [(2, 0)]), Lattice(2, [(1, 0)]))


@given(int_matrices(max_rows=4, max_cols=4, lo=-5, hi=5))
def test_cokernel_presentation_matches_snf(A):
    G = quotient_presentation(Lattice.full(A.rows), Lattice.from_matrix(A))
    d = smith_normal_form(A).invariant_factors
    assert G.torsion == tuple(x for x in d if x > 1)
    assert G.rank == A.rows - len(d)
    assert len(G.generators) == G.rank + len(G.torsion)


def test_abelian_group_helpers():
    G = AbelianGroup(2, (3,))
    assert G.order is None and not G.is_trivial()
    assert AbelianGroup(0, (2, 4)).order == 8
    assert str(AbelianGroup()) == "0"


def test_rank_over_fields():
    A = IntMatrix.from_dense([[2, 0], [0, 3]])
    assert rank(A, 0) == 2
    assert rank(A, 2) == 1
    assert rank(A, 3) == 1
    with pytest.raises(ValueError):
        rank(A, 4)


def test_solve_lower_triangular():
    assert solve_integer(IntMatrix.from_dense([[1, 0], [-2, 1]]), [1, 0]) == [1, 2]
