import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from morseward.chain import Cell, FilteredComplex
from morseward.image import build_simplicial, frames_filtration, read_image
from morseward.intlinalg import IntMatrix
from morseward.oracle import RandomComplexSpec, default_seed, random_filtered_complex

DATA = Path(__file__).parent / "data"
FRAME_FILES = [DATA / f"blob_frame{i}.txt" for i in range(1, 5)]

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# 5x5 boundary matrix of the worked discrete vector field example
WORKED_M = [
    [0, 0, -1, -1, 0],
    [0, -1, 0, 0, 1],
    [0, 0, 0, 1, 1],
    [0, -1, 1, 0, -1],
    [-1, 1, -1, 0, 0],
]


@pytest.fixture
def worked_matrix():
    return IntMatrix.from_dense(WORKED_M)


def two_degree_complex(M: IntMatrix, filts=None) -> FilteredComplex:
    rows = [Cell(f"r{i}", 0, 1 if filts is None else filts[0][i]) for i in range(M.rows)]
    cols = [Cell(f"c{j}", 1, 1 if filts is None else filts[1][j]) for j in range(M.cols)]
    return FilteredComplex([rows, cols], {1: M})


def torsion_complex() -> FilteredComplex:
    """Vertex v and loop e at step 1, a 2-cell t with d(t) = 2e at step 2."""
    return FilteredComplex(
        [[Cell("v", 0, 1)], [Cell("e", 1, 1)], [Cell("t", 2, 2)]],
        {1: IntMatrix.zeros(1, 1), 2: IntMatrix.from_dense([[2]])},
    )


@pytest.fixture
def torsion_E():
    return torsion_complex()


def framed_blob_complex() -> FilteredComplex:
    img, spec = frames_filtration([read_image(p) for p in FRAME_FILES])
    return build_simplicial(img, spec)


@pytest.fixture(scope="session")
def framed_blob():
    return framed_blob_complex()


RING = "###\n#.#\n###\n"


def random_complex(seed: int, **kw) -> FilteredComplex:
    kw.setdefault("max_cells", (10, 20, 12))
    kw.setdefault("steps", 5)
    return random_filtered_complex(RandomComplexSpec(seed=seed, **kw))


seeds = st.integers(min_value=0, max_value=10**9).map(lambda s: s ^ default_seed())


@st.composite
def int_matrices(draw, max_rows=6, max_cols=6, lo=-3, hi=3, rows=None):
    r = draw(st.integers(0, max_rows)) if rows is None else rows
    c = draw(st.integers(0, max_cols))
    entry = st.one_of(st.just(0), st.integers(lo, hi))
    data = draw(st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r))
    return IntMatrix.from_dense(data, cols=c)


@st.composite
def unit_heavy_matrices(draw, max_rows=7, max_cols=7):
    """Sparse matrices with mostly ±1 entries, where vector fields have room."""
    return draw(int_matrices(max_rows, max_cols, -1, 1))
