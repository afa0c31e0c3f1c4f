"""Integer persistent homology of digital images through discrete Morse reductions."""

from .chain import (
    Cell,
    ChainVector,
    Equivalence,
    FilteredComplex,
    Reduction,
    compose_reductions,
    dumps_complex,
    identity_reduction,
    loads_complex,
    subcomplex_at,
    validate_complex,
    validate_reduction,
)
from .dvf import VectorField, check_vector_field, filtered_max_dvf, is_admissible, max_admissible_dvf
from .estimators import ImageComplexBuilder, MorseReducer, PersistentHomology
from .image import (
    DigitalImage,
    FiltrationSpec,
    build_cubical,
    build_simplicial,
    frames_filtration,
    graylevel_filtration,
    parse_image,
    read_image,
    sweep_filtration,
)
from .intlinalg import AbelianGroup, IntMatrix, Lattice, smith_normal_form
from .morse import invert_d21, reduce_complex, reduce_filtered_complex, reduce_one_degree
from .persist import (
    Bar,
    Barcode,
    barcode,
    bd_group,
    field_mu,
    homology_at,
    induced_map,
    persistent_generators,
    persistent_group,
    theorem1_transfer,
    transfer_persistent_groups,
    triple_group,
)

__version__ = "0.1.0"
