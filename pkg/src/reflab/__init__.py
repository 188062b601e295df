"""Root systems, dihedral subgroups and reflection orders of Coxeter groups."""

from .core import (
    CoxeterMatrix,
    RootSlice,
    affine_a,
    generate_slice,
    load_matrix,
    lookup,
    root_to_reflection,
    type_a,
    universal,
)
from .orders import (
    Backward,
    Lexicographic,
    TruncatedOrder,
    build_E,
    initial_segment_word,
    sort_truncation,
    upper_s_conjugate,
    verify_reflection_order,
)
from .scalars import Mode

__version__ = "0.1.0"
