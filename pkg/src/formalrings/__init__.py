"""Finite formal matrix rings: construction, validation, Nakayama permutations and glueing."""

from .analysis import (
    Permutation,
    check_criterion,
    check_essential_criterion,
    classify,
    concatenate,
    detect_nakayama,
    detect_nakayama_direct,
    essential_socle_direct,
    residue_field_iso,
    row_socle,
)
from .constructions import (
    compatible_finite_fields,
    cycle_ring,
    glue,
    glue_general,
    prepare_glue,
    ring_from_name,
    serial_quiver_algebra,
    support_pattern_ring,
    trivial_extension,
)
from .errors import FormalRingError
from .formal import FormalMatrixRing, build, corner, flatten, opposite_formal
from .rings import FiniteRing, galois_field, truncated_polynomial, zmod
from .specio import emit_spec, load_ring, parse_spec

__version__ = "0.1.0"
