"""Combinatorial hexahedral meshing of quad spheres by quad flips."""

from ._backend import HAVE_NATIVE
from .compat import PartialMesh, is_compatible
from .complex import Hexahedron, Quadrangulation, boundary_of, build_quadrangulation, cube_boundary
from .errors import (
    BudgetExhausted,
    HexShellError,
    InvalidQuadrangulation,
    NotFound,
    OddQuadCount,
    OutOfMemoryBudget,
    ParseError,
    TableFormatError,
    WouldCreateNonSimpleBoundary,
)
from .flips import FlipSite, enumerate_flips, perform_flip
from .iso import are_isomorphic, automorphism_group, canonical_form, signature
from .search import (SearchLimits, Solution, insert_buffer_layer, search_exhaustive, search_with_table,
                     search_with_table_deepening)
from .tablegen import ShellingTable, generate_shellings, verify_greedy_completeness
from .verify import ValidationReport, verify_mesh, verify_shelling

__version__ = "0.1.0"

__all__ = [
    "HAVE_NATIVE",
    "BudgetExhausted",
    "FlipSite",
    "HexShellError",
    "Hexahedron",
    "InvalidQuadrangulation",
    "NotFound",
    "OddQuadCount",
    "OutOfMemoryBudget",
    "ParseError",
    "PartialMesh",
    "Quadrangulation",
    "SearchLimits",
    "ShellingTable",
    "Solution",
    "TableFormatError",
    "ValidationReport",
    "WouldCreateNonSimpleBoundary",
    "are_isomorphic",
    "automorphism_group",
    "boundary_of",
    "build_quadrangulation",
    "canonical_form",
    "cube_boundary",
    "enumerate_flips",
    "generate_shellings",
    "insert_buffer_layer",
    "is_compatible",
    "perform_flip",
    "search_exhaustive",
    "search_with_table",
    "search_with_table_deepening",
    "signature",
    "verify_greedy_completeness",
    "verify_mesh",
    "verify_shelling",
]
