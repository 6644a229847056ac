"""Monic and Gorenstein-projective representations of acyclic quivers over finite-dimensional algebras."""

from .algebra import (
    Algebra,
    AlgebraError,
    bound_quiver_algebra,
    field_algebra,
    from_structure_constants,
    opposite,
    path_algebra,
    path_algebra_over,
    triangular_extension,
    truncated_polynomial,
)
from .exactlin import GF2, Field, Matrix
from .homological import GPVerdict, Route, Status, classify, ext, gp_decide_base, resolution
from .modules import AModule, Bimodule
from .monic import (
    check_monic,
    coker_phi,
    condition_G,
    gp_decide_path_algebra,
    gp_decide_triangular,
    perp_oracle,
    theorem_5_1_harness,
    theorem_5_4_harness,
)
from .quiver import BoundQuiverPresentation, Path, Quiver, RelationElement, paths_between, tensor_quiver
from .repmod import Representation, split_top_vertex, to_flat_module
from .window import complete_resolution_window, verify_window

__version__ = "0.1.0"

__all__ = [
    "AModule", "Algebra", "AlgebraError", "Bimodule", "BoundQuiverPresentation", "Field", "GF2", "GPVerdict",
    "Matrix", "Path", "Quiver", "RelationElement", "Representation", "Route", "Status", "bound_quiver_algebra",
    "check_monic", "classify", "coker_phi", "complete_resolution_window", "condition_G", "ext", "field_algebra",
    "from_structure_constants", "gp_decide_base", "gp_decide_path_algebra",
    "gp_decide_triangular", "opposite", "path_algebra", "path_algebra_over", "paths_between", "perp_oracle",
    "resolution", "split_top_vertex", "tensor_quiver", "theorem_5_1_harness", "theorem_5_4_harness",
    "to_flat_module", "triangular_extension", "truncated_polynomial", "verify_window",
]
