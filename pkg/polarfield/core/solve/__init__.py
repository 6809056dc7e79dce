"""Phase, scale and integration solves."""

from polarfield.core.solve.alignment import solve_alignment
from polarfield.core.solve.exponents import interpolate_indices
from polarfield.core.solve.integrate import integrate_field
from polarfield.core.solve.part_edge import compute_part_edge_theta
from polarfield.core.solve.qp import solve_bounded_qp
from polarfield.core.solve.scales import assemble_scale_constraints, face_scale_targets
from polarfield.core.solve.sigma import solve_sigma
from polarfield.core.solve.theta import cycle_constraints, solve_theta

__all__ = [
    "assemble_scale_constraints",
    "compute_part_edge_theta",
    "cycle_constraints",
    "face_scale_targets",
    "integrate_field",
    "interpolate_indices",
    "solve_alignment",
    "solve_bounded_qp",
    "solve_sigma",
    "solve_theta",
]
