"""Power-linear field evaluation, measurement and export."""

from polarfield.core.field.energy import dirichlet_energy
from polarfield.core.field.power_linear import (
    PowerLinearField,
    classify,
    face_coefficients,
    locate_singularity,
    pointwise_phase_gradient,
)
from polarfield.core.field.quality import compare_triangulations
from polarfield.core.field.tracing import trace_streamline, trace_streamlines
from polarfield.core.field.trivial_connections import trivial_connections
from polarfield.core.field.winding import edge_loop, face_loop, vertex_loop, winding_number

__all__ = [
    "PowerLinearField",
    "classify",
    "compare_triangulations",
    "dirichlet_energy",
    "edge_loop",
    "face_coefficients",
    "face_loop",
    "locate_singularity",
    "pointwise_phase_gradient",
    "trace_streamline",
    "trace_streamlines",
    "trivial_connections",
    "vertex_loop",
    "winding_number",
]
