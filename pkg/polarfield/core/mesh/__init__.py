"""Mesh loading, validation and intrinsic geometry."""

from polarfield.core.mesh.geometry import (
    barycentric,
    connection_form,
    face_point,
    flatten_flap,
    gaussian_curvature,
    local_basis,
    transport_angle,
)
from polarfield.core.mesh.io import load_mesh, read_mesh
from polarfield.core.mesh.surface import SurfaceMesh
from polarfield.core.mesh.topology import boundary_loops, homology_generators

__all__ = [
    "SurfaceMesh",
    "barycentric",
    "boundary_loops",
    "connection_form",
    "face_point",
    "flatten_flap",
    "gaussian_curvature",
    "homology_generators",
    "load_mesh",
    "local_basis",
    "read_mesh",
    "transport_angle",
]
