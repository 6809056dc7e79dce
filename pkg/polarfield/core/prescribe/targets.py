"""Isotropic phase targets around prescribed singularities.

All values are given in stored beveled edge orientation: split edges follow
their face's counterclockwise order and jump edges run from the slot 0 face
to the slot 1 face of their mesh edge.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.bevel.operators import vertex_face_entries
from polarfield.core.exceptions import (
    BoundaryEdgeError,
    BoundaryVertexError,
    DegeneratePlacementError,
)
from polarfield.core.mesh.geometry import face_point, flatten_flap, gaussian_curvature
from polarfield.core.mesh.surface import next_halfedge, prev_halfedge
from polarfield.core.prescribe.types import (
    IsotropyTargets,
    Prescription,
    SingularityKind,
    TargetGroup,
)
from polarfield.core.prescribe.validate import PLACEMENT_TOLERANCE

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)


def subtended_angle(a: complex, b: complex, s: complex) -> float:
    """Return counterclockwise angle at ``s`` from ``a`` to ``b``."""
    return float(np.angle((b - s) * np.conj(a - s)))


def winding_targets(corners: npt.ArrayLike, s: complex, index: int) -> npt.NDArray[np.float64]:
    """Return face targets for corner points and a singular point inside.

    The angles at ``s`` subtended by the three edges are positive and sum to
    ``2*pi``; the last one is completed from the other two so the sum is exact.

    Raises:
        DegeneratePlacementError: ``s`` lies on or outside the triangle.
    """
    z = np.asarray(corners, dtype=np.complex128)
    scale = max(abs(z[1] - z[0]), abs(z[2] - z[1]), abs(z[0] - z[2]))
    for position in range(3):
        a, b = z[position], z[(position + 1) % 3]
        # signed distance of s to edge a -> b, positive inside
        distance = ((b - a).conjugate() * (s - a)).imag / abs(b - a)
        if distance < PLACEMENT_TOLERANCE * scale:
            msg = "Singular point is not strictly inside the face"
            raise DegeneratePlacementError(msg)
    first = subtended_angle(z[0], z[1], s)
    second = subtended_angle(z[1], z[2], s)
    return index * np.array([first, second, 2.0 * np.pi - first - second])


def face_targets(
    mesh: SurfaceMesh,
    face: int,
    bary: npt.ArrayLike,
    index: int,
) -> TargetGroup:
    """Return the three split edge targets of a singular face."""
    s = face_point(mesh, face, bary)
    return TargetGroup(
        kind=SingularityKind.FACE,
        element=face,
        edges=np.arange(3 * face, 3 * face + 3, dtype=np.int64),
        values=winding_targets(mesh.corner_coords[face], s, index),
        flaps=[],
        face=face,
    )


def edge_targets(bm: BeveledMesh, edge: int, t: float, index: int) -> TargetGroup:
    """Return targets around a singular point on an interior edge.

    Split edges along the singular edge carry ``-pi * I`` in stored
    orientation, which is ``+pi * I`` along the edge-face cycle, and both
    jumps carry zero.

    Raises:
        BoundaryEdgeError: Edge is on the boundary.
    """
    mesh = bm.mesh
    if mesh.is_boundary_edge[edge]:
        msg = f"Edge {edge} is on the boundary"
        raise BoundaryEdgeError(msg, edge=edge)
    flap = flatten_flap(mesh, edge)
    z_k, z_i, z_j, z_l = flap["points"]
    s = (1.0 - t) * z_k + t * z_i
    h_f, h_g = (int(h) for h in mesh.edge_halfedges[edge])
    v0, v1 = (int(v) for v in mesh.edges[edge])
    edges = np.array(
        [
            h_f,
            next_halfedge(h_f),
            prev_halfedge(h_f),
            h_g,
            next_halfedge(h_g),
            prev_halfedge(h_g),
            bm.jump_edge(edge, v0),
            bm.jump_edge(edge, v1),
        ],
        dtype=np.int64,
    )
    values = index * np.array(
        [
            -np.pi,
            subtended_angle(z_i, z_j, s),
            subtended_angle(z_j, z_k, s),
            -np.pi,
            subtended_angle(z_k, z_l, s),
            subtended_angle(z_l, z_i, s),
            0.0,
            0.0,
        ],
    )
    return TargetGroup(
        kind=SingularityKind.EDGE,
        element=edge,
        edges=edges,
        values=values,
        flaps=[edge],
        face=-1,
    )


def vertex_targets(bm: BeveledMesh, vertex: int, index: int, n: int = 1) -> TargetGroup:
    """Return targets on the one ring flaps and jumps of a singular vertex.

    The total rotation ``2*pi*I - N*kappa`` is spread over the outer edges
    proportionally to the corner angles at the vertex. Spokes take half of
    the adjacent outer value with opposite sign, outer jumps are zero and
    the jumps at the vertex carry the mean of the two neighbouring outer
    values.

    Raises:
        BoundaryVertexError: Vertex is on the boundary.
    """
    mesh = bm.mesh
    if mesh.is_boundary_vertex[vertex]:
        msg = f"Vertex {vertex} is on the boundary"
        raise BoundaryVertexError(msg, vertex=vertex)
    fan = mesh.vertex_fans[vertex]
    valence = len(fan)
    angles = mesh.corner_angles.reshape(-1)[fan]
    kappa = gaussian_curvature(mesh)[vertex]
    outer = angles * (2.0 * np.pi * index - n * kappa) / angles.sum()

    edges: list[int] = []
    values: list[float] = []
    flaps: list[int] = []
    for position, halfedge in enumerate(fan):
        halfedge = int(halfedge)
        edges += [halfedge, int(next_halfedge(halfedge)), int(prev_halfedge(halfedge))]
        values += [-0.5 * outer[position], outer[position], -0.5 * outer[position]]
        flaps.append(int(mesh.halfedge_edge[halfedge]))

    for position, (jump, sign) in enumerate(vertex_face_entries(bm, vertex)):
        following = int(fan[(position + 1) % valence])
        spoke = int(mesh.halfedge_edge[following])
        edges.append(jump)
        values.append(sign * 0.5 * (outer[position] + outer[(position + 1) % valence]))
        edges.append(bm.jump_edge(spoke, int(mesh.heads[following])))
        values.append(0.0)

    return TargetGroup(
        kind=SingularityKind.VERTEX,
        element=vertex,
        edges=np.asarray(edges, dtype=np.int64),
        values=np.asarray(values, dtype=np.float64),
        flaps=flaps,
        face=-1,
    )


def assemble_targets(prescription: Prescription, bm: BeveledMesh) -> IsotropyTargets:
    """Collect targets of every singularity in prescription order."""
    groups: list[TargetGroup] = []
    for item in prescription.singularities:
        kind, element, index = item["kind"], item["element"], item["index"]
        if kind is SingularityKind.FACE:
            bary = item.get("bary", [1 / 3, 1 / 3, 1 / 3])
            groups.append(face_targets(bm.mesh, element, bary, index))
        elif kind is SingularityKind.EDGE:
            groups.append(edge_targets(bm, element, item["t"], index))
        else:
            groups.append(vertex_targets(bm, element, index, prescription.n))
    targets = IsotropyTargets(groups)
    LOGGER.debug("Assembled %d isotropy targets in %d groups", len(targets), len(groups))
    return targets
