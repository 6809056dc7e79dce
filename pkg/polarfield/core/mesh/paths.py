"""Split polylines of surface points into per face segments and edge crossings."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.exceptions import PathError
from polarfield.core.mesh.geometry import face_point, flatten_flap, to_flap
from polarfield.core.mesh.types import (
    PathCrossing,
    PathPiece,
    PathPieceKind,
    PathSegment,
    PathVertexPassing,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh

Waypoint = tuple[int, "npt.NDArray[np.float64]"]

CROSSING_TOLERANCE = 1e-9


def shared_edge(mesh: SurfaceMesh, face_a: int, face_b: int) -> int:
    """Return interior edge shared by two faces.

    Raises:
        PathError: Faces are not neighbours.
    """
    common = set(mesh.halfedge_edge[3 * face_a : 3 * face_a + 3].tolist()) & set(
        mesh.halfedge_edge[3 * face_b : 3 * face_b + 3].tolist(),
    )
    for edge in sorted(common):
        if not mesh.is_boundary_edge[edge]:
            return int(edge)
    msg = f"Faces {face_a} and {face_b} do not share an edge"
    raise PathError(msg)


def edge_point_bary(mesh: SurfaceMesh, face: int, edge: int, t: float) -> npt.NDArray[np.float64]:
    """Return barycentric coordinates in ``face`` of the edge point at ``t``."""
    bary = np.zeros(3)
    v0, v1 = mesh.edges[edge]
    bary[mesh.corner(face, int(v0)) % 3] = 1.0 - t
    bary[mesh.corner(face, int(v1)) % 3] = t
    return bary


def crossing_parameter(
    mesh: SurfaceMesh,
    start: Waypoint,
    end: Waypoint,
) -> tuple[int, float]:
    """Return crossed edge and its parameter for a step between neighbours.

    Raises:
        PathError: The straight step leaves the two triangles.
    """
    face_a, bary_a = start
    face_b, bary_b = end
    edge = shared_edge(mesh, face_a, face_b)
    flap = flatten_flap(mesh, edge)
    p = to_flap(mesh, flap, face_a, face_point(mesh, face_a, bary_a))
    q = to_flap(mesh, flap, face_b, face_point(mesh, face_b, bary_b))
    if abs(p.imag - q.imag) < CROSSING_TOLERANCE * mesh.bbox_diagonal:
        msg = f"Step between faces {face_a} and {face_b} runs along their edge"
        raise PathError(msg)
    s = p.imag / (p.imag - q.imag)
    point = p + s * (q - p)
    t = point.real / flap["points"][1].real
    if not (-CROSSING_TOLERANCE <= s <= 1.0 + CROSSING_TOLERANCE) or not (0.0 < t < 1.0):
        msg = f"Step between faces {face_a} and {face_b} leaves their flap"
        raise PathError(msg)
    return edge, float(t)


def _waypoint_vertex(mesh: SurfaceMesh, waypoint: Waypoint) -> int:
    face, bary = waypoint
    corner = int(np.argmax(bary))
    if bary[corner] >= 1.0 - CROSSING_TOLERANCE:
        return int(mesh.faces[face, corner])
    return -1


def split_path(
    mesh: SurfaceMesh,
    waypoints: Sequence[Waypoint],
    closed: bool = False,
) -> list[PathPiece]:
    """Split a waypoint polyline into segments and crossings.

    Consecutive waypoints must lie in the same face or in two faces that
    share an interior edge. A waypoint placed on a vertex may be followed by
    a waypoint in any other face around that vertex.

    Args:
        mesh (SurfaceMesh): Mesh carrying the path.
        waypoints (Sequence[Waypoint]): ``(face, barycentric)`` points.
        closed (bool): Connect the last waypoint back to the first.

    Returns:
        list[PathPiece]: Pieces in path order.
    """
    points = [(int(face), np.asarray(bary, dtype=np.float64)) for face, bary in waypoints]
    if closed:
        points.append(points[0])
    pieces: list[PathPiece] = []
    for start, end in zip(points[:-1], points[1:], strict=True):
        face_a, bary_a = start
        face_b, bary_b = end
        if face_a == face_b:
            pieces.append(
                PathSegment(kind=PathPieceKind.SEGMENT, face=face_a, start=bary_a, end=bary_b),
            )
            continue
        vertex = _waypoint_vertex(mesh, start)
        if vertex >= 0 and vertex in mesh.faces[face_b]:
            pieces.append(
                PathVertexPassing(
                    kind=PathPieceKind.VERTEX,
                    vertex=vertex,
                    from_face=face_a,
                    to_face=face_b,
                ),
            )
            start_b = np.zeros(3)
            start_b[mesh.corner(face_b, vertex) % 3] = 1.0
            pieces.append(
                PathSegment(kind=PathPieceKind.SEGMENT, face=face_b, start=start_b, end=bary_b),
            )
            continue
        edge, t = crossing_parameter(mesh, start, end)
        pieces.append(
            PathSegment(
                kind=PathPieceKind.SEGMENT,
                face=face_a,
                start=bary_a,
                end=edge_point_bary(mesh, face_a, edge, t),
            ),
        )
        pieces.append(
            PathCrossing(
                kind=PathPieceKind.CROSSING,
                edge=edge,
                from_face=face_a,
                to_face=face_b,
                t=t,
            ),
        )
        pieces.append(
            PathSegment(
                kind=PathPieceKind.SEGMENT,
                face=face_b,
                start=edge_point_bary(mesh, face_b, edge, t),
                end=bary_b,
            ),
        )
    return pieces
