"""Intrinsic geometry: frames, curvature, flaps and the discrete connection."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, TypedDict

import numpy as np

from polarfield.core.exceptions import BoundaryEdgeError
from polarfield.core.mesh.types import FlapGeometry, LocalBasis

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)


class FlapTable(TypedDict):
    """Flap data for all interior edges, aligned with ``mesh.interior_edges``.

    Local corner indices refer to positions inside the respective face.
    """

    edges: npt.NDArray[np.int64]
    face_f: npt.NDArray[np.int64]
    face_g: npt.NDArray[np.int64]
    corner_f_k: npt.NDArray[np.int64]
    corner_f_i: npt.NDArray[np.int64]
    corner_f_j: npt.NDArray[np.int64]
    corner_g_i: npt.NDArray[np.int64]
    corner_g_k: npt.NDArray[np.int64]
    corner_g_l: npt.NDArray[np.int64]
    rotation_f: npt.NDArray[np.complex128]
    rotation_g: npt.NDArray[np.complex128]
    point_i: npt.NDArray[np.complex128]
    point_j: npt.NDArray[np.complex128]
    point_l: npt.NDArray[np.complex128]
    connection: npt.NDArray[np.float64]


def local_basis(mesh: SurfaceMesh) -> LocalBasis:
    """Return orthonormal frame per face.

    ``e1`` points from corner 0 to corner 1 and ``e2`` completes a right
    handed frame with the face normal.
    """
    p = mesh.positions
    f = mesh.faces
    origin = p[f[:, 0]]
    first = p[f[:, 1]] - origin
    e1 = first / np.linalg.norm(first, axis=1, keepdims=True)
    normal = np.cross(first, p[f[:, 2]] - origin)
    normal /= np.linalg.norm(normal, axis=1, keepdims=True)
    e2 = np.cross(normal, e1)
    return LocalBasis(
        origin=origin,
        e1=e1,
        e2=e2,
        normal=normal,
        corner_coords=mesh.corner_coords,
    )


def vertex_angle_sums(mesh: SurfaceMesh) -> npt.NDArray[np.float64]:
    """Return sum of corner angles around every vertex."""
    return np.bincount(
        mesh.faces.reshape(-1),
        weights=mesh.corner_angles.reshape(-1),
        minlength=mesh.n_vertices,
    )


def gaussian_curvature(mesh: SurfaceMesh) -> npt.NDArray[np.float64]:
    """Return angle defect per vertex.

    Interior vertices get ``2*pi - sum(angles)``, boundary vertices get the
    geodesic turning ``pi - sum(angles)``.
    """
    angle_sums = vertex_angle_sums(mesh)
    full_turn = np.where(mesh.is_boundary_vertex, np.pi, 2.0 * np.pi)
    return full_turn - angle_sums


def flap_table(mesh: SurfaceMesh) -> FlapTable:
    """Unfold every interior edge flap at once.

    For edge ``(k, i)`` with ``k < i`` face ``f`` holds halfedge ``k -> i`` and
    face ``g`` holds ``i -> k``. Rotations map face local coordinates (shifted
    to ``k``) into the flap plane.
    """
    edges = mesh.interior_edges
    h_f = mesh.edge_halfedges[edges, 0]
    h_g = mesh.edge_halfedges[edges, 1]
    face_f = h_f // 3
    face_g = h_g // 3
    corner_f_k = h_f % 3
    corner_f_i = (corner_f_k + 1) % 3
    corner_f_j = (corner_f_k + 2) % 3
    corner_g_i = h_g % 3
    corner_g_k = (corner_g_i + 1) % 3
    corner_g_l = (corner_g_i + 2) % 3

    coords = mesh.corner_coords
    z_f_k = coords[face_f, corner_f_k]
    z_g_k = coords[face_g, corner_g_k]
    direction_f = coords[face_f, corner_f_i] - z_f_k
    direction_g = coords[face_g, corner_g_i] - z_g_k
    rotation_f = np.conj(direction_f) / np.abs(direction_f)
    rotation_g = np.conj(direction_g) / np.abs(direction_g)

    return FlapTable(
        edges=edges,
        face_f=face_f,
        face_g=face_g,
        corner_f_k=corner_f_k,
        corner_f_i=corner_f_i,
        corner_f_j=corner_f_j,
        corner_g_i=corner_g_i,
        corner_g_k=corner_g_k,
        corner_g_l=corner_g_l,
        rotation_f=rotation_f,
        rotation_g=rotation_g,
        point_i=np.abs(direction_f).astype(np.complex128),
        point_j=rotation_f * (coords[face_f, corner_f_j] - z_f_k),
        point_l=rotation_g * (coords[face_g, corner_g_l] - z_g_k),
        connection=np.angle(direction_g / direction_f),
    )


def flatten_flap(mesh: SurfaceMesh, edge: int) -> FlapGeometry:
    """Unfold the two triangles sharing ``edge`` into a common plane.

    Raises:
        BoundaryEdgeError: Edge has a single adjacent face.
    """
    if mesh.is_boundary_edge[edge]:
        msg = f"Edge {edge} is a boundary edge"
        raise BoundaryEdgeError(msg, edge=edge)
    h_f, h_g = (int(h) for h in mesh.edge_halfedges[edge])
    face_f, face_g = h_f // 3, h_g // 3
    c_k, c_i, c_j = h_f % 3, (h_f + 1) % 3, (h_f + 2) % 3
    g_i, g_k, g_l = h_g % 3, (h_g + 1) % 3, (h_g + 2) % 3
    z_f = mesh.corner_coords[face_f]
    z_g = mesh.corner_coords[face_g]

    direction_f = z_f[c_i] - z_f[c_k]
    direction_g = z_g[g_i] - z_g[g_k]
    rotation_f = np.conj(direction_f) / abs(direction_f)
    rotation_g = np.conj(direction_g) / abs(direction_g)
    points = np.array(
        [
            0.0,
            abs(direction_f),
            rotation_f * (z_f[c_j] - z_f[c_k]),
            rotation_g * (z_g[g_l] - z_g[g_k]),
        ],
        dtype=np.complex128,
    )
    faces = mesh.faces
    return FlapGeometry(
        edge=edge,
        face_f=face_f,
        face_g=face_g,
        vertices=(
            int(faces[face_f, c_k]),
            int(faces[face_f, c_i]),
            int(faces[face_f, c_j]),
            int(faces[face_g, g_l]),
        ),
        points=points,
        rotation_f=complex(rotation_f),
        rotation_g=complex(rotation_g),
        connection=float(np.angle(direction_g / direction_f)),
    )


def to_flap(mesh: SurfaceMesh, flap: FlapGeometry, face: int, z: complex) -> complex:
    """Map a face local point into flap coordinates."""
    vertex_k = flap["vertices"][0]
    origin = mesh.corner_coords[face, mesh.corner(face, vertex_k) % 3]
    rotation = flap["rotation_f"] if face == flap["face_f"] else flap["rotation_g"]
    return complex(rotation * (z - origin))


def connection_form(mesh: SurfaceMesh) -> npt.NDArray[np.float64]:
    """Return connection angle per edge.

    Interior edges carry the rotation from the slot 0 face frame to the slot 1
    face frame, ``w_g = exp(i r) w_f``. Boundary edges are NaN.
    """
    table = flap_table(mesh)
    connection = np.full(mesh.n_edges, np.nan)
    connection[table["edges"]] = table["connection"]
    return connection


def transport_angle(mesh: SurfaceMesh, edge: int, from_face: int) -> float:
    """Return angle that carries vectors from ``from_face`` across ``edge``.

    Raises:
        BoundaryEdgeError: Edge is on the boundary.
        ValueError: Face is not adjacent to edge.
    """
    if mesh.is_boundary_edge[edge]:
        msg = f"Edge {edge} is a boundary edge"
        raise BoundaryEdgeError(msg, edge=edge)
    face_f, face_g = mesh.edge_faces(edge)
    angle = flatten_flap(mesh, edge)["connection"]
    if from_face == face_f:
        return angle
    if from_face == face_g:
        return -angle
    msg = f"Face {from_face} is not adjacent to edge {edge}"
    raise ValueError(msg)


def face_point(mesh: SurfaceMesh, face: int, bary: npt.ArrayLike) -> complex:
    """Return face local coordinate of a barycentric point."""
    return complex(np.dot(np.asarray(bary, dtype=np.float64), mesh.corner_coords[face]))


def barycentric(mesh: SurfaceMesh, face: int, z: complex) -> npt.NDArray[np.float64]:
    """Return barycentric coordinates of a face local point."""
    corners = mesh.corner_coords[face]
    system = np.array([corners.real, corners.imag, np.ones(3)])
    return np.linalg.solve(system, np.array([z.real, z.imag, 1.0]))


def face_gradients(mesh: SurfaceMesh) -> npt.NDArray[np.complex128]:
    """Return complex gradients of the three hat functions per face.

    A scalar with corner values ``s`` has gradient ``sum(s * grads)`` where the
    complex number ``x + iy`` stands for the vector ``(x, y)``.
    """
    z = mesh.corner_coords
    opposite = np.roll(z, -2, axis=1) - np.roll(z, -1, axis=1)
    area = mesh.face_areas[:, None]
    # rotate the opposite edge by a quarter turn
    return 1j * opposite / (2.0 * area)
