"""Beveled cell complex.

Every face keeps its own copy of its corners. Corner ``3f + c`` is vertex
``faces[f, c]`` inside face ``f``. Split edge ``3f + c`` runs from corner
``3f + c`` to the next corner of the same face. Jump edges connect the two
copies of an edge endpoint: jump ``3F + 2 * ie + s`` sits at endpoint ``s`` of
the ``ie``-th interior edge and runs from the slot 0 face to the slot 1 face.

Beveled faces are the original faces, then one edge-face per interior edge,
then one vertex-face per interior vertex.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from polarfield.core.bevel.types import BeveledEdgeKind, BeveledFaceKind
from polarfield.core.mesh.surface import next_halfedge

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)


class BeveledMesh:
    """Corner, split/jump edge and face bookkeeping for a mesh."""

    def __init__(self, mesh: SurfaceMesh) -> None:
        """Index beveled elements of ``mesh``."""
        self._mesh = mesh
        n_faces = mesh.n_faces
        n_interior = len(mesh.interior_edges)

        self._corner_vertex = mesh.faces.reshape(-1).copy()
        self._corner_face = np.repeat(np.arange(n_faces), 3)

        split_tail = np.arange(3 * n_faces)
        split_head = np.asarray(next_halfedge(split_tail))

        h_f = mesh.edge_halfedges[mesh.interior_edges, 0]
        h_g = mesh.edge_halfedges[mesh.interior_edges, 1]
        jump_tail = np.empty(2 * n_interior, dtype=np.int64)
        jump_head = np.empty(2 * n_interior, dtype=np.int64)
        # endpoint v0: tail of h_f in f, head of h_g in g
        jump_tail[0::2] = h_f
        jump_head[0::2] = next_halfedge(h_g)
        # endpoint v1: head of h_f in f, tail of h_g in g
        jump_tail[1::2] = next_halfedge(h_f)
        jump_head[1::2] = h_g

        self._edge_tail = np.concatenate([split_tail, jump_tail])
        self._edge_head = np.concatenate([split_head, jump_head])
        self._edge_kind = np.concatenate(
            [
                np.full(3 * n_faces, BeveledEdgeKind.SPLIT, dtype=np.int64),
                np.full(2 * n_interior, BeveledEdgeKind.JUMP, dtype=np.int64),
            ],
        )

        self._interior_vertices = np.flatnonzero(~mesh.is_boundary_vertex)
        self._vertex_face_index = np.full(mesh.n_vertices, -1, dtype=np.int64)
        self._vertex_face_index[self._interior_vertices] = (
            n_faces + n_interior + np.arange(len(self._interior_vertices))
        )
        self._face_kind = np.concatenate(
            [
                np.full(n_faces, BeveledFaceKind.FACE, dtype=np.int64),
                np.full(n_interior, BeveledFaceKind.EDGE, dtype=np.int64),
                np.full(len(self._interior_vertices), BeveledFaceKind.VERTEX, dtype=np.int64),
            ],
        )
        LOGGER.debug(
            "Beveled mesh with %d corners, %d edges, %d faces",
            self.n_corners,
            self.n_edges,
            self.n_faces,
        )

    @property
    def mesh(self) -> SurfaceMesh:
        """Returns underlying mesh."""
        return self._mesh

    @property
    def n_corners(self) -> int:
        """Returns beveled vertex count."""
        return 3 * self._mesh.n_faces

    @property
    def n_split_edges(self) -> int:
        """Returns split edge count."""
        return 3 * self._mesh.n_faces

    @property
    def n_jump_edges(self) -> int:
        """Returns jump edge count."""
        return 2 * len(self._mesh.interior_edges)

    @property
    def n_edges(self) -> int:
        """Returns beveled edge count."""
        return len(self._edge_tail)

    @property
    def n_faces(self) -> int:
        """Returns beveled face count."""
        return len(self._face_kind)

    @property
    def corner_vertex(self) -> npt.NDArray[np.int64]:
        """Returns original vertex per corner."""
        return self._corner_vertex

    @property
    def corner_face(self) -> npt.NDArray[np.int64]:
        """Returns original face per corner."""
        return self._corner_face

    @property
    def edge_tail(self) -> npt.NDArray[np.int64]:
        """Returns tail corner per beveled edge."""
        return self._edge_tail

    @property
    def edge_head(self) -> npt.NDArray[np.int64]:
        """Returns head corner per beveled edge."""
        return self._edge_head

    @property
    def edge_kind(self) -> npt.NDArray[np.int64]:
        """Returns ``BeveledEdgeKind`` per beveled edge."""
        return self._edge_kind

    @property
    def face_kind(self) -> npt.NDArray[np.int64]:
        """Returns ``BeveledFaceKind`` per beveled face."""
        return self._face_kind

    @property
    def interior_vertices(self) -> npt.NDArray[np.int64]:
        """Returns vertices that own a vertex-face."""
        return self._interior_vertices

    def jump_edge(self, edge: int, vertex: int) -> int:
        """Return jump edge at ``vertex`` across interior ``edge``.

        Raises:
            ValueError: Edge is on the boundary or vertex is not an endpoint.
        """
        interior = int(self._mesh.interior_edge_index[edge])
        if interior < 0:
            msg = f"Edge {edge} has no jump edges"
            raise ValueError(msg)
        v0, v1 = self._mesh.edges[edge]
        if vertex not in (v0, v1):
            msg = f"Vertex {vertex} is not an endpoint of edge {edge}"
            raise ValueError(msg)
        return self.n_split_edges + 2 * interior + (0 if vertex == v0 else 1)

    def jump_sign(self, edge: int, from_face: int) -> int:
        """Return +1 if crossing ``edge`` from ``from_face`` follows jump orientation."""
        face_f, _ = self._mesh.edge_faces(edge)
        return 1 if from_face == face_f else -1

    def edge_face(self, edge: int) -> int:
        """Return beveled face id of an interior edge."""
        interior = int(self._mesh.interior_edge_index[edge])
        if interior < 0:
            msg = f"Edge {edge} has no edge-face"
            raise ValueError(msg)
        return self._mesh.n_faces + interior

    def vertex_face(self, vertex: int) -> int:
        """Return beveled face id of an interior vertex."""
        index = int(self._vertex_face_index[vertex])
        if index < 0:
            msg = f"Vertex {vertex} has no vertex-face"
            raise ValueError(msg)
        return index

    def corner_components(self) -> tuple[int, npt.NDArray[np.int32]]:
        """Return components of the corner graph (split plus jump edges)."""
        _, labels = self._mesh.connected_components()
        return int(labels.max()) + 1, labels[self._corner_vertex]


def build_beveled(mesh: SurfaceMesh) -> BeveledMesh:
    """Construct the beveled complex of ``mesh``."""
    return BeveledMesh(mesh)
