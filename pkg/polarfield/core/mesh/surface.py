"""Oriented manifold triangle mesh with halfedge adjacency.

Halfedge ``h = 3 * f + c`` runs from ``faces[f, c]`` to ``faces[f, (c + 1) % 3]``.
Corner ids coincide with halfedge ids, so corner ``h`` is the tail vertex of
halfedge ``h`` inside face ``h // 3``. Edges are the sorted unique vertex pairs;
slot 0 of an edge holds the halfedge ``v0 -> v1`` and slot 1 holds ``v1 -> v0``.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from polarfield.core.exceptions import (
    DegenerateFaceError,
    InconsistentOrientationError,
    NonManifoldError,
    NonTriangularError,
    ParseError,
)

if TYPE_CHECKING:
    import numpy.typing as npt

LOGGER = logging.getLogger(__name__)

DEGENERATE_AREA_FACTOR = 1e-12


def next_halfedge(h: int | npt.NDArray[np.int64]) -> int | npt.NDArray[np.int64]:
    """Return halfedge following ``h`` inside its face."""
    return 3 * (h // 3) + (h % 3 + 1) % 3


def prev_halfedge(h: int | npt.NDArray[np.int64]) -> int | npt.NDArray[np.int64]:
    """Return halfedge preceding ``h`` inside its face."""
    return 3 * (h // 3) + (h % 3 + 2) % 3


class SurfaceMesh:
    """Validated triangle mesh.

    Construction checks triangularity, edge and vertex manifoldness,
    consistent orientation and non degenerate faces.
    """

    def __init__(
        self,
        positions: npt.ArrayLike,
        faces: npt.ArrayLike,
    ) -> None:
        """Build adjacency and validate mesh.

        Args:
            positions (npt.ArrayLike): Vertex positions, shape (V, 3).
            faces (npt.ArrayLike): Vertex indices per face, shape (F, 3).

        Raises:
            ParseError: Shapes or indices are invalid.
            NonTriangularError: Faces are not triangles.
            NonManifoldError: Mesh is not manifold.
            InconsistentOrientationError: Faces are not consistently oriented.
            DegenerateFaceError: A face has near zero area.
        """
        self._positions = np.asarray(positions, dtype=np.float64)
        self._faces = np.asarray(faces, dtype=np.int64)
        if self._positions.ndim != 2 or self._positions.shape[1] != 3:  # noqa: PLR2004
            msg = f"Positions must have shape (V, 3), got {self._positions.shape}"
            raise ParseError(msg)
        if self._faces.ndim != 2 or self._faces.shape[1] != 3:  # noqa: PLR2004
            msg = f"Faces must be triangles, got shape {self._faces.shape}"
            raise NonTriangularError(msg)
        if len(self._faces) == 0:
            msg = "Mesh has no faces"
            raise ParseError(msg)
        if self._faces.min() < 0 or self._faces.max() >= len(self._positions):
            msg = "Face references a vertex that does not exist"
            raise ParseError(msg)
        if not np.all(np.isfinite(self._positions)):
            msg = "Vertex positions must be finite"
            raise ParseError(msg)

        self._build_halfedges()
        self._build_geometry()
        self._build_vertex_fans()
        LOGGER.debug(
            "Mesh with %d vertices, %d edges, %d faces, chi=%d",
            self.n_vertices,
            self.n_edges,
            self.n_faces,
            self.euler_characteristic,
        )

    def _build_halfedges(self) -> None:
        """Build edges, twins and edge slots."""
        n_vertices = len(self._positions)
        tails = self._faces.reshape(-1)
        heads = np.roll(self._faces, -1, axis=1).reshape(-1)

        degenerate = np.flatnonzero(tails == heads)
        if degenerate.size:
            face = int(degenerate[0] // 3)
            msg = f"Face {face} repeats a vertex"
            raise DegenerateFaceError(msg, face=face)

        unused = np.setdiff1d(np.arange(n_vertices), tails)
        if unused.size:
            msg = f"Vertex {int(unused[0])} is not referenced by any face"
            raise NonManifoldError(msg, vertex=int(unused[0]))

        low = np.minimum(tails, heads)
        high = np.maximum(tails, heads)
        keys, halfedge_edge, counts = np.unique(
            low * n_vertices + high,
            return_inverse=True,
            return_counts=True,
        )
        if np.any(counts > 2):  # noqa: PLR2004
            edge = int(np.flatnonzero(counts > 2)[0])  # noqa: PLR2004
            msg = f"Edge {edge} is shared by more than two faces"
            raise NonManifoldError(msg, edge=edge)

        directed_keys = tails * n_vertices + heads
        _, directed_counts = np.unique(directed_keys, return_counts=True)
        if np.any(directed_counts > 1):
            msg = "Two faces traverse an edge in the same direction"
            raise InconsistentOrientationError(msg)

        self._edge_keys = keys
        self._edges = np.stack([keys // n_vertices, keys % n_vertices], axis=1)
        self._halfedge_edge = halfedge_edge.reshape(-1)
        self._tails = tails
        self._heads = heads

        slots = (tails > heads).astype(np.int64)
        self._edge_halfedges = np.full((len(keys), 2), -1, dtype=np.int64)
        self._edge_halfedges[self._halfedge_edge, slots] = np.arange(len(tails))

        self._twin = np.full(len(tails), -1, dtype=np.int64)
        both = np.all(self._edge_halfedges >= 0, axis=1)
        first = self._edge_halfedges[both, 0]
        second = self._edge_halfedges[both, 1]
        self._twin[first] = second
        self._twin[second] = first

        self._interior_edges = np.flatnonzero(both)
        self._interior_edge_index = np.full(len(keys), -1, dtype=np.int64)
        self._interior_edge_index[self._interior_edges] = np.arange(len(self._interior_edges))

    def _build_geometry(self) -> None:
        """Compute lengths, areas, angles and intrinsic corner coordinates."""
        p = self._positions
        f = self._faces
        cross = np.cross(p[f[:, 1]] - p[f[:, 0]], p[f[:, 2]] - p[f[:, 0]])
        self._face_areas = 0.5 * np.linalg.norm(cross, axis=1)

        extent = p.max(axis=0) - p.min(axis=0)
        self._bbox_diagonal = float(np.linalg.norm(extent))
        tolerance = DEGENERATE_AREA_FACTOR * self._bbox_diagonal**2
        small = np.flatnonzero(self._face_areas <= tolerance)
        if small.size:
            face = int(small[0])
            msg = f"Face {face} has area {self._face_areas[face]:.3e}"
            raise DegenerateFaceError(msg, face=face)

        self._edge_lengths = np.linalg.norm(p[self._edges[:, 1]] - p[self._edges[:, 0]], axis=1)

        # lengths[f, c] belongs to halfedge c -> c + 1
        lengths = self._edge_lengths[self._halfedge_edge].reshape(-1, 3)
        before = np.roll(lengths, 1, axis=1)
        opposite = np.roll(lengths, -1, axis=1)
        cosines = (lengths**2 + before**2 - opposite**2) / (2.0 * lengths * before)
        self._corner_angles = np.arccos(np.clip(cosines, -1.0, 1.0))

        coords = np.zeros((len(f), 3), dtype=np.complex128)
        coords[:, 1] = lengths[:, 0]
        coords[:, 2] = lengths[:, 2] * np.exp(1j * self._corner_angles[:, 0])
        self._corner_coords = coords

    def _build_vertex_fans(self) -> None:
        """Order outgoing halfedges counterclockwise around every vertex."""
        n_vertices = len(self._positions)
        order = np.argsort(self._tails, kind="stable")
        splits = np.cumsum(np.bincount(self._tails, minlength=n_vertices))[:-1]
        outgoing = np.split(order, splits)

        self._vertex_fans: list[npt.NDArray[np.int64]] = []
        self._is_boundary_vertex = np.zeros(n_vertices, dtype=bool)
        for vertex, outs in enumerate(outgoing):
            starts = [int(h) for h in outs if self._twin[h] < 0]
            if len(starts) > 1:
                msg = f"Vertex {vertex} joins several boundary fans"
                raise NonManifoldError(msg, vertex=vertex)
            start = starts[0] if starts else int(outs.min())
            fan = [start]
            halfedge = start
            while True:
                rotated = int(self._twin[prev_halfedge(halfedge)])
                if rotated < 0 or rotated == start:
                    break
                fan.append(rotated)
                halfedge = rotated
            if len(fan) != len(outs):
                msg = f"Faces around vertex {vertex} do not form a single fan"
                raise NonManifoldError(msg, vertex=vertex)
            self._vertex_fans.append(np.asarray(fan, dtype=np.int64))
            self._is_boundary_vertex[vertex] = bool(starts)

    @property
    def positions(self) -> npt.NDArray[np.float64]:
        """Returns vertex positions (V, 3)."""
        return self._positions

    @property
    def faces(self) -> npt.NDArray[np.int64]:
        """Returns face vertex indices (F, 3)."""
        return self._faces

    @property
    def edges(self) -> npt.NDArray[np.int64]:
        """Returns sorted edge vertex pairs (E, 2)."""
        return self._edges

    @property
    def n_vertices(self) -> int:
        """Returns vertex count."""
        return len(self._positions)

    @property
    def n_edges(self) -> int:
        """Returns edge count."""
        return len(self._edges)

    @property
    def n_faces(self) -> int:
        """Returns face count."""
        return len(self._faces)

    @property
    def n_halfedges(self) -> int:
        """Returns halfedge count, equal to the corner count."""
        return 3 * len(self._faces)

    @property
    def tails(self) -> npt.NDArray[np.int64]:
        """Returns tail vertex per halfedge."""
        return self._tails

    @property
    def heads(self) -> npt.NDArray[np.int64]:
        """Returns head vertex per halfedge."""
        return self._heads

    @property
    def twin(self) -> npt.NDArray[np.int64]:
        """Returns opposite halfedge, -1 on the boundary."""
        return self._twin

    @property
    def halfedge_edge(self) -> npt.NDArray[np.int64]:
        """Returns edge id per halfedge."""
        return self._halfedge_edge

    @property
    def edge_halfedges(self) -> npt.NDArray[np.int64]:
        """Returns halfedges per edge slot, -1 where missing."""
        return self._edge_halfedges

    @property
    def interior_edges(self) -> npt.NDArray[np.int64]:
        """Returns ids of edges with two adjacent faces."""
        return self._interior_edges

    @property
    def interior_edge_index(self) -> npt.NDArray[np.int64]:
        """Returns position of every edge in ``interior_edges``, -1 on the boundary."""
        return self._interior_edge_index

    @property
    def is_boundary_edge(self) -> npt.NDArray[np.bool_]:
        """Returns boundary flag per edge."""
        return self._interior_edge_index < 0

    @property
    def is_boundary_vertex(self) -> npt.NDArray[np.bool_]:
        """Returns boundary flag per vertex."""
        return self._is_boundary_vertex

    @property
    def vertex_fans(self) -> list[npt.NDArray[np.int64]]:
        """Returns outgoing halfedges per vertex in counterclockwise order.

        Boundary fans start at the outgoing boundary halfedge.
        """
        return self._vertex_fans

    @property
    def edge_lengths(self) -> npt.NDArray[np.float64]:
        """Returns edge lengths."""
        return self._edge_lengths

    @property
    def face_areas(self) -> npt.NDArray[np.float64]:
        """Returns face areas."""
        return self._face_areas

    @property
    def corner_angles(self) -> npt.NDArray[np.float64]:
        """Returns interior angle per corner (F, 3)."""
        return self._corner_angles

    @property
    def corner_coords(self) -> npt.NDArray[np.complex128]:
        """Returns corner positions in face local complex coordinates (F, 3)."""
        return self._corner_coords

    @property
    def bbox_diagonal(self) -> float:
        """Returns bounding box diagonal length."""
        return self._bbox_diagonal

    @property
    def euler_characteristic(self) -> int:
        """Returns V - E + F."""
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def is_closed(self) -> bool:
        """Returns True when the mesh has no boundary."""
        return bool(np.all(self._twin >= 0))

    def edge_index(self, a: int, b: int) -> int:
        """Return id of edge joining two vertices.

        Raises:
            KeyError: Vertices are not joined by an edge.
        """
        low, high = (a, b) if a < b else (b, a)
        key = low * self.n_vertices + high
        position = int(np.searchsorted(self._edge_keys, key))
        if position >= len(self._edge_keys) or self._edge_keys[position] != key:
            msg = f"No edge between vertices {a} and {b}"
            raise KeyError(msg)
        return position

    def halfedge(self, a: int, b: int) -> int:
        """Return halfedge running from ``a`` to ``b``, -1 if missing."""
        edge = self.edge_index(a, b)
        return int(self._edge_halfedges[edge, 0 if a < b else 1])

    def corner(self, face: int, vertex: int) -> int:
        """Return corner id of ``vertex`` inside ``face``.

        Raises:
            ValueError: Vertex does not belong to face.
        """
        matches = np.flatnonzero(self._faces[face] == vertex)
        if matches.size == 0:
            msg = f"Vertex {vertex} is not a corner of face {face}"
            raise ValueError(msg)
        return 3 * face + int(matches[0])

    def edge_faces(self, edge: int) -> tuple[int, int]:
        """Return faces of both edge slots, -1 where missing."""
        h0, h1 = self._edge_halfedges[edge]
        return (int(h0 // 3) if h0 >= 0 else -1, int(h1 // 3) if h1 >= 0 else -1)

    def vertex_adjacency(self) -> sparse.csr_matrix:
        """Return symmetric vertex adjacency matrix."""
        n = self.n_vertices
        data = np.ones(2 * self.n_edges)
        rows = np.concatenate([self._edges[:, 0], self._edges[:, 1]])
        cols = np.concatenate([self._edges[:, 1], self._edges[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    def connected_components(self) -> tuple[int, npt.NDArray[np.int32]]:
        """Return number of components and component label per vertex."""
        count, labels = csgraph.connected_components(self.vertex_adjacency(), directed=False)
        return int(count), labels

    def face_components(self) -> npt.NDArray[np.int32]:
        """Return component label per face."""
        _, labels = self.connected_components()
        return labels[self._faces[:, 0]]
