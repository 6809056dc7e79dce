"""Exterior derivatives and cycle rows on the beveled complex."""

from __future__ import annotations

from collections import defaultdict
import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.bevel.types import CycleOperators
from polarfield.core.exceptions import InconsistentLiftError
from polarfield.core.mesh.geometry import gaussian_curvature
from polarfield.core.mesh.surface import next_halfedge, prev_halfedge
from polarfield.core.mesh.topology import boundary_loops, homology_generators

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.mesh.surface import SurfaceMesh


LOGGER = logging.getLogger(__name__)


def build_d0(bm: BeveledMesh) -> sparse.csr_matrix:
    """Return |E|x|V| incidence, -1 at the tail and +1 at the head."""
    n_edges = bm.n_edges
    rows = np.concatenate([np.arange(n_edges), np.arange(n_edges)])
    cols = np.concatenate([bm.edge_tail, bm.edge_head])
    data = np.concatenate([-np.ones(n_edges), np.ones(n_edges)])
    return sparse.csr_matrix((data, (rows, cols)), shape=(n_edges, bm.n_corners))


def vertex_face_entries(bm: BeveledMesh, vertex: int) -> list[tuple[int, int]]:
    """Return ``(jump edge, sign)`` pairs of a vertex-face, counterclockwise."""
    mesh = bm.mesh
    fan = mesh.vertex_fans[vertex]
    entries = []
    for position, halfedge in enumerate(fan):
        following = int(fan[(position + 1) % len(fan)])
        edge = int(mesh.halfedge_edge[following])
        entries.append(
            (bm.jump_edge(edge, vertex), bm.jump_sign(edge, int(halfedge) // 3)),
        )
    return entries


def build_d1(bm: BeveledMesh) -> sparse.csr_matrix:
    """Return |F|x|E| boundary operator of the beveled faces."""
    mesh = bm.mesh
    n_faces = mesh.n_faces
    rows: list[npt.NDArray[np.int64]] = []
    cols: list[npt.NDArray[np.int64]] = []
    data: list[npt.NDArray[np.float64]] = []

    rows.append(np.repeat(np.arange(n_faces), 3))
    cols.append(np.arange(3 * n_faces))
    data.append(np.ones(3 * n_faces))

    interior = mesh.interior_edges
    edge_rows = n_faces + np.arange(len(interior))
    h_f = mesh.edge_halfedges[interior, 0]
    h_g = mesh.edge_halfedges[interior, 1]
    jump_0 = bm.n_split_edges + 2 * np.arange(len(interior))
    rows.append(np.repeat(edge_rows, 4))
    cols.append(np.stack([h_f, jump_0, h_g, jump_0 + 1], axis=1).reshape(-1))
    data.append(np.tile([-1.0, 1.0, -1.0, -1.0], len(interior)))

    for vertex in bm.interior_vertices:
        entries = vertex_face_entries(bm, int(vertex))
        rows.append(np.full(len(entries), bm.vertex_face(int(vertex))))
        cols.append(np.array([jump for jump, _ in entries], dtype=np.int64))
        data.append(np.array([sign for _, sign in entries], dtype=np.float64))

    return sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(bm.n_faces, bm.n_edges),
    )


def right_lift(bm: BeveledMesh, vertices: Sequence[int]) -> tuple[dict[int, float], float]:
    """Lift a closed primal vertex loop to the beveled mesh on its right side.

    Split edges are walked against their orientation and jump edges are
    crossed counterclockwise around each loop vertex.

    Returns:
        tuple[dict[int, float], float]: Row coefficients and curvature
            ``sum(pi - right side angles)``.

    Raises:
        InconsistentLiftError: The right side of the loop leaves the surface.
    """
    mesh = bm.mesh
    angles = mesh.corner_angles.reshape(-1)
    row: dict[int, float] = defaultdict(float)
    curvature = 0.0
    n = len(vertices)
    for position in range(n):
        before = int(vertices[position - 1])
        vertex = int(vertices[position])
        after = int(vertices[(position + 1) % n])
        incoming = mesh.halfedge(vertex, before)
        closing = mesh.halfedge(after, vertex)
        if incoming < 0 or closing < 0:
            msg = f"Loop runs along the boundary at vertex {vertex}"
            raise InconsistentLiftError(msg, vertex=vertex)
        target = int(next_halfedge(closing))
        halfedge = incoming
        wedge = np.pi - angles[halfedge]
        for _ in range(len(mesh.vertex_fans[vertex])):
            if halfedge == target:
                break
            spoke = int(prev_halfedge(halfedge))
            rotated = int(mesh.twin[spoke])
            if rotated < 0:
                msg = f"Right side of loop hits the boundary at vertex {vertex}"
                raise InconsistentLiftError(msg, vertex=vertex)
            edge = int(mesh.halfedge_edge[spoke])
            row[bm.jump_edge(edge, vertex)] += bm.jump_sign(edge, halfedge // 3)
            halfedge = rotated
            wedge -= angles[halfedge]
        else:
            msg = f"Loop is not simple at vertex {vertex}"
            raise InconsistentLiftError(msg, vertex=vertex)
        curvature += wedge
        row[closing] -= 1.0
    return dict(row), float(curvature)


def rows_to_matrix(rows: list[dict[int, float]], n_cols: int) -> sparse.csr_matrix:
    """Return sparse matrix with one row per ``{column: value}`` mapping."""
    row_ids = [index for index, row in enumerate(rows) for _ in row]
    col_ids = [col for row in rows for col in row]
    values = [value for row in rows for value in row.values()]
    return sparse.csr_matrix((values, (row_ids, col_ids)), shape=(len(rows), n_cols))


def build_operators(mesh: SurfaceMesh, bm: BeveledMesh) -> CycleOperators:
    """Build d0, d1, homology rows, boundary rows and their curvatures.

    Boundary edges get no edge-face and boundary vertices no vertex-face, so
    those rows never appear in ``d1``.
    """
    curvature = gaussian_curvature(mesh)
    face_curvature = np.zeros(bm.n_faces)
    for vertex in bm.interior_vertices:
        face_curvature[bm.vertex_face(int(vertex))] = curvature[vertex]

    generators = homology_generators(mesh)
    homology_rows = []
    homology_curvature = []
    for generator in generators:
        row, loop_curvature = right_lift(bm, generator["vertices"])
        homology_rows.append(row)
        homology_curvature.append(loop_curvature)

    loops = boundary_loops(mesh)
    boundary_rows = []
    boundary_curvature = []
    for loop in loops:
        # the reversed loop has the surface on its right
        row, loop_curvature = right_lift(bm, loop["vertices"][::-1])
        boundary_rows.append(row)
        boundary_curvature.append(loop_curvature)

    d0 = build_d0(bm)
    d1 = build_d1(bm)
    LOGGER.debug(
        "Operators: d0 %s, d1 %s, %d homology rows, %d boundary rows",
        d0.shape,
        d1.shape,
        len(homology_rows),
        len(boundary_rows),
    )
    return CycleOperators(
        d0=d0,
        d1=d1,
        homology=rows_to_matrix(homology_rows, bm.n_edges),
        boundary=rows_to_matrix(boundary_rows, bm.n_edges),
        face_curvature=face_curvature,
        homology_curvature=np.asarray(homology_curvature, dtype=np.float64),
        boundary_curvature=np.asarray(boundary_curvature, dtype=np.float64),
        generators=generators,
        loops=loops,
    )
