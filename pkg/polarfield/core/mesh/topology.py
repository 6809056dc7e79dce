"""Boundary loops and homology generators."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from polarfield.core.mesh.geometry import gaussian_curvature
from polarfield.core.mesh.types import BoundaryLoop, EdgeLoop

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)


def boundary_loops(mesh: SurfaceMesh) -> list[BoundaryLoop]:
    """Return boundary loops with the surface on their left.

    Loops are ordered by their smallest boundary halfedge id and start there.
    """
    curvature = gaussian_curvature(mesh)
    boundary = np.flatnonzero(mesh.twin < 0)
    visited = np.zeros(mesh.n_halfedges, dtype=bool)
    loops: list[BoundaryLoop] = []
    for start in boundary:
        if visited[start]:
            continue
        halfedges: list[int] = []
        halfedge = int(start)
        while not visited[halfedge]:
            visited[halfedge] = True
            halfedges.append(halfedge)
            # the fan of the head vertex starts with its outgoing boundary halfedge
            halfedge = int(mesh.vertex_fans[mesh.heads[halfedge]][0])
        vertices = [int(mesh.tails[h]) for h in halfedges]
        loops.append(
            BoundaryLoop(
                vertices=vertices,
                halfedges=halfedges,
                edges=[int(mesh.halfedge_edge[h]) for h in halfedges],
                curvature=float(curvature[vertices].sum()),
            ),
        )
    return loops


def loop_from_vertices(mesh: SurfaceMesh, vertices: list[int]) -> EdgeLoop:
    """Build signed edge loop from a closed vertex cycle."""
    edges: list[int] = []
    signs: list[int] = []
    for position, vertex in enumerate(vertices):
        following = vertices[(position + 1) % len(vertices)]
        edges.append(mesh.edge_index(vertex, following))
        signs.append(1 if vertex < following else -1)
    return EdgeLoop(vertices=list(vertices), edges=edges, signs=signs)


def _bfs_forest(
    graph: sparse.csr_matrix,
    roots: npt.NDArray[np.int64],
) -> npt.NDArray[np.int64]:
    """Return BFS predecessors over all components, -1 at roots."""
    predecessors = np.full(graph.shape[0], -1, dtype=np.int64)
    for root in roots:
        _, component_predecessors = csgraph.breadth_first_order(
            graph,
            int(root),
            directed=False,
            return_predecessors=True,
        )
        reached = component_predecessors >= 0
        predecessors[reached] = component_predecessors[reached]
    return predecessors


def _component_roots(graph: sparse.csr_matrix) -> npt.NDArray[np.int64]:
    _, labels = csgraph.connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    return first.astype(np.int64)


def _path_to_root(predecessors: npt.NDArray[np.int64], vertex: int) -> list[int]:
    path = [vertex]
    while predecessors[path[-1]] >= 0:
        path.append(int(predecessors[path[-1]]))
    return path


def homology_generators(mesh: SurfaceMesh) -> list[EdgeLoop]:
    """Return ``2g`` generator loops from a tree-cotree decomposition.

    The primal tree is a BFS tree over vertices. The dual graph gets one
    extra node per boundary loop so that boundary loops themselves are not
    reported as generators. Every edge in neither tree closes one loop.
    """
    primal = mesh.vertex_adjacency()
    predecessors = _bfs_forest(primal, _component_roots(primal))
    in_tree = np.zeros(mesh.n_edges, dtype=bool)
    children = np.flatnonzero(predecessors >= 0)
    for child in children:
        in_tree[mesh.edge_index(int(child), int(predecessors[child]))] = True

    loops = boundary_loops(mesh)
    cap_of_edge = np.full(mesh.n_edges, -1, dtype=np.int64)
    for loop_index, loop in enumerate(loops):
        cap_of_edge[loop["edges"]] = mesh.n_faces + loop_index

    n_nodes = mesh.n_faces + len(loops)
    pair_edge: dict[tuple[int, int], int] = {}
    rows: list[int] = []
    cols: list[int] = []
    for edge in np.flatnonzero(~in_tree):
        face_f, face_g = mesh.edge_faces(int(edge))
        if face_f < 0 or face_g < 0:
            node_a, node_b = max(face_f, face_g), int(cap_of_edge[edge])
        else:
            node_a, node_b = face_f, face_g
        key = (min(node_a, node_b), max(node_a, node_b))
        pair_edge.setdefault(key, int(edge))
        rows += [node_a, node_b]
        cols += [node_b, node_a]
    dual = sparse.csr_matrix(
        (np.ones(len(rows)), (rows, cols)),
        shape=(n_nodes, n_nodes),
    )
    dual_predecessors = _bfs_forest(dual, _component_roots(dual))
    in_cotree = np.zeros(mesh.n_edges, dtype=bool)
    for node in np.flatnonzero(dual_predecessors >= 0):
        parent = int(dual_predecessors[node])
        in_cotree[pair_edge[(min(int(node), parent), max(int(node), parent))]] = True

    generators: list[EdgeLoop] = []
    for edge in np.flatnonzero(~in_tree & ~in_cotree):
        a, b = (int(v) for v in mesh.edges[edge])
        path_a = _path_to_root(predecessors, a)
        path_b = _path_to_root(predecessors, b)
        while len(path_a) > 1 and len(path_b) > 1 and path_a[-2] == path_b[-2]:
            path_a.pop()
            path_b.pop()
        # path_a ends at the common ancestor, walk down towards b afterwards
        cycle = path_a + path_b[-2::-1]
        generators.append(loop_from_vertices(mesh, cycle))

    n_components = len(_component_roots(primal))
    expected = 2 * n_components - mesh.euler_characteristic - len(loops)
    if len(generators) != expected:
        LOGGER.warning(
            "Tree-cotree produced %d generators, topology predicts %d",
            len(generators),
            expected,
        )
    LOGGER.debug("Found %d homology generators", len(generators))
    return generators
