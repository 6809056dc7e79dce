"""Face based baseline with minimum norm adjustment angles.

Every interior edge carries one angle, oriented from its slot 0 face to its
slot 1 face. On the beveled complex this is the phase of both jump edges of
the mesh edge with zero on every split edge, so the baseline is a feasible
point of the beveled cycle constraints and both designs share one energy.
"""

from __future__ import annotations

from fractions import Fraction
import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from polarfield.core.bevel.complex import build_beveled
from polarfield.core.bevel.operators import build_operators
from polarfield.core.exceptions import (
    IndexSumMismatchError,
    NonVertexSingularityError,
    SolveFailureError,
)
from polarfield.core.field.types import TrivialConnection
from polarfield.core.mesh.geometry import connection_form
from polarfield.core.solve.kkt import solve_kkt, solve_kkt_proximal
from polarfield.core.solve.theta import cycle_constraints

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.bevel.types import CycleOperators
    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import Prescription

LOGGER = logging.getLogger(__name__)

ROW_TOLERANCE = 1e-12


def dual_to_beveled(bm: BeveledMesh) -> sparse.csr_matrix:
    """Return map from per edge angles to beveled phases.

    Both jump edges of an interior edge take its angle; split edges get zero.
    """
    mesh = bm.mesh
    interior = mesh.interior_edges
    jumps = bm.n_split_edges + np.arange(2 * len(interior))
    return sparse.csr_matrix(
        (np.ones(len(jumps)), (jumps, np.repeat(interior, 2))),
        shape=(bm.n_edges, mesh.n_edges),
    )


def _face_tree(
    mesh: SurfaceMesh,
) -> tuple[npt.NDArray[np.int32], dict[tuple[int, int], int], npt.NDArray[np.int32]]:
    interior = mesh.interior_edges
    face_f = mesh.edge_halfedges[interior, 0] // 3
    face_g = mesh.edge_halfedges[interior, 1] // 3
    adjacency = sparse.csr_matrix(
        (np.ones(2 * len(interior)), (np.r_[face_f, face_g], np.r_[face_g, face_f])),
        shape=(mesh.n_faces, mesh.n_faces),
    )
    crossing = {}
    for edge, f, g in zip(interior, face_f, face_g, strict=True):
        crossing[(int(f), int(g))] = int(edge)
        crossing[(int(g), int(f))] = int(edge)
    order = []
    visited = np.zeros(mesh.n_faces, dtype=bool)
    predecessors = np.full(mesh.n_faces, -9999, dtype=np.int32)
    for root in range(mesh.n_faces):
        if visited[root]:
            continue
        nodes, tree = csgraph.breadth_first_order(
            adjacency,
            root,
            directed=False,
            return_predecessors=True,
        )
        visited[nodes] = True
        predecessors[nodes] = tree[nodes]
        order.extend(int(node) for node in nodes)
    return np.asarray(order, dtype=np.int32), crossing, predecessors


def reconstruct_faces(
    mesh: SurfaceMesh,
    dual_theta: npt.NDArray[np.float64],
    n: int = 1,
) -> npt.NDArray[np.complex128]:
    """Transport a unit value from a root face of every component.

    Crossing from face ``f`` to face ``g`` multiplies by
    ``exp(i (N r + theta))`` with both angles signed by the crossing direction.
    """
    connection = np.nan_to_num(connection_form(mesh))
    order, crossing, predecessors = _face_tree(mesh)
    values = np.ones(mesh.n_faces, dtype=np.complex128)
    for face in order:
        parent = int(predecessors[face])
        if parent < 0:
            continue
        edge = crossing[(parent, int(face))]
        sign = 1.0 if mesh.edge_faces(edge)[0] == parent else -1.0
        values[face] = values[parent] * np.exp(
            1j * sign * (n * connection[edge] + dual_theta[edge]),
        )
    return values


def trivial_connections(
    mesh: SurfaceMesh,
    prescription: Prescription,
    bm: BeveledMesh | None = None,
    ops: CycleOperators | None = None,
) -> TrivialConnection:
    """Compute minimum norm angles that cancel holonomy up to the prescribed indices.

    The vertex, homology and boundary rows are those of the beveled cycle
    constraints restricted to per edge angles. Rows that vanish under the
    restriction belong to faces and edges, which must carry no index.

    Raises:
        NonVertexSingularityError: Prescription has edge or face singularities.
        IndexSumMismatchError: Indices violate the index theorem.
    """
    if not prescription.is_vertex_only:
        msg = "Trivial connections only support vertex singularities"
        raise NonVertexSingularityError(msg)
    chi = mesh.euler_characteristic
    if prescription.index_sum() != prescription.n * chi:
        index_sum = Fraction(prescription.index_sum(), prescription.n)
        msg = f"Index sum {index_sum} does not match Euler characteristic {chi}"
        raise IndexSumMismatchError(msg, index_sum=str(index_sum), euler_characteristic=chi)

    bm = build_beveled(mesh) if bm is None else bm
    ops = build_operators(mesh, bm) if ops is None else ops
    constraints = cycle_constraints(ops, bm, prescription)
    lift = dual_to_beveled(bm)
    restricted = (constraints["matrix"] @ lift).tocsr()
    norms = np.asarray(abs(restricted).sum(axis=1)).ravel()
    active = np.flatnonzero(norms > ROW_TOLERANCE)
    system = restricted[active]
    rhs = constraints["rhs"][active]

    identity = sparse.identity(mesh.n_edges, format="csr")
    gradient = np.zeros(mesh.n_edges)
    try:
        dual_theta, _, _ = solve_kkt(identity, system, gradient, rhs)
    except SolveFailureError:
        LOGGER.warning("Holonomy rows are dependent, using the proximal solve")
        dual_theta, _ = solve_kkt_proximal(identity, system, gradient, rhs)
    dual_theta[mesh.is_boundary_edge] = 0.0

    residual = float(np.abs(restricted @ dual_theta - constraints["rhs"]).max(initial=0.0))
    LOGGER.info(
        "Trivial connections: |theta| %.6g, holonomy residual %.3e",
        float(np.linalg.norm(dual_theta)),
        residual,
    )
    return TrivialConnection(
        dual_theta=dual_theta,
        face_field=reconstruct_faces(mesh, dual_theta, prescription.n),
        beveled_theta=lift @ dual_theta,
        holonomy_residual=residual,
        dropped_rows=constraints["dropped_rows"],
    )
