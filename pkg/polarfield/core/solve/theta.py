"""Phase solve on the beveled complex."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.exceptions import RankDeficientConstraintsError, SolveFailureError
from polarfield.core.prescribe.types import SingularityKind
from polarfield.core.solve.kkt import (
    REGULARIZATION_STEPS,
    constraint_residual,
    kkt_residual,
    solve_kkt,
    solve_kkt_proximal,
)
from polarfield.core.solve.types import CycleConstraints, ThetaSolution

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.bevel.types import CycleOperators
    from polarfield.core.discretize.types import MassMatrices
    from polarfield.core.prescribe.types import Prescription

LOGGER = logging.getLogger(__name__)

CONSTRAINT_TOLERANCE = 1e-8


def face_index_numerators(bm: BeveledMesh, prescription: Prescription) -> npt.NDArray[np.float64]:
    """Return prescribed index per beveled face."""
    numerators = np.zeros(bm.n_faces)
    for item in prescription.singularities:
        kind, element = item["kind"], item["element"]
        if kind is SingularityKind.FACE:
            numerators[element] += item["index"]
        elif kind is SingularityKind.EDGE:
            numerators[bm.edge_face(element)] += item["index"]
        else:
            numerators[bm.vertex_face(element)] += item["index"]
    return numerators


def beveled_face_components(bm: BeveledMesh) -> npt.NDArray[np.int64]:
    """Return connected component label per beveled face."""
    mesh = bm.mesh
    _, vertex_labels = mesh.connected_components()
    face_labels = vertex_labels[mesh.faces[:, 0]]
    edge_labels = vertex_labels[mesh.edges[mesh.interior_edges, 0]]
    return np.concatenate(
        [face_labels, edge_labels, vertex_labels[bm.interior_vertices]],
    ).astype(np.int64)


def _padded(values: list[int], size: int) -> npt.NDArray[np.float64]:
    padded = np.zeros(size)
    padded[: len(values)] = values[:size]
    return padded


def cycle_constraints(
    ops: CycleOperators,
    bm: BeveledMesh,
    prescription: Prescription,
) -> CycleConstraints:
    """Stack face, homology and boundary rows with their right sides.

    Each connected component has exactly one redundant face row, since the
    face rows of a component sum to zero. The highest id face row of every
    component is dropped.
    """
    n = prescription.n
    face_rhs = 2.0 * np.pi * face_index_numerators(bm, prescription) - n * ops["face_curvature"]

    labels = beveled_face_components(bm)
    dropped = sorted(int(np.flatnonzero(labels == label).max()) for label in np.unique(labels))
    kept = np.setdiff1d(np.arange(bm.n_faces), dropped)
    if dropped:
        LOGGER.warning("Dropped redundant cycle rows %s", dropped)

    n_homology = ops["homology"].shape[0]
    n_boundary = ops["boundary"].shape[0]
    homology_rhs = (
        2.0 * np.pi * _padded(prescription.homology, n_homology) - n * ops["homology_curvature"]
    )
    boundary_rhs = (
        2.0 * np.pi * _padded(prescription.boundary, n_boundary) - n * ops["boundary_curvature"]
    )
    matrix = sparse.vstack([ops["d1"][kept], ops["homology"], ops["boundary"]]).tocsr()
    return CycleConstraints(
        matrix=matrix,
        rhs=np.concatenate([face_rhs[kept], homology_rhs, boundary_rhs]),
        kept_rows=kept.astype(np.int64),
        dropped_rows=dropped,
        n_face_rows=len(kept),
        n_homology_rows=n_homology,
        n_boundary_rows=n_boundary,
    )


def full_face_rhs(
    ops: CycleOperators,
    bm: BeveledMesh,
    prescription: Prescription,
) -> npt.NDArray[np.float64]:
    """Return right side of every ``d1`` row, dropped rows included."""
    numerators = face_index_numerators(bm, prescription)
    return 2.0 * np.pi * numerators - prescription.n * ops["face_curvature"]


def _max_abs(values: npt.NDArray[np.float64]) -> float:
    return float(np.abs(values).max(initial=0.0))


def solve_theta(
    q: sparse.spmatrix,
    mass: MassMatrices,
    constraints: CycleConstraints,
    lambda_s: float = 1.0,
) -> ThetaSolution:
    """Minimize Dirichlet plus isotropy energy subject to cycle constraints.

    Minimizes ``theta^T Q theta + lambda_s |D_S theta - b_S|^2_{M_S}`` with
    ``[d1; H; B] theta = rhs``.

    Raises:
        RankDeficientConstraintsError: Constraint rows are inconsistent.
        SolveFailureError: The KKT system could not be factorized.
    """
    if lambda_s < 0.0:
        msg = f"lambda_s must be >= 0, got {lambda_s}"
        raise ValueError(msg)
    d_s, m_s, b_s = mass["D_S"], mass["M_S"], mass["b_S"]
    hessian = q.tocsr()
    gradient = np.zeros(q.shape[0])
    if d_s.shape[0] > 0 and lambda_s > 0.0:
        hessian = (hessian + lambda_s * (d_s.T @ m_s @ d_s)).tocsr()
        gradient = lambda_s * (d_s.T @ (m_s @ b_s))

    matrix, rhs = constraints["matrix"], constraints["rhs"]
    solved = None
    try:
        solved = solve_kkt(hessian, matrix, gradient, rhs)
    except SolveFailureError as error:
        LOGGER.warning("Phase KKT solve failed: %s", error)
    if solved is None or constraint_residual(matrix, rhs, solved[0]) > CONSTRAINT_TOLERANCE:
        LOGGER.warning("Using the proximal phase solve")
        theta, multipliers = solve_kkt_proximal(hessian, matrix, gradient, rhs)
        delta = REGULARIZATION_STEPS[0]
    else:
        theta, multipliers, delta = solved

    scaled = constraint_residual(matrix, rhs, theta)
    if not np.isfinite(scaled) or scaled > CONSTRAINT_TOLERANCE:
        msg = "Cycle constraints are inconsistent"
        raise RankDeficientConstraintsError(msg, residual=scaled)

    residual = matrix @ theta - rhs
    n_face = constraints["n_face_rows"]
    n_homology = constraints["n_homology_rows"]
    isotropy = d_s @ theta - b_s
    solution = ThetaSolution(
        theta=theta,
        constraints=constraints,
        objective_dirichlet=float(theta @ (q @ theta)),
        objective_isotropy=float(isotropy @ (m_s @ isotropy)) if len(isotropy) else 0.0,
        cycle_residual=_max_abs(residual[:n_face]),
        homology_residual=_max_abs(residual[n_face : n_face + n_homology]),
        boundary_residual=_max_abs(residual[n_face + n_homology :]),
        kkt_residual=kkt_residual(hessian, matrix, gradient, rhs, theta, multipliers),
        regularization=delta,
    )
    LOGGER.info(
        "Phase solve: dirichlet=%.6g isotropy=%.6g cycle residual=%.3e",
        solution["objective_dirichlet"],
        solution["objective_isotropy"],
        solution["cycle_residual"],
    )
    return solution
