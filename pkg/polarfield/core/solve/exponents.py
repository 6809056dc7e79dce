"""Per face power exponents."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import splu

from polarfield.core.discretize.singular import build_index_laplacian
from polarfield.core.prescribe.types import SingularityKind

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import Prescription

LOGGER = logging.getLogger(__name__)

FLOOR_TOLERANCE = 1e-9


def round_half_away(values: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    """Round to the nearest integer, ties away from zero."""
    return (np.sign(values) * np.floor(np.abs(values) + 0.5)).astype(np.int64)


def fixed_exponents(
    theta: npt.NDArray[np.float64],
    prescription: Prescription,
    mesh: SurfaceMesh,
) -> dict[int, int]:
    """Return exponents forced by singularities or by large split phases.

    Singular faces and faces around singular edges and vertices take the
    magnitude of the singular index. Any face other than a singular face
    whose split phases exceed ``pi`` cannot carry a lower exponent than
    ``ceil(max|theta| / pi)``. This covers the flap of a singular edge,
    where the two faces share a turn of ``2 pi |I|`` along the edge.
    """
    fixed: dict[int, int] = {}

    def assign(face: int, value: int) -> None:
        fixed[face] = max(fixed.get(face, 1), value)

    for item in prescription.singularities:
        magnitude = abs(item["index"])
        element = item["element"]
        if item["kind"] is SingularityKind.FACE:
            assign(element, magnitude)
        elif item["kind"] is SingularityKind.EDGE:
            for face in mesh.edge_faces(element):
                assign(face, magnitude)
        else:
            for halfedge in mesh.vertex_fans[element]:
                assign(int(halfedge) // 3, magnitude)

    singular_faces = {item["element"] for item in prescription.of_kind(SingularityKind.FACE)}
    largest = np.abs(theta[: 3 * mesh.n_faces]).reshape(-1, 3).max(axis=1) / np.pi
    for face in np.flatnonzero(largest > 1.0 + FLOOR_TOLERANCE):
        face = int(face)
        if face not in singular_faces:
            assign(face, int(np.ceil(largest[face] - FLOOR_TOLERANCE)))
    return fixed


def interpolate_indices(
    theta: npt.NDArray[np.float64],
    prescription: Prescription,
    mesh: SurfaceMesh,
) -> npt.NDArray[np.int64]:
    """Interpolate exponent magnitudes from fixed faces and round them.

    Free faces minimize the face Dirichlet energy with the fixed faces as
    boundary values. Free regions that touch no fixed face use 1.
    """
    fixed = fixed_exponents(theta, prescription, mesh)
    values = np.ones(mesh.n_faces)
    fixed_faces = np.array(sorted(fixed), dtype=np.int64)
    if len(fixed_faces):
        values[fixed_faces] = [fixed[face] for face in fixed_faces]
    free = np.setdiff1d(np.arange(mesh.n_faces), fixed_faces)

    if len(free) and len(fixed_faces):
        laplacian, _ = build_index_laplacian(mesh)
        block = laplacian[free][:, free].tocsr()
        count, labels = csgraph.connected_components(block, directed=False)
        coupling = laplacian[free][:, fixed_faces]
        touches = np.zeros(count, dtype=bool)
        touches[labels[np.flatnonzero(np.abs(coupling).sum(axis=1).A1 > 0.0)]] = True
        solved = touches[labels]
        if np.any(solved):
            inner = free[solved]
            rhs = -laplacian[inner][:, fixed_faces] @ values[fixed_faces]
            values[inner] = splu(sparse.csc_matrix(laplacian[inner][:, inner])).solve(rhs)

    exponents = round_half_away(values)
    low = exponents < 1
    if np.any(low):
        LOGGER.warning(
            "Exponents rounded below 1 on faces %s, using 1",
            np.flatnonzero(low).tolist(),
        )
        exponents[low] = 1
    LOGGER.debug(
        "Exponents: %d fixed faces, max %d",
        len(fixed_faces),
        int(exponents.max(initial=1)),
    )
    return exponents
