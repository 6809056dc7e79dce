"""Operators restricted to singular elements and the face index Laplacian."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.discretize.flaps import face_split_coefficients
from polarfield.core.prescribe.types import SingularityKind

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.discretize.types import FlapOperator
    from polarfield.core.mesh.surface import SurfaceMesh
    from polarfield.core.prescribe.types import IsotropyTargets, TargetGroup

LOGGER = logging.getLogger(__name__)


def _flap_rows(
    mesh: SurfaceMesh,
    flaps: FlapOperator,
    group: TargetGroup,
) -> tuple[sparse.csr_matrix, npt.NDArray[np.float64]]:
    interior = mesh.interior_edge_index[group["flaps"]]
    rows = np.stack([2 * interior, 2 * interior + 1], axis=1).reshape(-1)
    h = mesh.edge_halfedges[group["flaps"]]
    areas = mesh.face_areas[h[:, 0] // 3] + mesh.face_areas[h[:, 1] // 3]
    return flaps["D"][rows], np.repeat(1.0 / areas, 2)


def _face_rows(
    mesh: SurfaceMesh,
    bm: BeveledMesh,
    group: TargetGroup,
) -> tuple[sparse.csr_matrix, npt.NDArray[np.float64]]:
    face = group["face"]
    coefficients = face_split_coefficients(mesh)[face]
    cols = np.arange(3 * face, 3 * face + 3)
    matrix = sparse.csr_matrix(
        (
            np.concatenate([coefficients.real, coefficients.imag]),
            (np.repeat([0, 1], 3), np.concatenate([cols, cols])),
        ),
        shape=(2, bm.n_edges),
    )
    return matrix, np.full(2, 1.0 / mesh.face_areas[face])


def build_DS_MS(
    targets: IsotropyTargets,
    flaps: FlapOperator,
    bm: BeveledMesh,
) -> tuple[sparse.csr_matrix, sparse.dia_matrix, npt.NDArray[np.float64]]:
    """Return isotropy rows ``D_S``, weights ``M_S`` and row targets ``b_S``.

    Vertex groups use the flaps of the spokes, edge groups the flap of the
    edge and face groups the integrated face gradient. ``b_S`` is the image
    of each group's own targets, so overlapping groups stay independent.
    """
    mesh = bm.mesh
    blocks: list[sparse.csr_matrix] = []
    weights: list[npt.NDArray[np.float64]] = []
    images: list[npt.NDArray[np.float64]] = []
    for group in targets.groups:
        if group["kind"] is SingularityKind.FACE:
            rows, weight = _face_rows(mesh, bm, group)
        else:
            rows, weight = _flap_rows(mesh, flaps, group)
        target = np.zeros(bm.n_edges)
        target[group["edges"]] = group["values"]
        blocks.append(rows)
        weights.append(weight)
        images.append(rows @ target)

    if not blocks:
        return (
            sparse.csr_matrix((0, bm.n_edges)),
            sparse.diags(np.zeros(0)),
            np.zeros(0),
        )
    d_s = sparse.vstack(blocks).tocsr()
    LOGGER.debug("Isotropy operator with %d rows", d_s.shape[0])
    return d_s, sparse.diags(np.concatenate(weights)), np.concatenate(images)


def build_index_laplacian(mesh: SurfaceMesh) -> tuple[sparse.csr_matrix, sparse.dia_matrix]:
    """Return face Laplacian ``L2 = d1 M_I d1^T`` and ``M_I``.

    ``M_I`` weights every interior edge by ``3 l^2 / (A(f) + A(g))``.
    """
    edges = mesh.interior_edges
    h = mesh.edge_halfedges[edges]
    face_f = h[:, 0] // 3
    face_g = h[:, 1] // 3
    areas = mesh.face_areas[face_f] + mesh.face_areas[face_g]
    weights = 3.0 * mesh.edge_lengths[edges] ** 2 / areas
    n = len(edges)
    incidence = sparse.csr_matrix(
        (
            np.concatenate([np.ones(n), -np.ones(n)]),
            (np.concatenate([face_f, face_g]), np.concatenate([np.arange(n)] * 2)),
        ),
        shape=(mesh.n_faces, n),
    )
    m_i = sparse.diags(weights)
    return (incidence @ m_i @ incidence.T).tocsr(), m_i
