"""Finite volume flap integrals and the Dirichlet operators built on them."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.discretize.types import FlapOperator
from polarfield.core.mesh.geometry import flap_table

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.mesh.surface import SurfaceMesh

LOGGER = logging.getLogger(__name__)


def face_split_coefficients(mesh: SurfaceMesh) -> npt.NDArray[np.complex128]:
    """Return per face coefficients mapping split values to ``A(f) * grad``.

    With ``P_c = i * (z_{c+1} - z_c)`` the coefficient of split edge ``c`` is
    ``(P_{c+2} - P_{c+1}) / 6``, in face local coordinates.
    """
    z = mesh.corner_coords
    perp = 1j * (np.roll(z, -1, axis=1) - z)
    return (np.roll(perp, -2, axis=1) - np.roll(perp, -1, axis=1)) / 6.0


def build_D(bm: BeveledMesh, mesh: SurfaceMesh, lambda_j: float = 50.0) -> FlapOperator:
    """Assemble the flap integral operator.

    Each interior edge contributes a real and an imaginary row referencing
    the six split edges of its two faces and its two jump edges.

    Args:
        bm (BeveledMesh): Beveled complex.
        mesh (SurfaceMesh): Underlying mesh.
        lambda_j (float): Jump penalty, at least 1.

    Returns:
        FlapOperator: Operator of shape (2 * interior edges, beveled edges).
    """
    if lambda_j < 1.0:
        msg = f"lambda_j must be >= 1, got {lambda_j}"
        raise ValueError(msg)
    table = flap_table(mesh)
    coefficients = face_split_coefficients(mesh)
    n_flaps = len(table["edges"])
    flap_ids = np.arange(n_flaps)

    # (n_flaps, 3) complex entries for the splits of f and g
    split_f = table["rotation_f"][:, None] * coefficients[table["face_f"]]
    split_g = table["rotation_g"][:, None] * coefficients[table["face_g"]]
    cols_f = 3 * table["face_f"][:, None] + np.arange(3)
    cols_g = 3 * table["face_g"][:, None] + np.arange(3)

    jump = -0.5 * lambda_j * 1j * table["point_i"]
    jump_0 = bm.n_split_edges + 2 * flap_ids

    cols = np.concatenate(
        [cols_f, cols_g, jump_0[:, None], (jump_0 + 1)[:, None]],
        axis=1,
    )
    values = np.concatenate(
        [split_f, split_g, jump[:, None], jump[:, None]],
        axis=1,
    )
    width = cols.shape[1]
    rows_re = np.repeat(2 * flap_ids, width)
    rows_im = rows_re + 1
    matrix = sparse.csr_matrix(
        (
            np.concatenate([values.real.reshape(-1), values.imag.reshape(-1)]),
            (np.concatenate([rows_re, rows_im]), np.concatenate([cols.reshape(-1)] * 2)),
        ),
        shape=(2 * n_flaps, bm.n_edges),
    )
    LOGGER.debug("Flap operator %s with lambda_j=%g", matrix.shape, lambda_j)
    return FlapOperator(D=matrix, lambda_j=float(lambda_j))


def flap_mass(mesh: SurfaceMesh) -> sparse.dia_matrix:
    """Return ``M_E``, the inverse flap area duplicated per row pair."""
    edges = mesh.interior_edges
    h = mesh.edge_halfedges[edges]
    areas = mesh.face_areas[h[:, 0] // 3] + mesh.face_areas[h[:, 1] // 3]
    return sparse.diags(np.repeat(1.0 / areas, 2))


def build_Q(flaps: FlapOperator, mass: sparse.spmatrix) -> sparse.csr_matrix:
    """Return the 1-form quadratic form ``D^T M_E D``."""
    d = flaps["D"]
    return (d.T @ mass @ d).tocsr()


def build_L(
    flaps: FlapOperator,
    mass: sparse.spmatrix,
    d0: sparse.spmatrix,
) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Return corner Laplacian ``L = d0^T Q d0`` and the 1-form form ``Q``."""
    q = build_Q(flaps, mass)
    laplacian = (d0.T @ q @ d0).tocsr()
    return laplacian, q
