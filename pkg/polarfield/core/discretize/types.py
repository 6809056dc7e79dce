"""Discretization types."""

from __future__ import annotations

from typing import TYPE_CHECKING, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt
    from scipy import sparse


class FlapOperator(TypedDict):
    """Integrated gradient per interior flap.

    Rows ``2 * ie`` and ``2 * ie + 1`` hold the real and imaginary part of the
    flap integral of the ``ie``-th interior edge in its unfolded frame.
    """

    D: sparse.csr_matrix
    lambda_j: float


class MassMatrices(TypedDict):
    """Inverse area weights.

    ``M_E`` weights the flap rows of ``D``, ``M_S`` and ``D_S`` the isotropy
    rows with their targets ``b_S``, and ``M_I`` the interior edges of the
    face index Laplacian.
    """

    M_E: sparse.dia_matrix
    M_S: sparse.dia_matrix
    D_S: sparse.csr_matrix
    b_S: npt.NDArray[np.float64]
    M_I: sparse.dia_matrix
