"""Phase Dirichlet energy."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    import numpy.typing as npt
    from scipy import sparse

    from polarfield.core.mesh.surface import SurfaceMesh


def dirichlet_energy(
    theta: npt.NDArray[np.float64],
    q: sparse.spmatrix,
    mesh: SurfaceMesh,
) -> float:
    """Return ``theta^T Q theta`` averaged over the faces of ``mesh``.

    Raises:
        ValueError: ``theta`` does not match ``Q``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if q.shape != (theta.size, theta.size):
        msg = f"Phase vector of size {theta.size} does not match Q of shape {q.shape}"
        raise ValueError(msg)
    return float(theta @ (q @ theta)) / mesh.n_faces
