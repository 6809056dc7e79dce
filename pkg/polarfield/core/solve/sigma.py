"""Scale solve on beveled corners."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from polarfield.core.solve.qp import solve_bounded_qp
from polarfield.core.solve.types import SigmaSolution

if TYPE_CHECKING:
    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh
    from polarfield.core.solve.types import ScaleConstraints

LOGGER = logging.getLogger(__name__)

CONSTRAINT_TOLERANCE = 1e-8


def scale_pins(bm: BeveledMesh) -> npt.NDArray[np.int64]:
    """Return the lowest corner id of every connected component."""
    count, labels = bm.corner_components()
    pins = np.full(count, bm.n_corners, dtype=np.int64)
    np.minimum.at(pins, labels, np.arange(bm.n_corners))
    return pins


def solve_sigma(
    laplacian: sparse.spmatrix,
    constraints: ScaleConstraints,
    bm: BeveledMesh,
    eps: float = 1e-6,
) -> SigmaSolution:
    """Minimize ``sigma^T L sigma`` subject to scale rows and ``sigma >= eps``.

    The global scale of each component is fixed by pinning its lowest corner
    to 1.

    Raises:
        ValueError: ``eps`` is not positive.
        InfeasibleError: Constraints cannot be satisfied.
        NonConvergenceError: Interior point iteration cap reached.
    """
    if eps <= 0.0:
        msg = f"eps must be > 0, got {eps}"
        raise ValueError(msg)
    n = bm.n_corners
    pins = scale_pins(bm)
    pin_rows = sparse.csr_matrix(
        (np.ones(len(pins)), (np.arange(len(pins)), pins)),
        shape=(len(pins), n),
    )
    rows = constraints["matrix"]
    a = sparse.vstack([rows, pin_rows]).tocsr()
    b = np.concatenate([np.zeros(rows.shape[0]), np.ones(len(pins))])

    result = solve_bounded_qp(2.0 * sparse.csr_matrix(laplacian), np.zeros(n), a, b, eps)
    sigma = result["x"]
    residual = float(np.abs(rows @ sigma).max(initial=0.0))
    if residual > CONSTRAINT_TOLERANCE:
        LOGGER.warning("Scale constraint residual %.3e above %.1e", residual, CONSTRAINT_TOLERANCE)
    slack = sigma - eps
    solution = SigmaSolution(
        sigma=sigma,
        pins=pins,
        iterations=result["iterations"],
        objective=float(sigma @ (laplacian @ sigma)),
        constraint_residual=residual,
        complementarity=float(np.abs(slack * result["z"]).max(initial=0.0)),
    )
    LOGGER.info(
        "Scale solve: objective=%.6g min=%.3e iterations=%d",
        solution["objective"],
        float(sigma.min(initial=np.inf)),
        solution["iterations"],
    )
    return solution
