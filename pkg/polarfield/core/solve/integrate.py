"""Global integration of phases and scales into corner values."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from polarfield.core.exceptions import GaugeAmbiguityError, SolveFailureError
from polarfield.core.mesh.geometry import connection_form
from polarfield.core.solve.sigma import scale_pins
from polarfield.core.solve.types import IntegrationResult

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from polarfield.core.bevel.complex import BeveledMesh

LOGGER = logging.getLogger(__name__)


def beveled_connection(bm: BeveledMesh) -> npt.NDArray[np.float64]:
    """Return connection angle per beveled edge, zero on split edges."""
    mesh = bm.mesh
    angles = np.zeros(bm.n_edges)
    interior = connection_form(mesh)[mesh.interior_edges]
    angles[bm.n_split_edges :] = np.repeat(interior, 2)
    return angles


def transport_phases(
    theta: npt.NDArray[np.float64],
    bm: BeveledMesh,
    n: int = 1,
) -> npt.NDArray[np.float64]:
    """Return ``theta + N r`` per beveled edge."""
    return theta + n * beveled_connection(bm)


def integrate_field(
    theta: npt.NDArray[np.float64],
    sigma: npt.NDArray[np.float64],
    bm: BeveledMesh,
    n: int = 1,
    pins: Sequence[int] | None = None,
) -> IntegrationResult:
    """Solve ``U_b / sigma_b - U_a exp(i (theta + N r)) / sigma_a = 0`` per edge.

    The homogeneous system is solved in least squares with one corner per
    component fixed to its scale value and zero phase.

    Args:
        theta (np.ndarray): Phase per beveled edge.
        sigma (np.ndarray): Scale per corner.
        bm (BeveledMesh): Beveled complex.
        n (int): Symmetry order, multiplies the connection.
        pins (Sequence[int] | None): Gauge corners, lowest corner of each
            component when missing.

    Returns:
        IntegrationResult: Corner values of the power field.

    Raises:
        GaugeAmbiguityError: A component has no pinned corner.
        SolveFailureError: Normal equations could not be factorized.
    """
    count, labels = bm.corner_components()
    pins = scale_pins(bm) if pins is None else np.asarray(sorted(set(pins)), dtype=np.int64)
    missing = sorted(set(range(count)) - set(labels[pins].tolist()))
    if missing:
        msg = f"Components {missing} have no pinned corner"
        raise GaugeAmbiguityError(msg, components=missing)

    tail, head = bm.edge_tail, bm.edge_head
    rotation = np.exp(1j * transport_phases(theta, bm, n))
    n_edges = bm.n_edges
    rows = np.concatenate([np.arange(n_edges), np.arange(n_edges)])
    cols = np.concatenate([head, tail])
    data = np.concatenate([1.0 / sigma[head], -rotation / sigma[tail]])
    system = sparse.csr_matrix((data, (rows, cols)), shape=(n_edges, bm.n_corners))

    values = np.zeros(bm.n_corners, dtype=np.complex128)
    values[pins] = sigma[pins]
    free = np.setdiff1d(np.arange(bm.n_corners), pins)
    if len(free):
        reduced = system[:, free].tocsc()
        rhs = -(system[:, pins] @ values[pins])
        normal = (reduced.conj().T @ reduced).tocsc()
        try:
            lu = splu(normal)
        except RuntimeError as error:
            msg = f"Integration normal equations are singular: {error}"
            raise SolveFailureError(msg) from error
        values[free] = lu.solve(reduced.conj().T @ rhs)

    residuals = np.abs(system @ values)
    LOGGER.info(
        "Integrated %d corners, max edge residual %.3e",
        bm.n_corners,
        float(residuals.max(initial=0.0)),
    )
    return IntegrationResult(values=values, pins=pins, residuals=residuals)
