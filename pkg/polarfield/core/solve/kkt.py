"""Sparse saddle point solves with escalating regularization."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from polarfield.core.exceptions import SolveFailureError
from polarfield.log_utils import log_retry

if TYPE_CHECKING:
    import numpy.typing as npt
    from scipy.sparse.linalg import SuperLU

LOGGER = logging.getLogger(__name__)

REGULARIZATION_STEPS = (1e-10, 1e-8, 1e-6)
KKT_TOLERANCE = 1e-7


def _factorize(matrix: sparse.csc_matrix) -> SuperLU:
    try:
        return splu(matrix)
    except RuntimeError as error:
        msg = f"Factorization failed: {error}"
        raise SolveFailureError(msg) from error


def kkt_residual(
    hessian: sparse.spmatrix,
    constraints: sparse.spmatrix,
    gradient: npt.NDArray[np.float64],
    rhs: npt.NDArray[np.float64],
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
) -> float:
    """Return relative residual of the unregularized KKT system."""
    top = hessian @ x + constraints.T @ y - gradient
    bottom = constraints @ x - rhs
    scale = 1.0 + float(np.linalg.norm(np.concatenate([gradient, rhs])))
    return float(np.linalg.norm(np.concatenate([top, bottom]))) / scale


def constraint_residual(
    constraints: sparse.spmatrix,
    rhs: npt.NDArray[np.float64],
    x: npt.NDArray[np.float64],
) -> float:
    """Return ``|C x - c|_inf / (1 + |c|_inf)``."""
    if constraints.shape[0] == 0:
        return 0.0
    scale = 1.0 + float(np.abs(rhs).max(initial=0.0))
    return float(np.abs(constraints @ x - rhs).max(initial=0.0)) / scale


def _refine_exact(
    lu: SuperLU,
    exact: sparse.csc_matrix,
    target: npt.NDArray[np.float64],
    solution: npt.NDArray[np.float64],
    refinements: int,
) -> npt.NDArray[np.float64]:
    """Refine ``solution`` against ``exact`` while its residual keeps shrinking."""
    best = solution
    best_norm = float(np.linalg.norm(target - exact @ solution))
    for _ in range(refinements):
        candidate = best + lu.solve(target - exact @ best)
        if not np.all(np.isfinite(candidate)):
            break
        norm = float(np.linalg.norm(target - exact @ candidate))
        if norm >= best_norm:
            break
        best, best_norm = candidate, norm
    return best


def solve_kkt(
    hessian: sparse.spmatrix,
    constraints: sparse.spmatrix,
    gradient: npt.NDArray[np.float64],
    rhs: npt.NDArray[np.float64],
    refinements: int = 10,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], float]:
    """Solve ``[[G, C^T], [C, 0]] [x; y] = [g; c]``.

    The primal block is shifted by ``delta * max|diag(G)|``; each failed
    attempt escalates ``delta`` through ``REGULARIZATION_STEPS``. The shifted
    solution is then refined against the unshifted system with the same
    factors, which removes the shift where ``G`` is singular on the feasible
    set. A solution is accepted once it meets the constraints to
    ``KKT_TOLERANCE``.

    Returns:
        tuple: Primal ``x``, multipliers ``y`` and the ``delta`` that succeeded.

    Raises:
        SolveFailureError: No regularization gave a usable solution.
    """
    n = hessian.shape[0]
    m = constraints.shape[0]
    scale = max(1.0, float(np.abs(hessian.diagonal()).max(initial=0.0)))
    identity = sparse.identity(n, format="csc")
    if m == 0:
        exact = hessian.tocsc()
    else:
        exact = sparse.bmat([[hessian, constraints.T], [constraints, None]], format="csc")
    target = np.concatenate([gradient, rhs])

    def attempt_solve(delta: float) -> npt.NDArray[np.float64]:
        shifted = (hessian + delta * scale * identity).tocsc()
        if m == 0:
            matrix = shifted
        else:
            matrix = sparse.bmat([[shifted, constraints.T], [constraints, None]], format="csc")
        lu = _factorize(matrix)
        solution = lu.solve(target)
        if not np.all(np.isfinite(solution)):
            msg = "Factorization produced non finite values"
            raise SolveFailureError(msg, delta=delta)
        return _refine_exact(lu, exact, target, solution, refinements)

    solution = np.zeros(n + m)
    delta = REGULARIZATION_STEPS[0]
    for attempt in Retrying(
        stop=stop_after_attempt(len(REGULARIZATION_STEPS)),
        retry=retry_if_exception_type(SolveFailureError),
        before_sleep=log_retry(LOGGER),
        reraise=True,
    ):
        with attempt:
            delta = REGULARIZATION_STEPS[attempt.retry_state.attempt_number - 1]
            solution = attempt_solve(delta)
            residual = constraint_residual(constraints, rhs, solution[:n])
            if residual > KKT_TOLERANCE:
                msg = f"Constraint residual {residual:.3e} with delta={delta:g}"
                raise SolveFailureError(msg, residual=residual, delta=delta)

    LOGGER.debug(
        "KKT system of size %d solved with delta=%g, residual %.3e",
        n + m,
        delta,
        kkt_residual(hessian, constraints, gradient, rhs, solution[:n], solution[n:]),
    )
    return solution[:n], solution[n:], delta


def solve_kkt_proximal(
    hessian: sparse.spmatrix,
    constraints: sparse.spmatrix,
    gradient: npt.NDArray[np.float64],
    rhs: npt.NDArray[np.float64],
    refinements: int = 20,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Solve a KKT system whose constraint rows may be linearly dependent.

    The quasi-definite matrix ``[[G + delta I, C^T], [C, -delta I]]`` is always
    factorizable; refining its solution against the exact system converges
    to a solution whenever the constraints are consistent.

    Raises:
        SolveFailureError: The regularized matrix could not be factorized.
    """
    n = hessian.shape[0]
    m = constraints.shape[0]
    scale = max(1.0, float(np.abs(hessian.diagonal()).max(initial=0.0)))
    delta = REGULARIZATION_STEPS[0] * scale
    exact = sparse.bmat([[hessian, constraints.T], [constraints, None]], format="csc")
    regularized = sparse.bmat(
        [
            [hessian + delta * sparse.identity(n), constraints.T],
            [constraints, -delta * sparse.identity(m)],
        ],
        format="csc",
    )
    lu = _factorize(regularized)
    target = np.concatenate([gradient, rhs])
    solution = np.zeros(n + m)
    for _ in range(refinements):
        correction = lu.solve(target - exact @ solution)
        solution = solution + correction
        size = 1.0 + float(np.linalg.norm(solution))
        if float(np.linalg.norm(correction)) <= KKT_TOLERANCE * size:
            break
    return solution[:n], solution[n:]
