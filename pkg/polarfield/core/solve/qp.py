"""Convex quadratic programs with equality rows and lower bounds."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from polarfield.core.exceptions import InfeasibleError, NonConvergenceError, SolveFailureError
from polarfield.core.solve.kkt import solve_kkt
from polarfield.core.solve.types import QPResult

if TYPE_CHECKING:
    import numpy.typing as npt
    from scipy.sparse.linalg import SuperLU

LOGGER = logging.getLogger(__name__)

STEP_FRACTION = 0.99
DIVERGENCE_LIMIT = 1e12
DUAL_REGULARIZATION = 1e-12
STALL_ITERATIONS = 20
STALL_IMPROVEMENT = 0.99
POLISH_MULTIPLIER_SLACK = 1e-9


def _step_length(values: npt.NDArray[np.float64], steps: npt.NDArray[np.float64]) -> float:
    negative = steps < 0.0
    if not np.any(negative):
        return 1.0
    return float(min(1.0, np.min(-values[negative] / steps[negative])))


def _newton(
    lu: SuperLU,
    r_d: npt.NDArray[np.float64],
    r_p: npt.NDArray[np.float64],
    r_c: npt.NDArray[np.float64],
    s: npt.NDArray[np.float64],
    z: npt.NDArray[np.float64],
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    n = len(s)
    solution = lu.solve(np.concatenate([-r_d - r_c / s, -r_p]))
    dx = solution[:n]
    dz = (-r_c - z * dx) / s
    return dx, -solution[n:], dz


def _objective(
    p: sparse.spmatrix,
    q: npt.NDArray[np.float64],
    x: npt.NDArray[np.float64],
) -> float:
    return float(0.5 * x @ (p @ x) + q @ x)


def _equality_only(
    p: sparse.spmatrix,
    q: npt.NDArray[np.float64],
    a: sparse.spmatrix,
    b: npt.NDArray[np.float64],
) -> QPResult | None:
    try:
        x, y, _ = solve_kkt(p, a, -q, b)
    except SolveFailureError:
        return None
    return QPResult(
        x=x,
        y=-y,
        z=np.zeros_like(x),
        iterations=0,
        objective=_objective(p, q, x),
        primal_residual=float(np.linalg.norm(a @ x - b, np.inf)) if len(b) else 0.0,
        dual_residual=0.0,
        complementarity=0.0,
    )


def _polish(
    p: sparse.spmatrix,
    q: npt.NDArray[np.float64],
    a: sparse.spmatrix,
    b: npt.NDArray[np.float64],
    lower: npt.NDArray[np.float64],
    result: QPResult,
) -> QPResult:
    """Re-solve with the guessed active bounds held as equalities.

    Returns the interior point result unchanged when the equality solve
    leaves the bounds or gives a negative bound multiplier.
    """
    x, z = result["x"], result["z"]
    n = len(x)
    active = np.flatnonzero(x - lower <= z)
    rows = sparse.csr_matrix(
        (np.ones(len(active)), (np.arange(len(active)), active)),
        shape=(len(active), n),
    )
    system = sparse.vstack([a, rows]).tocsr()
    try:
        polished, multipliers, _ = solve_kkt(p, system, -q, np.concatenate([b, lower[active]]))
    except SolveFailureError:
        return result
    m = a.shape[0]
    bound_multipliers = np.zeros(n)
    bound_multipliers[active] = -multipliers[m:]
    slack = 1e-12 * (1.0 + np.abs(lower))
    if np.any(polished < lower - slack) or np.any(bound_multipliers < -POLISH_MULTIPLIER_SLACK):
        LOGGER.debug("Polish rejected, keeping interior point iterate")
        return result
    polished = np.maximum(polished, lower)
    polished[active] = lower[active]
    scale_b = 1.0 + float(np.linalg.norm(b, np.inf)) if m else 1.0
    scale_q = 1.0 + float(np.linalg.norm(q, np.inf))
    y = -multipliers[:m]
    r_d = p @ polished + q - a.T @ y - bound_multipliers
    return QPResult(
        x=polished,
        y=y,
        z=bound_multipliers,
        iterations=result["iterations"],
        objective=_objective(p, q, polished),
        primal_residual=float(np.linalg.norm(a @ polished - b, np.inf)) / scale_b if m else 0.0,
        dual_residual=float(np.linalg.norm(r_d, np.inf)) / scale_q,
        complementarity=float((polished - lower) @ bound_multipliers) / n,
    )


def solve_bounded_qp(
    p: sparse.spmatrix,
    q: npt.NDArray[np.float64],
    a: sparse.spmatrix,
    b: npt.NDArray[np.float64],
    lower: npt.NDArray[np.float64] | float,
    tolerance: float = 1e-7,
    max_iterations: int = 500,
) -> QPResult:
    """Minimize ``x^T P x / 2 + q^T x`` subject to ``A x = b`` and ``x >= lower``.

    Uses a Mehrotra predictor-corrector interior point method. Each
    iteration factorizes the reduced KKT matrix once and solves it for both
    the predictor and the corrector. When the equality constrained minimizer
    already satisfies the bounds it is returned as is. A converged iterate is
    polished by an equality solve on its active bounds. Iteration stops early
    once the residuals stop improving for ``STALL_ITERATIONS`` steps.

    Args:
        p (sparse.spmatrix): Positive semidefinite Hessian.
        q (np.ndarray): Linear term.
        a (sparse.spmatrix): Equality rows.
        b (np.ndarray): Equality right side.
        lower (np.ndarray | float): Lower bounds.
        tolerance (float): Relative stopping tolerance.
        max_iterations (int): Iteration cap.

    Returns:
        QPResult: Primal ``x``, equality multipliers ``y`` and bound
            multipliers ``z``.

    Raises:
        InfeasibleError: Equality rows cannot be met within the bounds.
        NonConvergenceError: Iteration cap reached or progress stalled.
    """
    n = p.shape[0]
    m = a.shape[0]
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,)).copy()
    p = sparse.csc_matrix(p)
    a = sparse.csc_matrix(a)

    shortcut = _equality_only(p, q, a, b)
    if shortcut is not None and np.all(shortcut["x"] >= lower):
        LOGGER.debug("Bounds inactive, equality constrained minimizer returned")
        return shortcut

    x = lower + 1.0
    y = np.zeros(m)
    z = np.ones(n)
    scale_b = 1.0 + float(np.linalg.norm(b, np.inf)) if m else 1.0
    scale_q = 1.0 + float(np.linalg.norm(q, np.inf))
    dual_block = -DUAL_REGULARIZATION * sparse.identity(m, format="csc")
    best_merit = np.inf
    stalled = 0

    for iteration in range(1, max_iterations + 1):
        s = x - lower
        r_d = p @ x + q - a.T @ y - z
        r_p = a @ x - b
        mu = float(s @ z) / n
        primal = float(np.linalg.norm(r_p, np.inf)) / scale_b if m else 0.0
        dual = float(np.linalg.norm(r_d, np.inf)) / scale_q
        converged = primal <= tolerance and dual <= tolerance and mu <= tolerance
        merit = max(primal, dual, mu)
        if merit < STALL_IMPROVEMENT * best_merit:
            best_merit, stalled = merit, 0
        else:
            stalled += 1
        if stalled >= STALL_ITERATIONS and primal <= tolerance and mu <= tolerance:
            LOGGER.warning("Interior point stalled with dual residual %.3e, accepting", dual)
            converged = True
        if converged:
            LOGGER.debug("Interior point converged after %d iterations", iteration - 1)
            result = QPResult(
                x=x,
                y=y,
                z=z,
                iterations=iteration - 1,
                objective=_objective(p, q, x),
                primal_residual=primal,
                dual_residual=dual,
                complementarity=mu,
            )
            return _polish(p, q, a, b, lower, result)
        if stalled >= STALL_ITERATIONS:
            if primal > np.sqrt(tolerance):
                msg = f"Equality rows not met, stalled at iteration {iteration}"
                raise InfeasibleError(msg, iteration=iteration, primal_residual=primal)
            msg = f"Interior point stalled at iteration {iteration}"
            raise NonConvergenceError(
                msg,
                iteration=iteration,
                primal_residual=primal,
                dual_residual=dual,
                complementarity=mu,
            )
        if float(np.abs(x).max()) > DIVERGENCE_LIMIT:
            msg = "Interior point iterates diverged, constraints look infeasible"
            raise InfeasibleError(msg, iteration=iteration)

        barrier = p + sparse.diags(z / s)
        if m:
            matrix = sparse.bmat([[barrier, a.T], [a, dual_block]], format="csc")
        else:
            matrix = sparse.csc_matrix(barrier)
        try:
            lu = splu(matrix)
        except RuntimeError as error:
            msg = f"Interior point system is singular at iteration {iteration}"
            raise InfeasibleError(msg, iteration=iteration) from error

        # predictor
        dx, dy, dz = _newton(lu, r_d, r_p, s * z, s, z)
        alpha_primal = _step_length(s, dx)
        alpha_dual = _step_length(z, dz)
        mu_affine = float((s + alpha_primal * dx) @ (z + alpha_dual * dz)) / n
        centering = (mu_affine / mu) ** 3 if mu > 0.0 else 0.0

        # corrector
        dx, dy, dz = _newton(lu, r_d, r_p, s * z + dx * dz - centering * mu, s, z)
        alpha_primal = min(1.0, STEP_FRACTION * _step_length(s, dx))
        alpha_dual = min(1.0, STEP_FRACTION * _step_length(z, dz))
        x = x + alpha_primal * dx
        y = y + alpha_dual * dy
        z = z + alpha_dual * dz

    s = x - lower
    primal = float(np.linalg.norm(a @ x - b, np.inf)) / scale_b if m else 0.0
    if primal > np.sqrt(tolerance):
        msg = f"Equality rows not met after {max_iterations} iterations"
        raise InfeasibleError(msg, primal_residual=primal)
    msg = f"Interior point did not converge in {max_iterations} iterations"
    raise NonConvergenceError(msg, primal_residual=primal, complementarity=float(s @ z) / n)
