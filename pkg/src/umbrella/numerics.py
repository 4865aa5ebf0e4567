"""Small numerical helpers shared by the solvers."""
from __future__ import annotations

import numpy as np

MAX_ITER = 50
STEP_TOL = 1e-13
DIVERGENCE_RADIUS = 1e12


def gauss_newton(residual, jac, x0, max_iter: int = MAX_ITER, step_tol: float = STEP_TOL):
    """Gauss-Newton on an overdetermined system in two unknowns.

    Returns ``(x, status)`` with status ``"converged"`` (last step below
    ``step_tol * (1 + |x|)``), ``"stalled"`` (iteration cap reached) or
    ``"diverged"`` (non-finite or runaway iterate).
    """
    x = np.array(x0, dtype=float)
    for _ in range(max_iter):
        r = residual(x)
        J = jac(x)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        x = x + step
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_RADIUS:
            return x, "diverged"
        if np.max(np.abs(step)) < step_tol * (1 + np.max(np.abs(x))):
            return x, "converged"
    return x, "stalled"
