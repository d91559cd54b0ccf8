"""Optimization primitives on the orthogonal group O(k).

Tangent vectors at O have the form O W with W skew-symmetric. The
retraction is the sign-corrected Q factor, and the line search is Armijo
backtracking tailored to steepest descent (the sufficient-decrease test
uses the squared norm of the search direction).
"""

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import InvalidInput, RetractionFailure
from .kernels import qf, skew_part


def check_orthogonal(O, name="O", tol: float = 1e-8) -> np.ndarray:
    O = np.asarray(O, dtype=float)
    if O.ndim != 2 or O.shape[0] != O.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {O.shape}")
    if not np.all(np.isfinite(O)):
        raise InvalidInput(f"{name} has non-finite entries")
    defect = np.linalg.norm(O.T @ O - np.eye(O.shape[0]))
    if defect > tol:
        raise InvalidInput(f"{name} is not orthogonal (defect {defect:.3e})")
    return O


def og_project(O, V) -> np.ndarray:
    """Project an ambient k x k matrix onto the tangent space at O."""
    O = check_orthogonal(O)
    V = np.asarray(V, dtype=float)
    if V.shape != O.shape:
        raise InvalidInput(f"shape mismatch {V.shape} vs {O.shape}")
    return O @ skew_part(O.T @ V)


def og_retract(O, xi) -> np.ndarray:
    """QR retraction: sign-corrected Q factor of O + xi."""
    O = check_orthogonal(O)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != O.shape:
        raise InvalidInput(f"shape mismatch {xi.shape} vs {O.shape}")
    return qf(O + xi)


def og_armijo(loss, O, xi, cfg: SolverConfig = DEFAULT_CONFIG, loss0=None):
    """Backtracking line search along xi from O under the QR retraction.

    Geometric backtracking from cfg.armijo_initial accepts the first step
    with loss(retract(O, step * xi)) <= loss(O) - c1 * step * ||xi||_F^2,
    the test for a steepest-descent direction. O must be orthogonal and xi
    a tangent at O (not revalidated; this runs in the solver's hot loop).
    Callers that already hold loss(O) can pass it as loss0. Returns
    (step, O_next); a cap hit returns (0.0, O) so callers can flag
    stagnation. Singular retraction targets count as rejected trials.
    """
    O = np.asarray(O, dtype=float)
    xi = np.asarray(xi, dtype=float)
    loss0 = float(loss(O)) if loss0 is None else float(loss0)
    sq = float(np.sum(xi * xi))
    step = cfg.armijo_initial
    for _ in range(cfg.armijo_max_backtracks + 1):
        try:
            O_trial = qf(O + step * xi)
        except RetractionFailure:
            step *= cfg.armijo_backtrack
            continue
        if float(loss(O_trial)) <= loss0 - cfg.armijo_sufficient * step * sq:
            return step, O_trial
        step *= cfg.armijo_backtrack
    return 0.0, O
