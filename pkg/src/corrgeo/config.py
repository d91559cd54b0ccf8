"""Solver configuration and convergence reporting.

Every iterative routine in the package reads its tolerances, iteration caps,
line-search constants, restart counts, and seeds from a single
:class:`SolverConfig` so that runs are reproducible given the config alone.
"""

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the rotation search, row means, and outer mean loop.

    grad_tol / max_iters govern each Riemannian gradient descent.
    armijo_* are the backtracking line-search constants.
    restarts counts total initializations of the rotation search
    (one Procrustes start plus restarts - 1 seeded random starts).
    mean_tol / max_outer stop the alternating Frechet-mean loop on the
    relative change of its loss.
    antipodal_guard is the cut-locus band within which logarithms refuse.
    horiz_tol certifies near-horizontality of emitted quotient tangents.
    equality_tol is the orbit-distance threshold for "same point".
    stagnation_tol separates harmless line-search stalls at the rounding
    floor from genuine failures: a stall with gradient norm above it is an
    error for consumers that need a converged alignment.
    """

    grad_tol: float = 1e-8
    max_iters: int = 500
    armijo_initial: float = 1.0
    armijo_backtrack: float = 0.5
    armijo_sufficient: float = 1e-4
    armijo_max_backtracks: int = 30
    restarts: int = 5
    seed: int = 0
    symmetrize: bool = True
    mean_tol: float = 1e-10
    max_outer: int = 200
    antipodal_guard: float = 1e-6
    horiz_tol: float = 1e-8
    require_horizontal: bool = False
    equality_tol: float = 1e-8
    stagnation_tol: float = 1e-6
    rank_rel_tol: float = 1e-8
    rank_abs_floor: float = 1e-12

    def with_(self, **kwargs) -> "SolverConfig":
        """Copy with selected fields replaced."""
        return replace(self, **kwargs)


DEFAULT_CONFIG = SolverConfig()


@dataclass
class SolverReport:
    """Diagnostics of one iterative solve.

    iterations is the count actually used (max over rows for row-wise
    solvers), grad_norm the final Riemannian gradient norm (max over rows),
    loss the final objective value.  stagnated marks an Armijo cap hit with
    the gradient still above tolerance.  clamped_rows lists rows where the
    near-antipodal gradient factor had to be clamped.
    """

    converged: bool
    iterations: int
    grad_norm: float
    loss: float
    stagnated: bool = False
    clamped_rows: tuple = ()
    restarts_used: int = 1
