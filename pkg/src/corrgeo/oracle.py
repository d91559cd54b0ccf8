"""Slow, independent reference computations used to cross-check the solvers.

Nothing here shares code with the production paths: the k = 2 distance is
a dense scan of the whole orthogonal group, gradients come from central
finite differences, and the tiny circle mean is an exhaustive angle grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .product_sphere import check_unit_rows


@dataclass(frozen=True)
class GridSpec:
    """Resolution of a dense scan over rotation angles."""

    resolution: int = 10000

    def __post_init__(self):
        if self.resolution < 8:
            raise InvalidInput("grid resolution below 8 is meaningless")

    def error_bound(self, m: int) -> float:
        """Worst-case scan error from the Lipschitz bound sqrt(m) * pi."""
        return float(np.sqrt(m) * np.pi * (2.0 * np.pi / self.resolution))


DEFAULT_GRID = GridSpec()


def o2_grid_distance(X, Y, grid: GridSpec = DEFAULT_GRID) -> float:
    """Quotient distance for k = 2 by scanning all of O(2).

    Evaluates the aligned product-sphere distance at grid.resolution
    equally spaced rotation angles and again at the same number of
    reflection angles, and returns the smallest value. Upper-bounds the
    true distance; the gap is at most grid.error_bound(m).
    """
    X = check_unit_rows(X, "X")
    Y = check_unit_rows(Y, "Y")
    if X.shape != Y.shape or X.shape[1] != 2:
        raise InvalidInput("o2_grid_distance needs two matrices of matching shape with k = 2")
    phi = np.linspace(0.0, 2.0 * np.pi, grid.resolution, endpoint=False)
    c, s = np.cos(phi), np.sin(phi)
    # rows of X O for every angle at once; O = [[c, -s], [s, c]]
    a, b = X[:, 0], X[:, 1]
    rot0 = np.outer(a, c) + np.outer(b, s)  # first coordinate of each rotated row
    rot1 = np.outer(-a, s) + np.outer(b, c)
    # reflections: O = [[c, s], [s, -c]]
    ref0 = np.outer(a, c) + np.outer(b, s)
    ref1 = np.outer(a, s) - np.outer(b, c)
    best = np.inf
    for u0, u1 in ((rot0, rot1), (ref0, ref1)):
        inner = np.clip(u0 * Y[:, [0]] + u1 * Y[:, [1]], -1.0, 1.0)
        th = np.arccos(inner)
        best = min(best, float(np.min(np.sum(th * th, axis=0))))
    return float(np.sqrt(best))


def fd_gradient(loss, point, tangent_basis, retract, h: float = 1e-5):
    """Gradient coordinates by central finite differences along a basis.

    For each basis direction b the derivative is estimated from
    loss(retract(point, t b)) at t = +-h and +-h/2 and the two central
    differences are Richardson-combined, cancelling the h^2 error term.
    """
    if not 1e-8 <= h <= 1e-3:
        raise InvalidInput(f"step {h} outside the supported range [1e-8, 1e-3]")
    coords = []
    for b in tangent_basis:
        d_h = (loss(retract(point, h * b)) - loss(retract(point, -h * b))) / (2.0 * h)
        d_half = (
            loss(retract(point, 0.5 * h * b)) - loss(retract(point, -0.5 * h * b))
        ) / h
        val = (4.0 * d_half - d_h) / 3.0
        if not np.isfinite(val):
            raise InvalidInput("loss returned a non-finite value near the base point")
        coords.append(float(val))
    return np.asarray(coords)


def exhaustive_small_frechet(points, weights, resolution: int = 200000) -> np.ndarray:
    """Weighted Frechet mean on the circle by exhaustive angle scan.

    points is an n x 2 array of unit vectors. Returns the unit vector
    minimizing the weighted sum of squared angles over a dense grid of
    candidate angles.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise InvalidInput("points must be an n x 2 array of circle points")
    norms = np.linalg.norm(P, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise InvalidInput("points must have unit norm")
    w = np.asarray(weights, dtype=float)
    if w.shape != (P.shape[0],) or np.any(w < 0.0) or w.sum() <= 0.0:
        raise InvalidInput("weights must be nonnegative with positive sum")
    ang = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    cand = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    inner = np.clip(cand @ P.T, -1.0, 1.0)
    th = np.arccos(inner)
    obj = (th * th) @ w
    return cand[int(np.argmin(obj))]
