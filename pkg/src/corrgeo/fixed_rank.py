"""Horizontal and vertical structure over full-rank orbit representatives.

At a full-rank X the tangent space of the product of spheres splits into
the vertical space {X W : W skew} tangent to the orbit and its orthogonal
complement, the horizontal space {V : V^T X = X^T V}. Quotient-level
tangents are represented by horizontal lifts; gradients of rotation
invariant functions lift by projecting the ambient gradient.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import InvalidInput
from .kernels import numerical_rank, sylvester_spd
from .product_sphere import ProductTangent, check_unit_rows, ps_project


@dataclass(frozen=True)
class HorizontalTangent(ProductTangent):
    """A tangent certified horizontal at construction time."""

    defect: float = 0.0


def _full_rank_rep(X) -> np.ndarray:
    X = X.rep if hasattr(X, "rep") else check_unit_rows(X)
    if numerical_rank(X) < X.shape[1]:
        raise InvalidInput("base point must have full rank k")
    return X


def _tangent_vec(X, W) -> np.ndarray:
    if isinstance(W, ProductTangent):
        if not np.allclose(W.base, X, rtol=0.0, atol=1e-10):
            raise InvalidInput("tangent base does not match X")
        return W.vec
    W = np.asarray(W, dtype=float)
    if W.shape != X.shape:
        raise InvalidInput(f"shape mismatch {W.shape} vs {X.shape}")
    return W


def vertical_project(X, W) -> ProductTangent:
    """Component of a tangent along the orbit through X.

    Solves (X^T X) A + A (X^T X) = X^T W - W^T X for the skew matrix A and
    returns X A. Fixed points are exactly the vertical vectors X Omega.
    """
    X = _full_rank_rep(X)
    V = _tangent_vec(X, W)
    A = sylvester_spd(X.T @ X, X.T @ V - V.T @ X)
    A = 0.5 * (A - A.T)  # keep the solution exactly skew
    return ProductTangent(X, X @ A)


def horizontal_project(X, W) -> HorizontalTangent:
    """Horizontal component: the tangent minus its vertical projection."""
    X = _full_rank_rep(X)
    V = _tangent_vec(X, W)
    H = V - vertical_project(X, V).vec
    defect = float(np.linalg.norm(H.T @ X - X.T @ H))
    return HorizontalTangent(base=X, vec=H, defect=defect)


def quotient_metric(
    U, V, X=None, cfg: SolverConfig = DEFAULT_CONFIG
) -> float:
    """Inner product of two horizontal tangents at the same full-rank point.

    Both arguments must be horizontal within cfg.horiz_tol relative to
    their norms; the metric is then the Frobenius inner product of the
    lifts.
    """
    if not isinstance(U, ProductTangent) or not isinstance(V, ProductTangent):
        raise InvalidInput("quotient_metric expects tangent objects")
    if not np.allclose(U.base, V.base, rtol=0.0, atol=1e-10):
        raise InvalidInput("tangents live at different base points")
    X = _full_rank_rep(U.base if X is None else X)
    for name, T in (("first", U), ("second", V)):
        defect = float(np.linalg.norm(T.vec.T @ X - X.T @ T.vec))
        if defect > cfg.horiz_tol * max(1.0, float(np.linalg.norm(T.vec))):
            raise InvalidInput(f"{name} tangent is not horizontal (defect {defect:.3e})")
    return float(np.sum(U.vec * V.vec))


def lift_gradient(X, euclidean_grad) -> HorizontalTangent:
    """Horizontal lift of the gradient of a rotation-invariant function.

    Projects the ambient m x k gradient to the product-sphere tangent space
    and then to the horizontal space. For a function invariant under the
    common rotation the vertical component already vanishes up to rounding,
    so the second projection only certifies horizontality.
    """
    X = _full_rank_rep(X)
    G = np.asarray(euclidean_grad, dtype=float)
    if G.shape != X.shape:
        raise InvalidInput(f"gradient shape {G.shape} does not match {X.shape}")
    V = ps_project(X, G)
    return horizontal_project(X, V.vec)
