"""The quotient of the product of spheres by a common rotation of all rows.

Two unit-row matrices are identified when one is the other times a single
orthogonal k x k matrix; orbits correspond one-to-one with correlation
matrices of rank at most k. The quotient distance is the product-sphere
distance after the best aligning rotation, found by Riemannian gradient
descent on O(k) from a Procrustes start plus random restarts.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import AlignmentStagnation, InvalidInput, RetractionFailure
from .kernels import (
    DEFAULT_RANK_TOL,
    RankTolerance,
    numerical_rank,
    procrustes,
    qf,
    random_orthogonal,
    skew_part,
)
from .orthogonal_group import og_armijo
from .product_sphere import (
    ProductTangent,
    _row_angles,
    angle_grad_coef,
    check_unit_rows,
    ps_exp,
    ps_log,
)


@dataclass(frozen=True)
class OrbitPoint:
    """An orbit, stored through one unit-row representative."""

    rep: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", check_unit_rows(self.rep, "rep"))

    @property
    def m(self) -> int:
        return self.rep.shape[0]

    @property
    def k(self) -> int:
        return self.rep.shape[1]


def as_orbit(X) -> OrbitPoint:
    """Coerce a unit-row matrix (or pass through an OrbitPoint)."""
    return X if isinstance(X, OrbitPoint) else OrbitPoint(np.asarray(X, dtype=float))


def _rep(X) -> np.ndarray:
    return X.rep if isinstance(X, OrbitPoint) else check_unit_rows(X)


@dataclass(frozen=True)
class AlignmentResult:
    """Outcome of the rotation search between two orbit representatives.

    rotation is the minimizing O, aligned the equivalent second
    representative Y O^T, so the product-sphere distance from X to aligned
    is sqrt(loss).
    """

    rotation: np.ndarray
    aligned: np.ndarray
    loss: float
    grad_norm: float
    iterations: int
    converged: bool
    restarts_used: int
    stagnated: bool = False
    clamped_rows: tuple = ()


def _align_loss(X, Y):
    def loss(O):
        th = _row_angles(X @ O, Y)[1]
        return float(th @ th)

    return loss


def _descend(X, Y, O, cfg: SolverConfig):
    """Riemannian gradient descent of the alignment loss from a given start.

    Each accepted backtracking step is refined by one quadratic
    interpolation along the same direction: plain geometric backtracking
    can land on a step whose iterates hop across the valley with
    vanishing contraction, and the interpolated step restores a linear
    rate at the cost of at most two extra loss evaluations. The next
    line search starts near the step just taken, so the typical search
    accepts its first trial.
    """
    loss = _align_loss(X, Y)
    clamped_any = False
    stagnated = False
    floored = False
    it = 0
    gn = np.inf
    val = np.inf
    prev_val = np.inf
    stall = 0
    trial_init = cfg.armijo_initial
    for it in range(cfg.max_iters + 1):
        c, th = _row_angles(X @ O, Y)
        val = float(th @ th)
        coef, clamped = angle_grad_coef(c, th)
        clamped_any = clamped_any or bool(np.any(clamped))
        G = (X * coef[:, None]).T @ Y
        grad = O @ skew_part(O.T @ G)
        gn = float(np.linalg.norm(grad))
        if gn <= cfg.grad_tol or it == cfg.max_iters:
            break
        # a run of sub-rounding improvements means the loss has hit its
        # floating-point floor; further line searches cannot make progress
        stall = stall + 1 if prev_val - val <= 1e-14 * max(1.0, val) else 0
        prev_val = val
        if stall >= 5:
            # benign when the leftover gradient is tiny, a true stall otherwise
            floored = gn <= cfg.stagnation_tol
            stagnated = not floored
            break
        step_cfg = (
            cfg
            if trial_init == cfg.armijo_initial
            else cfg.with_(armijo_initial=trial_init)
        )
        step, O_next = og_armijo(loss, O, -grad, step_cfg, loss0=val)
        if step == 0.0:
            # same split as the stall counter: no improving step exists at
            # the rounding floor, which is only a failure with a live gradient
            floored = gn <= cfg.stagnation_tol
            stagnated = not floored
            break
        taken = step
        val_next = loss(O_next)
        # quadratic model through loss(0), slope -gn^2, loss(step)
        denom = val_next - val + step * gn * gn
        if denom > 0.0:
            a_star = 0.5 * gn * gn * step * step / denom
            if 0.0 < a_star < step:
                try:
                    O_alt = qf(O - a_star * grad)
                except RetractionFailure:
                    O_alt = None
                if O_alt is not None and loss(O_alt) < val_next:
                    O_next = O_alt
                    taken = a_star
        trial_init = min(cfg.armijo_initial, 2.0 * taken)
        O = O_next
    conv = gn <= cfg.grad_tol or floored
    return O, val, gn, it, conv, stagnated, clamped_any


def align(X, Y, cfg: SolverConfig = DEFAULT_CONFIG, extra_inits=()) -> AlignmentResult:
    """Best common rotation carrying X onto Y's orbit representative.

    Gradient descent on O(k) of the sum of squared row angles between X O
    and Y, initialized at the Procrustes rotation plus cfg.restarts - 1
    seeded random orthogonal starts (and any caller-supplied extra_inits).
    The lowest loss over all starts wins.
    """
    X = _rep(X)
    Y = _rep(Y)
    if X.shape != Y.shape:
        raise InvalidInput(f"shape mismatch {X.shape} vs {Y.shape}")
    k = X.shape[1]
    rng = np.random.default_rng(cfg.seed)
    starts = [procrustes(X, Y)]
    starts += [random_orthogonal(k, rng) for _ in range(max(0, cfg.restarts - 1))]
    starts += [np.asarray(O, dtype=float) for O in extra_inits]

    best = None
    used = 0
    for O0 in starts:
        result = _descend(X, Y, O0, cfg)
        used += 1
        if best is None or result[1] < best[1]:
            best = result
        if best[1] <= 1e-28:
            # the loss cannot go below zero; skip the remaining starts
            break
    O, val, gn, it, conv, stag, clamped = best
    clamped_rows = ()
    if clamped:
        c, th = _row_angles(X @ O, Y)
        clamped_rows = tuple(np.flatnonzero(angle_grad_coef(c, th)[1]))
    return AlignmentResult(
        rotation=O,
        aligned=Y @ O.T,
        loss=val,
        grad_norm=gn,
        iterations=it,
        converged=conv,
        restarts_used=used,
        stagnated=stag,
        clamped_rows=clamped_rows,
    )


def orbit_dist(X, Y, cfg: SolverConfig = DEFAULT_CONFIG, extra_inits=()) -> float:
    """Quotient distance: aligned product-sphere distance.

    With cfg.symmetrize the rotation search runs in both orders and the
    smaller loss wins, which enforces exact symmetry of the reported value.
    """
    a = align(X, Y, cfg, extra_inits)
    best = a.loss
    if cfg.symmetrize:
        b = align(Y, X, cfg, [np.asarray(O, dtype=float).T for O in extra_inits])
        best = min(best, b.loss)
    return float(np.sqrt(max(best, 0.0)))


def orbit_equal(X, Y, cfg: SolverConfig = DEFAULT_CONFIG) -> bool:
    """Whether two representatives lie on the same orbit within cfg.equality_tol."""
    return orbit_dist(X, Y, cfg) <= cfg.equality_tol


def _vertical_coefficient(X, V):
    """Skew A with X A the vertical component of the tangent V at X."""
    from .kernels import sylvester_spd

    A = sylvester_spd(X.T @ X, X.T @ V - V.T @ X)
    return 0.5 * (A - A.T)


def _newton_polish(X, Y, O, target: float = 1e-13, max_steps: int = 8):
    """Drive the rotation-search gradient to machine scale.

    The backtracking search stalls once loss differences fall below
    machine precision, which leaves the rotation accurate only to about
    sqrt(eps); a rank reading of the aligned representative then sits
    exactly at the default tolerance. The gradient formula itself is
    accurate to eps, so a damped Newton iteration on it (finite-difference
    Jacobian over the Lie algebra, pseudoinverse solve so stabilizer
    directions of a rank-deficient cloud stay untouched) recovers the
    missing digits.
    """
    k = O.shape[0]
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]

    def grad_coords(Q):
        c, th = _row_angles(X @ Q, Y)
        coef, clamped = angle_grad_coef(c, th)
        if np.any(clamped):
            return None
        M = skew_part(Q.T @ ((X * coef[:, None]).T @ Y))
        return np.array([M[a, b] for a, b in pairs])

    def exp_step(Q, delta):
        D = np.zeros((k, k))
        for (a, b), d in zip(pairs, delta):
            D[a, b], D[b, a] = d, -d
        return Q @ expm(D)

    g = grad_coords(O)
    if g is None:
        return O
    gn = float(np.linalg.norm(g))
    h = 1e-6
    for _ in range(max_steps):
        if gn <= target:
            break
        cols = []
        for j in range(len(pairs)):
            e = np.zeros(len(pairs))
            e[j] = h
            gp = grad_coords(exp_step(O, e))
            gm = grad_coords(exp_step(O, -e))
            if gp is None or gm is None:
                return O
            cols.append((gp - gm) / (2.0 * h))
        J = np.stack(cols, axis=1)
        delta = -np.linalg.pinv(J, rcond=1e-10) @ g
        improved = False
        for _ in range(5):
            cand = exp_step(O, delta)
            g_c = grad_coords(cand)
            if g_c is not None:
                gn_c = float(np.linalg.norm(g_c))
                if gn_c < gn:
                    O, g, gn = cand, g_c, gn_c
                    improved = True
                    break
            delta *= 0.5
        if not improved:
            break
    return O


def _polish_alignment(X, aligned, cfg: SolverConfig, max_polish: int = 50):
    """Rotate the aligned representative until the log is horizontal.

    First-order optimality of the alignment is exactly horizontality of
    the logarithm, so the residual skew coefficient A doubles as a
    correction: composing the aligned representative with exp(-A) shrinks
    the vertical component. Damped fixed-point iteration on that residual
    converges well below the loss-based line search's rounding floor.
    Returns (aligned, vertical_norm).
    """

    def residual(W):
        V = ps_log(X, W, guard=cfg.antipodal_guard)
        A = _vertical_coefficient(X, V.vec)
        return A, float(np.linalg.norm(X @ A))

    A, vn = residual(aligned)
    for _ in range(max_polish):
        if vn <= 0.01 * cfg.horiz_tol:
            break
        step = 1.0
        improved = False
        for _ in range(6):
            cand = aligned @ expm(-step * A)
            A_c, vn_c = residual(cand)
            if vn_c < vn:
                aligned, A, vn = cand, A_c, vn_c
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return aligned, vn


def orbit_log(X, Y, cfg: SolverConfig = DEFAULT_CONFIG) -> ProductTangent:
    """Logarithm in the quotient: rowwise log toward the aligned representative.

    Aligns Y to X first, then takes the product-sphere logarithm. When X
    has full rank the aligned representative is polished along the orbit
    until the vertical component of the log is driven (well) below
    cfg.horiz_tol, and the tangent carries the certificate
    (horizontal_certified, vertical_norm); rank-deficient base points skip
    the certificate.
    """
    Xp = as_orbit(X)
    Yp = _rep(Y)
    r = align(Xp, Yp, cfg)
    if r.stagnated and r.grad_norm > cfg.stagnation_tol:
        raise AlignmentStagnation(
            f"rotation search stalled at gradient norm {r.grad_norm:.3e}"
        )
    O = _newton_polish(Xp.rep, Yp, r.rotation)
    aligned = Yp @ O.T
    certified = None
    vnorm = None
    if numerical_rank(Xp.rep) == Xp.k:
        aligned, vnorm = _polish_alignment(Xp.rep, aligned, cfg)
        certified = vnorm <= cfg.horiz_tol
    V = ps_log(Xp.rep, aligned, guard=cfg.antipodal_guard)
    return ProductTangent(
        base=V.base, vec=V.vec, horizontal_certified=certified, vertical_norm=vnorm
    )


def horizontality_defect(X, V) -> float:
    """Frobenius norm of V^T X - X^T V, zero exactly when V is horizontal."""
    X = _rep(X)
    V = V.vec if isinstance(V, ProductTangent) else np.asarray(V, dtype=float)
    return float(np.linalg.norm(V.T @ X - X.T @ V))


def orbit_exp(X, V, t: float = 1.0, cfg: SolverConfig = DEFAULT_CONFIG) -> OrbitPoint:
    """Exponential in the quotient: rowwise exponential of a horizontal tangent.

    Horizontality is the caller's responsibility by default; set
    cfg.require_horizontal to have the defect checked against cfg.horiz_tol
    (relative to the tangent norm).
    """
    Xp = as_orbit(X)
    vec = V.vec if isinstance(V, ProductTangent) else np.asarray(V, dtype=float)
    if cfg.require_horizontal:
        defect = horizontality_defect(Xp.rep, vec)
        if defect > cfg.horiz_tol * max(1.0, float(np.linalg.norm(vec))):
            raise InvalidInput(f"tangent is not horizontal (defect {defect:.3e})")
    return OrbitPoint(ps_exp(Xp.rep, vec, t))


@dataclass(frozen=True)
class GeodesicSegment:
    """A constant-speed geodesic t -> exp(start, t * velocity), t in [0, duration]."""

    start: np.ndarray
    velocity: ProductTangent
    duration: float

    def __post_init__(self):
        start = check_unit_rows(self.start, "start")
        if not np.allclose(self.velocity.base, start, rtol=0.0, atol=1e-10):
            raise InvalidInput("velocity is not based at the start point")
        if not (self.duration > 0.0 and np.isfinite(self.duration)):
            raise InvalidInput(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "start", start)

    def point(self, t: float) -> np.ndarray:
        return ps_exp(self.start, self.velocity.vec, t)


def geodesic_rank_profile(
    seg: GeodesicSegment, samples: int, tol: RankTolerance = DEFAULT_RANK_TOL
):
    """Ranks along a geodesic: both endpoints plus `samples` interior points.

    Returns a list of (t, rank) pairs in increasing t.
    """
    if samples < 1:
        raise InvalidInput("need at least one interior sample")
    ts = np.linspace(0.0, seg.duration, samples + 2)
    return [(float(t), numerical_rank(seg.point(t), tol)) for t in ts]


def _min_gap(X, V, t, tol: RankTolerance) -> float:
    """Smallest singular value minus the effective rank threshold at time t."""
    sigma = np.linalg.svd(ps_exp(X, V, t), compute_uv=False)
    return float(sigma[-1] - tol.threshold(sigma[0]))


def _first_drop(X, V, T: float, tol: RankTolerance, grid: int = 1024):
    """Smallest t in (0, T] where the rank drops, or None. Resolved to 1e-7."""
    ts = np.linspace(0.0, T, grid + 1)
    # batched singular values along the whole path
    pts = np.stack([ps_exp(X, V, t) for t in ts])
    sig = np.linalg.svd(pts, compute_uv=False)
    gaps = sig[:, -1] - np.maximum(tol.absolute_floor, tol.relative * sig[:, 0])

    def refine_edge(a: float, b: float) -> float:
        # invariant: gap(a) > 0 >= gap(b)
        while b - a > 1e-7:
            mid = 0.5 * (a + b)
            if _min_gap(X, V, mid, tol) > 0.0:
                a = mid
            else:
                b = mid
        return a

    # candidate dips: grid crossings and interior local minima of the gap
    for i in range(1, grid + 1):
        if gaps[i] <= 0.0:
            return refine_edge(ts[i - 1], ts[i])
        is_min = gaps[i] <= gaps[i - 1] and (i == grid or gaps[i] <= gaps[i + 1])
        if not is_min:
            continue
        lo, hi = ts[i - 1], ts[min(i + 1, grid)]
        res = minimize_scalar(
            lambda t: _min_gap(X, V, t, tol),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun <= 0.0:
            return refine_edge(lo, float(res.x))
    return None


def max_full_rank_interval(
    X,
    V,
    t_max_search: float = 10.0,
    tol: RankTolerance = DEFAULT_RANK_TOL,
    cfg: SolverConfig = DEFAULT_CONFIG,
):
    """Largest interval around 0 on which t -> exp(X, t V) keeps full rank.

    Scans (-t_max_search, t_max_search) with a dense grid of smallest
    singular values, refines every candidate dip with a bounded scalar
    minimization (rank drops may touch zero without crossing), and bisects
    the first certified drop to 1e-7 in t. Returns (t_min, t_max), using
    -t_max_search or t_max_search when no drop is found on that side.
    """
    Xp = _rep(X)
    vec = V.vec if isinstance(V, ProductTangent) else np.asarray(V, dtype=float)
    if vec.shape != Xp.shape:
        raise InvalidInput(f"velocity shape {vec.shape} does not match {Xp.shape}")
    if not (t_max_search > 0.0 and np.isfinite(t_max_search)):
        raise InvalidInput("t_max_search must be positive and finite")
    k = Xp.shape[1]
    if numerical_rank(Xp, tol) < k:
        raise InvalidInput("base point is rank deficient")
    if np.linalg.norm(vec) == 0.0:
        return (-t_max_search, t_max_search)
    up = _first_drop(Xp, vec, t_max_search, tol)
    down = _first_drop(Xp, -vec, t_max_search, tol)
    t_max = t_max_search if up is None else up
    t_min = -t_max_search if down is None else -down
    return (float(t_min), float(t_max))


def k_embedding(X, k2: int) -> OrbitPoint:
    """Embed into a wider quotient by zero-padding columns to width k2."""
    Xp = _rep(X)
    k = Xp.shape[1]
    if k2 < k:
        raise InvalidInput(f"target width {k2} is below current width {k}")
    pad = np.zeros((Xp.shape[0], k2 - k))
    return OrbitPoint(np.hstack([Xp, pad]))
