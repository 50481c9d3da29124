"""The diagonal-dominance relaxation ``rel(A) = min { prod D_ii : D diagonal, D >= A }``.

With ``A = V^H V`` and ``x = 1 / diag(D)`` the problem becomes the convex program

    minimize  -sum(log x)   subject to   I - V diag(x) V^H >= 0,

solved here by a primal log-barrier path-following method: damped Newton on
``F_mu(x) = -sum(log x) - mu * logdet(I - V diag(x) V^H)`` for a geometric
sequence of ``mu``. The barrier is a ``d``-dimensional log-det, so a point
centred for ``mu`` is within ``d * mu`` of the optimum.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import Infeasible, NewtonFailure, StageLimit, ZeroDiagonal
from .linalg import CholeskyFactor, cholesky_factor, lambda_max, lambda_min
from .permanent import ZERO_DIAG_RTOL

ARMIJO = 1e-4
# Centring stops once the scaled Newton decrement drops below this.
CENTER_TOL = 1e-5
MIN_STEP = 2.0**-60


@dataclass(frozen=True)
class SolverOptions:
    tol_opt: float = 1e-8
    tol_feas: float = 1e-9
    mu0: float = 1.0
    mu_shrink: float = 0.25
    max_newton: int = 60
    max_stages: int = 80

    def __post_init__(self):
        for name in ("tol_opt", "tol_feas", "mu0", "max_newton", "max_stages"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.mu_shrink < 1:
            raise ValueError("mu_shrink must lie in (0, 1)")


@dataclass(frozen=True)
class StageRecord:
    mu: float
    newton_steps: int
    objective: float


@dataclass(frozen=True)
class RelaxationSolution:
    x: np.ndarray
    log_rel: float
    feas_margin: float
    rank: int
    stages: list = field(default_factory=list)
    degenerate: bool = False

    @property
    def rel(self):
        return math.exp(self.log_rel) if self.log_rel > -math.inf else 0.0

    @property
    def D(self):
        """Optimal diagonal ``D*`` as a vector."""
        with np.errstate(divide="ignore"):
            return 1.0 / self.x


def _V(V):
    return V.V if isinstance(V, CholeskyFactor) else np.asarray(V, dtype=complex)


def _slack(V, x):
    d = V.shape[0]
    return np.eye(d) - (V * x) @ V.conj().T


def _chol(S):
    try:
        return scipy.linalg.cholesky(S, lower=True)
    except np.linalg.LinAlgError:
        return None


def barrier_value_grad(x, V, mu):
    """Value and gradient of ``F_mu(x) = -sum(log x) - mu logdet(I - V diag(x) V^H)``.

    ``dF/dx_i = -1/x_i + mu * v_i^H S^{-1} v_i`` with ``S = I - V diag(x) V^H``
    and ``v_i`` the i-th column of ``V``.
    """
    V = _V(V)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise Infeasible("x must be strictly positive")
    value = -float(np.sum(np.log(x)))
    grad = -1.0 / x
    if mu == 0:
        return value, grad
    L = _chol(_slack(V, x))
    if L is None:
        raise Infeasible("I - V diag(x) V^H is not positive definite")
    Y = scipy.linalg.solve_triangular(L, V, lower=True)
    value -= mu * 2.0 * float(np.sum(np.log(L.diagonal().real)))
    grad = grad + mu * np.sum(np.abs(Y) ** 2, axis=0)
    return value, grad


def _newton_system(x, V, mu):
    L = _chol(_slack(V, x))
    if L is None:
        raise Infeasible("iterate left the feasible region")
    Y = scipy.linalg.solve_triangular(L, V, lower=True)
    W = Y.conj().T @ Y  # W_ij = v_i^H S^{-1} v_j
    grad = -1.0 / x + mu * W.diagonal().real
    hess = np.diag(1.0 / x**2) + mu * np.abs(W) ** 2
    return L, grad, hess


def feasible_start(A, V=None):
    """``x0 = 1 / (2 lambda_max(A))`` so that ``V diag(x0) V^H`` has top eigenvalue 1/2."""
    A = np.asarray(A)
    return np.full(A.shape[0], 1.0 / (2.0 * lambda_max(A)))


def random_feasible_start(V, rng):
    """Random positive ``x`` scaled so ``V diag(x) V^H`` has top eigenvalue 1/2."""
    V = _V(V)
    x = rng.uniform(0.1, 1.0, V.shape[1])
    top = lambda_max((V * x) @ V.conj().T)
    return x / (2.0 * top)


def x_bounds(A):
    """Box containing the optimal ``x``.

    ``hi_i = 1/A_ii`` and ``lo_i = prod_j A_jj / (lam^n A_ii)`` with ``lam``
    slightly above the top eigenvalue of ``A``. ``lo`` is formed in log space.
    """
    A = np.asarray(A)
    d = A.diagonal().real
    if np.any(d <= 0):
        raise ZeroDiagonal("x_bounds needs a strictly positive diagonal")
    lam = lambda_max(A) * (1.0 + 1e-9)
    n = d.size
    log_lo = float(np.sum(np.log(d))) - n * math.log(lam) - np.log(d)
    return np.exp(log_lo), 1.0 / d


def _step_matrix_eigs(L, V, dx):
    # eigenvalues of L^{-1} V diag(dx) V^H L^{-H}; S(x + t dx) = L (I - t K) L^H
    Y = scipy.linalg.solve_triangular(L, V, lower=True)
    K = (Y * dx) @ Y.conj().T
    return np.linalg.eigvalsh(0.5 * (K + K.conj().T))


def _center(x, V, mu, opts, tol):
    steps = 0
    for _ in range(opts.max_newton):
        L, grad, hess = _newton_system(x, V, mu)
        # solve in x-scaled coordinates: X H X = I + mu X|W|^2 X is well conditioned
        scaled = hess * np.outer(x, x)
        try:
            dx = -x * scipy.linalg.solve(scaled, x * grad, assume_a="pos")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            dx = -x * np.linalg.lstsq(scaled, x * grad, rcond=None)[0]
        slope = float(grad @ dx)
        decrement = math.sqrt(max(-slope, 0.0) / mu)
        if decrement <= tol:
            return x, steps
        kappa = _step_matrix_eigs(L, V, dx)
        ratio = dx / x
        t = 1.0
        while True:
            if np.all(1.0 + t * ratio > 0) and np.all(1.0 - t * kappa > 0):
                change = -np.sum(np.log1p(t * ratio)) - mu * np.sum(np.log1p(-t * kappa))
                if change <= ARMIJO * t * slope:
                    break
            t *= 0.5
            if t < MIN_STEP:
                if decrement < 1e-3:
                    return x, steps
                raise NewtonFailure(f"line search stalled at mu={mu:.3g} (decrement {decrement:.3g})")
        x = x + t * dx
        steps += 1
    return x, steps


def rel_solve(A, opts=None, x0=None):
    """Compute ``rel(A)`` to within ``opts.tol_opt`` in log domain.

    Parameters
    ----------
    A : ndarray
        Admitted hermitian PSD matrix.
    opts : SolverOptions, optional
    x0 : ndarray, optional
        Strictly feasible starting point; defaults to :func:`feasible_start`.

    Returns
    -------
    RelaxationSolution
        ``x`` is the optimal inverse diagonal and ``log_rel = -sum(log x)``.
        If some diagonal entry of ``A`` vanishes the solution is flagged
        ``degenerate`` with ``log_rel = -inf`` and ``x_i = inf`` on those rows.
    """
    opts = opts or SolverOptions()
    A = np.asarray(A)
    n = A.shape[0]
    diag = A.diagonal().real
    if np.any(diag <= ZERO_DIAG_RTOL * max(diag.max(), 0.0)):
        lam = max(lambda_max(A), 1.0) * (1.0 + 1e-9)
        x = np.where(diag <= ZERO_DIAG_RTOL * max(diag.max(), 0.0), np.inf, 1.0 / lam)
        return RelaxationSolution(x=x, log_rel=-math.inf, feas_margin=0.0, rank=0, degenerate=True)

    factor = cholesky_factor(A)
    V = factor.V
    d = factor.d
    x = feasible_start(A) if x0 is None else np.array(x0, dtype=float)
    if np.any(x <= 0) or _chol(_slack(V, x)) is None:
        raise Infeasible("starting point is not strictly feasible")

    mu = opts.mu0
    stages = []
    for _ in range(opts.max_stages):
        final = d * mu <= opts.tol_opt
        x, steps = _center(x, V, mu, opts, min(CENTER_TOL, opts.tol_opt) if final else CENTER_TOL)
        stages.append(StageRecord(mu=mu, newton_steps=steps, objective=-float(np.sum(np.log(x)))))
        if final:
            break
        mu *= opts.mu_shrink
    else:
        raise StageLimit(f"path following stopped at mu={mu:.3g} after {opts.max_stages} stages")

    margin = lambda_min(_slack(V, x))
    return RelaxationSolution(
        x=x,
        log_rel=-float(np.sum(np.log(x))),
        feas_margin=margin,
        rank=d,
        stages=stages,
    )
