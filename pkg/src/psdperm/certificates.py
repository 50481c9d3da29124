"""Lower bounds and estimators for PSD permanents.

* Marcus bounds from the diagonal.
* Rank-one certificates ``A >= w w^H``, extracted from an optimal relaxation
  solution, giving the lower bound ``per(w w^H) = n! prod |w_i|^2``.
* The unbiased complex-Gaussian estimator ``per(V^H V) = E |prod_i (V^H x)_i|^2``.
* The geometric/arithmetic mean functional ``f`` of a finite ensemble of unit vectors.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSamples, DimensionMismatch, EmptyEigenspace, ZeroDenominator
from .linalg import CholeskyFactor, diag_congruence, eigh, lambda_min, max_norm
from .permanent import ZERO_DIAG_RTOL, LogNonneg, log_factorial, per_diagonal, per_rank1
from .sampling import DEFAULT_SEED, make_rng, sample_cnormal

EULER_GAMMA = 0.5772156649015329
TOL_CERT = 1e-7


@dataclass(frozen=True)
class VectorEnsemble:
    """Uniform distribution over the columns of ``U`` (unit vectors in C^d)."""

    U: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.ndim != 2 or U.shape[1] == 0:
            raise ValueError("ensemble needs a (d, n) array with n >= 1")
        if np.max(np.abs(np.linalg.norm(U, axis=0) - 1.0)) > 1e-12:
            raise ValueError("ensemble columns must have unit norm")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)

    @property
    def d(self):
        return self.U.shape[0]

    @property
    def n(self):
        return self.U.shape[1]

    @classmethod
    def standard_basis(cls, d):
        return cls(np.eye(d, dtype=complex))


@dataclass(frozen=True)
class Rank1Certificate:
    w: np.ndarray
    log_lower: LogNonneg
    loewner_margin: float
    eig_tol_used: float
    eigenspace_dim: int


@dataclass(frozen=True)
class McEstimate:
    mean_log: float
    std_err_rel: float
    samples: int
    seed: int

    def z_score(self, true_log):
        """Standardized error of the linear-scale mean against a known log value."""
        return (math.exp(self.mean_log - true_log) - 1.0) / self.std_err_rel


class Verification(NamedTuple):
    margin: float
    log_lower: LogNonneg
    passed: bool


def marcus_bounds(A):
    """``prod A_ii <= per(A) <= n! prod A_ii`` for PSD ``A``."""
    A = np.asarray(A)
    diag = np.clip(A.diagonal().real, 0.0, None)
    # same zero-diagonal cut as the permanent and the relaxation, so the bounds stay ordered
    diag[diag <= ZERO_DIAG_RTOL * diag.max()] = 0.0
    lower = per_diagonal(diag)
    upper = lower * LogNonneg.from_log(log_factorial(A.shape[0]))
    return lower, upper


def verify_rank1(A, w, tol_cert=TOL_CERT):
    A = np.asarray(A)
    w = np.asarray(w, dtype=complex).ravel()
    if w.size != A.shape[0]:
        raise DimensionMismatch(f"vector of length {w.size} for a {A.shape[0]}x{A.shape[0]} matrix")
    margin = lambda_min(A - np.outer(w, w.conj()))
    passed = margin >= -tol_cert * (1.0 + max_norm(A))
    return Verification(margin, per_rank1(w), bool(passed))


def _log_geo_over_arith(M, Z):
    """Row-wise ``mean log|Mz|^2 - log mean |Mz|^2`` for the rows ``z`` of ``Z``."""
    a2 = np.abs(Z @ M.T) ** 2
    with np.errstate(divide="ignore"):
        return np.mean(np.log(a2), axis=1) - np.log(np.mean(a2, axis=1))


def _ascend(M, z, steps, step=0.1):
    """Projected gradient ascent of ``mean log|Mz|^2 - log mean|Mz|^2`` on the unit sphere.

    The objective is invariant under ``z -> c z``, so ``z`` is renormalized after
    every step. The step is halved whenever a trial fails to improve.
    """
    z = z / np.linalg.norm(z)
    best = _log_geo_over_arith(M, z[None, :])[0]
    n = M.shape[0]
    MH = M.conj().T
    for _ in range(steps):
        a = M @ z
        a2 = np.abs(a) ** 2
        grad = MH @ (a / a2) / n - MH @ a / a2.sum()
        trial = z + step * grad
        trial /= np.linalg.norm(trial)
        value = _log_geo_over_arith(M, trial[None, :])[0]
        if value > best:
            z, best = trial, value
        else:
            step *= 0.5
            if step < 1e-14:
                break
    return z, best


def _best_direction(M, n_samples, ascent_steps, rng):
    Z = sample_cnormal(M.shape[1], rng, n_samples)
    scores = _log_geo_over_arith(M, Z)
    if not np.any(np.isfinite(scores)):
        raise DegenerateSamples("every sampled direction has a vanishing coordinate")
    k = int(np.argmax(scores))
    return _ascend(M, Z[k], ascent_steps)


def _largest_feasible_scale(A, w):
    # bisection for the largest s in (0, 1] with A - s w w^H >= 0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if lambda_min(A - mid * np.outer(w, w.conj())) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def extract_rank1(A, sol, eig_tol=1e-6, n_samples=512, ascent_steps=200, seed=DEFAULT_SEED, tol_cert=TOL_CERT):
    """Extract a vector ``w`` with ``A >= w w^H`` from a relaxation optimum.

    ``A`` is rescaled by ``sqrt(x*)`` so its optimal diagonal becomes the identity.
    The eigenspace of eigenvalue 1 of the rescaled matrix is searched (random
    complex-normal directions, then gradient ascent) for a unit vector with the
    largest ``prod |v_i|^2``. ``v`` is then scaled by the largest ``t`` with
    ``A~ >= t v v^H`` and mapped back to the original coordinates.
    """
    A = np.asarray(A)
    if sol.degenerate or not np.all(np.isfinite(sol.x)):
        raise ValueError("rank-one extraction needs rel(A) > 0")
    lam = np.sqrt(sol.x)
    spectrum = eigh(diag_congruence(A, lam))
    keep = spectrum.eigenvalues >= 1.0 - eig_tol
    if not np.any(keep):
        top = spectrum.eigenvalues[-1]
        raise EmptyEigenspace(f"largest rescaled eigenvalue {top:.9f} is not within {eig_tol} of 1")
    W = spectrum.eigenvectors[:, keep]
    mus = spectrum.eigenvalues[keep]

    rng = make_rng(seed)
    z, _ = _best_direction(W, n_samples, ascent_steps, rng)
    v = W @ z
    t = 1.0 / float(np.sum(np.abs(z) ** 2 / mus))
    w = math.sqrt(t) * v / lam

    check = verify_rank1(A, w, tol_cert)
    if not check.passed:
        w = w * math.sqrt(_largest_feasible_scale(A, w))
        check = verify_rank1(A, w, tol_cert)
    return Rank1Certificate(
        w=w,
        log_lower=check.log_lower,
        loewner_margin=check.margin,
        eig_tol_used=eig_tol,
        eigenspace_dim=int(keep.sum()),
    )


def gurvits_estimate(V, samples, seed=DEFAULT_SEED, batch=8192, stream=0):
    """Monte-Carlo estimate of ``per(V^H V)`` as ``E |prod_i (V^H x)_i|^2``, ``x ~ CN(0, I)``.

    Products are accumulated as logs and combined with a running log-sum-exp,
    so very small or very large permanents do not under/overflow.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    V = V.V if isinstance(V, CholeskyFactor) else np.asarray(V, dtype=complex)
    d = V.shape[0]
    rng = make_rng(seed, stream)
    sum1 = -math.inf
    sum2 = -math.inf
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        X = sample_cnormal(d, rng, b)
        with np.errstate(divide="ignore"):
            logs = np.sum(np.log(np.abs(X @ V.conj()) ** 2), axis=1)
        sum1 = np.logaddexp(sum1, np.logaddexp.reduce(logs))
        sum2 = np.logaddexp(sum2, np.logaddexp.reduce(2.0 * logs))
        done += b
    mean_log = float(sum1 - math.log(samples))
    if mean_log == -math.inf:
        return McEstimate(mean_log, 0.0, samples, int(seed))
    second = math.exp(float(sum2) - math.log(samples) - 2.0 * mean_log)
    var_rel = max(second - 1.0, 0.0) * samples / (samples - 1)
    return McEstimate(mean_log, math.sqrt(var_rel / samples), samples, int(seed))


def f_ratio(U, x):
    """Geometric over arithmetic mean of ``|u_i^H x|^2`` across the ensemble."""
    M = U.U if isinstance(U, VectorEnsemble) else np.asarray(U)
    vals = np.abs(M.conj().T @ np.asarray(x, dtype=complex)) ** 2
    mean = vals.mean()
    if mean == 0:
        raise ZeroDenominator("x is orthogonal to every ensemble vector")
    if np.any(vals == 0):
        return 0.0
    return min(1.0, math.exp(float(np.mean(np.log(vals))) - math.log(mean)))


def span_basis(U):
    """Orthonormal basis (columns) of the span of the ensemble; identity when it spans C^d."""
    M = U.U if isinstance(U, VectorEnsemble) else np.asarray(U)
    gram = M @ M.conj().T / M.shape[1]
    spectrum = eigh(gram)
    keep = spectrum.eigenvalues > 1e-12 * max(spectrum.eigenvalues[-1], 0.0)
    if keep.all():
        return np.eye(M.shape[0], dtype=complex)
    return spectrum.eigenvectors[:, keep]


def f_sup_estimate(U, n_samples=1024, ascent_steps=200, seed=DEFAULT_SEED):
    """Lower estimate of ``f(U)``: best sampled direction in the span, refined by ascent."""
    Q = span_basis(U)
    M = U.U.conj().T @ Q  # rows u_i^H Q
    _, best = _best_direction(M, n_samples, ascent_steps, make_rng(seed))
    return min(1.0, math.exp(best))
