"""Worst-case instances for the relaxation and the ratio experiment.

For unit vectors ``u_1..u_n`` spanning C^d (columns of ``U``) the projection
``A = U^H (U U^H)^{-1} U`` has ``rel(A) = 1`` while ``per(A)`` is small, and
``(rel/per)^{1/n}`` grows toward ``e / f(U)`` as the ensemble is duplicated.
"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .certificates import EULER_GAMMA, VectorEnsemble, f_sup_estimate, gurvits_estimate
from .errors import RankDeficient, SpanFailure, TooLarge
from .linalg import admit_hermitian_psd, cholesky_factor, eigh
from .permanent import RYSER_MAX_N, log_factorial, per_psd_log
from .relaxation import rel_solve
from .sampling import DEFAULT_SEED, make_rng, sample_cnormal

RATIO_LIMIT = math.exp(EULER_GAMMA + 1.0)
SPAN_FLOOR = 1e-12


@dataclass(frozen=True)
class TightInstance:
    U: VectorEnsemble
    A: np.ndarray
    f_hat: float | None
    seed: int


@dataclass(frozen=True)
class RatioRow:
    n: int
    d: int
    k: int
    seed: int
    log_rel: float
    log_per: float
    per_method: str
    ratio_root: float
    std_err_rel: float = 0.0

    @property
    def size(self):
        return self.n * self.k


@dataclass(frozen=True)
class PerBound:
    lhs: float
    rhs: float
    holds_with_fhat: bool


def _spans(U):
    w = np.linalg.eigvalsh(U @ U.conj().T)
    return w[0] > SPAN_FLOOR * w[-1]


def sphere_ensemble(d, n, seed=DEFAULT_SEED):
    """``n`` independent uniform points on the unit sphere of C^d."""
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = make_rng(seed)
    for _ in range(2):
        G = sample_cnormal(d, rng, n).T
        U = G / np.linalg.norm(G, axis=0)
        if _spans(U):
            return VectorEnsemble(U)
    raise RankDeficient(f"sampled columns do not span C^{d}")


def duplicate_ensemble(U, k):
    if k < 1:
        raise ValueError("k must be at least 1")
    return VectorEnsemble(np.repeat(U.U, k, axis=1))


def tight_instance(U, seed=DEFAULT_SEED, estimate_f=True):
    """Build ``A = U^H (U U^H)^{-1} U``; optionally attach a lower estimate of ``f(U)``."""
    M = U.U
    spectrum = eigh(M @ M.conj().T)
    w, Q = spectrum.eigenvalues, spectrum.eigenvectors
    if not w[0] > SPAN_FLOOR * w[-1]:
        raise SpanFailure("ensemble does not span C^d (Gram matrix below the eigenvalue floor)")
    B = Q.conj().T @ M
    A = admit_hermitian_psd(B.conj().T @ (B / w[:, None]))
    f_hat = f_sup_estimate(U, seed=seed) if estimate_f else None
    return TightInstance(U=U, A=A, f_hat=f_hat, seed=int(seed))


def perbound_check(inst, mc=False, samples=100_000):
    """Compare ``log per(A)`` with ``log(n!/n^n * C(n+d-1, d-1) * f_hat^n)``.

    ``f_hat`` under-estimates ``f``, so ``holds_with_fhat`` being true confirms
    the bound for this instance while false is inconclusive.
    """
    n, d = inst.U.n, inst.U.d
    if n <= RYSER_MAX_N:
        lhs = per_psd_log(inst.A).log
    elif mc:
        lhs = gurvits_estimate(cholesky_factor(inst.A), samples, seed=inst.seed).mean_log
    else:
        raise TooLarge(f"n={n} needs the Monte-Carlo estimate (mc=True)")
    f_hat = inst.f_hat if inst.f_hat is not None else f_sup_estimate(inst.U, seed=inst.seed)
    rhs = log_factorial(n) - n * math.log(n) + math.log(math.comb(n + d - 1, d - 1)) + n * math.log(f_hat)
    return PerBound(lhs=lhs, rhs=rhs, holds_with_fhat=bool(lhs <= rhs + 1e-9))


@dataclass(frozen=True)
class ExperimentConfig:
    d_list: tuple = (1, 2, 4, 8)
    n_list: tuple = (12,)
    k_list: tuple = (1,)
    seeds: tuple = tuple(range(10))
    samples_mc: int = 100_000
    per_cutoff_n: int = 14
    parallel: int = 1

    def grid(self):
        return list(itertools.product(self.d_list, self.n_list, self.k_list, self.seeds))


def ratio_row(d, n, k, seed, samples_mc=100_000, per_cutoff_n=14):
    """One experiment row: sample, duplicate, solve, and compute the permanent."""
    ensemble = duplicate_ensemble(sphere_ensemble(d, n, seed), k)
    inst = tight_instance(ensemble, seed=seed, estimate_f=False)
    size = n * k
    sol = rel_solve(inst.A)
    if size <= per_cutoff_n:
        log_per = per_psd_log(inst.A).log
        method, se = "ryser", 0.0
    else:
        est = gurvits_estimate(cholesky_factor(inst.A), samples_mc, seed=seed)
        log_per, method, se = est.mean_log, "mc", est.std_err_rel
    return RatioRow(
        n=n,
        d=d,
        k=k,
        seed=int(seed),
        log_rel=sol.log_rel,
        log_per=log_per,
        per_method=method,
        ratio_root=math.exp((sol.log_rel - log_per) / size),
        std_err_rel=se,
    )


def _row_job(args):
    return ratio_row(*args)


def ratio_experiment(config=None):
    """Run the grid in configuration order; ``config.parallel > 1`` uses worker processes."""
    config = config or ExperimentConfig()
    jobs = []
    for d, n, k, seed in config.grid():
        if n < d:
            raise ValueError(f"grid point d={d}, n={n} cannot span C^d")
        jobs.append((d, n, k, seed, config.samples_mc, config.per_cutoff_n))
    if config.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            return list(pool.map(_row_job, jobs))
    return [_row_job(job) for job in jobs]
