"""Hermitian linear algebra: admission, pivoted Cholesky, spectra, Loewner tests.

Matrices are plain complex ``numpy`` arrays. A matrix returned by
:func:`admit_hermitian_psd` is exactly hermitian and read-only; every other
function in the package assumes it received such a matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonPositiveScale,
    NotHermitian,
    NotPSD,
    ValidationError,
)

TOL_PSD = 1e-9
TOL_CHOL = 1e-10
TOL_EIG = 1e-9


@dataclass(frozen=True)
class CholeskyFactor:
    """Rank-revealing factor with ``V.conj().T @ V`` reproducing the source."""

    V: np.ndarray
    pivots: np.ndarray

    @property
    def d(self):
        return self.V.shape[0]

    @property
    def n(self):
        return self.V.shape[1]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.conj().T


def max_norm(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def _frozen(A):
    A = np.array(A, dtype=complex)
    A.setflags(write=False)
    return A


def admit_hermitian_psd(raw, tol_psd=TOL_PSD):
    """Validate ``raw`` as a hermitian PSD matrix and return its symmetrization.

    Parameters
    ----------
    raw : array_like, shape (n, n)
        Real or complex square matrix with finite entries.
    tol_psd : float
        Relative tolerance for both the hermitian test and the eigenvalue floor.

    Returns
    -------
    ndarray
        ``(raw + raw^H) / 2`` as a read-only complex array.

    Raises
    ------
    ValidationError
        Non-square, empty, or non-finite input.
    NotHermitian
        ``max|raw - raw^H|`` exceeds ``tol_psd * max(1, ||raw||_max)``.
    NotPSD
        Smallest eigenvalue below ``-tol_psd * (1 + |lambda_max|)``.
    """
    raw = np.asarray(raw)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise ValidationError("matrix has non-finite entries")
    raw = raw.astype(complex)
    asym = np.abs(raw - raw.conj().T)
    scale = max(1.0, max_norm(raw))
    if asym.max() > tol_psd * scale:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise NotHermitian(
            f"entries ({i},{j}) and ({j},{i}) are not conjugate (gap {asym[i, j]:.3g})",
            index=(int(i), int(j)),
        )
    A = 0.5 * (raw + raw.conj().T)
    # exact hermiticity: real diagonal, mirrored lower triangle
    A = np.triu(A) + np.triu(A, 1).conj().T
    A[np.diag_indices_from(A)] = A.diagonal().real
    evals = np.linalg.eigvalsh(A)
    if evals[0] < -tol_psd * (1.0 + abs(evals[-1])):
        raise NotPSD(f"smallest eigenvalue {evals[0]:.6g} is negative", eigenvalue=float(evals[0]))
    return _frozen(A)


def cholesky_factor(A, tol_chol=TOL_CHOL):
    """Diagonally pivoted outer-product Cholesky, stopping at the numerical rank.

    A pivot is accepted while it exceeds ``tol_chol`` times the first (largest)
    pivot. Returns ``V`` of shape ``(d, n)`` with ``V^H V ~= A``.
    """
    S = np.array(A, dtype=complex)
    n = S.shape[0]
    rows = []
    pivots = []
    first = None
    for _ in range(n):
        diag = S.diagonal().real
        j = int(np.argmax(diag))
        pivot = diag[j]
        if first is None:
            first = pivot
        if pivot <= 0 or pivot <= tol_chol * first:
            break
        row = S[j, :] / np.sqrt(pivot)
        rows.append(row)
        pivots.append(j)
        S -= np.outer(row.conj(), row)
        S[j, :] = 0
        S[:, j] = 0
    V = np.array(rows, dtype=complex).reshape(len(rows), n)
    if V.shape[0] == 0:
        # zero matrix: keep a single zero row so shapes stay usable
        V = np.zeros((1, n), dtype=complex)
    return CholeskyFactor(V=V, pivots=np.array(pivots, dtype=int))


def _normalize_phase(q):
    nz = np.flatnonzero(np.abs(q) > 1e-12)
    if nz.size == 0:
        return q
    first = q[nz[0]]
    return q * (abs(first) / first)


def eigh(A, tol_eig=TOL_EIG):
    """Ascending eigendecomposition with a reproducible eigenvector gauge.

    Each eigenvector is rotated so its first non-negligible coordinate is
    positive real. Inside a cluster of eigenvalues closer than ``tol_eig``
    (relative to the spectral scale) vectors are ordered lexicographically by
    the real parts of their coordinates.
    """
    A = np.asarray(A)
    try:
        w, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    Q = np.array([_normalize_phase(Q[:, k]) for k in range(Q.shape[1])]).T.reshape(Q.shape)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    order = list(range(len(w)))
    start = 0
    while start < len(w):
        stop = start + 1
        while stop < len(w) and w[stop] - w[start] <= tol_eig * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            block.sort(key=lambda k: tuple(np.round(Q[:, k].real, 12)))
            order[start:stop] = block
        start = stop
    return Spectrum(eigenvalues=w, eigenvectors=Q[:, order])


def lambda_min(A):
    return float(np.linalg.eigvalsh(A)[0])


def lambda_max(A):
    return float(np.linalg.eigvalsh(A)[-1])


def loewner_geq(A, B, tol=TOL_PSD):
    """Test ``A >= B`` in the Loewner order.

    Returns ``(holds, margin)`` where ``margin`` is the smallest eigenvalue
    of ``A - B``.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    margin = lambda_min(A - B)
    holds = margin >= -tol * (1.0 + max_norm(A) + max_norm(B))
    return bool(holds), margin


def diag_congruence(M, lam):
    """Return ``diag(lam) @ M @ diag(lam)`` for a positive scaling vector."""
    lam = np.asarray(lam, dtype=float)
    if np.any(~(lam > 0)):
        raise NonPositiveScale("scaling vector must be strictly positive")
    M = np.asarray(M)
    if lam.shape != (M.shape[0],):
        raise DimensionMismatch(f"scaling of length {lam.size} for a {M.shape[0]}x{M.shape[0]} matrix")
    return _frozen(lam[:, None] * M * lam[None, :])


def random_psd(n, rank, rng, complex_=True):
    """Random PSD ``M^H M`` of the given rank with ``M`` Gaussian of shape (rank, n)."""
    M = rng.standard_normal((rank, n))
    if complex_:
        M = M + 1j * rng.standard_normal((rank, n))
    return admit_hermitian_psd(M.conj().T @ M)
