"""Exact permanents at desk scale, plus log-domain closed forms.

Signed permanents of general complex matrices are returned as plain complex
numbers and are size-capped. Permanents of PSD matrices are nonnegative and
travel as :class:`LogNonneg` so that products of many diagonal entries never
overflow.
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeEntry, NegativeResult, TooLarge

NAIVE_MAX_N = 9
RYSER_MAX_N = 24
TENSOR_MAX_N = 4
# Diagonal entries at or below this fraction of the largest one count as zero.
ZERO_DIAG_RTOL = 1e-10
NEGATIVE_RTOL = 1e-9

_RYSER_LOW_BITS = 12


@dataclass(frozen=True, order=False)
class LogNonneg:
    """A nonnegative real stored as ``(is_zero, log_value)``."""

    is_zero: bool
    log_value: float = 0.0

    @classmethod
    def zero(cls):
        return cls(True, 0.0)

    @classmethod
    def from_log(cls, log_value):
        if log_value == -math.inf:
            return cls.zero()
        return cls(False, float(log_value))

    @classmethod
    def from_value(cls, value):
        if value < 0:
            raise NegativeEntry(f"negative value {value}")
        if value == 0:
            return cls.zero()
        return cls(False, math.log(value))

    @property
    def log(self):
        """Natural log, ``-inf`` for zero."""
        return -math.inf if self.is_zero else self.log_value

    @property
    def value(self):
        if self.is_zero:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def __mul__(self, other):
        if not isinstance(other, LogNonneg):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return LogNonneg.zero()
        return LogNonneg(False, self.log_value + other.log_value)

    def __le__(self, other):
        return self.log <= other.log

    def __lt__(self, other):
        return self.log < other.log

    def __ge__(self, other):
        return self.log >= other.log

    def __gt__(self, other):
        return self.log > other.log


def log_factorial(n):
    return float(np.sum(np.log(np.arange(1, n + 1, dtype=float))))


def _square(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def per_naive(A):
    """Sum over all ``n!`` permutations. Limited to ``n <= 9``."""
    A = _square(A)
    n = A.shape[0]
    if n > NAIVE_MAX_N:
        raise TooLarge(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    if n == 0:
        return 1.0 + 0j
    perms = _permutation_table(n)
    terms = A[0, perms[:, 0]].copy()
    for i in range(1, n):
        terms *= A[i, perms[:, i]]
    return complex(terms.sum())


@functools.lru_cache(maxsize=None)
def _permutation_table(n):
    table = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    table.setflags(write=False)
    return table


def per_ryser(A):
    """Ryser inclusion-exclusion over column subsets in binary-reflected Gray order.

    The subset walk is split in two: the low ``min(n, 12)`` column bits are
    enumerated once as a table of row sums (one column added or removed per
    Gray step, accumulated with ``cumsum``), and the high bits are walked
    sequentially, each step adding one column to a base row-sum vector.
    """
    A = _square(A)
    n = A.shape[0]
    if n > RYSER_MAX_N:
        raise TooLarge(f"Ryser permanent limited to n <= {RYSER_MAX_N}, got {n}")
    if n == 0:
        return 1.0 + 0j

    k = min(n, _RYSER_LOW_BITS)
    h = n - k
    low_count = 1 << k
    t = np.arange(1, low_count)
    flipped = _trailing_zeros(t)
    gray = t ^ (t >> 1)
    added = (gray >> flipped) & 1
    deltas = np.zeros((low_count, n), dtype=complex)
    deltas[1:] = A[:, flipped].T * np.where(added, 1.0, -1.0)[:, None]
    low_sums = np.cumsum(deltas, axis=0)
    low_signs = np.where(np.arange(low_count) & 1, -1.0, 1.0)

    total = 0j
    base = np.zeros(n, dtype=complex)
    high_gray = 0
    for s in range(1 << h):
        if s:
            bit = (s & -s).bit_length() - 1
            high_gray ^= 1 << bit
            col = A[:, k + bit]
            base = base + col if (high_gray >> bit) & 1 else base - col
        block = low_signs @ np.prod(low_sums + base, axis=1)
        total += -block if s & 1 else block
    return complex(total if n % 2 == 0 else -total)


def _trailing_zeros(t):
    return np.log2(t & -t).astype(np.intp)


def per_psd_log(A):
    """Permanent of an admitted PSD matrix in log domain.

    The matrix is first rescaled to unit diagonal, where every Ryser partial
    product is bounded and the permanent lies in ``[1, n!]``; the diagonal
    product is added back in log space.
    """
    A = _square(A)
    n = A.shape[0]
    if n > RYSER_MAX_N:
        raise TooLarge(f"exact PSD permanent limited to n <= {RYSER_MAX_N}, got {n}")
    d = A.diagonal().real
    if n == 0:
        return LogNonneg.from_log(0.0)
    if np.any(d <= ZERO_DIAG_RTOL * max(d.max(), 0.0)):
        return LogNonneg.zero()
    s = 1.0 / np.sqrt(d)
    corr = s[:, None] * A * s[None, :]
    value = per_ryser(corr).real
    if value < -NEGATIVE_RTOL * math.exp(log_factorial(n)):
        raise NegativeResult(f"Ryser returned {value:.3g} on a matrix declared PSD")
    if value <= 0:
        return LogNonneg.zero()
    return LogNonneg(False, math.log(value) + float(np.sum(np.log(d))))


def per_rank1(v):
    """``per(v v^H) = n! * prod |v_i|^2`` in log domain."""
    v = np.asarray(v, dtype=complex).ravel()
    mags = np.abs(v) ** 2
    if np.any(mags == 0):
        return LogNonneg.zero()
    return LogNonneg(False, log_factorial(v.size) + float(np.sum(np.log(mags))))


def per_diagonal(d):
    d = np.asarray(d, dtype=float).ravel()
    if np.any(d < 0):
        raise NegativeEntry("diagonal entries must be nonnegative")
    if np.any(d == 0):
        return LogNonneg.zero()
    return LogNonneg(False, float(np.sum(np.log(d))))


def permutation_indicator(n):
    """0/1 vector over ``[n]^n`` (Kronecker index order) marking permutations."""
    ind = np.zeros(n**n)
    weights = n ** np.arange(n - 1, -1, -1)
    for p in itertools.permutations(range(n)):
        ind[int(np.dot(p, weights))] = 1.0
    return ind


def per_tensor(A):
    """Permanent through the ``n``-fold Kronecker power contracted with the permutation indicator."""
    A = _square(A)
    n = A.shape[0]
    if n > TENSOR_MAX_N:
        raise TooLarge(f"tensor permanent limited to n <= {TENSOR_MAX_N}, got {n}")
    if n == 0:
        return 1.0 + 0j
    power = functools.reduce(np.kron, [A] * n)
    ind = permutation_indicator(n)
    return complex(ind @ power @ ind) / math.factorial(n)
