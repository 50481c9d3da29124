import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdperm.errors import NegativeEntry, NegativeResult, TooLarge
from psdperm.linalg import diag_congruence, random_psd
from psdperm.permanent import (
    LogNonneg,
    per_diagonal,
    per_naive,
    per_psd_log,
    per_rank1,
    per_ryser,
    per_tensor,
)
from tests.conftest import psd_corpus


def cmat(gen, n):
    return gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))


def rel_close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


class TestNaive:
    def test_identity(self):
        assert per_naive(np.eye(3)) == 1

    def test_all_ones(self):
        assert per_naive(np.ones((2, 2))) == 2

    def test_a22(self):
        # 2*2 + 1*1
        assert per_naive([[2, 1], [1, 2]]) == 5

    def test_size_gate(self):
        with pytest.raises(TooLarge):
            per_naive(np.eye(10))


class TestRyser:
    def test_identity(self):
        assert per_ryser(np.eye(5)) == pytest.approx(1)

    def test_all_ones(self):
        assert per_ryser(np.ones((4, 4))) == pytest.approx(24)

    def test_matches_naive(self):
        gen = np.random.default_rng(7)
        for _ in range(50):
            A = cmat(gen, 7)
            assert rel_close(per_ryser(A), per_naive(A))

    def test_split_gray_walk(self):
        # n > 12 exercises the sequential high-bit walk. J_n sums terms near n^n
        # down to n!, so about 1e5 of cancellation is expected.
        assert per_ryser(np.ones((14, 14))).real == pytest.approx(math.factorial(14), rel=1e-6)

    def test_split_gray_walk_rank1(self):
        gen = np.random.default_rng(8)
        v = gen.uniform(0.5, 1.5, 15) * np.exp(1j * gen.uniform(0, 2 * np.pi, 15))
        got = math.log(per_ryser(np.outer(v, v.conj())).real)
        assert got == pytest.approx(per_rank1(v).log_value, abs=1e-6)

    def test_deterministic(self, rng):
        A = cmat(rng, 13)
        assert per_ryser(A) == per_ryser(A.copy())

    def test_size_gate(self):
        with pytest.raises(TooLarge):
            per_ryser(np.eye(25))


class TestTensor:
    def test_identity(self):
        assert per_tensor(np.eye(2)) == pytest.approx(1)

    def test_all_ones(self):
        assert per_tensor(np.ones((3, 3))) == pytest.approx(6)

    def test_matches_naive(self, rng):
        A = cmat(rng, 4)
        assert rel_close(per_tensor(A), per_naive(A))

    def test_size_gate(self):
        with pytest.raises(TooLarge):
            per_tensor(np.eye(5))


class TestPsdLog:
    def test_identity(self):
        r = per_psd_log(np.eye(6))
        assert not r.is_zero and r.log_value == pytest.approx(0, abs=1e-14)

    def test_zero_row(self):
        assert per_psd_log(np.diag([1.0, 0.0, 3.0])).is_zero

    def test_a22(self):
        assert per_psd_log(np.array([[2.0, 1.0], [1.0, 2.0]])).log_value == pytest.approx(math.log(per_naive([[2, 1], [1, 2]]).real))

    def test_rejects_indefinite(self):
        # unit diagonal, permanent 1 + (-3)(-3)... negative for this sign pattern
        M = np.array([[1.0, 2.0, 2.0], [2.0, 1.0, -2.0], [2.0, -2.0, 1.0]])
        assert per_naive(M).real < 0
        with pytest.raises(NegativeResult):
            per_psd_log(M)

    def test_nonnegative_over_corpus(self):
        for A in psd_corpus(range(1, 13), 42, seed=5):
            r = per_psd_log(A)
            assert r.is_zero or np.isfinite(r.log_value)

    def test_scaling(self, rng):
        for _ in range(20):
            A = random_psd(6, 4, rng)
            lam = rng.uniform(0.3, 3.0, 6)
            lhs = per_psd_log(diag_congruence(A, lam)).log_value
            assert lhs == pytest.approx(per_psd_log(A).log_value + 2 * np.sum(np.log(lam)), abs=1e-9)

    def test_monotone(self):
        gen = np.random.default_rng(11)
        for i in range(200):
            n = 2 + i % 9
            B = random_psd(n, 1 + i % n, gen)
            A = B + random_psd(n, 1 + (i // 3) % n, gen) * 0.1
            assert per_psd_log(A).log >= per_psd_log(B).log - 1e-9


class TestClosedForms:
    def test_rank1_ones(self):
        assert per_rank1(np.ones(4)).log_value == pytest.approx(math.log(24))

    def test_rank1_zero(self):
        assert per_rank1([1.0, 0.0, 2.0]).is_zero

    def test_rank1_matches_ryser(self, rng):
        v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        expected = math.log(per_ryser(np.outer(v, v.conj())).real)
        assert per_rank1(v).log_value == pytest.approx(expected, rel=1e-9)

    def test_rank1_large_n_no_overflow(self):
        assert per_rank1(np.ones(300)).log_value == pytest.approx(math.lgamma(301))

    def test_diagonal(self):
        assert per_diagonal(np.ones(5)).log_value == 0
        assert per_diagonal([2, 3]).log_value == pytest.approx(math.log(6))
        assert per_diagonal([5, 0, 2]).is_zero
        with pytest.raises(NegativeEntry):
            per_diagonal([1, -1])


def test_oracle_agreement_small():
    gen = np.random.default_rng(3)
    for n in range(1, 5):
        for _ in range(20):
            A = cmat(gen, n)
            ref = per_naive(A)
            assert rel_close(per_ryser(A), ref)
            assert rel_close(per_tensor(A), ref)


def test_tensor_identity_is_permanent_definition():
    # direct definition, independent of all three oracles
    gen = np.random.default_rng(4)
    A = cmat(gen, 3)
    direct = sum(np.prod([A[i, p[i]] for i in range(3)]) for p in itertools.permutations(range(3)))
    assert rel_close(per_tensor(A), direct)


class TestLogNonneg:
    def test_zero_absorbs(self):
        assert (LogNonneg.zero() * LogNonneg(False, 3.0)).is_zero

    def test_from_value(self):
        assert LogNonneg.from_value(0).is_zero
        assert LogNonneg.from_value(math.e).log_value == pytest.approx(1)
        with pytest.raises(NegativeEntry):
            LogNonneg.from_value(-1)

    def test_ordering(self):
        assert LogNonneg.zero() < LogNonneg(False, -1000)
        assert LogNonneg(False, 2) >= LogNonneg(False, 1)

    def test_value_overflow(self):
        assert LogNonneg(False, 1e4).value == math.inf


@settings(max_examples=100)
@given(a=st.floats(-1e6, 1e6), b=st.floats(-1e6, 1e6), za=st.booleans(), zb=st.booleans())
def test_lognonneg_product(a, b, za, zb):
    x, y = LogNonneg(za, a), LogNonneg(zb, b)
    p = x * y
    assert p.is_zero == (za or zb)
    if not p.is_zero:
        assert p.log_value == a + b
