import math

import numpy as np
import pytest

from psdperm.certificates import VectorEnsemble
from psdperm.errors import SpanFailure, TooLarge
from psdperm.permanent import log_factorial, per_psd_log
from psdperm.relaxation import rel_solve
from psdperm.tightness import (
    RATIO_LIMIT,
    ExperimentConfig,
    duplicate_ensemble,
    perbound_check,
    ratio_experiment,
    ratio_row,
    sphere_ensemble,
    tight_instance,
)


class TestEnsembles:
    def test_d1_phases(self):
        U = sphere_ensemble(1, 7, seed=3)
        assert np.allclose(np.abs(U.U), 1, atol=1e-12)

    def test_reproducible(self):
        assert np.array_equal(sphere_ensemble(2, 50, seed=8).U, sphere_ensemble(2, 50, seed=8).U)

    def test_unit_columns(self):
        U = sphere_ensemble(5, 20, seed=1)
        assert np.max(np.abs(np.linalg.norm(U.U, axis=0) - 1)) <= 1e-12

    def test_bad_dims(self):
        with pytest.raises(ValueError):
            sphere_ensemble(3, 2)

    def test_duplicate(self):
        U = VectorEnsemble.standard_basis(2)
        assert np.array_equal(duplicate_ensemble(U, 1).U, U.U)
        D = duplicate_ensemble(U, 2)
        assert D.n == 4
        with pytest.raises(ValueError):
            duplicate_ensemble(U, 0)


class TestInstance:
    def test_standard_basis(self):
        inst = tight_instance(VectorEnsemble.standard_basis(4))
        assert np.allclose(inst.A, np.eye(4))
        assert inst.f_hat == pytest.approx(1.0, abs=1e-6)

    def test_repeated_vector(self):
        n = 5
        inst = tight_instance(VectorEnsemble(np.ones((1, n), dtype=complex)), estimate_f=False)
        assert np.allclose(inst.A, np.ones((n, n)) / n)
        assert abs(rel_solve(inst.A).log_rel) <= 1e-6
        assert per_psd_log(inst.A).log_value == pytest.approx(log_factorial(n) - n * math.log(n), abs=1e-10)

    @pytest.mark.parametrize("d,n,k", [(1, 4, 1), (2, 12, 1), (3, 5, 2), (6, 6, 1), (8, 12, 1)])
    def test_invariants(self, d, n, k):
        inst = tight_instance(duplicate_ensemble(sphere_ensemble(d, n, seed=d + n), k), estimate_f=False)
        A = inst.A
        assert np.max(np.abs(A @ A - A)) <= 1e-8
        gram = inst.U.U.conj().T @ inst.U.U
        assert np.max(np.abs(gram.diagonal() - 1)) <= 1e-12
        assert abs(rel_solve(A).log_rel) <= 1e-6

    def test_span_failure(self):
        U = VectorEnsemble(np.array([[1, 1], [0, 0]], dtype=complex))
        with pytest.raises(SpanFailure):
            tight_instance(U)


class TestPerbound:
    def test_d1_equality(self):
        inst = tight_instance(sphere_ensemble(1, 8, seed=2))
        pb = perbound_check(inst)
        assert pb.lhs == pytest.approx(pb.rhs, abs=1e-9)
        assert pb.holds_with_fhat

    def test_standard_basis(self):
        n = 3
        pb = perbound_check(tight_instance(VectorEnsemble.standard_basis(n)))
        assert pb.lhs == pytest.approx(0.0, abs=1e-12)
        expected = math.log(6 / 27 * math.comb(5, 2))
        assert pb.rhs == pytest.approx(expected, abs=1e-6)
        assert pb.holds_with_fhat

    def test_d2_n10_rate(self):
        held = sum(perbound_check(tight_instance(sphere_ensemble(2, 10, s), seed=s)).holds_with_fhat for s in range(100))
        assert held >= 95

    def test_size_gate(self):
        inst = tight_instance(duplicate_ensemble(sphere_ensemble(1, 5, 0), 5), estimate_f=False)
        with pytest.raises(TooLarge):
            perbound_check(inst)
        assert perbound_check(inst, mc=True, samples=2000).lhs < 0


class TestRatio:
    def test_standard_basis_row(self):
        # d = n gives the identity up to phases
        row = ratio_row(4, 4, 1, seed=0)
        assert row.ratio_root == pytest.approx(1.0, abs=1e-6)

    def test_d1_row(self):
        row = ratio_row(1, 12, 1, seed=7)
        expected = math.exp((12 * math.log(12) - log_factorial(12)) / 12)
        assert row.ratio_root == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(2.26892, abs=1e-5)
        assert row.per_method == "ryser" and row.std_err_rel == 0.0

    def test_mc_row(self):
        row = ratio_row(2, 8, 2, seed=1, samples_mc=2000)
        assert row.per_method == "mc" and row.size == 16 and row.std_err_rel > 0

    def test_bounds_on_exact_rows(self):
        rows = ratio_experiment(ExperimentConfig(d_list=(1, 3, 6), n_list=(6, 10), seeds=(0, 1)))
        for r in rows:
            assert 1 - 1e-9 <= r.ratio_root <= RATIO_LIMIT * 1.02

    def test_order_and_parallel(self):
        cfg = ExperimentConfig(d_list=(1, 2), n_list=(6,), seeds=(0, 1, 2))
        serial = ratio_experiment(cfg)
        assert [(r.d, r.seed) for r in serial] == [(d, s) for d in (1, 2) for s in (0, 1, 2)]
        par = ratio_experiment(ExperimentConfig(d_list=(1, 2), n_list=(6,), seeds=(0, 1, 2), parallel=2))
        assert par == serial

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            ratio_experiment(ExperimentConfig(d_list=(5,), n_list=(3,)))
