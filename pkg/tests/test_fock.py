import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualcs.errors import ParameterError
from dualcs.fock import (
    HO1D,
    ModelParams,
    StructureFunctionTable,
    basis_vector,
    commutator,
    completeness_sum,
    e_n,
    e_tilde_n,
    fock_from_vacuum,
    ladder_set,
    log_rho,
    log_rho_tilde,
    mixed_vacuum_expansion,
    rho,
    rho_tilde,
)

params = st.lists(st.floats(0.2, 6.0), max_size=3)
models = st.builds(lambda a, b: ModelParams(tuple(a), tuple(b)), params, params)


def mp_rho(model, n):
    out = mpmath.factorial(n)
    for bj in model.b:
        out *= mpmath.rf(bj, n)
    for ai in model.a:
        out /= mpmath.rf(ai, n)
    return out


class TestStructureFunctions:
    def test_ho_e_is_n(self):
        assert e_n(HO1D, 5) == 5
        assert e_tilde_n(HO1D, 5) == 5

    @given(models)
    def test_e_vanishes_at_zero(self, model):
        assert e_n(model, 0) == 0 and e_tilde_n(model, 0) == 0

    def test_su11_value(self):
        assert e_n(ModelParams((), (2.0,)), 3) == pytest.approx(12.0)

    def test_su11_dual_value(self):
        # n / (b - 1 + n) = 3 / 4 for b = 2, n = 3
        assert e_tilde_n(ModelParams((), (2.0,)), 3) == pytest.approx(0.75)

    @given(models, st.integers(1, 30))
    def test_product_is_n_squared(self, model, n):
        assert e_n(model, n) * e_tilde_n(model, n) == pytest.approx(n * n, rel=1e-12)

    def test_ho_rho_is_factorial(self):
        for n in range(11):
            assert rho(HO1D, n) == pytest.approx(math.factorial(n), rel=1e-13)

    @given(models)
    def test_rho_at_zero(self, model):
        assert rho(model, 0) == 1.0 and rho_tilde(model, 0) == 1.0

    @settings(max_examples=30)
    @given(models, st.integers(0, 50))
    def test_duality_product(self, model, n):
        lhs = log_rho(model, n) + log_rho_tilde(model, n)
        assert math.expm1(lhs - 2 * math.lgamma(n + 1)) == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(models, st.integers(0, 60))
    def test_rho_matches_mpmath(self, model, n):
        want = float(mpmath.log(mp_rho(model, n)))
        assert log_rho(model, n) == pytest.approx(want, rel=1e-12, abs=1e-12)

    @given(models, st.integers(1, 40))
    def test_rho_is_product_of_e(self, model, n):
        lp = math.fsum(math.log(e_n(model, s)) for s in range(1, n + 1))
        assert log_rho(model, n) == pytest.approx(lp, rel=1e-12, abs=1e-12)

    def test_large_n_no_overflow(self):
        assert math.isfinite(log_rho(HO1D, 1000))
        assert log_rho(HO1D, 1000) == pytest.approx(math.lgamma(1001), rel=1e-14)

    def test_table(self):
        t = StructureFunctionTable.build(ModelParams((), (2.0,)), 10)
        assert t.rho[0] == 1.0 and t.rho_tilde[0] == 1.0
        np.testing.assert_allclose(t.e * t.e_tilde, np.arange(11.0) ** 2, rtol=1e-13)

    @pytest.mark.parametrize("a,b", [((0.0,), ()), ((), (-2.0,)), ((float("nan"),), ())])
    def test_invalid_params(self, a, b):
        with pytest.raises(ParameterError):
            ModelParams(a, b)


class TestLadders:
    def test_ho_entries(self):
        ls = ladder_set(HO1D, 3)
        np.testing.assert_allclose(np.diag(ls.a_minus, 1), [1.0, math.sqrt(2)])
        np.testing.assert_allclose(ls.a_minus @ basis_vector(3, 1), basis_vector(3, 0))

    @given(models)
    def test_adjoint_and_shift_structure(self, model):
        ls = ladder_set(model, 8)
        np.testing.assert_array_equal(ls.a_plus, ls.a_minus.T)
        np.testing.assert_array_equal(ls.at_plus, ls.at_minus.T)
        assert np.all(np.tril(ls.a_minus) == 0)
        assert not np.any(np.linalg.matrix_power(ls.a_plus, 8))

    def test_read_only(self):
        ls = ladder_set(HO1D, 4)
        with pytest.raises(ValueError):
            ls.a_minus[0, 1] = 5

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            ladder_set(HO1D, 1)

    def test_mixed_products_act_as_number(self, preset):
        _, model = preset
        N = 12
        ls = ladder_set(model, N)
        for n in range(N):
            v = basis_vector(N, n)
            np.testing.assert_allclose(ls.a_plus @ ls.at_minus @ v, n * v, atol=1e-12)
        for n in range(N - 1):
            v = basis_vector(N, n)
            np.testing.assert_allclose(ls.at_minus @ ls.a_plus @ v, (n + 1) * v, atol=1e-12)

    def test_canonical_commutators(self, preset):
        _, model = preset
        ls = ladder_set(model, 64)
        eye = np.eye(63)
        np.testing.assert_allclose(commutator(ls.at_minus, ls.a_plus)[:63, :63], eye, atol=1e-12)
        np.testing.assert_allclose(commutator(ls.a_minus, ls.at_plus)[:63, :63], eye, atol=1e-12)

    @given(models)
    def test_number_commutators_exact(self, model):
        ls = ladder_set(model, 10)
        N = ls.number
        for raise_op, lower_op in ((ls.a_plus, ls.a_minus), (ls.at_plus, ls.at_minus)):
            np.testing.assert_allclose(commutator(N, raise_op), raise_op, atol=1e-13 * max(1, np.abs(raise_op).max()))
            np.testing.assert_allclose(commutator(N, lower_op), -lower_op, atol=1e-13 * max(1, np.abs(lower_op).max()))

    def test_nonlinear_commutator_not_identity(self):
        ls = ladder_set(ModelParams((), (2.0,)), 10)
        c = commutator(ls.a_minus, ls.a_plus)[:9, :9]
        assert np.max(np.abs(c - c[0, 0] * np.eye(9))) > 0.1

    def test_tilde_conjugation(self, preset):
        _, model = preset
        ls = ladder_set(model, 16)
        lhs = ls.a_plus @ ls.at_minus
        rhs = ls.at_plus @ ls.a_minus
        np.testing.assert_allclose(lhs[:15, :15], rhs[:15, :15], atol=1e-12)

    def test_dual_model_swaps_ladders(self, preset):
        _, model = preset
        ls, dual = ladder_set(model, 10), ladder_set(model.dual(), 10)
        np.testing.assert_allclose(ls.a_minus, dual.at_minus, rtol=1e-14)


class TestVacuumExpansions:
    @pytest.mark.parametrize("n", [0, 3, 7])
    def test_fock_from_vacuum(self, preset, n):
        _, model = preset
        ls = ladder_set(model, 10)
        np.testing.assert_allclose(fock_from_vacuum(ls, n), basis_vector(10, n), atol=1e-14)
        np.testing.assert_allclose(fock_from_vacuum(ls, n, tilde=True), basis_vector(10, n), atol=1e-14)

    def test_ho_matrix_power_oracle(self):
        ls = ladder_set(HO1D, 6)
        direct = np.linalg.matrix_power(ls.a_plus, 3) @ basis_vector(6, 0) / math.sqrt(6)
        np.testing.assert_allclose(fock_from_vacuum(ls, 3), direct, atol=1e-15)

    def test_index_error(self):
        with pytest.raises(IndexError):
            fock_from_vacuum(ladder_set(HO1D, 4), 4)

    def test_mixed_projector_sum(self, preset):
        _, model = preset
        ls = ladder_set(model, 40)
        np.testing.assert_allclose(mixed_vacuum_expansion(ls), np.eye(40), atol=1e-12)

    @pytest.mark.parametrize("tilde", [False, True])
    def test_completeness(self, preset, tilde):
        _, model = preset
        ls = ladder_set(model, 40)
        np.testing.assert_allclose(completeness_sum(ls, tilde), np.eye(40), atol=1e-12)
