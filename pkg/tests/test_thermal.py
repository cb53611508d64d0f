import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualcs.errors import DegenerateError, DomainError, SupportError, TailNotConvergedError, UnsupportedClassError
from dualcs.fock import HO1D, ModelParams, ladder_set
from dualcs.measure import quadrature_rule
from dualcs.thermal import (
    GeneralSpectrum,
    ThermalEnsemble,
    general_p_moment_problem,
    geometric_weights,
    husimi_q,
    p_function,
    p_moment_quadrature,
    partition_function,
    reconstruct_density,
    thermal_density_diag,
    thermal_mandel,
    thermal_moment,
    thermal_moment_closed_form,
)

SU11 = ModelParams((), (2.0,))
GEOM = ModelParams((3.0,), ())
LN2 = math.log(2.0)


class TestEnsemble:
    def test_partition_at_ln2(self):
        assert partition_function(ThermalEnsemble(LN2)) == pytest.approx(2.0, rel=1e-15)

    def test_n_bar_at_beta_one(self):
        want = float(1 / (mpmath.e - 1))
        assert ThermalEnsemble(1.0).n_bar == pytest.approx(want, rel=1e-15)
        assert want == pytest.approx(0.5819767068693265, rel=1e-15)

    def test_populations_at_ln2(self):
        ens = ThermalEnsemble(LN2)
        np.testing.assert_allclose(geometric_weights(ens, 30), 0.5 ** (np.arange(30) + 1), rtol=1e-14)
        # 30 levels miss 2**-30 of the mass, so the truncated diagonal is renormalized
        p = thermal_density_diag(ens, 30)
        assert p.sum() == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(p, 0.5 ** (np.arange(30) + 1) / (1 - 0.5**30), rtol=1e-14)

    @given(st.floats(0.01, 50.0))
    @settings(max_examples=30)
    def test_from_n_bar_roundtrip(self, nb):
        assert ThermalEnsemble.from_n_bar(nb).n_bar == pytest.approx(nb, rel=1e-12)

    def test_huge_beta_finite(self):
        ens = ThermalEnsemble(800.0)
        assert ens.n_bar == 0.0 and math.isfinite(partition_function(ens))

    @pytest.mark.parametrize("beta", [0.0, -1.0, float("nan")])
    def test_bad_beta(self, beta):
        with pytest.raises(DomainError):
            ThermalEnsemble(beta)

    def test_general_spectrum_validation(self):
        with pytest.raises(DomainError):
            GeneralSpectrum((0.0, 2.0, 1.0), 1.0)
        with pytest.raises(DomainError):
            GeneralSpectrum((), 1.0)


class TestMoments:
    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0, 5.0])
    @pytest.mark.parametrize("s", [0, 1, 2])
    def test_closed_forms(self, beta, s):
        ens = ThermalEnsemble(beta)
        assert thermal_moment(ens, s) == pytest.approx(thermal_moment_closed_form(ens, s), rel=1e-12)

    @pytest.mark.parametrize("s", [3, 4])
    def test_higher_against_mpmath(self, s):
        # sum n**s r**n (1 - r) from mpmath's polylog: Li_{-s}(r)
        beta = 0.7
        r = mpmath.exp(-beta)
        want = float((1 - r) * mpmath.polylog(-s, r))
        assert thermal_moment(ThermalEnsemble(beta), s) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_mandel_equals_n_bar(self, beta):
        ens = ThermalEnsemble(beta)
        assert thermal_mandel(ens) == pytest.approx(ens.n_bar, rel=1e-10)

    def test_mandel_ln2(self):
        assert thermal_mandel(ThermalEnsemble(LN2)) == pytest.approx(1.0, abs=1e-12)

    def test_mandel_degenerate(self):
        with pytest.raises(DegenerateError):
            thermal_mandel(ThermalEnsemble(1000.0))

    def test_order_out_of_range(self):
        with pytest.raises(DomainError):
            thermal_moment(ThermalEnsemble(1.0), 5)

    def test_truncation_too_small(self):
        with pytest.raises(TailNotConvergedError):
            thermal_moment(ThermalEnsemble(0.1), 2, N=20)

    def test_explicit_N_large_enough(self):
        ens = ThermalEnsemble(1.0)
        assert thermal_moment(ens, 1, N=200) == pytest.approx(ens.n_bar, rel=1e-11)

    def test_general_spectrum_agrees_with_linear(self):
        ens = ThermalEnsemble(0.8, 1.3, 0.5)
        spec = ens.spectrum(400)
        for s in range(5):
            assert thermal_moment(spec, s) == pytest.approx(thermal_moment(ens, s), rel=1e-12)

    @pytest.mark.parametrize("e0", [0.0, 0.5, -3.0, 12.0])
    def test_ground_energy_cancels(self, e0):
        ref = ThermalEnsemble(0.9)
        ens = ThermalEnsemble(0.9, e0=e0)
        for s in range(5):
            assert thermal_moment(ens, s) == pytest.approx(thermal_moment(ref, s), rel=1e-14)
        np.testing.assert_allclose(thermal_density_diag(ens, 20), thermal_density_diag(ref, 20), rtol=1e-14)
        assert partition_function(ens) == pytest.approx(math.exp(-0.9 * e0) * partition_function(ref), rel=1e-13)

    @pytest.mark.parametrize("s", range(5))
    def test_trace_in_either_ladder_set(self, preset, s):
        # Tr(rho N**s) with N built from either family's ladders
        _, model = preset
        ens = ThermalEnsemble(1.2)
        M = 120
        ls = ladder_set(model, M)
        rho = np.diag(geometric_weights(ens, M))
        want = thermal_moment(ens, s)
        for num in (ls.a_plus @ ls.at_minus, ls.at_plus @ ls.a_minus):
            got = np.trace(rho @ np.linalg.matrix_power(num, s))
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


class TestHusimi:
    @pytest.mark.parametrize("z", [0.0, 0.5, 1 + 1j, 2.5j])
    def test_ho_closed_form(self, z):
        ens = ThermalEnsemble(0.8)
        nb = ens.n_bar
        q = husimi_q(HO1D, "bg", z, ens)
        want = math.exp(-abs(z) ** 2 / (nb + 1)) / (nb + 1)
        assert q.direct == pytest.approx(want, rel=1e-12)
        assert q.kernel == pytest.approx(want, rel=1e-12)

    def test_vacuum_value(self, preset):
        _, model = preset
        ens = ThermalEnsemble(1.0)
        for fam in ("bg", "kp"):
            q = husimi_q(model, fam, 0.0, ens)
            assert q.kernel == pytest.approx(1 / (ens.n_bar + 1), rel=1e-14)
            assert q.direct == pytest.approx(1 / (ens.n_bar + 1), rel=1e-14)

    @pytest.mark.parametrize("family", ["bg", "kp"])
    def test_routes_agree(self, preset, family):
        _, model = preset
        ens = ThermalEnsemble(0.6)
        for r in (0.2, 0.5, 0.85):
            q = husimi_q(model, family, r * np.exp(0.7j), ens)
            assert q.direct == pytest.approx(q.kernel, rel=1e-10)

    def test_ho_normalized(self):
        # int Q(|z|**2) d^2z / pi = int_0^inf Q(x) dx
        ens = ThermalEnsemble(0.5)
        rule = quadrature_rule("gauss-laguerre", 80)
        nb = ens.n_bar
        # rescale x = (nb + 1) t so the Laguerre weight matches Q exactly
        vals = [husimi_q(HO1D, "bg", math.sqrt((nb + 1) * t), ens).kernel * math.exp(t) for t in rule.nodes]
        assert (nb + 1) * np.dot(rule.weights, vals) == pytest.approx(1.0, rel=1e-10)


class TestPFunction:
    @pytest.mark.parametrize("x", [0.0, 0.3, 2.0, 9.0])
    def test_ho_closed_form(self, x):
        nb = 0.7
        assert p_function(HO1D, "bg", x, nb) == pytest.approx(math.exp(-x / nb) / nb, rel=1e-13)

    def test_bessel_positive(self):
        vals = [p_function(SU11, "bg", x, 1.0) for x in (0.0, 0.5, 3.0)]
        assert all(v > 0 for v in vals)

    def test_beta_support(self):
        with pytest.raises(SupportError):
            p_function(GEOM, "bg", 0.8, 1.0)

    def test_unsupported_class(self):
        with pytest.raises(UnsupportedClassError):
            p_function(ModelParams((), (1.0, 2.0)), "bg", 0.5, 1.0)

    def test_n_bar_positive(self):
        with pytest.raises(DomainError):
            p_function(HO1D, "bg", 0.5, 0.0)


class TestReconstruction:
    def test_ho(self):
        ens = ThermalEnsemble.from_n_bar(1.0)
        rho = reconstruct_density(HO1D, "bg", 1.0, 20)
        np.testing.assert_allclose(np.diag(rho).real, geometric_weights(ens, 20), atol=1e-6)
        off = rho - np.diag(np.diag(rho))
        assert np.max(np.abs(off)) < 1e-12

    def test_bessel(self):
        ens = ThermalEnsemble.from_n_bar(1.5)
        rho = reconstruct_density(SU11, "bg", 1.5, 12)
        np.testing.assert_allclose(np.diag(rho).real, geometric_weights(ens, 12), atol=1e-6)

    def test_kp_dual_of_geometric(self):
        ens = ThermalEnsemble.from_n_bar(1.0)
        rho = reconstruct_density(GEOM, "kp", 1.0, 12)
        np.testing.assert_allclose(np.diag(rho).real, geometric_weights(ens, 12), atol=1e-6)


class TestPMoments:
    @pytest.mark.parametrize("n", [0, 1, 5])
    def test_ho_target(self, n):
        ens = ThermalEnsemble(0.9, e0=0.5)
        want = math.exp(-0.9 * (n + 0.5)) * math.factorial(n)
        assert general_p_moment_problem(HO1D, "bg", ens, n) == pytest.approx(want, rel=1e-13)

    def test_general_spectrum_target(self):
        spec = GeneralSpectrum((0.25, 1.0, 4.0), 1.0)
        assert general_p_moment_problem(HO1D, "bg", spec, 0) == pytest.approx(math.exp(-0.25), rel=1e-14)

    @pytest.mark.parametrize("family", ["bg", "kp"])
    def test_quadrature_matches_target(self, preset, family):
        _, model = preset
        ens = ThermalEnsemble(1.0)
        for n in range(11):
            want = general_p_moment_problem(model, family, ens, n)
            assert p_moment_quadrature(model, family, ens, n) == pytest.approx(want, rel=1e-8)
