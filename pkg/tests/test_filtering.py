import numpy as np
import pytest

import ctsid.aircraft as aircraft
from ctsid import (
    NumericConfig,
    PiecewiseConstantInput,
    ValidationError,
    build_relation_matrices,
    decompose,
    factorization_residual,
    filter_lti_dataset,
    filter_signal,
    filtered_derivative_data,
    filtered_input_data,
    lowpass_derivative_identity,
    lowpass_realization,
    make_filter_bank,
    quad_piece,
    simulate_sampled,
    state_fn,
    verify_algebraic,
)
from ctsid.filters import FAMILIES
from conftest import random_controllable_system

T = aircraft.T
RHO = {
    "poly_test": aircraft.POLY_TEST_RHO,
    "bump_test": 2.0,
    "laguerre": 1.0,
    "lowpass": aircraft.LOWPASS_RHO,
}


def bank_of(family, M=6, N=6):
    return make_filter_bank(family, RHO[family], T, M, N)


class TestQuadPiece:
    def test_polynomial_exact(self):
        # degree-7 polynomial is exact for any Gauss rule with >= 4 nodes
        val, err = quad_piece(lambda t: t**7, 0.0, 1.0, panels=1, nodes=8)
        assert val == pytest.approx(1.0 / 8.0, rel=1e-14)
        assert err <= 1e-14

    def test_exponential(self):
        val, err = quad_piece(np.exp, 0.0, 1.0)
        assert val == pytest.approx(np.e - 1.0, rel=1e-13)
        assert err <= 1e-12

    def test_vector_valued(self):
        val, _ = quad_piece(lambda t: np.array([1.0, 2 * t]), 0.0, 3.0)
        assert np.allclose(val, [3.0, 9.0])

    def test_error_estimate_tracks_truth(self):
        # a sharply peaked integrand under-resolved by one panel
        f = lambda t: np.exp(-200 * (t - 0.5) ** 2)
        truth = np.sqrt(np.pi / 200)  # tails are ~1e-22, negligible
        val, err = quad_piece(f, 0.0, 1.0, panels=1, nodes=4)
        assert err >= abs(val - truth) * 1e-2

    def test_rejects_empty_interval(self):
        with pytest.raises(ValidationError):
            quad_piece(np.exp, 1.0, 1.0)


class TestFilterSignal:
    def test_constant_signal_poly(self):
        # int_0^T rho tau^2 (T-tau)^2 dtau = rho T^5 / 30
        bank = bank_of("poly_test")
        out = filter_signal(bank, lambda t: 1.0)
        expected = RHO["poly_test"] * T**5 / 30.0
        assert np.allclose(out, expected, rtol=1e-12)

    def test_constant_signal_lowpass(self):
        # int_0^{lT} e^{rho(t - lT)} dt = (1 - e^{-rho l T}) / rho
        bank = bank_of("lowpass")
        out = filter_signal(bank, lambda t: np.array([1.0]))
        rho = RHO["lowpass"]
        expected = (1.0 - np.exp(-rho * np.arange(1, 7) * T)) / rho
        assert np.allclose(out[0], expected, rtol=1e-12)

    def test_sine_against_antiderivative(self):
        # poly filter of sin(w t): compare against scipy adaptive quadrature
        from scipy.integrate import quad as scipy_quad
        from ctsid import eval_g

        bank = bank_of("poly_test", M=3, N=3)
        w = 13.0
        out = filter_signal(bank, lambda t: np.sin(w * t))
        for ell in (1, 2, 3):
            ref, _ = scipy_quad(
                lambda t: eval_g(bank, ell, t) * np.sin(w * t),
                (ell - 1) * T,
                ell * T - 1e-15,
                limit=200,
            )
            assert out[0, ell - 1] == pytest.approx(ref, abs=1e-10)

    def test_matches_lti_pipeline(self, aircraft_system, aircraft_input):
        for family in FAMILIES:
            bank = bank_of(family)
            fd = filter_lti_dataset(aircraft_system, aircraft_input, bank)
            f = state_fn(aircraft_system, aircraft_input)
            x_f = filter_signal(bank, f)
            assert np.allclose(x_f, fd.x_f, atol=1e-9), family


class TestFilteredInputData:
    def test_aircraft_poly_matches_reference(self, aircraft_input):
        bank = bank_of("poly_test")
        u_f = filtered_input_data(bank, aircraft_input)
        assert np.max(np.abs(u_f - aircraft.UF_POLY_PRINTED)) <= 5e-4

    def test_aircraft_lowpass_matches_reference(self, aircraft_input):
        bank = bank_of("lowpass")
        u_f = filtered_input_data(bank, aircraft_input)
        assert np.max(np.abs(u_f - aircraft.UF_LOWPASS_PRINTED)) <= 5e-4

    def test_matches_generic_path(self, aircraft_input):
        bank = bank_of("laguerre")
        u_f = filtered_input_data(bank, aircraft_input)
        ref = filter_signal(
            bank,
            aircraft_input.value_at,
            extra_splits=np.arange(1, 6) * T,
        )
        assert np.allclose(u_f, ref, atol=1e-12)

    def test_rejects_short_input(self):
        bank = bank_of("lowpass")
        inp = PiecewiseConstantInput(T=T, levels=np.ones((2, 3)))
        with pytest.raises(ValidationError):
            filtered_input_data(bank, inp)


class TestFilteredDerivativeData:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_against_direct_derivative_quadrature(self, family, aircraft_system, aircraft_input):
        """Integration by parts must equal directly integrating g_l * dx/dt."""
        bank = bank_of(family, M=3, N=6)
        f = state_fn(aircraft_system, aircraft_input)
        x_df = filtered_derivative_data(bank, f)

        a, b = aircraft_system.a, aircraft_system.b

        def xdot(t):
            return a @ f(t) + b @ aircraft_input.value_at(min(t, aircraft_input.horizon - 1e-12))

        direct = filter_signal(bank, xdot, extra_splits=np.arange(1, 6) * T)
        assert np.allclose(x_df, direct, atol=1e-8)

    def test_aircraft_poly_matches_reference(self, aircraft_system, aircraft_input):
        bank = bank_of("poly_test")
        x_df = filtered_derivative_data(bank, state_fn(aircraft_system, aircraft_input))
        assert np.max(np.abs(x_df - aircraft.XDF_POLY_PRINTED)) <= 5e-4

    def test_constant_state_gives_zero(self):
        bank = bank_of("laguerre")
        x_df = filtered_derivative_data(bank, lambda t: np.array([3.0, -1.0]))
        assert np.max(np.abs(x_df)) <= 1e-12


class TestFilterLtiDataset:
    @pytest.mark.parametrize(
        "family, xf_ref, uf_ref, xdf_ref",
        [
            (
                "poly_test",
                aircraft.XF_POLY_PRINTED,
                aircraft.UF_POLY_PRINTED,
                aircraft.XDF_POLY_PRINTED,
            ),
            (
                "lowpass",
                aircraft.XF_LOWPASS_PRINTED,
                aircraft.UF_LOWPASS_PRINTED,
                aircraft.XDF_LOWPASS_PRINTED,
            ),
        ],
    )
    def test_aircraft_reference_tables(
        self, family, xf_ref, uf_ref, xdf_ref, aircraft_system, aircraft_input
    ):
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank_of(family))
        assert np.max(np.abs(fd.x_f - xf_ref)) <= 5e-4
        assert np.max(np.abs(fd.u_f - uf_ref)) <= 5e-4
        assert np.max(np.abs(fd.x_df - xdf_ref)) <= 5e-4

    @pytest.mark.parametrize("family", FAMILIES)
    def test_algebraic_identity(self, family, aircraft_system, aircraft_input):
        """x_df = A x_f + B u_f holds to quadrature accuracy for exact data."""
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank_of(family))
        scale = max(1.0, np.linalg.norm(fd.x_df))
        assert verify_algebraic(fd, aircraft_system) <= 1e-9 * scale

    @pytest.mark.parametrize("family", FAMILIES)
    def test_quadrature_report_present_and_small(self, family, aircraft_system, aircraft_input):
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank_of(family))
        assert set(fd.quadrature_report) == {"x_f", "u_f", "x_df"}
        for mat in fd.quadrature_report.values():
            assert np.max(mat) <= 1e-8 * (1 + np.max(np.abs(fd.x_df)))

    def test_matches_slow_generic_path(self, aircraft_system, aircraft_input):
        bank = bank_of("bump_test")
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank)
        f = state_fn(aircraft_system, aircraft_input)
        assert np.allclose(fd.x_f, filter_signal(bank, f), atol=1e-9)
        assert np.allclose(fd.u_f, filtered_input_data(bank, aircraft_input), atol=1e-12)
        assert np.allclose(fd.x_df, filtered_derivative_data(bank, f), atol=1e-9)

    def test_cache_is_shared_and_harmless(self, aircraft_system, aircraft_input):
        cache = {}
        fd1 = filter_lti_dataset(aircraft_system, aircraft_input, bank_of("poly_test"), cache=cache)
        assert cache
        fd2 = filter_lti_dataset(aircraft_system, aircraft_input, bank_of("lowpass"), cache=cache)
        ref2 = filter_lti_dataset(aircraft_system, aircraft_input, bank_of("lowpass"))
        assert np.allclose(fd2.x_f, ref2.x_f)
        assert np.allclose(fd2.x_df, ref2.x_df)

    def test_coarse_config_still_close(self, aircraft_system, aircraft_input):
        cfg = NumericConfig(quad_panels=2, quad_nodes=8)
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank_of("poly_test"), config=cfg)
        ref = filter_lti_dataset(aircraft_system, aircraft_input, bank_of("poly_test"))
        assert np.max(np.abs(fd.x_f - ref.x_f)) <= 1e-6 * (1 + np.max(np.abs(ref.x_f)))


class TestLowpassRealization:
    def test_matches_quadrature_filtering_of_state(self, aircraft_system, aircraft_input):
        """The ODE realization reproduces the quadrature x_f for lowpass."""
        bank = bank_of("lowpass")
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank)
        f = state_fn(aircraft_system, aircraft_input)
        wf = lowpass_realization(aircraft.LOWPASS_RHO, f, T, 6)
        assert np.max(np.abs(wf - fd.x_f)) <= 1e-8

    def test_step_response_analytic(self):
        # w = 1: wf(t) = (1 - e^{-rho t}) / rho
        rho = 2.0
        wf = lowpass_realization(rho, lambda t: 1.0, 0.5, 4)
        expected = (1.0 - np.exp(-rho * np.arange(1, 5) * 0.5)) / rho
        assert np.allclose(wf[0], expected, atol=1e-10)

    def test_derivative_identity(self, aircraft_system, aircraft_input):
        """w_df_l = w(lT) - e^{-rho lT} w(0) - rho w_f_l, checked against
        the integration-by-parts pipeline."""
        bank = bank_of("lowpass")
        f = state_fn(aircraft_system, aircraft_input)
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank)
        for ell in range(1, 7):
            lhs = lowpass_derivative_identity(
                aircraft.LOWPASS_RHO, f, T, ell, fd.x_f[:, ell - 1]
            )
            assert np.allclose(lhs, fd.x_df[:, ell - 1], atol=1e-8)


class TestRelationMatrices:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_factorization_residual_tiny(self, family, aircraft_system, aircraft_input):
        """[x_f; u_f] = C_bar [chi; mu] F_bar to quadrature accuracy."""
        bank = bank_of(family)
        fd = filter_lti_dataset(aircraft_system, aircraft_input, bank)
        sd = simulate_sampled(aircraft_system, aircraft_input)
        rel = build_relation_matrices(aircraft_system, decompose(bank))
        assert factorization_residual(fd, sd, rel) <= 1e-10

    def test_a_bar_for_zero_dynamics(self):
        # A = 0: A_bar = I * int g, B_bar = B * int tau g(tau)
        from ctsid import LtiSystem

        sys_ = LtiSystem(a=np.zeros((2, 2)), b=np.array([[1.0], [2.0]]), x0=np.zeros(2))
        bank = bank_of("poly_test")
        rel = build_relation_matrices(sys_, decompose(bank))
        rho = RHO["poly_test"]
        g_int = rho * T**5 / 30.0  # int_0^T rho tau^2 (T - tau)^2 dtau
        tau_g_int = rho * T**6 / 60.0  # int_0^T tau g(tau) dtau
        assert np.allclose(rel.a_bar, g_int * np.eye(2), rtol=1e-12)
        assert np.allclose(rel.b_bar, tau_g_int * sys_.b, rtol=1e-12)
        assert np.allclose(rel.g_bar, g_int * np.eye(1), rtol=1e-12)

    def test_c_bar_block_structure(self, aircraft_system):
        rel = build_relation_matrices(aircraft_system, decompose(bank_of("lowpass")))
        c = rel.c_bar
        assert c.shape == (6, 6)
        assert np.allclose(c[4:, :4], 0.0)
        assert np.allclose(c[:4, :4], rel.a_bar)
        assert np.allclose(c[4:, 4:], rel.g_bar)

    @pytest.mark.parametrize("seed", range(3))
    def test_random_systems_factorize(self, seed):
        rng = np.random.default_rng(200 + seed)
        sys_ = random_controllable_system(rng, n=3, m=2, T=T)
        inp = PiecewiseConstantInput(T=T, levels=rng.uniform(-1, 1, size=(2, 6)))
        for family in ("laguerre", "lowpass"):
            bank = bank_of(family)
            fd = filter_lti_dataset(sys_, inp, bank)
            sd = simulate_sampled(sys_, inp)
            rel = build_relation_matrices(sys_, decompose(bank))
            assert factorization_residual(fd, sd, rel) <= 1e-10
            assert verify_algebraic(fd, sys_) <= 1e-9 * max(1.0, np.linalg.norm(fd.x_df))
