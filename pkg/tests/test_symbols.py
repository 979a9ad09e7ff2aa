"""Mode symbols, transforms, analysis/synthesis and their exact algebra."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from specdde import (
    AliasingError,
    DelayFunctional,
    DimensionError,
    DistributedDelay,
    InvalidKernelError,
    KernelSpec,
    PeriodicGridFunction,
    ProblemSpec,
    analyze,
    delay_symbol,
    difference_sequences,
    laplace_symbol,
    laplace_symbol_quadrature,
    mode_range,
    synthesize,
)

TWO_PI = 2.0 * np.pi


class TestDelaySymbol:
    def test_period_lag_atom_is_mode_independent(self):
        L = DelayFunctional(dim=1, atoms=[(0.7, TWO_PI)])
        for k in (-5, -1, 0, 1, 2, 17, 512):
            assert delay_symbol(L, k)[0, 0] == pytest.approx(0.7, abs=1e-15)

    def test_half_period_lag_alternates_sign(self):
        b = 0.4
        L = DelayFunctional(dim=1, atoms=[(b, np.pi)])
        for k in range(-8, 9):
            expected = b * (-1) ** k
            assert delay_symbol(L, k)[0, 0] == pytest.approx(expected, abs=1e-14)

    def test_empty_functional_gives_zero_matrix(self):
        L = DelayFunctional.empty(3)
        assert np.array_equal(delay_symbol(L, 7), np.zeros((3, 3)))

    def test_generic_lag_matches_direct_phase(self):
        lag = 1.2345
        L = DelayFunctional(dim=1, atoms=[(2.0, lag)])
        for k in (-3, 1, 4):
            assert delay_symbol(L, k)[0, 0] == pytest.approx(
                2.0 * np.exp(-1j * k * lag), abs=1e-13
            )

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            DelayFunctional(dim=2, atoms=[(np.eye(3), 1.0)])

    def test_lag_beyond_horizon_rejected(self):
        with pytest.raises(ValueError):
            DelayFunctional(dim=1, atoms=[(1.0, 3 * TWO_PI)], horizon=TWO_PI)

    def test_horizon_must_be_period_multiple(self):
        with pytest.raises(ValueError):
            DelayFunctional(dim=1, atoms=[(1.0, 1.0)], horizon=1.5 * TWO_PI)

    def test_distributed_symbol_matches_adaptive_quadrature(self):
        dist = DistributedDelay(
            lambda th: (0.3 * np.exp(th) + 0.1 * np.cos(th))[:, None, None]
            * np.eye(1),
            span=TWO_PI,
        )
        L = DelayFunctional(dim=1, distributed=dist)
        for k in (0, 1, 5, 23):
            re = quad(lambda th: (0.3 * np.exp(th) + 0.1 * np.cos(th))
                      * np.cos(k * th), -TWO_PI, 0.0, limit=200)[0]
            im = quad(lambda th: (0.3 * np.exp(th) + 0.1 * np.cos(th))
                      * np.sin(k * th), -TWO_PI, 0.0, limit=200)[0]
            assert delay_symbol(L, k)[0, 0] == pytest.approx(
                re + 1j * im, abs=1e-10
            )

    def test_sampled_kernel_close_to_callable(self):
        theta = np.linspace(-TWO_PI, 0.0, 257)
        samples = (0.3 * np.exp(theta))[:, None, None] * np.eye(1)
        sampled = DelayFunctional(
            dim=1, distributed=DistributedDelay(samples, span=TWO_PI)
        )
        exact = DelayFunctional(
            dim=1,
            distributed=DistributedDelay(
                lambda th: (0.3 * np.exp(th))[:, None, None] * np.eye(1),
                span=TWO_PI,
            ),
        )
        for k in (0, 2, 7):
            assert delay_symbol(sampled, k)[0, 0] == pytest.approx(
                delay_symbol(exact, k)[0, 0], abs=1e-8
            )

    def test_conjugate_symmetry_for_real_data(self):
        dist = DistributedDelay(
            lambda th: (0.2 * np.exp(th / 2.0))[:, None, None] * np.eye(2),
            span=TWO_PI,
        )
        L = DelayFunctional(
            dim=2,
            atoms=[(np.array([[0.5, 0.1], [0.0, 0.3]]), 1.0)],
            distributed=dist,
        )
        for k in (1, 3, 11):
            assert np.allclose(
                delay_symbol(L, -k), np.conj(delay_symbol(L, k)), atol=1e-12
            )

    @settings(max_examples=25, deadline=None)
    @given(
        alpha_re=st.floats(-2.0, 2.0),
        alpha_im=st.floats(-2.0, 2.0),
        seed=st.integers(0, 10**6),
        k=st.integers(-17, 17),
    )
    def test_symbol_linear_in_functional(self, alpha_re, alpha_im, seed, k):
        gen = np.random.default_rng(seed)
        alpha = alpha_re + 1j * alpha_im
        l1 = DelayFunctional(
            dim=2,
            atoms=[(gen.normal(size=(2, 2)), TWO_PI * gen.uniform())
                   for _ in range(2)],
        )
        l2 = DelayFunctional(
            dim=2, atoms=[(gen.normal(size=(2, 2)), TWO_PI * gen.uniform())]
        )
        combined = (alpha * l1) + l2
        expected = alpha * delay_symbol(l1, k) + delay_symbol(l2, k)
        assert np.allclose(delay_symbol(combined, k), expected, atol=1e-12)


class TestLaplaceSymbol:
    def test_exponential_at_zero_is_total_mass(self):
        assert laplace_symbol(KernelSpec.exponential(), 0) == pytest.approx(1.0)

    def test_exponential_at_one_vs_quadrature(self):
        # independent truncated quadrature of e^{-t} e^{-it} on [0, 40]
        re = quad(lambda t: np.exp(-t) * np.cos(t), 0.0, 40.0)[0]
        im = quad(lambda t: -np.exp(-t) * np.sin(t), 0.0, 40.0)[0]
        oracle = re + 1j * im
        value = laplace_symbol(KernelSpec.exponential(), 1)
        assert value == pytest.approx(oracle, abs=1e-10)
        assert value == pytest.approx(0.5 - 0.5j, abs=1e-12)

    def test_empty_kernel_is_zero(self):
        assert laplace_symbol(KernelSpec.empty(), 3) == 0.0

    def test_quadrature_route_agrees_with_closed_form(self):
        kern = KernelSpec(terms=[(0.5, 2, 1.5), (0.25, 0, 0.5)])
        for k in (0, 1, 7):
            assert laplace_symbol_quadrature(kern, k) == pytest.approx(
                laplace_symbol(kern, k), abs=1e-10
            )

    def test_modulus_bounded_by_l1_norm(self, rng):
        for _ in range(20):
            terms = [
                (rng.normal(), int(rng.integers(0, 3)), float(rng.uniform(0.2, 3.0)))
                for _ in range(3)
            ]
            kern = KernelSpec(terms=terms)
            bound = kern.l1_norm()
            for k in (-9, 0, 2, 33):
                assert abs(laplace_symbol(kern, k)) <= bound + 1e-12

    def test_conjugate_symmetry_real_kernel(self):
        kern = KernelSpec(terms=[(1.0, 1, 2.0)])
        for k in (1, 4):
            assert laplace_symbol(kern, -k) == pytest.approx(
                np.conj(laplace_symbol(kern, k))
            )

    def test_invalid_rate_rejected(self):
        with pytest.raises(InvalidKernelError):
            KernelSpec(terms=[(1.0, 0, -1.0)])
        with pytest.raises(InvalidKernelError):
            KernelSpec(terms=[(1.0, 0, 0.0)])
        with pytest.raises(InvalidKernelError):
            KernelSpec(terms=[(1.0, -1, 1.0)])

    def test_formal_derivative_matches_difference_quotient(self):
        kern = KernelSpec(terms=[(0.7, 2, 1.3)])
        d = kern.derivative()
        h = 1e-6
        for t in (0.2, 1.0, 3.0):
            fd = (kern.eval(t + h) - kern.eval(t - h)) / (2 * h)
            assert d.eval(t) == pytest.approx(fd, abs=1e-6)


class TestAnalyzeSynthesize:
    def test_pure_mode_has_single_coefficient(self):
        t = TWO_PI * np.arange(16) / 16
        v = np.array([2.0, -1.0])
        samples = np.exp(1j * t)[:, None] * v[None, :]
        coeffs = analyze(samples, bandwidth=4)
        ks = mode_range(4)
        for i, k in enumerate(ks):
            expected = v if k == 1 else np.zeros(2)
            assert np.allclose(coeffs[i], expected, atol=1e-14)

    def test_constant_function(self):
        samples = np.full(8, 3.5)
        coeffs = analyze(samples, bandwidth=3)
        assert coeffs[3, 0] == pytest.approx(3.5)
        assert np.max(np.abs(np.delete(coeffs[:, 0], 3))) < 1e-15

    def test_cosine_splits_into_half_coefficients(self):
        # (1/2pi) int cos(t) e^{-i k t} dt = 1/2 at k = +-1
        t = TWO_PI * np.arange(32) / 32
        coeffs = analyze(np.cos(t), bandwidth=4)
        assert coeffs[4 + 1, 0] == pytest.approx(0.5, abs=1e-15)
        assert coeffs[4 - 1, 0] == pytest.approx(0.5, abs=1e-15)
        assert abs(coeffs[4, 0]) < 1e-15

    def test_aliasing_guard(self):
        with pytest.raises(AliasingError):
            analyze(np.zeros(8), bandwidth=4)

    def test_synthesize_constant_and_cosine(self):
        const = synthesize({0: [1.5]}, 8)
        assert np.allclose(const.samples[:, 0], 1.5)
        cosine = synthesize({1: [0.5], -1: [0.5]}, 16)
        assert np.allclose(cosine.samples[:, 0], np.cos(cosine.nodes), atol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_round_trip_on_random_band(self, seed):
        gen = np.random.default_rng(seed)
        coeffs = gen.normal(size=(17, 2)) + 1j * gen.normal(size=(17, 2))
        f = synthesize(coeffs, 32)
        back = analyze(f.samples, bandwidth=8)
        assert np.max(np.abs(back - coeffs)) <= 1e-12 * np.max(np.abs(coeffs))

    def test_analysis_linear(self, rng):
        a = rng.normal(size=24)
        b = rng.normal(size=24)
        lhs = analyze(2.0 * a + b, bandwidth=8)
        rhs = 2.0 * analyze(a, bandwidth=8) + analyze(b, bandwidth=8)
        assert np.allclose(lhs, rhs, atol=1e-13)

    def test_harmonics_are_exact(self):
        f = PeriodicGridFunction.from_harmonics(cos=[1.0, 0.0, 2.0], sin=[0.5])
        assert f.coefficient(1)[0] == (1.0 - 0.5j) / 2.0
        assert f.coefficient(-1)[0] == (1.0 + 0.5j) / 2.0
        assert f.coefficient(3)[0] == 1.0
        assert f.coefficient(2)[0] == 0.0

    def test_resample_and_derivative(self):
        f = PeriodicGridFunction.from_harmonics(cos=[1.0])
        g = f.resample(64)
        assert np.allclose(g.samples[:, 0], np.cos(g.nodes), atol=1e-14)
        d = f.derivative()
        assert np.allclose(d.samples[:, 0], -np.sin(d.nodes), atol=1e-14)


class TestSymbolOperatorConsistency:
    """Applying the functional on the grid must match coefficient-wise action."""

    def _check(self, functional, pointwise, K=6, tol=1e-8):
        gen = np.random.default_rng(7)
        coeffs = gen.normal(size=(2 * K + 1, functional.dim)) \
            + 1j * gen.normal(size=(2 * K + 1, functional.dim))
        u = synthesize(coeffs, 4 * K)

        def u_eval(t):
            ks = mode_range(K)
            return (np.exp(1j * np.outer(np.atleast_1d(t), ks)) @ coeffs)

        nodes = u.nodes
        applied = np.stack([pointwise(u_eval, t) for t in nodes])
        got = analyze(applied, bandwidth=K)
        ks = mode_range(K)
        for i, k in enumerate(ks):
            expected = functional.symbol(int(k)) @ coeffs[i]
            assert np.allclose(got[i], expected, atol=tol)

    def test_atoms(self):
        L = DelayFunctional(
            dim=2,
            atoms=[(np.array([[0.5, 0.1], [0.2, 0.3]]), 1.1), (0.2 * np.eye(2), np.pi)],
        )

        def pointwise(u_eval, t):
            return (L.atoms[0][0] @ u_eval(t - 1.1)[0]
                    + L.atoms[1][0] @ u_eval(t - np.pi)[0])

        self._check(L, pointwise)

    def test_distributed(self):
        dist = DistributedDelay(
            lambda th: (0.3 * np.exp(th))[:, None, None] * np.eye(1), span=TWO_PI
        )
        L = DelayFunctional(dim=1, distributed=dist)

        def pointwise(u_eval, t):
            re = quad(lambda th: (0.3 * np.exp(th) * u_eval(t + th)[0, 0]).real,
                      -TWO_PI, 0.0, limit=200)[0]
            im = quad(lambda th: (0.3 * np.exp(th) * u_eval(t + th)[0, 0]).imag,
                      -TWO_PI, 0.0, limit=200)[0]
            return np.array([re + 1j * im])

        self._check(L, pointwise, K=4)

    def test_convolution_coefficients_multiply_by_transform(self):
        # F(t) = int_0^inf a(tau) u(t - tau) dtau for a trig polynomial u
        kern = KernelSpec.exponential(weight=0.8, rate=1.3)
        K = 3
        gen = np.random.default_rng(11)
        coeffs = gen.normal(size=(2 * K + 1, 1)) + 1j * gen.normal(size=(2 * K + 1, 1))
        u = synthesize(coeffs, 16)
        ks = mode_range(K)

        def u_eval(t):
            return np.exp(1j * t * ks) @ coeffs[:, 0]

        horizon = 40.0  # tail mass ~ e^{-52}
        nodes = u.nodes
        applied = np.empty(len(nodes), dtype=complex)
        for j, t in enumerate(nodes):
            re = quad(lambda tau: (0.8 * np.exp(-1.3 * tau) * u_eval(t - tau)).real,
                      0.0, horizon, limit=400)[0]
            im = quad(lambda tau: (0.8 * np.exp(-1.3 * tau) * u_eval(t - tau)).imag,
                      0.0, horizon, limit=400)[0]
            applied[j] = re + 1j * im
        got = analyze(applied, bandwidth=K)
        for i, k in enumerate(ks):
            assert got[i, 0] == pytest.approx(
                laplace_symbol(kern, int(k)) * coeffs[i, 0], abs=1e-9
            )


class TestDifferenceSequences:
    def test_period_lag_differences_vanish(self):
        spec = ProblemSpec(
            state_matrix=[[-1.0]],
            neutral_delay=DelayFunctional(dim=1, atoms=[(0.5, TWO_PI)]),
            truncation=4,
            grid=16,
        )
        for k in (-7, 0, 3, 12):
            diffs = difference_sequences(spec, k)
            assert np.all(diffs.neutral == 0.0)
            assert np.all(diffs.neutral_state == 0.0)

    def test_half_period_lag_difference_grows_linearly(self):
        spec = ProblemSpec(
            state_matrix=[[-1.0]],
            neutral_delay=DelayFunctional(dim=1, atoms=[(1.0, np.pi)]),
            truncation=4,
            grid=16,
        )
        for k in (-9, 1, 2, 15):
            diffs = difference_sequences(spec, k)
            assert abs(diffs.neutral[0, 0]) == pytest.approx(2.0 * abs(k), abs=1e-10)

    def test_exponential_kernel_difference_closed_form(self):
        spec = ProblemSpec(
            state_matrix=[[-1.0]], kernel=KernelSpec.exponential(),
            truncation=4, grid=16,
        )
        for k in range(-30, 31):
            got = difference_sequences(spec, k).kernel
            closed = -1j * k / ((1.0 + 1j * k) * (1.0 + 1j * (k + 1)))
            assert got == pytest.approx(closed, abs=1e-14)
            assert abs(got) <= 1.0 + 1e-15

    def test_state_difference_is_state_matrix_times_neutral(self, rng):
        A = rng.normal(size=(2, 2))
        spec = ProblemSpec(
            state_matrix=A,
            neutral_delay=DelayFunctional(
                dim=2, atoms=[(rng.normal(size=(2, 2)), 1.0)]
            ),
            truncation=4,
            grid=16,
        )
        diffs = difference_sequences(spec, 5)
        assert np.allclose(diffs.neutral_state, A @ diffs.neutral, atol=1e-14)
