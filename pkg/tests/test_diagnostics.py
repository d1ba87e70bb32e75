"""
🧪 Diagnostics tests: norms, exponents, time averages and budgets
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from ittdns.domain.diagnostics import (
    NormHierarchy,
    TimeAverageAccumulator,
    alpha_exponent,
    budget_terms,
    d_m,
    energy_balance,
    energy_spectrum,
    energy_total,
    f_nmd,
    grad_norm,
    h_norm,
    inverse_length_bound_exponent,
    l4_integral,
    length_scale,
    lebesgue_norm,
    p_nm,
    q_nm,
    sup_norm,
)
from ittdns.domain.entities import SpectralField
from ittdns.domain.errors import ContractViolation, DomainError
from ittdns.domain.solver import EtdIntegrator, init_condition
from ittdns.domain.spectral import make_grid
from ittdns.domain.value_objects import InitialCondition, PhysicalParams

from .conftest import physical_field


@pytest.fixture
def taylor_green():
    grid = make_grid(2, 32)
    return init_condition(InitialCondition(kind="taylor-green", amplitude=1.5), grid)


class TestAlphaExponent:
    @pytest.mark.parametrize("n, m, d, expected", [
        (1, 1, 2, Fraction(1)),
        (0, 2, 2, Fraction(2)),
        (0, 3, 3, Fraction(2, 1)),
        (1, 2, 3, Fraction(4, 5)),
        (2, 1, 3, Fraction(2, 3)),
        (0, math.inf, 2, Fraction(1)),
        (2, math.inf, 3, Fraction(1, 3)),
    ])
    def test_values(self, n, m, d, expected):
        assert alpha_exponent(n, m, d) == expected

    @pytest.mark.parametrize("n, m, d", [(0, 1, 2), (0, 1, 3), (-1, 2, 2), (1, 0, 2), (1, 1.5, 2), (1, 1, 4)])
    def test_undefined(self, n, m, d):
        with pytest.raises(DomainError):
            alpha_exponent(n, m, d)

    def test_inverse_length_exponent(self):
        assert inverse_length_bound_exponent(1, 1, 2) == Fraction(1, 4)
        assert inverse_length_bound_exponent(1, 1, 3) == Fraction(1, 4)
        assert inverse_length_bound_exponent(2, math.inf, 2) == Fraction(1, 2)


class TestNorms:
    def test_taylor_green_h_norms(self, taylor_green):
        assert h_norm(taylor_green, 0) == pytest.approx(1.5 ** 2 / 2)
        assert h_norm(taylor_green, 1) == pytest.approx(1.5 ** 2)
        assert energy_total(taylor_green) == pytest.approx(h_norm(taylor_green, 0) / 2)

    def test_spectral_and_physical_quadratures_agree(self, random_field3):
        norms = NormHierarchy(random_field3)
        for n in range(3):
            assert norms.h(n) == pytest.approx(h_norm(random_field3, n), rel=1e-12)

    def test_p11_equals_enstrophy_in_2d(self, random_field2):
        assert p_nm(random_field2, 1, 1) == pytest.approx(h_norm(random_field2, 1), rel=1e-12)

    def test_q11_and_d1_equal_enstrophy_in_3d(self, random_field3):
        h1 = h_norm(random_field3, 1)
        assert q_nm(random_field3, 1, 1) == pytest.approx(h1, rel=1e-12)
        assert d_m(random_field3, 1) == pytest.approx(h1, rel=1e-10)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_raw_norms_nondecreasing_in_m(self, random_field2, n):
        values = [grad_norm(random_field2, n, m) for m in (1, 2, 3, 4, 8, math.inf)]
        assert all(b >= a * (1 - 1e-12) for a, b in zip(values, values[1:]))

    def test_sup_norm_is_the_m_infinity_norm(self, random_field2):
        assert sup_norm(random_field2) == pytest.approx(grad_norm(random_field2, 0, math.inf))

    def test_uniform_field(self):
        grid = make_grid(3, 8)
        state = init_condition(InitialCondition(kind="uniform", vector=(1.0, 2.0, 2.0)), grid)
        assert l4_integral(state) == pytest.approx(81.0)
        assert grad_norm(state, 0, 3) == pytest.approx(3.0)
        assert h_norm(state, 1) == 0.0

    def test_l4_norm_of_a_sine(self, grid2):
        x, _ = grid2.coordinates()
        amplitude = 1.7
        state = physical_field(grid2, np.stack([np.zeros(grid2.shape), amplitude * np.sin(x)]))
        assert grad_norm(state, 0, 2) == pytest.approx(amplitude * (3.0 / 8.0) ** 0.25, rel=1e-12)

    def test_zero_field(self, grid2):
        zero = SpectralField.zeros(grid2)
        assert lebesgue_norm(np.zeros(grid2.shape), 4) == 0.0
        assert p_nm(zero, 1, 2) == 0.0

    def test_q0m_requires_m_above_two(self, random_field3):
        with pytest.raises(DomainError):
            q_nm(random_field3, 0, 2)

    def test_hierarchy_matches_free_functions(self, random_field2):
        norms = NormHierarchy(random_field2)
        assert norms.p(2, 3) == pytest.approx(p_nm(random_field2, 2, 3), rel=1e-12)
        assert norms.raw_norm(1, math.inf) == pytest.approx(grad_norm(random_field2, 1, math.inf))

    def test_f_and_length_scale(self):
        # 1/α_{1,1,2} + d/2m = 2
        assert f_nmd(0.5, 1, 1, 2, nu=0.1, box_length=2.0) == pytest.approx(0.5 * 4.0 / 0.1)
        assert length_scale(8.0, 2) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            length_scale(-1.0, 1)


class TestTimeAverages:
    def test_linear_signal(self):
        acc = TimeAverageAccumulator()
        for t in np.linspace(0.0, 1.0, 11):
            acc.add(float(t), {"f": float(t), "g": np.array([t, 2 * t])})
        assert acc.average("f") == pytest.approx(0.5)
        np.testing.assert_allclose(acc.average("g"), [0.5, 1.0])
        assert acc.horizon() == pytest.approx(1.0)

    def test_window_start(self):
        acc = TimeAverageAccumulator(start=0.5)
        for t in np.linspace(0.0, 1.0, 11):
            acc.add(float(t), {"f": float(t)})
        assert acc.average("f") == pytest.approx(0.75)
        assert acc.horizon("f") == pytest.approx(0.5)

    def test_single_sample_and_missing_key(self):
        acc = TimeAverageAccumulator().add(0.0, {"f": 3.0})
        assert acc.average("f") == 3.0
        assert acc.average("g") is None

    def test_time_must_not_go_backwards(self):
        acc = TimeAverageAccumulator().add(1.0, {"f": 1.0})
        with pytest.raises(ContractViolation):
            acc.add(0.5, {"f": 1.0})

    def test_merge_matches_single_pass(self):
        times = np.linspace(0.0, 2.0, 21)
        whole = TimeAverageAccumulator()
        first, second = TimeAverageAccumulator(), TimeAverageAccumulator()
        for t in times:
            value = {"f": float(np.sin(t))}
            whole.add(float(t), value)
            if t <= 1.0 + 1e-12:
                first.add(float(t), value)
            if t >= 1.0 - 1e-12:
                second.add(float(t), value)
        merged = first.merge(second)
        assert merged.average("f") == pytest.approx(whole.average("f"), rel=1e-12)

    def test_merge_requires_contiguous_windows(self):
        first = TimeAverageAccumulator().add(0.0, {"f": 1.0}).add(1.0, {"f": 1.0})
        second = TimeAverageAccumulator().add(2.0, {"f": 1.0}).add(3.0, {"f": 1.0})
        with pytest.raises(ContractViolation):
            first.merge(second)


class TestSpectralBudget:
    def test_taylor_green_spectrum(self, taylor_green):
        spectrum = energy_spectrum(taylor_green)
        assert spectrum[1] == pytest.approx(energy_total(taylor_green))
        assert spectrum.sum() == pytest.approx(energy_total(taylor_green))

    @pytest.mark.parametrize("fixture_name", ["random_field2", "random_field3"])
    def test_budget_identities(self, request, fixture_name):
        state = request.getfixturevalue(fixture_name)
        params = PhysicalParams(lam=1.0, alpha=0.7, beta=0.3, nu=0.05)
        budget = budget_terms(state, params)

        scale = np.abs(budget.transfer).sum()
        assert abs(budget.transfer.sum()) <= 1e-10 * max(scale, 1.0)
        assert budget.transfer_beta.sum() == pytest.approx(params.beta * l4_integral(state), rel=1e-10)
        assert budget.transfer_alpha.sum() == pytest.approx(2 * params.alpha * energy_total(state), rel=1e-12)
        assert budget.dissipation.sum() == pytest.approx(params.nu * h_norm(state, 1), rel=1e-12)
        assert budget.rate.sum() == pytest.approx(energy_balance(state, params)["rate"], rel=1e-9, abs=1e-12)

    def test_shellwise_closure_against_finite_difference(self, random_field2, itt_params):
        dt = 1e-8
        before = budget_terms(random_field2, itt_params)
        after = EtdIntegrator(random_field2.grid, itt_params, dt=dt).step(random_field2)
        observed = (energy_spectrum(after) - energy_spectrum(random_field2)) / dt
        scale = max(np.abs(getattr(before, name)).max() for name in ("transfer", "transfer_alpha", "transfer_beta", "dissipation"))
        np.testing.assert_allclose(observed, before.rate, atol=1e-4 * scale)

    def test_cubic_flux_is_a_sink_for_a_single_mode(self):
        grid = make_grid(2, 32)
        amplitude = 0.8
        state = init_condition(InitialCondition(kind="single-mode", amplitude=amplitude, wavevector=(2, 1)), grid)
        params = PhysicalParams(lam=1.0, alpha=1.0, beta=0.5, nu=0.1)
        budget = budget_terms(state, params)
        assert np.all(budget.flux_beta <= 0.0)
        # ∫sin⁴ = 3/8 of the box, all of it in shell round(√5) = 2
        assert budget.transfer_beta[2] == pytest.approx(params.beta * 0.375 * amplitude ** 4, rel=1e-12)
        assert budget.flux_beta[1] == 0.0

    def test_fluxes_are_cumulative(self, random_field2, itt_params):
        budget = budget_terms(random_field2, itt_params)
        np.testing.assert_allclose(budget.flux, -np.cumsum(budget.transfer))
        assert budget.flux_beta[-1] == pytest.approx(-budget.transfer_beta.sum())

    def test_columns(self, random_field2, itt_params):
        columns = budget_terms(random_field2, itt_params).as_columns()
        assert set(columns) == {"shell", "E", "T", "T_alpha", "T_beta", "dissipation", "Pi", "Pi_beta"}
