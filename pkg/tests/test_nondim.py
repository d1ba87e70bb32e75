"""
🧪 Nondimensionalization tests
"""
import math

import numpy as np
import pandas as pd
import pytest

from ittdns.domain.diagnostics import h_norm
from ittdns.domain.errors import ConfigurationError, DomainError
from ittdns.domain.nondim import (
    dimensionless_time,
    leading_order_assumption_holds,
    nondimensionalize,
    norm_scale,
    redimensionalize,
    rescale_state,
    rescale_time_series,
    solve_dimensionless,
    velocity_scale,
)
from ittdns.domain.solver import EtdIntegrator, init_condition
from ittdns.domain.spectral import make_grid
from ittdns.domain.value_objects import InitialCondition, PhysicalParams, U0Choice

TWO_PI = 2.0 * math.pi


@pytest.fixture
def b2():
    return PhysicalParams(lam=1.0, alpha=10.0, beta=0.1, nu=0.05, box_length=TWO_PI)


class TestNondimensionalize:
    def test_sqrt_alpha_beta(self, b2):
        dp = nondimensionalize(b2, U0Choice.SQRT_ALPHA_BETA)
        assert dp.u0 == pytest.approx(10.0)
        assert dp.re_nu == pytest.approx(400.0 * math.pi)
        assert dp.re_beta == pytest.approx(TWO_PI)
        assert dp.alpha0 == pytest.approx(TWO_PI)
        assert dp.activity == pytest.approx(1.0)

    def test_nu_over_l(self, b2):
        dp = nondimensionalize(b2, "nu-over-L")
        assert dp.choice is U0Choice.NU_OVER_L
        assert dp.re_nu == pytest.approx(1.0, abs=1e-15)
        assert dp.u0 == pytest.approx(0.05 / TWO_PI)

    @pytest.mark.parametrize("choice", list(U0Choice))
    def test_round_trip(self, b2, choice):
        back = redimensionalize(nondimensionalize(b2, choice))
        for name in ("lam", "alpha", "beta", "nu", "box_length"):
            assert getattr(back, name) == pytest.approx(getattr(b2, name), rel=1e-14)

    def test_lambda_zero(self):
        with pytest.raises(DomainError):
            nondimensionalize(PhysicalParams(lam=0.0, alpha=1.0, beta=1.0, nu=0.1))

    def test_navier_stokes_parameters(self):
        params = PhysicalParams(lam=1.0, alpha=0.0, beta=0.0, nu=0.1)
        with pytest.raises(DomainError):
            nondimensionalize(params, U0Choice.NU_OVER_L)
        with pytest.raises(DomainError):
            velocity_scale(params, U0Choice.SQRT_ALPHA_BETA)

    def test_unknown_mode(self, b2):
        with pytest.raises(ConfigurationError):
            velocity_scale(b2, "sqrt-nu")

    def test_leading_order_assumption(self, b2):
        assert leading_order_assumption_holds(nondimensionalize(b2))
        assert leading_order_assumption_holds(nondimensionalize(b2, U0Choice.NU_OVER_L))
        strong = PhysicalParams(lam=1.0, alpha=100.0, beta=5.0, nu=0.287)
        assert not leading_order_assumption_holds(nondimensionalize(strong, warn=False))


class TestRescaling:
    def test_norm_scale(self, b2):
        dp = nondimensionalize(b2)
        assert norm_scale(0, dp) == pytest.approx(0.1)
        assert norm_scale(2, dp) == pytest.approx(0.1 * TWO_PI ** 2)

    def test_time(self, b2):
        dp = nondimensionalize(b2)
        assert dimensionless_time(TWO_PI, dp) == pytest.approx(10.0)
        frame = pd.DataFrame({"t": [0.0, TWO_PI], "E_tot": [1.0, 2.0]})
        rescaled = rescale_time_series(frame, dp)
        assert list(rescaled["t"]) == pytest.approx([0.0, 10.0])
        assert list(frame["t"]) == [0.0, TWO_PI]

    def test_identity_when_scales_are_one(self):
        params = PhysicalParams(lam=1.0, alpha=1.0, beta=1.0, nu=0.1, box_length=1.0)
        grid = make_grid(2, 16, box_length=1.0)
        state = init_condition(InitialCondition(kind="random-lowk", k_max=3), grid, seed=2)
        rescaled = rescale_state(state, params)
        np.testing.assert_array_equal(rescaled.components, state.components)
        assert rescaled.time == state.time

    def test_uniform_equilibrium_has_unit_amplitude(self):
        params = PhysicalParams(lam=1.0, alpha=4.0, beta=1.0, nu=0.1)
        grid = make_grid(2, 8)
        state = init_condition(InitialCondition(kind="uniform", vector=(2.0, 0.0)), grid)
        rescaled = rescale_state(state, params)
        assert abs(rescaled.components[0, 0, 0]) == pytest.approx(1.0)

    def test_norms_follow_the_scale_factors(self, b2, random_field2):
        dp = nondimensionalize(b2)
        rescaled = rescale_state(random_field2, b2)
        for n in range(3):
            assert h_norm(rescaled, n) == pytest.approx(norm_scale(n, dp) ** 2 * h_norm(random_field2, n), rel=1e-12)

    def test_box_mismatch(self, random_field2):
        params = PhysicalParams(lam=1.0, alpha=1.0, beta=1.0, nu=0.1, box_length=1.0)
        with pytest.raises(DomainError):
            rescale_state(random_field2, params)


class TestDimensionlessIntegration:
    def test_rescaling_commutes_with_time_stepping(self, random_field2):
        params = PhysicalParams(lam=1.0, alpha=2.0, beta=0.5, nu=0.05)
        dp = nondimensionalize(params)
        dt, steps = 1e-3, 20

        dimensional = EtdIntegrator(random_field2.grid, params, dt).advance(random_field2, steps)
        primed = solve_dimensionless(rescale_state(random_field2, params), dp, dimensionless_time(dt, dp), steps)
        expected = rescale_state(dimensional, params)

        scale = np.abs(expected.components).max()
        assert np.abs(primed.components - expected.components).max() < 1e-10 * scale
        assert primed.time == pytest.approx(expected.time, rel=1e-12)

    def test_requires_the_unit_box(self, random_field2, b2):
        with pytest.raises(DomainError):
            solve_dimensionless(random_field2, nondimensionalize(b2), 1e-3, 1)
