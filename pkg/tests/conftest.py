"""
🧪 Shared fixtures
"""
import math

import numpy as np
import pytest

from ittdns.config.run_config import RunConfig
from ittdns.domain.events import EventBus
from ittdns.domain.spectral import make_grid, to_spectral
from ittdns.domain.entities import SpectralField
from ittdns.domain.solver import init_condition
from ittdns.domain.value_objects import DimensionlessParams, InitialCondition, PhysicalParams


@pytest.fixture
def grid2():
    return make_grid(2, 32)


@pytest.fixture
def grid3():
    return make_grid(3, 16)


@pytest.fixture
def random_field2(grid2):
    """Divergence-free, dealiased random state in 2D"""
    return init_condition(InitialCondition(kind="random-lowk", k_max=5, energy=0.7), grid2, seed=3)


@pytest.fixture
def random_field3(grid3):
    return init_condition(InitialCondition(kind="random-lowk", k_max=3, energy=0.4), grid3, seed=5)


@pytest.fixture
def itt_params():
    return PhysicalParams(lam=1.0, alpha=1.0, beta=1.0, nu=0.05)


@pytest.fixture
def bus():
    return EventBus()


def make_dimensionless(alpha0: float, re_nu: float, activity: float) -> DimensionlessParams:
    """Dimensionless parameters from (α₀, Re_ν, 𝒜₀)"""
    return DimensionlessParams(
        alpha0=alpha0,
        re_nu=re_nu,
        re_beta=alpha0 / activity,
        u0=1.0,
        length=1.0,
        lam=1.0,
    )


def physical_field(grid, values):
    return SpectralField(grid, to_spectral(np.asarray(values, dtype=np.float64), grid.d))


@pytest.fixture
def small_run_config(tmp_path):
    """Factory for fast 2D run configs in a temporary directory"""
    def factory(name: str = "run", **overrides) -> RunConfig:
        values = {
            "label": name,
            "d": 2,
            "resolution": 16,
            "dt": 1e-3,
            "t_end": 0.02,
            "alpha": 1.0,
            "beta": 1.0,
            "nu": 0.1,
            "ic": "random-lowk",
            "ic_k_max": 3,
            "ic_energy": 0.3,
            "seed": 11,
            "sample_every": 5,
            "snapshot_every": 10,
            "n_max": 2,
            "m_max": 3,
            "output_dir": str(tmp_path / name),
        }
        values.update(overrides)
        return RunConfig.from_mapping(values)
    return factory


TWO_PI = 2.0 * math.pi
