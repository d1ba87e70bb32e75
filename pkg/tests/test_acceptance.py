"""
🧪 Desk-scale acceptance runs (pytest -m slow)
"""
import math

import numpy as np
import pandas as pd
import pytest
from scipy.integrate import trapezoid

from ittdns.application.use_cases import RunSimulationUseCase
from ittdns.config.run_config import RunConfig, registry
from ittdns.domain.diagnostics import budget_terms
from ittdns.domain.spectral import divergence_residual, hermitian_defect
from ittdns.infrastructure.repositories.checkpoint_repository import BinaryCheckpointRepository
from ittdns.infrastructure.repositories.csv_repositories import CsvRunOutputRepository

pytestmark = pytest.mark.slow


def execute(config, bus):
    return RunSimulationUseCase(config, BinaryCheckpointRepository(), CsvRunOutputRepository(), bus=bus).execute()


def test_registered_2d_run_at_desk_resolution(tmp_path, bus):
    values = registry("A6").to_flat()
    values.update({"t_end": "0.2", "sample_every": "20", "n_max": "2", "m_max": "4", "output_dir": str(tmp_path)})
    result = execute(RunConfig.from_mapping(values), bus)

    bounds = pd.read_csv(result.run_dir / "bounds.csv")
    sqrt_rows = bounds[bounds["u0_mode"] == "sqrt-alpha-beta"].set_index("identifier")
    assert sqrt_rows.loc["H0", "status"] in ("satisfied", "boundary")
    assert sqrt_rows.loc["L4", "status"] in ("satisfied", "boundary")
    assert sqrt_rows.loc["H1", "status"] == "satisfied"
    assert sqrt_rows.loc["P_1_1", "status"] == "satisfied"
    # P_{1,1} is the enstrophy in d=2 and shares its estimate
    assert sqrt_rows.loc["P_1_1", "ratio"] == pytest.approx(sqrt_rows.loc["H1", "ratio"], rel=1e-8)
    assert np.isfinite(bounds["ratio"].dropna()).all()

    series = pd.read_csv(result.run_dir / "timeseries.csv")
    assert series["C"].max() < 1.0

    state = BinaryCheckpointRepository().load(result.run_dir / "checkpoint_final.itts").field
    assert divergence_residual(state) < 1e-10
    assert hermitian_defect(state) < 1e-10

    budget = budget_terms(state, result_params(values))
    assert np.all(budget.flux_beta <= 1e-10 * np.abs(budget.flux_beta).max())
    assert budget.transfer.sum() == pytest.approx(0.0, abs=1e-8 * np.abs(budget.transfer).sum())
    assert budget.flux[-1] == pytest.approx(0.0, abs=1e-8 * np.abs(budget.transfer).sum())


def test_energy_balance_closes(tmp_path, bus):
    config = RunConfig.from_mapping({
        "label": "balance", "d": 2, "resolution": 64, "dt": 1e-3, "t_end": 0.5,
        "alpha": 1.0, "beta": 1.0, "nu": 0.06, "ic_k_max": 6, "seed": 2,
        "sample_every": 1, "n_max": 1, "m_max": 2, "output_dir": str(tmp_path),
    })
    result = execute(config, bus)
    series = pd.read_csv(result.run_dir / "timeseries.csv")
    t = series["t"].to_numpy()
    rate = config.alpha * series["H0"] - config.nu * series["H1"] - config.beta * series["L4"]
    change = series["E_tot"].iloc[-1] - series["E_tot"].iloc[0]
    assert change == pytest.approx(trapezoid(rate.to_numpy(), t), rel=1e-3)


def test_3d_smoke_run(tmp_path, bus):
    values = registry("B2").to_flat()
    values.update({"t_end": "0.5", "sample_every": "50", "n_max": "2", "m_max": "4", "output_dir": str(tmp_path)})
    result = execute(RunConfig.from_mapping(values), bus)
    assert result.status == "completed"
    assert result.steps == 500

    series = pd.read_csv(result.run_dir / "timeseries.csv")
    assert np.isfinite(series.drop(columns=["step"]).to_numpy(dtype=float)).all()
    state = BinaryCheckpointRepository().load(result.run_dir / "checkpoint_final.itts").field
    assert divergence_residual(state) < 1e-10
    # amplitudes stay near the equilibrium scale
    assert math.sqrt(series["H0"].iloc[-1]) < 10 * math.sqrt(config_alpha_over_beta(values))


def result_params(values):
    return RunConfig.from_mapping(values).physical_params()


def config_alpha_over_beta(values):
    return float(values["alpha"]) / float(values["beta"])
