"""
🧪 Configuration tests: settings, run configs and the registry
"""
import math

import pytest

from ittdns.config.registry import REGISTRY, available_labels, lookup
from ittdns.config.run_config import (
    RunConfig,
    read_config_file,
    registry,
    resolve_run_config,
    write_config_file,
)
from ittdns.config.settings import LoggingSettings, NumericsSettings, Settings, get_settings
from ittdns.domain.errors import ConfigurationError
from ittdns.domain.value_objects import U0Choice


class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings.numerics.desk_resolution(2) == 128
        assert settings.numerics.desk_resolution(3) == 48
        assert settings.numerics.dealias_fraction == 0.5

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("ITT_NUMERICS_DESK_RESOLUTION_2D", "64")
        monkeypatch.setenv("ITT_LOG_LEVEL", "debug")
        assert NumericsSettings().desk_resolution_2d == 64
        assert LoggingSettings().level == "DEBUG"

    def test_invalid_values(self, monkeypatch):
        monkeypatch.setenv("ITT_LOG_LEVEL", "chatty")
        with pytest.raises(ValueError):
            LoggingSettings()
        monkeypatch.delenv("ITT_LOG_LEVEL")
        monkeypatch.setenv("ITT_ENVIRONMENT", "moon")
        with pytest.raises(ValueError):
            Settings()


class TestRegistry:
    def test_series_sizes(self):
        assert len(available_labels()) == 18
        assert [label for label in REGISTRY if label.startswith("A")] == [f"A{i}" for i in range(1, 9)]

    def test_b1(self):
        config = registry("B1", full_resolution=True)
        assert (config.d, config.resolution, config.dt) == (3, 512, 1e-3)
        assert (config.nu, config.alpha, config.beta, config.lam) == (0.5, 10.0, 0.1, 1.0)

    def test_f3(self):
        config = registry("F3", full_resolution=True)
        assert (config.d, config.resolution, config.dt) == (2, 2048, 2e-4)
        assert (config.nu, config.alpha, config.beta) == (0.06, 1.0, 1.0)

    def test_desk_resolution_by_default(self):
        assert registry("B1").resolution == 48
        assert registry("a6").resolution == 128

    def test_unknown_label_lists_the_available_ones(self):
        with pytest.raises(ConfigurationError) as info:
            lookup("Z9")
        assert "A1" in str(info.value)
        assert "B3" in str(info.value)


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.d == 2
        assert config.u0_modes == [U0Choice.SQRT_ALPHA_BETA, U0Choice.NU_OVER_L]
        assert config.steps == 1000

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError) as info:
            RunConfig.from_mapping({"viscosity": 0.1})
        assert "viscosity" in str(info.value)

    @pytest.mark.parametrize("values", [
        {"d": 4},
        {"resolution": 31},
        {"dt": 0},
        {"nu": -1},
        {"alpha": -0.5},
        {"sample_every": 0},
        {"ic": "vortex-sheet"},
        {"u0_modes": "sqrt-nu"},
        {"m_max": 0},
    ])
    def test_invalid_values(self, values):
        with pytest.raises(ConfigurationError):
            RunConfig.from_mapping(values)

    def test_resolution_gate(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_mapping({"resolution": 256})
        assert RunConfig.from_mapping({"resolution": 256, "allow_full_resolution": "true"}).resolution == 256

    def test_string_values_are_parsed(self):
        config = RunConfig.from_mapping({
            "d": "3", "resolution": "16", "ic": "uniform", "ic_vector": "0.1, 0.2, 0.3",
            "u0_modes": "nu-over-L", "include_infinity": "false",
        })
        assert config.ic_vector == (0.1, 0.2, 0.3)
        assert config.u0_modes == [U0Choice.NU_OVER_L]
        assert config.norm_sweep().m_values[-1] == config.m_max

    def test_flat_form_round_trip(self):
        config = RunConfig.from_mapping({"label": "x", "ic": "single-mode", "ic_wavevector": "1,2", "nu": 0.0177})
        assert RunConfig.from_mapping(config.to_flat()) == config

    def test_derived_objects(self):
        config = RunConfig.from_mapping({"d": 3, "resolution": 16, "alpha": 2.0, "beta": 0.5, "ic": "taylor-green"})
        grid = config.grid()
        assert (grid.d, grid.n) == (3, 16)
        assert config.physical_params().amplitude_scale == pytest.approx(2.0)
        assert config.initial_condition().kind == "taylor-green"


class TestConfigFiles:
    def test_read_and_write(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nd = 3\nresolution = 16\nnu = 0.2\nu0_modes = sqrt-alpha-beta\n")
        values = read_config_file(path)
        assert values == {"d": "3", "resolution": "16", "nu": "0.2", "u0_modes": "sqrt-alpha-beta"}

        config = RunConfig.from_mapping(values)
        written = write_config_file(config, tmp_path / "copy.cfg")
        assert RunConfig.from_mapping(read_config_file(written)) == config

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            read_config_file(tmp_path / "absent.cfg")

    def test_key_without_value(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("nu\n")
        with pytest.raises(ConfigurationError):
            read_config_file(path)


class TestPrecedence:
    def test_cli_over_file_over_registry(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("dt = 5e-4\nnu = 0.2\n")
        config = resolve_run_config(path, "A6", {"nu": 0.3})
        assert config.nu == 0.3
        assert config.dt == 5e-4
        assert config.alpha == 100.0
        assert config.resolution == 128

    def test_explicit_resolution_lifts_the_gate(self):
        config = resolve_run_config(None, "B2", {"resolution": 64})
        assert config.resolution == 64
        assert config.allow_full_resolution

    def test_full_resolution(self):
        assert resolve_run_config(None, "F1", full_resolution=True).resolution == 2048

    def test_custom_label_with_overrides(self):
        config = resolve_run_config(None, "my-run", {"nu": 0.5})
        assert config.label == "my-run"
        assert config.nu == 0.5

    def test_unknown_label_alone(self):
        with pytest.raises(ConfigurationError):
            resolve_run_config(None, "Z9")

    def test_run_directory(self, tmp_path):
        assert resolve_run_config(None, "A1", {"output_dir": str(tmp_path)}).run_directory() == tmp_path
        assert resolve_run_config(None, "A1").run_directory().name == "A1"
        assert math.isclose(registry("A1").box_length, 2 * math.pi)
