"""
🧾 Run Configuration
Per-run parameters, parsed from flat `key = value` files and merged with CLI overrides

Precedence: CLI overrides > config file > registry label > defaults.
"""
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..domain.entities import Grid
from ..domain.errors import ConfigurationError
from ..domain.spectral import make_grid
from ..domain.value_objects import (
    INITIAL_CONDITION_KINDS,
    InitialCondition,
    NormSweep,
    PhysicalParams,
    U0Choice,
)
from .registry import lookup
from .settings import get_settings


def _split(value: Any) -> Any:
    if isinstance(value, str):
        parts = [part.strip() for part in value.replace(";", ",").split(",")]
        return [part for part in parts if part]
    return value


class RunConfig(BaseModel):
    """Everything one run needs; unknown keys are rejected"""
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    label: str = Field(default="custom", description="Run label used in outputs")

    # grid
    d: int = Field(default=2, description="Spatial dimension (2 or 3)")
    resolution: int = Field(default=64, description="Grid points per axis N")
    box_length: float = Field(default=2.0 * math.pi, description="Periodic box length L")
    dealias_fraction: float = Field(default_factory=lambda: get_settings().numerics.dealias_fraction)

    # time stepping
    dt: float = Field(default=1e-3, description="Fixed time step")
    t_end: float = Field(default=1.0, description="Final time")
    cfl_max: float = Field(default=1.0, description="CFL ceiling that triggers a warning")

    # physical parameters
    lam: float = Field(default=1.0, description="Advection coefficient λ")
    alpha: float = Field(default=0.0, description="Activity α")
    beta: float = Field(default=0.0, description="Cubic damping β")
    nu: float = Field(default=0.1, description="Viscosity ν")

    # initial condition
    ic: str = Field(default="random-lowk", description=f"One of {list(INITIAL_CONDITION_KINDS)}")
    ic_amplitude: float = 1.0
    ic_k_max: int = 4
    ic_energy: float = 0.5
    ic_slope: float = 0.0
    ic_vector: Optional[Tuple[float, ...]] = None
    ic_wavevector: Optional[Tuple[int, ...]] = None
    seed: int = 0

    # outputs
    output_dir: Optional[str] = Field(default=None, description="Run directory; defaults under the output root")
    sample_every: int = Field(default=10, description="Steps between diagnostic samples")
    snapshot_every: int = Field(default=0, description="Steps between checkpoints (0 disables)")
    spectra_window: int = Field(default=0, description="Samples per spectra window (0: one window)")

    # diagnostics and bounds
    n_max: int = 4
    m_max: int = 16
    include_infinity: bool = True
    u0_modes: List[U0Choice] = Field(default_factory=lambda: [U0Choice.SQRT_ALPHA_BETA, U0Choice.NU_OVER_L])
    transient_skip: float = Field(default=0.0, description="Start of the second averaging window")
    constant: float = Field(default=1.0, description="Common multiplicative constant of every bound")
    leading_order: bool = True
    allow_full_resolution: bool = False

    @field_validator("ic_vector", "ic_wavevector", mode="before")
    @classmethod
    def parse_tuple(cls, v):
        if v is None or (isinstance(v, str) and not v.strip()):
            return None
        return _split(v)

    @field_validator("u0_modes", mode="before")
    @classmethod
    def parse_modes(cls, v):
        values = _split(v)
        if isinstance(values, (str, U0Choice)):
            values = [values]
        return [U0Choice.parse(mode) for mode in values]

    @field_validator("d")
    @classmethod
    def validate_d(cls, v):
        if v not in (2, 3):
            raise ValueError("d must be 2 or 3")
        return v

    @field_validator("resolution")
    @classmethod
    def validate_resolution(cls, v):
        if v < 8 or v % 2:
            raise ValueError("resolution must be an even integer >= 8")
        return v

    @field_validator("dealias_fraction")
    @classmethod
    def validate_fraction(cls, v):
        if not 0 < v <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")
        return v

    @field_validator("dt", "nu", "box_length", "cfl_max")
    @classmethod
    def validate_positive(cls, v, info):
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{info.field_name} must be positive")
        return v

    @field_validator("t_end", "lam", "alpha", "beta", "transient_skip")
    @classmethod
    def validate_non_negative(cls, v, info):
        if not (v >= 0 and math.isfinite(v)):
            raise ValueError(f"{info.field_name} must be finite and non-negative")
        return v

    @field_validator("sample_every")
    @classmethod
    def validate_sample_every(cls, v):
        if v < 1:
            raise ValueError("sample_every must be >= 1")
        return v

    @field_validator("snapshot_every", "spectra_window", "n_max")
    @classmethod
    def validate_count(cls, v, info):
        if v < 0:
            raise ValueError(f"{info.field_name} must be >= 0")
        return v

    @field_validator("m_max")
    @classmethod
    def validate_m_max(cls, v):
        if v < 1:
            raise ValueError("m_max must be >= 1")
        return v

    @field_validator("ic")
    @classmethod
    def validate_ic(cls, v):
        if v not in INITIAL_CONDITION_KINDS:
            raise ValueError(f"ic must be one of {list(INITIAL_CONDITION_KINDS)}")
        return v

    @model_validator(mode="after")
    def validate_resolution_gate(self):
        desk = get_settings().numerics.desk_resolution(self.d)
        if self.resolution > desk and not self.allow_full_resolution:
            raise ValueError(
                f"resolution {self.resolution} exceeds the desk default {desk} for d={self.d}; "
                "set allow_full_resolution = true"
            )
        return self

    # --- derived objects -------------------------------------------------

    @property
    def steps(self) -> int:
        """Number of fixed steps reaching t_end"""
        return int(round(self.t_end / self.dt))

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(
            lam=self.lam,
            alpha=self.alpha,
            beta=self.beta,
            nu=self.nu,
            box_length=self.box_length,
        )

    def initial_condition(self) -> InitialCondition:
        return InitialCondition(
            kind=self.ic,
            amplitude=self.ic_amplitude,
            k_max=self.ic_k_max,
            energy=self.ic_energy,
            slope=self.ic_slope,
            vector=self.ic_vector,
            wavevector=self.ic_wavevector,
        )

    def norm_sweep(self) -> NormSweep:
        return NormSweep(self.n_max, self.m_max, self.include_infinity)

    def grid(self) -> Grid:
        return make_grid(self.d, self.resolution, self.box_length, self.dealias_fraction)

    def run_directory(self) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return Path(get_settings().output.root) / self.label

    def to_flat(self) -> Dict[str, str]:
        """Flat key = value form; from_mapping(to_flat()) reproduces the config"""
        flat: Dict[str, str] = {}
        for key, value in self.model_dump().items():
            if value is None:
                continue
            if isinstance(value, (list, tuple)):
                flat[key] = ",".join(v.value if isinstance(v, U0Choice) else repr(v) for v in value)
            elif isinstance(value, bool):
                flat[key] = "true" if value else "false"
            elif isinstance(value, float):
                flat[key] = repr(value)
            else:
                flat[key] = str(value)
        return flat

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        """Validate a mapping, turning pydantic errors into ConfigurationError"""
        cleaned = {str(k).strip().lower(): v for k, v in values.items()}
        try:
            return cls(**cleaned)
        except ValidationError as e:
            raise ConfigurationError(_describe(e)) from e


def _describe(error: ValidationError) -> str:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ())) or "config"
        problems.append(f"{location}: {item.get('msg')}")
    return "Invalid run configuration: " + "; ".join(problems)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Flat `key = value` file as a dict; missing values are rejected"""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    values = dotenv_values(path, encoding="utf-8")
    empty = [key for key, value in values.items() if value is None]
    if empty:
        raise ConfigurationError(f"Config keys without a value in {path}: {empty}")
    return {key.strip().lower(): value for key, value in values.items()}


def write_config_file(config: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    lines = [f"{key} = {value}" for key, value in config.to_flat().items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def registry_values(label: str, resolution: Optional[int] = None, full_resolution: bool = False) -> Dict[str, Any]:
    """Config values for a registered run at desk (default) or registered resolution"""
    entry = lookup(label)
    if resolution is None:
        resolution = entry.resolution if full_resolution else get_settings().numerics.desk_resolution(entry.d)
    return {
        "label": entry.label,
        "d": entry.d,
        "resolution": resolution,
        "dt": entry.dt,
        "t_end": entry.t_end,
        "lam": entry.lam,
        "alpha": entry.alpha,
        "beta": entry.beta,
        "nu": entry.nu,
        "allow_full_resolution": full_resolution,
    }


def registry(label: str, resolution: Optional[int] = None, full_resolution: bool = False) -> RunConfig:
    """RunConfig for a registered run"""
    return RunConfig.from_mapping(registry_values(label, resolution, full_resolution))


def resolve_run_config(
    config_file: Optional[Union[str, Path]] = None,
    label: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    full_resolution: bool = False,
) -> RunConfig:
    """Merge defaults, registry label, file and CLI overrides, highest last"""
    file_values = read_config_file(config_file) if config_file else {}
    cli_values = {str(k).strip().lower(): v for k, v in (overrides or {}).items() if v is not None}

    label = label or cli_values.get("label") or file_values.get("label")
    merged: Dict[str, Any] = {}
    if label and _is_registered(label):
        explicit_resolution = cli_values.get("resolution", file_values.get("resolution"))
        merged.update(registry_values(label, None if explicit_resolution is None else int(explicit_resolution), full_resolution))
        if explicit_resolution is not None:
            merged["allow_full_resolution"] = True
    elif label and not (config_file or cli_values):
        lookup(label)
    if label:
        merged["label"] = label
    merged.update(file_values)
    merged.update(cli_values)
    if full_resolution:
        merged["allow_full_resolution"] = True
    return RunConfig.from_mapping(merged)


def _is_registered(label: str) -> bool:
    try:
        lookup(label)
    except ConfigurationError:
        return False
    return True
