"""
🏛️ Domain Value Objects
Parameter records and descriptors used throughout the simulation
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple, Union

from .errors import ConfigurationError, DomainError

Order = Union[int, float]  # a Lebesgue index m: positive integer or math.inf


def format_order(m: Order) -> str:
    """Column-friendly label of an index m"""
    return "inf" if math.isinf(m) else str(int(m))


def parse_order(value: Union[str, int, float]) -> Order:
    """Inverse of format_order"""
    if isinstance(value, str):
        value = value.strip().lower()
        if value in {"inf", "infinity", "∞"}:
            return math.inf
        value = float(value)
    if math.isinf(value):
        return math.inf
    if value != int(value) or value < 1:
        raise DomainError(f"Lebesgue index must be a positive integer or inf, got {value}")
    return int(value)


class U0Choice(str, Enum):
    """Velocity scale convention for nondimensionalization"""
    SQRT_ALPHA_BETA = "sqrt-alpha-beta"
    NU_OVER_L = "nu-over-L"

    @classmethod
    def parse(cls, value: Union[str, "U0Choice"]) -> "U0Choice":
        if isinstance(value, cls):
            return value
        for choice in cls:
            if choice.value.lower() == str(value).strip().lower():
                return choice
        raise ConfigurationError(
            f"Unknown U0 mode: {value}. Valid: {[c.value for c in cls]}"
        )


@dataclass(frozen=True)
class PhysicalParams:
    """Coefficients (λ, α, β, ν, L) of the dimensional equations

    α = β = 0 is admitted so that Navier-Stokes checks run through the same
    solver; nondimensionalization still requires strictly positive values.
    """
    lam: float
    alpha: float
    beta: float
    nu: float
    box_length: float = 2.0 * math.pi

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigurationError(f"nu must be positive, got {self.nu}")
        if not self.box_length > 0:
            raise ConfigurationError(f"box_length must be positive, got {self.box_length}")
        for name in ("lam", "alpha", "beta"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be finite and non-negative, got {value}")

    @property
    def amplitude_scale(self) -> Optional[float]:
        """Equilibrium amplitude (α/β)^{1/2}, undefined unless α, β > 0"""
        if self.alpha > 0 and self.beta > 0:
            return math.sqrt(self.alpha / self.beta)
        return None

    def to_dict(self) -> dict:
        return {
            "lam": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "nu": self.nu,
            "box_length": self.box_length,
        }


@dataclass(frozen=True)
class DimensionlessParams:
    """(α₀, Re_ν, Re_β) together with the scales (U₀, L, λ) they were built from"""
    alpha0: float
    re_nu: float
    re_beta: float
    u0: float
    length: float
    lam: float
    choice: U0Choice = U0Choice.SQRT_ALPHA_BETA

    def __post_init__(self):
        for name in ("alpha0", "re_nu", "re_beta", "u0", "length", "lam"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and positive, got {value}")

    @property
    def activity(self) -> float:
        """Activity parameter 𝒜₀ = α₀/Re_β"""
        return self.alpha0 / self.re_beta

    def as_physical(self) -> PhysicalParams:
        """Coefficients of the dimensionless equations on the unit box"""
        return PhysicalParams(
            lam=1.0,
            alpha=self.alpha0,
            beta=self.re_beta,
            nu=1.0 / self.re_nu,
            box_length=1.0,
        )

    def to_dict(self) -> dict:
        return {
            "u0_mode": self.choice.value,
            "alpha0": self.alpha0,
            "re_nu": self.re_nu,
            "re_beta": self.re_beta,
            "activity": self.activity,
            "u0": self.u0,
            "length": self.length,
            "lam": self.lam,
        }


INITIAL_CONDITION_KINDS = ("random-lowk", "taylor-green", "uniform", "single-mode")


@dataclass(frozen=True)
class InitialCondition:
    """Initial-condition descriptor

    random-lowk uses k_max, energy and slope; taylor-green and single-mode use
    amplitude; single-mode also needs wavevector; uniform needs vector.
    """
    kind: str = "random-lowk"
    amplitude: float = 1.0
    k_max: int = 4
    energy: float = 0.5
    slope: float = 0.0
    vector: Optional[Tuple[float, ...]] = None
    wavevector: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in INITIAL_CONDITION_KINDS:
            raise ConfigurationError(
                f"Unknown initial condition: {self.kind}. Valid: {list(INITIAL_CONDITION_KINDS)}"
            )
        if self.kind == "random-lowk":
            if self.k_max < 1:
                raise ConfigurationError("random-lowk needs k_max >= 1")
            if self.energy < 0:
                raise ConfigurationError("random-lowk needs energy >= 0")
        if self.kind == "uniform" and self.vector is None:
            raise ConfigurationError("uniform initial condition needs a vector")
        if self.kind == "single-mode" and self.wavevector is None:
            raise ConfigurationError("single-mode initial condition needs a wavevector")


@dataclass(frozen=True)
class NormSweep:
    """Which (n, m) pairs the diagnostics sweep evaluates"""
    n_max: int = 4
    m_max: int = 16
    include_infinity: bool = True

    def __post_init__(self):
        if self.n_max < 0:
            raise ConfigurationError("n_max must be >= 0")
        if self.m_max < 1:
            raise ConfigurationError("m_max must be >= 1")

    @property
    def n_values(self) -> List[int]:
        return list(range(self.n_max + 1))

    @property
    def m_values(self) -> List[Order]:
        values: List[Order] = list(range(1, self.m_max + 1))
        if self.include_infinity:
            values.append(math.inf)
        return values

    def pairs(self) -> Iterator[Tuple[int, Order]]:
        for n in self.n_values:
            for m in self.m_values:
                yield n, m


def norm_key(symbol: str, n: int, m: Order) -> str:
    """Column/identifier name such as P_1_2 or Q_0_inf"""
    return f"{symbol}_{n}_{format_order(m)}"
