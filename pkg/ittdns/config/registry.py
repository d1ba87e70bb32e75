"""
📚 Run Registry
Named DNS parameter sets; every run uses λ = 1
"""
from dataclasses import dataclass
from typing import Dict, List

from ..domain.errors import ConfigurationError
from ..domain.value_objects import PhysicalParams


@dataclass(frozen=True)
class RegistryEntry:
    """(d, N, δt, ν, α, β) of one registered run"""
    label: str
    d: int
    resolution: int
    dt: float
    nu: float
    alpha: float
    beta: float
    lam: float = 1.0
    t_end: float = 1.0

    def physical_params(self, box_length: float) -> PhysicalParams:
        return PhysicalParams(lam=self.lam, alpha=self.alpha, beta=self.beta, nu=self.nu, box_length=box_length)

    def to_dict(self) -> Dict[str, float]:
        return {
            "label": self.label,
            "d": self.d,
            "N": self.resolution,
            "dt": self.dt,
            "nu": self.nu,
            "alpha": self.alpha,
            "beta": self.beta,
            "lam": self.lam,
        }


def _series(prefix: str, nus: List[float], **common) -> Dict[str, RegistryEntry]:
    return {
        f"{prefix}{i}": RegistryEntry(label=f"{prefix}{i}", nu=nu, **common)
        for i, nu in enumerate(nus, start=1)
    }


# A-series: strong activity, d=2
_A = _series(
    "A",
    [0.287, 0.141, 0.0707, 0.0353, 0.0236, 0.0177, 0.01, 0.088],
    d=2, resolution=2048, dt=2e-4, alpha=100.0, beta=5.0, t_end=1.0,
)

# F-series: α = β = 1, d=2
_F = _series(
    "F",
    [0.62, 0.12, 0.06, 0.03, 0.015, 0.007, 0.0031],
    d=2, resolution=2048, dt=2e-4, alpha=1.0, beta=1.0, t_end=10.0,
)

_B = {
    "B1": RegistryEntry("B1", d=3, resolution=512, dt=1e-3, nu=0.5, alpha=10.0, beta=0.1, t_end=5.0),
    "B2": RegistryEntry("B2", d=3, resolution=512, dt=1e-3, nu=0.05, alpha=10.0, beta=0.1, t_end=5.0),
    "B3": RegistryEntry("B3", d=3, resolution=512, dt=5e-4, nu=0.01, alpha=10.0, beta=0.1, t_end=5.0),
}

REGISTRY: Dict[str, RegistryEntry] = {**_A, **_F, **_B}


def available_labels() -> List[str]:
    return list(REGISTRY)


def lookup(label: str) -> RegistryEntry:
    """Registry entry for a label (case-insensitive)"""
    key = str(label).strip().upper()
    entry = REGISTRY.get(key)
    if entry is None:
        raise ConfigurationError(
            f"Unknown run label: {label}. Available: {', '.join(available_labels())}"
        )
    return entry
