"""
🏛️ Domain Entities
Grids, fields, diagnostic records, budgets, bound reports and checkpoints
"""
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import ContractViolation
from .value_objects import DimensionlessParams, PhysicalParams


@dataclass(frozen=True, eq=False)
class Grid:
    """Periodic N^d collocation grid with its Fourier tables

    Arrays are laid out for full complex transforms: every spectral array has
    shape (N,)*d and integer index j along an axis stands for wavenumber j
    (j < N/2) or j - N (j >= N/2).
    """
    d: int
    n: int
    box_length: float
    dealias_fraction: float
    integer_wavevectors: np.ndarray   # (d, N, ..., N) int
    wavevectors: np.ndarray           # (d, N, ..., N) float, scaled by 2π/L
    derivative_wavevectors: np.ndarray  # wavevectors with the Nyquist planes zeroed
    k_squared: np.ndarray
    inv_k_squared: np.ndarray         # 1/|k|², 0 at k = 0
    dealias_mask: np.ndarray
    shell_index: np.ndarray           # nearest-integer shell of |k|·L/2π

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def field_shape(self) -> Tuple[int, ...]:
        return (self.d,) + self.shape

    @property
    def spacing(self) -> float:
        return self.box_length / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.d

    @property
    def volume(self) -> float:
        return self.box_length ** self.d

    @property
    def n_shells(self) -> int:
        return int(self.shell_index.max()) + 1

    @property
    def fundamental(self) -> float:
        """Smallest nonzero wavenumber 2π/L"""
        return 2.0 * math.pi / self.box_length

    def coordinates(self) -> List[np.ndarray]:
        """Physical coordinates x_i of every collocation point"""
        axis = np.arange(self.n) * self.spacing
        return list(np.meshgrid(*([axis] * self.d), indexing="ij"))

    def matches(self, other: "Grid") -> bool:
        return (
            self.d == other.d
            and self.n == other.n
            and math.isclose(self.box_length, other.box_length, rel_tol=1e-15)
            and math.isclose(self.dealias_fraction, other.dealias_fraction, rel_tol=1e-15)
        )

    def require_match(self, other: "Grid") -> None:
        if not self.matches(other):
            raise ContractViolation(
                f"Grid mismatch: (d={self.d}, N={self.n}, L={self.box_length}) "
                f"vs (d={other.d}, N={other.n}, L={other.box_length})"
            )

    def __repr__(self) -> str:
        return (
            f"Grid(d={self.d}, N={self.n}, box_length={self.box_length:.6g}, "
            f"dealias_fraction={self.dealias_fraction:.6g})"
        )


@dataclass(eq=False)
class SpectralField:
    """Fourier coefficients of a d-component velocity field (mean-normalized)"""
    grid: Grid
    components: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.components.shape != self.grid.field_shape:
            raise ContractViolation(
                f"Spectral field shape {self.components.shape} does not match grid {self.grid.field_shape}"
            )
        if not np.iscomplexobj(self.components):
            self.components = self.components.astype(np.complex128)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.components.copy(), self.time)

    def with_components(self, components: np.ndarray, time: Optional[float] = None) -> "SpectralField":
        return SpectralField(self.grid, components, self.time if time is None else time)

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "SpectralField":
        return cls(grid, np.zeros(grid.field_shape, dtype=np.complex128), time)


@dataclass(eq=False)
class PhysicalField:
    """Real velocity components sampled on the collocation grid"""
    grid: Grid
    components: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.components.shape != self.grid.field_shape:
            raise ContractViolation(
                f"Physical field shape {self.components.shape} does not match grid {self.grid.field_shape}"
            )
        if np.iscomplexobj(self.components):
            raise ContractViolation("Physical fields must be real-valued")

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.components).all())

    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.sum(self.components ** 2, axis=0))

    def max_amplitude(self) -> float:
        return float(self.magnitude().max())


@dataclass
class DiagnosticsRecord:
    """One diagnostic sample of the running state"""
    step: int
    time: float
    values: Dict[str, float] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"step": self.step, "t": self.time}
        row.update(self.values)
        return row


@dataclass
class SpectralBudget:
    """Shell-summed energy budget ∂_t E(k) = T - T_β + T_α - dissipation"""
    shells: np.ndarray
    energy: np.ndarray
    transfer: np.ndarray
    transfer_alpha: np.ndarray
    transfer_beta: np.ndarray
    dissipation: np.ndarray
    flux: Optional[np.ndarray] = None
    flux_beta: Optional[np.ndarray] = None

    @property
    def rate(self) -> np.ndarray:
        """Right-hand side of the shellwise budget"""
        return self.transfer - self.transfer_beta + self.transfer_alpha - self.dissipation

    def with_fluxes(self, flux: np.ndarray, flux_beta: np.ndarray) -> "SpectralBudget":
        return replace(self, flux=flux, flux_beta=flux_beta)

    def as_columns(self) -> Dict[str, np.ndarray]:
        columns = {
            "shell": self.shells,
            "E": self.energy,
            "T": self.transfer,
            "T_alpha": self.transfer_alpha,
            "T_beta": self.transfer_beta,
            "dissipation": self.dissipation,
        }
        if self.flux is not None:
            columns["Pi"] = self.flux
        if self.flux_beta is not None:
            columns["Pi_beta"] = self.flux_beta
        return columns


BOUND_STATUSES = ("satisfied", "boundary", "exceeded", "not measured", "finite only", "no estimate")


@dataclass(frozen=True)
class BoundEntry:
    """Measured time average paired with its analytic right-hand side"""
    identifier: str
    description: str
    measured: Optional[float]
    rhs: Optional[float]
    ratio: Optional[float]
    status: str

    @property
    def satisfied(self) -> Optional[bool]:
        if self.status in ("satisfied", "boundary"):
            return True
        if self.status == "exceeded":
            return False
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identifier": self.identifier,
            "description": self.description,
            "measured": self.measured,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "status": self.status,
            "satisfied": self.satisfied,
        }


@dataclass
class BoundReport:
    """All bound comparisons for one parameter set and averaging window"""
    params: DimensionlessParams
    horizon: float
    entries: List[BoundEntry] = field(default_factory=list)
    leading_order: bool = True
    constant: float = 1.0
    window: str = "full"

    NOTE = (
        "constants set to a common value; ratios above 1 measure unknown "
        "constants and do not by themselves falsify an estimate"
    )

    def get(self, identifier: str) -> Optional[BoundEntry]:
        for entry in self.entries:
            if entry.identifier == identifier:
                return entry
        return None

    def to_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for entry in self.entries:
            row = {
                "u0_mode": self.params.choice.value,
                "window": self.window,
                "T": self.horizon,
                "leading_order": self.leading_order,
                "constant": self.constant,
            }
            row.update(entry.to_dict())
            rows.append(row)
        return rows


@dataclass
class Checkpoint:
    """Resumable solver state"""
    field: SpectralField
    params: PhysicalParams
    step: int = 0

    @property
    def time(self) -> float:
        return self.field.time

    @property
    def grid(self) -> Grid:
        return self.field.grid
