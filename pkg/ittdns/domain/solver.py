"""
⚙️ ITT Solver
Right-hand side assembly, ETDRK2 time stepping, CFL monitor and initial conditions
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .entities import Grid, SpectralField
from .errors import ConfigurationError, ContractViolation, NumericalBlowupError
from .spectral import project_components, to_physical, to_spectral
from .value_objects import InitialCondition, PhysicalParams

PHI_SERIES_THRESHOLD = 1e-4
PHI_SERIES_TERMS = 6
BLOWUP_FACTOR = 1e6


def linear_symbol(k, params: PhysicalParams):
    """L(k) = α - ν|k|² for a wavevector (or stacked wavevector arrays along axis 0)"""
    k = np.asarray(k, dtype=np.float64)
    k_squared = np.sum(k * k, axis=0) if k.ndim else k * k
    return params.alpha - params.nu * k_squared


def phi_functions(z: np.ndarray, threshold: float = PHI_SERIES_THRESHOLD) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """e^z, φ₁(z) = (e^z - 1)/z and φ₂(z) = (e^z - 1 - z)/z², series near z = 0"""
    z = np.asarray(z, dtype=np.float64)
    exp_z = np.exp(z)
    small = np.abs(z) < threshold
    safe = np.where(small, 1.0, z)
    phi1 = (exp_z - 1.0) / safe
    phi2 = (exp_z - 1.0 - safe) / safe ** 2

    series1 = np.zeros_like(z)
    series2 = np.zeros_like(z)
    for j in range(PHI_SERIES_TERMS):
        series1 = series1 + z ** j / math.factorial(j + 1)
        series2 = series2 + z ** j / math.factorial(j + 2)
    phi1 = np.where(small, series1, phi1)
    phi2 = np.where(small, series2, phi2)
    return exp_z, phi1, phi2


@dataclass(frozen=True, eq=False)
class EtdTables:
    """Per-mode e^{Lh}, φ₁(Lh), φ₂(Lh) for a fixed step h"""
    dt: float
    exp_lh: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray


def build_etd_tables(
    grid: Grid,
    params: PhysicalParams,
    dt: float,
    series_threshold: float = PHI_SERIES_THRESHOLD,
) -> EtdTables:
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    z = linear_symbol(grid.wavevectors, params) * dt
    exp_lh, phi1, phi2 = phi_functions(z, series_threshold)
    if not (np.isfinite(exp_lh).all() and np.isfinite(phi1).all() and np.isfinite(phi2).all()):
        raise NumericalBlowupError("ETD coefficients are not finite; reduce dt")
    return EtdTables(dt=dt, exp_lh=exp_lh, phi1=phi1, phi2=phi2)


def _velocity(components: np.ndarray, grid: Grid) -> np.ndarray:
    return to_physical(components, grid.d)


def _require_finite(values: np.ndarray, what: str, time: float) -> None:
    if not np.isfinite(values).all():
        raise NumericalBlowupError(f"Non-finite values in {what}", time=time)


def advective_product(components: np.ndarray, grid: Grid, u: Optional[np.ndarray] = None) -> np.ndarray:
    """Physical-space (u·∇)u"""
    if u is None:
        u = _velocity(components, grid)
    ik = 1j * grid.derivative_wavevectors
    result = np.zeros_like(u)
    for i in range(grid.d):
        for j in range(grid.d):
            result[i] += u[j] * to_physical(ik[j] * components[i], grid.d)
    return result


def cubic_product(u: np.ndarray) -> np.ndarray:
    """Physical-space u|u|²"""
    return u * np.sum(u * u, axis=0)


def projected_transform(values: np.ndarray, grid: Grid) -> np.ndarray:
    """P·mask·FT of a physical vector field"""
    return project_components(to_spectral(values, grid.d) * grid.dealias_mask, grid)


def nonlinear_term(
    u_hat: SpectralField,
    params: PhysicalParams,
    grid: Optional[Grid] = None,
) -> SpectralField:
    """P·mask·FT[-λ(u·∇)u - βu|u|²]"""
    grid = grid or u_hat.grid
    grid.require_match(u_hat.grid)
    components = u_hat.components
    u = _velocity(components, grid)
    _require_finite(u, "velocity", u_hat.time)

    rhs = np.zeros_like(u)
    if params.lam != 0.0:
        rhs -= params.lam * advective_product(components, grid, u)
    if params.beta != 0.0:
        rhs -= params.beta * cubic_product(u)
    _require_finite(rhs, "nonlinear products", u_hat.time)
    return u_hat.with_components(projected_transform(rhs, grid))


def etdrk2_step(
    u_hat: SpectralField,
    tables: EtdTables,
    params: PhysicalParams,
    grid: Optional[Grid] = None,
) -> SpectralField:
    """One Cox-Matthews ETDRK2 step"""
    grid = grid or u_hat.grid
    h = tables.dt
    n0 = nonlinear_term(u_hat, params, grid).components
    a = tables.exp_lh * u_hat.components + h * tables.phi1 * n0
    predictor = u_hat.with_components(a, time=u_hat.time + h)
    n1 = nonlinear_term(predictor, params, grid).components
    updated = a + h * tables.phi2 * (n1 - n0)
    return u_hat.with_components(project_components(updated, grid), time=u_hat.time + h)


def max_velocity(u_hat: SpectralField) -> float:
    """Grid maximum of |u|"""
    u = _velocity(u_hat.components, u_hat.grid)
    return float(np.sqrt(np.sum(u * u, axis=0)).max())


def cfl_number(u_hat: SpectralField, dt: float, grid: Optional[Grid] = None) -> float:
    """C = dt Σ_i sup|u_i| / h_i"""
    grid = grid or u_hat.grid
    u = _velocity(u_hat.components, grid)
    sup = np.abs(u).reshape(grid.d, -1).max(axis=1)
    return float(dt * np.sum(sup) / grid.spacing)


def blowup_guard(params: PhysicalParams, initial: Optional[SpectralField] = None, factor: float = BLOWUP_FACTOR) -> float:
    """Amplitude above which a run is aborted"""
    scale = params.amplitude_scale
    if scale is None:
        scale = max(1.0, max_velocity(initial)) if initial is not None else 1.0
    return factor * scale


class EtdIntegrator:
    """Fixed-step ETDRK2 integrator with blowup detection"""

    def __init__(
        self,
        grid: Grid,
        params: PhysicalParams,
        dt: float,
        guard: Optional[float] = None,
        series_threshold: float = PHI_SERIES_THRESHOLD,
    ):
        self.grid = grid
        self.params = params
        self.dt = dt
        self.tables = build_etd_tables(grid, params, dt, series_threshold)
        self.guard = guard if guard is not None else blowup_guard(params)

    def step(self, state: SpectralField, step_index: Optional[int] = None) -> SpectralField:
        try:
            updated = etdrk2_step(state, self.tables, self.params, self.grid)
        except NumericalBlowupError as e:
            raise NumericalBlowupError(str(e.args[0]), time=state.time, step=step_index) from e
        self._check(updated, step_index)
        return updated

    def advance(self, state: SpectralField, steps: int, first_step: int = 1) -> SpectralField:
        for offset in range(steps):
            state = self.step(state, first_step + offset)
        return state

    def _check(self, state: SpectralField, step_index: Optional[int]) -> None:
        coefficients = state.components
        if not np.isfinite(coefficients).all():
            raise NumericalBlowupError("Non-finite coefficients", time=state.time, step=step_index)
        # Σ|û| bounds max|u|; the exact maximum is only formed when the bound trips
        if np.abs(coefficients).sum(axis=tuple(range(1, coefficients.ndim))).max() * math.sqrt(self.grid.d) <= self.guard:
            return
        amplitude = max_velocity(state)
        if amplitude > self.guard:
            raise NumericalBlowupError(
                f"Amplitude exceeded guard {self.guard:.3g}",
                time=state.time,
                step=step_index,
                max_amplitude=amplitude,
            )


def logistic_energy(initial_sq: float, t: float, alpha: float, beta: float) -> float:
    """|u|²(t) for the uniform mode u' = αu - βu|u|²"""
    if initial_sq == 0:
        return 0.0
    equilibrium = alpha / beta
    return equilibrium / (1.0 + (equilibrium / initial_sq - 1.0) * math.exp(-2.0 * alpha * t))


def _transverse_direction(wavevector: np.ndarray) -> np.ndarray:
    if wavevector.size == 2:
        direction = np.array([-wavevector[1], wavevector[0]], dtype=np.float64)
    else:
        reference = np.array([0.0, 0.0, 1.0])
        if np.allclose(np.cross(wavevector, reference), 0.0):
            reference = np.array([1.0, 0.0, 0.0])
        direction = np.cross(wavevector, reference)
    return direction / np.linalg.norm(direction)


def _finalize(components: np.ndarray, grid: Grid) -> np.ndarray:
    return project_components(components * grid.dealias_mask, grid)


def init_condition(ic: InitialCondition, grid: Grid, seed: int = 0) -> SpectralField:
    """Divergence-free, Hermitian, dealiased initial state"""
    d = grid.d
    components = np.zeros(grid.field_shape, dtype=np.complex128)

    if ic.kind == "uniform":
        vector = np.asarray(ic.vector, dtype=np.float64)
        if vector.shape != (d,):
            raise ConfigurationError(f"uniform vector needs {d} components, got {len(vector)}")
        components[(slice(None),) + (0,) * d] = vector
        return SpectralField(grid, components, 0.0)

    if ic.kind == "taylor-green":
        x = [xi * grid.fundamental for xi in grid.coordinates()]
        amplitude = ic.amplitude
        if d == 2:
            values = np.stack([
                amplitude * np.cos(x[0]) * np.sin(x[1]),
                -amplitude * np.sin(x[0]) * np.cos(x[1]),
            ])
        else:
            values = np.stack([
                amplitude * np.sin(x[0]) * np.cos(x[1]) * np.cos(x[2]),
                -amplitude * np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2]),
                np.zeros(grid.shape),
            ])
        return SpectralField(grid, _finalize(to_spectral(values, d), grid), 0.0)

    if ic.kind == "single-mode":
        wavevector = np.asarray(ic.wavevector, dtype=np.int64)
        if wavevector.shape != (d,) or not wavevector.any():
            raise ConfigurationError(f"single-mode needs a nonzero {d}-component wavevector")
        if np.any(2 * np.abs(wavevector) >= grid.n):
            raise ConfigurationError(f"Wavevector {tuple(wavevector)} reaches the Nyquist index N/2={grid.n // 2}")
        index = tuple(int(j) % grid.n for j in wavevector)
        mirror = tuple(int(-j) % grid.n for j in wavevector)
        if not grid.dealias_mask[index]:
            raise ConfigurationError(f"Wavevector {tuple(wavevector)} lies outside the dealias mask")
        direction = _transverse_direction(wavevector.astype(np.float64))
        # A e sin(k·x)
        components[(slice(None),) + index] = -0.5j * ic.amplitude * direction
        components[(slice(None),) + mirror] = 0.5j * ic.amplitude * direction
        return SpectralField(grid, components, 0.0)

    # random-lowk
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(grid.field_shape)
    spectrum = to_spectral(noise, d)
    radius = np.sqrt(grid.k_squared) / grid.fundamental
    band = (radius > 0) & (radius <= ic.k_max + 1e-12)
    weight = np.where(band, np.power(np.where(band, radius, 1.0), ic.slope / 2.0), 0.0)
    components = _finalize(spectrum * weight, grid)
    energy = 0.5 * float(np.sum(np.abs(components) ** 2))
    if energy == 0.0:
        if ic.energy > 0:
            raise ContractViolation("random-lowk band is empty on this grid")
        return SpectralField(grid, components, 0.0)
    components *= math.sqrt(ic.energy / energy)
    return SpectralField(grid, components, 0.0)
