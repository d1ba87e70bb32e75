"""
📊 Diagnostics
Norm hierarchies, time averages, length scales, spectra and spectral energy budgets

All integrals are volume-normalized: quadratures are means over the grid, so
norms live on the unit-measure box whatever the physical box length.
"""
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .entities import Grid, SpectralBudget, SpectralField
from .errors import ContractViolation, DomainError
from .solver import advective_product, cubic_product, projected_transform
from .spectral import to_physical, vorticity
from .value_objects import Order, PhysicalParams

Sample = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------

def alpha_exponent(n: int, m: Order, d: int) -> Fraction:
    """α_{n,m,d} = 2m / (2m(n+1) - d), and 1/(n+1) for m = ∞"""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    if d not in (2, 3):
        raise DomainError(f"d must be 2 or 3, got {d}")
    if math.isinf(m):
        return Fraction(1, n + 1)
    if m < 1 or int(m) != m:
        raise DomainError(f"m must be a positive integer or inf, got {m}")
    m = int(m)
    denominator = 2 * m * (n + 1) - d
    if denominator <= 0:
        raise DomainError(f"alpha_{{{n},{m},{d}}} undefined: 2m(n+1) - d = {denominator} <= 0")
    return Fraction(2 * m, denominator)


def inverse_length_bound_exponent(n: int, m: Order, d: int) -> Fraction:
    """Power taking ⟨P_{n,m}⟩ (d=2) or ⟨Q_{n,m}⟩ (d=3) to an inverse-length estimate"""
    alpha = alpha_exponent(n, m, d)
    if d == 2:
        return 1 / (2 * (n + 1) * alpha)
    return 1 / ((n + 1) * alpha)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def _multinomial(combo: Tuple[int, ...]) -> int:
    weight = math.factorial(len(combo))
    for count in Counter(combo).values():
        weight //= math.factorial(count)
    return weight


def gradient_magnitude_squared(u_hat: SpectralField, n: int) -> np.ndarray:
    """Pointwise |∇ⁿu|², summed over every ordered derivative multi-index"""
    if n < 0:
        raise ContractViolation(f"n must be non-negative, got {n}")
    grid = u_hat.grid
    ik = 1j * grid.derivative_wavevectors
    total = np.zeros(grid.shape)
    for combo in combinations_with_replacement(range(grid.d), n):
        factor = np.ones(grid.shape, dtype=np.complex128)
        for axis in combo:
            factor = factor * ik[axis]
        values = to_physical(u_hat.components * factor, grid.d)
        total += _multinomial(combo) * np.sum(values * values, axis=0)
    return total


def lebesgue_norm(squared: np.ndarray, m: Order) -> float:
    """‖f‖_{2m} on the unit-measure box from the pointwise |f|²"""
    peak = float(squared.max()) if squared.size else 0.0
    if peak <= 0.0:
        return 0.0
    if math.isinf(m):
        return math.sqrt(peak)
    scaled = np.mean((squared / peak) ** m)
    return float(scaled ** (1.0 / (2 * m)) * math.sqrt(peak))


def h_norm(u_hat: SpectralField, n: int) -> float:
    """H_n = Σ_k |k|^{2n} |û(k)|²"""
    if n < 0:
        raise ContractViolation(f"n must be non-negative, got {n}")
    grid = u_hat.grid
    weight = grid.k_squared ** n if n else 1.0
    return float(np.sum(weight * np.sum(np.abs(u_hat.components) ** 2, axis=0)))


def grad_norm(u_hat: SpectralField, n: int, m: Order) -> float:
    """‖∇ⁿu‖_{2m} with the Frobenius magnitude; m = ∞ gives the grid maximum"""
    return lebesgue_norm(gradient_magnitude_squared(u_hat, n), m)


def vorticity_magnitude_squared(u_hat: SpectralField) -> np.ndarray:
    omega = to_physical(vorticity(u_hat), u_hat.grid.d)
    return np.sum(omega * omega, axis=0)


def l4_integral(u_hat: SpectralField) -> float:
    """Volume-normalized ∫|u|⁴"""
    squared = gradient_magnitude_squared(u_hat, 0)
    return float(np.mean(squared * squared))


def sup_norm(u_hat: SpectralField) -> float:
    return math.sqrt(float(gradient_magnitude_squared(u_hat, 0).max()))


def p_from_raw(raw: float, n: int, m: Order) -> float:
    return raw ** float(2 * alpha_exponent(n, m, 2))


def q_from_raw(raw: float, n: int, m: Order) -> float:
    if n == 0 and not m > 2:
        raise DomainError(f"Q_{{0,{m}}} requires m > 2")
    return raw ** float(alpha_exponent(n, m, 3))


def d_from_raw(raw: float, m: Order) -> float:
    return raw ** float(alpha_exponent(1, m, 3))


def p_nm(u_hat: SpectralField, n: int, m: Order) -> float:
    """P_{n,m} = ‖∇ⁿu‖_{2m}^{2α_{n,m,2}}"""
    exponent = alpha_exponent(n, m, 2)
    return grad_norm(u_hat, n, m) ** float(2 * exponent)


def q_nm(u_hat: SpectralField, n: int, m: Order) -> float:
    """Q_{n,m} = ‖∇ⁿu‖_{2m}^{α_{n,m,3}}"""
    if n == 0 and not m > 2:
        raise DomainError(f"Q_{{0,{m}}} requires m > 2")
    exponent = alpha_exponent(n, m, 3)
    return grad_norm(u_hat, n, m) ** float(exponent)


def d_m(u_hat: SpectralField, m: Order) -> float:
    """D_m = ‖ω‖_{2m}^{α_{1,m,3}}"""
    exponent = alpha_exponent(1, m, 3)
    return lebesgue_norm(vorticity_magnitude_squared(u_hat), m) ** float(exponent)


def f_nmd(raw_norm: float, n: int, m: Order, d: int, nu: float, box_length: float) -> float:
    """F_{n,m,d} = ν⁻¹ L^{1/α} ‖∇ⁿu‖_{2m}

    raw_norm is volume-normalized, so the box volume factor L^{d/2m} is
    restored before scaling; the combined power of L is n+1.
    """
    exponent = 1 / alpha_exponent(n, m, d)
    if not math.isinf(m):
        exponent += Fraction(d, 2 * int(m))
    return raw_norm * box_length ** float(exponent) / nu


def length_scale(f_value: float, n: int) -> float:
    """Lℓ⁻¹ = F^{1/(n+1)}"""
    if f_value < 0:
        raise DomainError(f"F must be non-negative, got {f_value}")
    return f_value ** (1.0 / (n + 1))


class NormHierarchy:
    """Lazily evaluated norms of one snapshot; |∇ⁿu|² is formed once per n"""

    def __init__(self, u_hat: SpectralField):
        self.u_hat = u_hat
        self._squared: Dict[int, np.ndarray] = {}
        self._vorticity: Optional[np.ndarray] = None

    @property
    def d(self) -> int:
        return self.u_hat.grid.d

    def squared(self, n: int) -> np.ndarray:
        if n not in self._squared:
            self._squared[n] = gradient_magnitude_squared(self.u_hat, n)
        return self._squared[n]

    def raw_norm(self, n: int, m: Order) -> float:
        return lebesgue_norm(self.squared(n), m)

    def h(self, n: int) -> float:
        return float(np.mean(self.squared(n)))

    def l4(self) -> float:
        squared = self.squared(0)
        return float(np.mean(squared * squared))

    def vorticity_norm(self, m: Order) -> float:
        if self._vorticity is None:
            self._vorticity = vorticity_magnitude_squared(self.u_hat)
        return lebesgue_norm(self._vorticity, m)

    def p(self, n: int, m: Order) -> float:
        return p_from_raw(self.raw_norm(n, m), n, m)

    def q(self, n: int, m: Order) -> float:
        return q_from_raw(self.raw_norm(n, m), n, m)

    def d_m(self, m: Order) -> float:
        return d_from_raw(self.vorticity_norm(m), m)

    def f(self, n: int, m: Order, nu: float, box_length: float) -> float:
        return f_nmd(self.raw_norm(n, m), n, m, self.d, nu, box_length)


# ---------------------------------------------------------------------------
# Time averages
# ---------------------------------------------------------------------------

@dataclass
class _Track:
    first_time: float
    last_time: float
    last_value: Sample
    integral: Sample


class TimeAverageAccumulator:
    """Trapezoidal (1/T)∫ of each tracked quantity

    Samples earlier than start are ignored; the window opens at the first
    sample at or after start.
    """

    def __init__(self, start: float = 0.0):
        self.start = start
        self._tracks: Dict[str, _Track] = {}
        self._last_time: Optional[float] = None

    def add(self, t: float, sample: Mapping[str, Sample]) -> "TimeAverageAccumulator":
        if self._last_time is not None and t < self._last_time:
            raise ContractViolation(f"Time went backwards: {t} < {self._last_time}")
        self._last_time = t
        if t < self.start:
            return self
        for key, value in sample.items():
            track = self._tracks.get(key)
            if track is None:
                zero = np.zeros_like(value, dtype=np.float64) if isinstance(value, np.ndarray) else 0.0
                self._tracks[key] = _Track(t, t, _copy(value), zero)
                continue
            track.integral = track.integral + 0.5 * (t - track.last_time) * (track.last_value + value)
            track.last_time = t
            track.last_value = _copy(value)
        return self

    def keys(self):
        return self._tracks.keys()

    def horizon(self, key: Optional[str] = None) -> float:
        if not self._tracks:
            return 0.0
        tracks = [self._tracks[key]] if key is not None else list(self._tracks.values())
        return max(track.last_time - track.first_time for track in tracks)

    def average(self, key: str) -> Optional[Sample]:
        track = self._tracks.get(key)
        if track is None:
            return None
        span = track.last_time - track.first_time
        if span <= 0:
            return _copy(track.last_value)
        return track.integral / span

    def averages(self) -> Dict[str, Sample]:
        return {key: self.average(key) for key in self._tracks}

    def merge(self, later: "TimeAverageAccumulator") -> "TimeAverageAccumulator":
        """Join a contiguous later window onto this one"""
        merged = TimeAverageAccumulator(self.start)
        merged._tracks = {key: _Track(t.first_time, t.last_time, _copy(t.last_value), _copy(t.integral))
                          for key, t in self._tracks.items()}
        for key, track in later._tracks.items():
            mine = merged._tracks.get(key)
            if mine is None:
                merged._tracks[key] = _Track(track.first_time, track.last_time,
                                             _copy(track.last_value), _copy(track.integral))
                continue
            if not math.isclose(mine.last_time, track.first_time, rel_tol=1e-12, abs_tol=1e-15):
                raise ContractViolation(
                    f"Windows for '{key}' are not contiguous: {mine.last_time} != {track.first_time}"
                )
            mine.integral = mine.integral + track.integral
            mine.last_time = track.last_time
            mine.last_value = _copy(track.last_value)
        times = [t for t in (self._last_time, later._last_time) if t is not None]
        merged._last_time = max(times) if times else None
        return merged


def _copy(value: Sample) -> Sample:
    return value.copy() if isinstance(value, np.ndarray) else value


def time_average(acc: TimeAverageAccumulator, sample: Mapping[str, Sample], t: float) -> TimeAverageAccumulator:
    return acc.add(t, sample)


# ---------------------------------------------------------------------------
# Spectra and budgets
# ---------------------------------------------------------------------------

def _shell_sum(values: np.ndarray, grid: Grid) -> np.ndarray:
    return np.bincount(grid.shell_index.ravel(), weights=values.ravel(), minlength=grid.n_shells)


def energy_total(u_hat: SpectralField) -> float:
    """E_tot = ½ L^{-d} ∫|u|²"""
    return 0.5 * float(np.sum(np.abs(u_hat.components) ** 2))


def energy_spectrum(u_hat: SpectralField) -> np.ndarray:
    """E(k) over nearest-integer shells; index 0 holds the mean mode"""
    modal = 0.5 * np.sum(np.abs(u_hat.components) ** 2, axis=0)
    return _shell_sum(modal, u_hat.grid)


def energy_balance(u_hat: SpectralField, params: PhysicalParams) -> Dict[str, float]:
    """Terms of d(H₀/2)/dt = αH₀ - νH₁ - β∫|u|⁴"""
    h0 = h_norm(u_hat, 0)
    h1 = h_norm(u_hat, 1)
    l4 = l4_integral(u_hat)
    source = params.alpha * h0
    viscous = params.nu * h1
    cubic = params.beta * l4
    return {"source": source, "viscous": viscous, "cubic": cubic, "rate": source - viscous - cubic}


def budget_terms(u_hat: SpectralField, params: PhysicalParams) -> SpectralBudget:
    """Shell-summed contributions to ∂_t E(k), fluxes included"""
    grid = u_hat.grid
    components = u_hat.components
    u = to_physical(components, grid.d)
    conj = np.conj(components)

    if params.lam != 0.0:
        advective = projected_transform(advective_product(components, grid, u), grid)
        transfer_modal = -params.lam * np.real(np.sum(conj * advective, axis=0))
    else:
        transfer_modal = np.zeros(grid.shape)
    cubic = projected_transform(cubic_product(u), grid)
    transfer_beta_modal = params.beta * np.real(np.sum(conj * cubic, axis=0))

    modal_energy = np.sum(np.abs(components) ** 2, axis=0)
    energy = _shell_sum(0.5 * modal_energy, grid)
    budget = SpectralBudget(
        shells=np.arange(grid.n_shells),
        energy=energy,
        transfer=_shell_sum(transfer_modal, grid),
        transfer_alpha=2.0 * params.alpha * energy,
        transfer_beta=_shell_sum(transfer_beta_modal, grid),
        dissipation=_shell_sum(params.nu * grid.k_squared * modal_energy, grid),
    )
    flux, flux_beta = fluxes(budget)
    return budget.with_fluxes(flux, flux_beta)


def fluxes(budget: SpectralBudget) -> Tuple[np.ndarray, np.ndarray]:
    """Π(k) = -Σ_{k'≤k} T(k'), Π_β(k) = -Σ_{k'≤k} T_β(k')"""
    return -np.cumsum(budget.transfer), -np.cumsum(budget.transfer_beta)
