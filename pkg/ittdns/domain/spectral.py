"""
🌊 Spectral Core
Grids, transforms, derivatives, Leray projection and dealiasing
"""
import math
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from .entities import Grid, PhysicalField, SpectralField
from .errors import ConfigurationError, ContractViolation

_MASK_TOLERANCE = 1e-9
_fft_workers: Optional[int] = None


def configure_transforms(workers: Optional[int]) -> None:
    """Thread count handed to scipy.fft (None keeps the scipy default)"""
    global _fft_workers
    _fft_workers = workers


def _axes(d: int) -> tuple:
    return tuple(range(-d, 0))


def to_spectral(values: np.ndarray, d: int) -> np.ndarray:
    """Forward transform over the trailing d axes; k = 0 holds the spatial mean"""
    return sp_fft.fftn(values, axes=_axes(d), norm="forward", workers=_fft_workers)


def to_physical(coefficients: np.ndarray, d: int) -> np.ndarray:
    """Inverse of to_spectral, real part only"""
    return sp_fft.ifftn(coefficients, axes=_axes(d), norm="forward", workers=_fft_workers).real


def make_grid(
    d: int,
    n: int,
    box_length: float = 2.0 * math.pi,
    dealias_fraction: float = 0.5,
) -> Grid:
    """Build the wavevector tables and dealias mask for an N^d periodic box"""
    if d not in (2, 3):
        raise ConfigurationError(f"Unsupported dimension d={d}; expected 2 or 3")
    if int(n) != n or n < 8 or n % 2:
        raise ConfigurationError(f"Resolution N must be an even integer >= 8, got {n}")
    if not 0 < dealias_fraction <= 1:
        raise ConfigurationError(f"dealias_fraction must lie in (0, 1], got {dealias_fraction}")
    if not box_length > 0:
        raise ConfigurationError(f"box_length must be positive, got {box_length}")
    n = int(n)

    axis = np.rint(sp_fft.fftfreq(n) * n).astype(np.int64)
    integer = np.stack(np.meshgrid(*([axis] * d), indexing="ij"))
    scale = 2.0 * math.pi / box_length
    wavevectors = integer * scale

    nyquist = np.any(integer == -n // 2, axis=0)
    derivative = np.where(nyquist, 0.0, wavevectors)

    k_squared = np.sum(wavevectors ** 2, axis=0)
    inv_k_squared = np.zeros_like(k_squared)
    nonzero = k_squared > 0
    inv_k_squared[nonzero] = 1.0 / k_squared[nonzero]

    cutoff = dealias_fraction * (n / 2) + _MASK_TOLERANCE
    mask = np.all(np.abs(integer) <= cutoff, axis=0)

    shell = np.rint(np.sqrt(np.sum(integer.astype(np.float64) ** 2, axis=0))).astype(np.int64)

    return Grid(
        d=d,
        n=n,
        box_length=float(box_length),
        dealias_fraction=float(dealias_fraction),
        integer_wavevectors=integer,
        wavevectors=wavevectors,
        derivative_wavevectors=derivative,
        k_squared=k_squared,
        inv_k_squared=inv_k_squared,
        dealias_mask=mask,
        shell_index=shell,
    )


def forward_transform(f: PhysicalField) -> SpectralField:
    """Physical -> spectral with the spatial-mean normalization"""
    if f.components.shape != f.grid.field_shape:
        raise ContractViolation("Physical field shape does not match its grid")
    return SpectralField(f.grid, to_spectral(f.components, f.grid.d), f.time)


def inverse_transform(u_hat: SpectralField) -> PhysicalField:
    """Spectral -> physical; Hermitian input gives a real field"""
    return PhysicalField(u_hat.grid, to_physical(u_hat.components, u_hat.grid.d), u_hat.time)


def imaginary_residue(u_hat: SpectralField) -> float:
    """Largest imaginary part produced by the inverse transform"""
    values = sp_fft.ifftn(u_hat.components, axes=_axes(u_hat.grid.d), norm="forward", workers=_fft_workers)
    return float(np.abs(values.imag).max()) if values.size else 0.0


def _check_grid(u_hat: SpectralField, grid: Optional[Grid]) -> Grid:
    if grid is not None:
        grid.require_match(u_hat.grid)
        return grid
    return u_hat.grid


def project_components(components: np.ndarray, grid: Grid) -> np.ndarray:
    """Leray projection P(k) = I - kk/|k|² on raw coefficients; P(0) = I"""
    k_dot_u = np.sum(grid.wavevectors * components, axis=0)
    return components - grid.wavevectors * (k_dot_u * grid.inv_k_squared)


def project_divfree(u_hat: SpectralField, grid: Optional[Grid] = None) -> SpectralField:
    """Remove the longitudinal part of every mode"""
    grid = _check_grid(u_hat, grid)
    return u_hat.with_components(project_components(u_hat.components, grid))


def spectral_derivative(u_hat: SpectralField, axis: int, order: int = 1) -> SpectralField:
    """Multiply each mode by (i k_axis)^order; Nyquist planes are zeroed for order >= 1"""
    if order < 0:
        raise ContractViolation(f"Derivative order must be non-negative, got {order}")
    grid = u_hat.grid
    if not 0 <= axis < grid.d:
        raise ContractViolation(f"Axis {axis} out of range for d={grid.d}")
    if order == 0:
        return u_hat.copy()
    factor = (1j * grid.derivative_wavevectors[axis]) ** order
    return u_hat.with_components(u_hat.components * factor)


def dealias(u_hat: SpectralField, grid: Optional[Grid] = None) -> SpectralField:
    """Zero every mode outside the dealias mask"""
    grid = _check_grid(u_hat, grid)
    return u_hat.with_components(u_hat.components * grid.dealias_mask)


def vorticity(u_hat: SpectralField) -> np.ndarray:
    """Spectral curl: scalar ω (shape (1, N, N)) for d=2, vector ω for d=3"""
    grid = u_hat.grid
    ik = 1j * grid.derivative_wavevectors
    u = u_hat.components
    if grid.d == 2:
        return (ik[0] * u[1] - ik[1] * u[0])[np.newaxis]
    return np.stack([
        ik[1] * u[2] - ik[2] * u[1],
        ik[2] * u[0] - ik[0] * u[2],
        ik[0] * u[1] - ik[1] * u[0],
    ])


def divergence_residual(u_hat: SpectralField, floor: float = 1e-300) -> float:
    """max over modes of |k·û| / (|k||û|); 0 for a divergence-free field"""
    grid = u_hat.grid
    k_dot_u = np.abs(np.sum(grid.wavevectors * u_hat.components, axis=0))
    amplitude = np.sqrt(np.sum(np.abs(u_hat.components) ** 2, axis=0)) * np.sqrt(grid.k_squared)
    active = amplitude > floor
    if not active.any():
        return 0.0
    return float((k_dot_u[active] / amplitude[active]).max())


def reflect(components: np.ndarray, d: int) -> np.ndarray:
    """Coefficient array evaluated at -k"""
    axes = _axes(d)
    return np.roll(np.flip(components, axis=axes), shift=1, axis=axes)


def hermitian_defect(u_hat: SpectralField) -> float:
    """max |û(-k) - conj(û(k))|, zero for a real physical field"""
    mirrored = reflect(u_hat.components, u_hat.grid.d)
    return float(np.abs(mirrored - np.conj(u_hat.components)).max())


def enforce_hermitian(components: np.ndarray, d: int) -> np.ndarray:
    """Average a coefficient array with its conjugate mirror"""
    return 0.5 * (components + np.conj(reflect(components, d)))


def inner_product(a: SpectralField, b: SpectralField) -> complex:
    """Σ_k a(k)·conj(b(k)) (volume-normalized L² inner product)"""
    a.grid.require_match(b.grid)
    return complex(np.sum(a.components * np.conj(b.components)))
