"""
📏 Nondimensionalization
Maps dimensional (λ, α, β, ν, L) onto (α₀, Re_ν, Re_β) under either U₀ convention

Primed variables: u' = λu/U₀, x' = x/L, t' = U₀t/L.
"""
import math
from typing import Optional, Union

from loguru import logger

from .entities import SpectralField
from .errors import DomainError
from .solver import EtdIntegrator
from .spectral import make_grid
from .value_objects import DimensionlessParams, PhysicalParams, U0Choice

LEADING_ORDER_FACTOR = 10.0


def velocity_scale(p: PhysicalParams, choice: Union[U0Choice, str]) -> float:
    """U₀ = (α/β)^{1/2} or ν/L"""
    choice = U0Choice.parse(choice)
    if choice is U0Choice.NU_OVER_L:
        return p.nu / p.box_length
    if not (p.alpha > 0 and p.beta > 0):
        raise DomainError(f"U0 = sqrt(alpha/beta) needs alpha, beta > 0 (alpha={p.alpha}, beta={p.beta})")
    return math.sqrt(p.alpha / p.beta)


def leading_order_assumption_holds(params: DimensionlessParams, factor: float = LEADING_ORDER_FACTOR) -> bool:
    """Whether Re_ν ≫ Re_β, read as Re_ν ≥ factor·Re_β"""
    return params.re_nu >= factor * params.re_beta


def nondimensionalize(
    p: PhysicalParams,
    choice: Union[U0Choice, str] = U0Choice.SQRT_ALPHA_BETA,
    warn: bool = True,
) -> DimensionlessParams:
    choice = U0Choice.parse(choice)
    if p.lam == 0:
        raise DomainError("Re_beta = beta U0 L / lambda^2 is undefined for lambda = 0")
    if not (p.alpha > 0 and p.beta > 0):
        raise DomainError(f"Nondimensionalization needs alpha, beta > 0 (alpha={p.alpha}, beta={p.beta})")

    u0 = velocity_scale(p, choice)
    length = p.box_length
    params = DimensionlessParams(
        alpha0=length * p.alpha / u0,
        re_nu=u0 * length / p.nu,
        re_beta=p.beta * u0 * length / p.lam ** 2,
        u0=u0,
        length=length,
        lam=p.lam,
        choice=choice,
    )
    if warn and not leading_order_assumption_holds(params):
        logger.warning(
            f"⚠️ Re_nu = {params.re_nu:.4g} is not >> Re_beta = {params.re_beta:.4g} "
            f"({choice.value}); leading-order bounds are outside their assumption"
        )
    return params


def redimensionalize(
    params: DimensionlessParams,
    u0: Optional[float] = None,
    length: Optional[float] = None,
    lam: Optional[float] = None,
) -> PhysicalParams:
    """Inverse of nondimensionalize; scales default to those carried by params"""
    u0 = params.u0 if u0 is None else u0
    length = params.length if length is None else length
    lam = params.lam if lam is None else lam
    return PhysicalParams(
        lam=lam,
        alpha=params.alpha0 * u0 / length,
        beta=params.re_beta * lam ** 2 / (u0 * length),
        nu=u0 * length / params.re_nu,
        box_length=length,
    )


def norm_scale(n: int, params: DimensionlessParams) -> float:
    """Factor λLⁿ/U₀ taking ‖∇ⁿu‖ to ‖∇'ⁿu'‖"""
    return params.lam * params.length ** n / params.u0


def dimensionless_time(t, params: DimensionlessParams):
    """t' = U₀t/L (scalars or arrays)"""
    return t * (params.u0 / params.length)


def rescale_time_series(frame, params: DimensionlessParams, column: str = "t"):
    """Copy of a pandas frame with its time column in dimensionless units"""
    rescaled = frame.copy()
    rescaled[column] = rescaled[column] * (params.u0 / params.length)
    return rescaled


def rescale_state(
    u_hat: SpectralField,
    p: PhysicalParams,
    choice: Union[U0Choice, str] = U0Choice.SQRT_ALPHA_BETA,
) -> SpectralField:
    """Dimensionless copy of a state on the unit box"""
    u0 = velocity_scale(p, choice)
    grid = u_hat.grid
    if not math.isclose(grid.box_length, p.box_length, rel_tol=1e-12):
        raise DomainError(f"State box {grid.box_length} does not match parameters box {p.box_length}")
    unit_grid = make_grid(grid.d, grid.n, 1.0, grid.dealias_fraction)
    return SpectralField(
        unit_grid,
        u_hat.components * (p.lam / u0),
        u0 * u_hat.time / p.box_length,
    )


def solve_dimensionless(
    initial: SpectralField,
    params: DimensionlessParams,
    dt: float,
    steps: int,
) -> SpectralField:
    """Integrate the primed equations directly on the unit box"""
    system = params.as_physical()
    if not math.isclose(initial.grid.box_length, 1.0, rel_tol=1e-12):
        raise DomainError(f"Dimensionless states live on the unit box, got L={initial.grid.box_length}")
    integrator = EtdIntegrator(initial.grid, system, dt)
    return integrator.advance(initial, steps)
