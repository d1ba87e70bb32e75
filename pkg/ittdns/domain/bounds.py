"""
📐 Analytic Bounds
Right-hand sides of the time-averaged estimates as functions of (α₀, Re_ν, Re_β, 𝒜₀)

Every RHS carries a single multiplicative constant (default 1). With
leading_order=True the estimates assume Re_ν ≫ Re_β; otherwise the full
chained forms are used where they exist.
"""
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .diagnostics import inverse_length_bound_exponent
from .entities import BoundEntry, BoundReport
from .errors import DomainError
from .value_objects import DimensionlessParams, Order, norm_key

BOUNDARY_TOLERANCE = 1e-12

FINITE_ONLY = "finite only"
NO_ESTIMATE = "no estimate"

Index = Union[int, float, Fraction]


# ---------------------------------------------------------------------------
# Energy-level estimates
# ---------------------------------------------------------------------------

def bound_energy(params: DimensionlessParams, constant: float = 1.0) -> Dict[str, float]:
    """⟨H₀⟩ ≤ 𝒜₀, ⟨H₁⟩ ≤ α₀𝒜₀Re_ν, ⟨∫|u|⁴⟩ ≤ 𝒜₀², ⟨H₁/H₀⟩ ≤ α₀Re_ν"""
    a0 = params.activity
    return {
        "H0": constant * a0,
        "H1": constant * params.alpha0 * a0 * params.re_nu,
        "L4": constant * a0 ** 2,
        "H1/H0": constant * params.alpha0 * params.re_nu,
    }


def enstrophy_ratio_bound(params: DimensionlessParams) -> float:
    """⟨H₂/H₁⟩ ≤ α₀Re_ν(1 + α₀Re_ν) in d=2"""
    x = params.alpha0 * params.re_nu
    return x * (1.0 + x)


def sup_squared_bound(params: DimensionlessParams) -> float:
    """⟨‖u‖∞²⟩ ≤ α₀𝒜₀Re_ν"""
    return params.alpha0 * params.activity * params.re_nu


def ladder_ratio_bound(params: DimensionlessParams, leading_order: bool = True) -> float:
    """⟨H_{n+1}/H_n⟩ for the general ladder"""
    if leading_order:
        return params.alpha0 * params.activity * params.re_nu ** 3
    return (
        2.0 * params.alpha0 * params.re_nu
        + params.re_nu * (params.re_beta + params.re_nu) * sup_squared_bound(params)
    )


def _ladder_driver(params: DimensionlessParams) -> float:
    """α₀𝒜₀Re_ν³"""
    return params.alpha0 * params.activity * params.re_nu ** 3


def p21_bound(params: DimensionlessParams, leading_order: bool = True) -> float:
    """⟨P_{2,1}⟩ = ⟨H₂^{1/2}⟩ ≤ ⟨H₂/H₁⟩^{1/2}⟨H₁⟩^{1/2}"""
    if leading_order:
        return params.alpha0 * math.sqrt(_ladder_driver(params))
    h1 = params.alpha0 * params.activity * params.re_nu
    return math.sqrt(enstrophy_ratio_bound(params) * h1)


def ladder_step(ratio_bound: float, p_n1: float, n: int) -> float:
    """⟨P_{n+1,1}⟩ ≤ ⟨H_{n+1}/H_n⟩^{1/(n+1)} ⟨P_{n,1}⟩^{n/(n+1)}"""
    return ratio_bound ** (1.0 / (n + 1)) * p_n1 ** (n / (n + 1))


# ---------------------------------------------------------------------------
# d = 2: P_{n,m}
# ---------------------------------------------------------------------------

def _p_closed_form(n: int, m: Order, params: DimensionlessParams) -> float:
    """α₀^{2m/(m(n+1)-1)} (α₀𝒜₀Re_ν³)^{(mn-1)/(m(n+1)-1)} for n ≥ 2"""
    driver = _ladder_driver(params)
    if math.isinf(m):
        return params.alpha0 ** (2.0 / (n + 1)) * driver ** (n / (n + 1))
    denominator = m * (n + 1) - 1
    return params.alpha0 ** (2.0 * m / denominator) * driver ** ((m * n - 1) / denominator)


def bound_P(
    n: int,
    m: Order,
    params: DimensionlessParams,
    constant: float = 1.0,
    leading_order: bool = True,
) -> float:
    """RHS of ⟨P_{n,m}⟩ ≤ ..."""
    if n < 0 or int(n) != n:
        raise DomainError(f"bound_P needs integer n >= 0, got {n}")
    if not (math.isinf(m) or (m >= 1 and int(m) == m)):
        raise DomainError(f"bound_P needs m a positive integer or inf, got {m}")
    x = params.alpha0 * params.re_nu
    a0 = params.activity

    if n == 0:
        if not m > 2:
            raise DomainError(f"bound_P(0, m) requires m > 2, got m={m}")
        if leading_order:
            if math.isinf(m):
                value = params.alpha0 * a0 * params.re_nu
            else:
                value = a0 ** (m / (m - 1)) * x ** ((m - 2) / (m - 1))
        else:
            p21 = p21_bound(params, leading_order=False)
            if math.isinf(m):
                value = p21 ** (2.0 / 3.0) * a0 ** (2.0 / 3.0)
            else:
                value = p21 ** (2.0 * (m - 2) / (3.0 * (m - 1))) * (a0 ** 2) ** ((m + 1) / (3.0 * (m - 1)))
        return constant * value

    if n == 1:
        if m == 1:
            return constant * params.alpha0 * a0 * params.re_nu
        if leading_order:
            if math.isinf(m):
                value = x ** 1.5 * math.sqrt(a0)
            else:
                value = x ** ((3 * m - 2) / (2 * m - 1)) * a0 ** (m / (2 * m - 1))
        else:
            p21 = p21_bound(params, leading_order=False)
            if math.isinf(m):
                value = p21
            else:
                h1 = params.alpha0 * a0 * params.re_nu
                value = p21 ** (2.0 * (m - 1) / (2 * m - 1)) * h1 ** (1.0 / (2 * m - 1))
        return constant * value

    if m == 1:
        if leading_order:
            return constant * _p_closed_form(n, 1, params)
        value = p21_bound(params, leading_order=False)
        ratio = ladder_ratio_bound(params, leading_order=False)
        for level in range(2, n):
            value = ladder_step(ratio, value, level)
        return constant * value

    return constant * _p_closed_form(n, m, params)


# ---------------------------------------------------------------------------
# d = 3: Q_{n,m}
# ---------------------------------------------------------------------------

def enstrophy_ratio_bound_3d(params: DimensionlessParams) -> float:
    """⟨H₂/H₁²⟩ ≤ α₀Re_ν²(Re_β² + Re_ν²)"""
    return params.alpha0 * params.re_nu ** 2 * (params.re_beta ** 2 + params.re_nu ** 2)


def q21_bound(params: DimensionlessParams, leading_order: bool = True) -> float:
    if leading_order:
        return params.alpha0 * params.re_nu ** 2
    return (
        params.alpha0
        * params.re_nu ** (4.0 / 3.0)
        * (params.re_beta ** 2 + params.re_nu ** 2) ** (1.0 / 3.0)
    )


def q_estimate_exists(n: int, m: Order) -> bool:
    """Whether ⟨Q_{n,m}⟩ has a bound or at least a finiteness result"""
    return not (n == 1 and m != 1)


def bound_Q(
    n: int,
    m: Order,
    params: DimensionlessParams,
    constant: float = 1.0,
    leading_order: bool = True,
) -> Optional[float]:
    """RHS of ⟨Q_{n,m}⟩ ≤ ...; None where only finiteness is established (n ≥ 2)"""
    if n < 0 or int(n) != n:
        raise DomainError(f"bound_Q needs integer n >= 0, got {n}")
    if not q_estimate_exists(n, m):
        raise DomainError(f"No estimate for <Q_{n},m> with m={m}")
    if n == 0:
        if not m > 2:
            raise DomainError(f"bound_Q(0, m) requires m > 2, got m={m}")
        if math.isinf(m):
            weight = 0.9
        else:
            weight = 9.0 * (m - 2) / (5.0 * (2 * m - 3))
        q21 = q21_bound(params, leading_order)
        return constant * q21 ** weight * params.activity ** (2.0 - 2.0 * weight)
    if m == 1:
        if n == 1:
            return constant * params.alpha0 * params.activity * params.re_nu
        if n == 2:
            return constant * q21_bound(params, leading_order)
    return None


# ---------------------------------------------------------------------------
# Regularity and interpolation
# ---------------------------------------------------------------------------

def regularity_rate(alpha0: float, re_nu: float, re_beta: float, constant: float = 1.0) -> float:
    """Growth rate α₀(1 + c Re_β² Re_ν 𝒜₀²) of the d=2 enstrophy bound"""
    if alpha0 == 0:
        return 0.0
    activity = alpha0 / re_beta
    return alpha0 * (1.0 + constant * re_beta ** 2 * re_nu * activity ** 2)


def bound_H1_exponential(
    h1_initial: float,
    horizon: float,
    params: DimensionlessParams,
    constant: float = 1.0,
) -> float:
    """H₁(T) ≤ H₁(0) exp{α₀(1 + c Re_β² Re_ν 𝒜₀²) T}"""
    if horizon < 0:
        raise DomainError(f"T must be non-negative, got {horizon}")
    rate = regularity_rate(params.alpha0, params.re_nu, params.re_beta, constant)
    return h1_initial * math.exp(rate * horizon)


def inverse_length_bounds(
    params: DimensionlessParams,
    d: int,
    pairs: Iterable[Tuple[int, Order]],
    constant: float = 1.0,
    leading_order: bool = True,
) -> Dict[str, float]:
    """⟨Lℓ⁻¹_{n,m,d}⟩ estimates from the P (d=2) or Q (d=3) bounds"""
    result: Dict[str, float] = {}
    for n, m in pairs:
        if n < 1:
            continue
        try:
            rhs = (bound_P if d == 2 else bound_Q)(n, m, params, constant, leading_order)
        except DomainError:
            continue
        if rhs is None:
            continue
        exponent = float(inverse_length_bound_exponent(n, m, d))
        result[norm_key("ell", n, m)] = rhs ** exponent
    return result


def _reciprocal(value: Index) -> Fraction:
    if isinstance(value, float) and math.isinf(value):
        return Fraction(0)
    value = Fraction(value)
    if value <= 0:
        raise DomainError(f"Lebesgue exponents must be positive, got {value}")
    return 1 / value


def gn_exponent(j: int, n: int, p: Index, r: Index, q: Index, d: int, s: int = 0) -> Fraction:
    """Interpolation exponent a in ‖∇ʲu‖_p ≤ c‖∇ⁿu‖_r^a ‖∇ˢu‖_q^{1-a}

    a solves 1/p = j/d + a(1/r - n/d) + (1-a)(1/q - s/d) and must lie in
    [max(0, (j-s)/(n-s)), 1).
    """
    if not (0 <= j < n and 0 <= s < n):
        raise DomainError(f"Need 0 <= j < n and 0 <= s < n, got j={j}, n={n}, s={s}")
    if d < 1:
        raise DomainError(f"Dimension must be positive, got {d}")
    inv_p, inv_r, inv_q = _reciprocal(p), _reciprocal(r), _reciprocal(q)
    lower = inv_q - Fraction(s, d)
    numerator = inv_p - Fraction(j, d) - lower
    denominator = inv_r - Fraction(n, d) - lower
    if denominator == 0:
        raise DomainError("Interpolation is degenerate: 1/r - n/d equals 1/q - s/d")
    a = numerator / denominator
    floor = max(Fraction(0), Fraction(j - s, n - s))
    if not (floor <= a < 1):
        raise DomainError(f"No admissible exponent: a = {a} outside [{floor}, 1)")
    return a


# ---------------------------------------------------------------------------
# Tables and comparison
# ---------------------------------------------------------------------------

_ENERGY_DESCRIPTIONS = {
    "H0": "<H0> <= A0",
    "H1": "<H1> <= alpha0 A0 Re_nu",
    "L4": "<int |u|^4> <= A0^2",
    "H1/H0": "<H1/H0> <= alpha0 Re_nu",
}


def bound_table(
    params: DimensionlessParams,
    d: int,
    pairs: Iterable[Tuple[int, Order]],
    constant: float = 1.0,
    leading_order: bool = True,
) -> List[Dict[str, object]]:
    """Every available right-hand side for the given (n, m) sweep"""
    rows: List[Dict[str, object]] = []
    for identifier, rhs in bound_energy(params, constant).items():
        rows.append({"identifier": identifier, "description": _ENERGY_DESCRIPTIONS[identifier], "rhs": rhs})
    symbol = "P" if d == 2 else "Q"
    estimate = bound_P if d == 2 else bound_Q
    for n, m in pairs:
        identifier = norm_key(symbol, n, m)
        if d == 3 and not q_estimate_exists(n, m):
            rows.append({"identifier": identifier, "description": f"<{identifier}>: {NO_ESTIMATE}", "rhs": None, "finite": False})
            continue
        try:
            rhs = estimate(n, m, params, constant, leading_order)
        except DomainError:
            continue
        rows.append({
            "identifier": identifier,
            "description": f"<{identifier}>" + (" < inf" if rhs is None else " <= rhs"),
            "rhs": rhs,
            "finite": True,
        })
    return rows


def classify(
    measured: Optional[float],
    rhs: Optional[float],
    finite: bool = True,
) -> Tuple[Optional[float], str]:
    if measured is None or (isinstance(measured, float) and math.isnan(measured)):
        return None, "not measured"
    if rhs is None:
        return None, FINITE_ONLY if finite else NO_ESTIMATE
    if rhs == 0:
        ratio = 0.0 if measured == 0 else math.inf
    else:
        ratio = measured / rhs
    if abs(ratio - 1.0) <= BOUNDARY_TOLERANCE:
        return ratio, "boundary"
    return ratio, "satisfied" if ratio < 1.0 else "exceeded"


def compare(
    measured: Mapping[str, float],
    params: DimensionlessParams,
    d: int,
    pairs: Iterable[Tuple[int, Order]],
    horizon: float,
    constant: float = 1.0,
    leading_order: bool = True,
    window: str = "full",
) -> BoundReport:
    """Pair measured time averages with every RHS; absent measurements stay visible"""
    report = BoundReport(
        params=params,
        horizon=horizon,
        leading_order=leading_order,
        constant=constant,
        window=window,
    )
    for row in bound_table(params, d, pairs, constant, leading_order):
        identifier = str(row["identifier"])
        value = measured.get(identifier)
        ratio, status = classify(None if value is None else float(value), row["rhs"], bool(row.get("finite", True)))
        report.entries.append(BoundEntry(
            identifier=identifier,
            description=str(row["description"]),
            measured=None if value is None else float(value),
            rhs=row["rhs"],
            ratio=ratio,
            status=status,
        ))
    return report
