"""
📊 Diagnostics Service
Per-sample norm sweeps, running time averages and windowed spectral budgets
"""
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ...domain.diagnostics import (
    NormHierarchy,
    TimeAverageAccumulator,
    alpha_exponent,
    budget_terms,
    d_from_raw,
    energy_total,
    length_scale,
    p_from_raw,
    q_from_raw,
)
from ...domain.entities import DiagnosticsRecord, SpectralField
from ...domain.errors import DomainError
from ...domain.nondim import norm_scale
from ...domain.value_objects import (
    DimensionlessParams,
    NormSweep,
    Order,
    PhysicalParams,
    U0Choice,
    format_order,
    norm_key,
)

BASE_COLUMNS = ["step", "t", "E_tot", "H0", "H1", "L4", "H1/H0", "C"]
SPECTRA_COLUMNS = [
    "window", "t_start", "t_end", "shell",
    "E", "T", "T_alpha", "T_beta", "dissipation", "Pi", "Pi_beta",
]


def mode_column(key: str, choice: U0Choice) -> str:
    """Per-convention column name, e.g. P_1_2@sqrt-alpha-beta"""
    return f"{key}@{choice.value}"


def _valid(n: int, m: Order, d: int) -> bool:
    try:
        alpha_exponent(n, m, d)
    except DomainError:
        return False
    return not (d == 3 and n == 0 and not m > 2)


class DiagnosticSampler:
    """Evaluates the configured diagnostics on a snapshot"""

    def __init__(
        self,
        d: int,
        params: PhysicalParams,
        sweep: NormSweep,
        dimensionless: Mapping[U0Choice, DimensionlessParams],
    ):
        self.d = d
        self.params = params
        self.sweep = sweep
        self.dimensionless = dict(dimensionless)
        self.pairs: List[Tuple[int, Order]] = [(n, m) for n, m in sweep.pairs() if _valid(n, m, d)]
        self.symbol = "P" if d == 2 else "Q"

    @property
    def length_columns(self) -> List[str]:
        return [norm_key("ell", n, 1) for n in self.sweep.n_values if n >= 1]

    def columns(self) -> List[str]:
        columns = list(BASE_COLUMNS) + self.length_columns
        for choice in self.dimensionless:
            columns.extend(mode_column(norm_key(self.symbol, n, m), choice) for n, m in self.pairs)
            if self.d == 3:
                columns.extend(mode_column(f"D_{format_order(m)}", choice) for m in self.sweep.m_values)
        return columns

    def sample(self, state: SpectralField, step: int, cfl: float) -> DiagnosticsRecord:
        norms = NormHierarchy(state)
        h0 = norms.h(0)
        h1 = norms.h(1)
        values: Dict[str, float] = {
            "E_tot": energy_total(state),
            "H0": h0,
            "H1": h1,
            "L4": norms.l4(),
            "H1/H0": h1 / h0 if h0 > 0 else math.nan,
            "C": cfl,
        }
        for n in self.sweep.n_values:
            if n >= 1:
                f_value = norms.f(n, 1, self.params.nu, self.params.box_length)
                values[norm_key("ell", n, 1)] = length_scale(f_value, n)

        for choice, dp in self.dimensionless.items():
            for n, m in self.pairs:
                raw = norm_scale(n, dp) * norms.raw_norm(n, m)
                weighted = p_from_raw(raw, n, m) if self.d == 2 else q_from_raw(raw, n, m)
                values[mode_column(norm_key(self.symbol, n, m), choice)] = weighted
            if self.d == 3:
                scale = norm_scale(1, dp)
                for m in self.sweep.m_values:
                    values[mode_column(f"D_{format_order(m)}", choice)] = d_from_raw(scale * norms.vorticity_norm(m), m)
        return DiagnosticsRecord(step=step, time=state.time, values=values)


def measured_for_bounds(
    averages: Mapping[str, float],
    dp: DimensionlessParams,
    d: int,
) -> Dict[str, float]:
    """Dimensionless time averages keyed by bound identifier"""
    measured: Dict[str, float] = {}
    if averages.get("H0") is not None:
        measured["H0"] = norm_scale(0, dp) ** 2 * averages["H0"]
    if averages.get("H1") is not None:
        measured["H1"] = norm_scale(1, dp) ** 2 * averages["H1"]
    if averages.get("L4") is not None:
        measured["L4"] = norm_scale(0, dp) ** 4 * averages["L4"]
    ratio = averages.get("H1/H0")
    if ratio is not None and not math.isnan(ratio):
        measured["H1/H0"] = dp.length ** 2 * ratio
    suffix = f"@{dp.choice.value}"
    symbol = "P_" if d == 2 else "Q_"
    for key, value in averages.items():
        if key.startswith(symbol) and key.endswith(suffix):
            measured[key[: -len(suffix)]] = value
    return measured


class SpectraWindows:
    """Time-averaged spectral budgets over consecutive sample windows"""

    def __init__(self, params: PhysicalParams, samples_per_window: int = 0):
        self.params = params
        self.samples_per_window = samples_per_window
        self.rows: List[Dict[str, float]] = []
        self._window = 0
        self._acc: Optional[TimeAverageAccumulator] = None
        self._count = 0
        self._first_time = 0.0

    def add(self, state: SpectralField) -> None:
        budget = budget_terms(state, self.params)
        columns = {key: np.asarray(value, dtype=np.float64) for key, value in budget.as_columns().items()}
        if self._acc is None:
            self._acc = TimeAverageAccumulator(state.time)
            self._first_time = state.time
            self._count = 0
        self._acc.add(state.time, columns)
        self._count += 1
        if self.samples_per_window and self._count > self.samples_per_window:
            self._emit(state.time)
            # the closing sample also opens the next window
            self._acc = TimeAverageAccumulator(state.time)
            self._acc.add(state.time, columns)
            self._first_time = state.time
            self._count = 1

    def _emit(self, t_end: float) -> None:
        averages = self._acc.averages()
        shells = averages["shell"]
        for i in range(len(shells)):
            row = {"window": self._window, "t_start": self._first_time, "t_end": t_end, "shell": int(round(shells[i]))}
            for key in SPECTRA_COLUMNS[4:]:
                row[key] = float(averages[key][i])
            self.rows.append(row)
        logger.debug(f"📊 Spectra window {self._window} closed at t={t_end:.6g}")
        self._window += 1

    def finish(self, t_end: float) -> List[Dict[str, float]]:
        if self._acc is not None and self._count > (1 if self._window else 0):
            self._emit(t_end)
        self._acc = None
        return self.rows
