"""
🎯 Application Use Cases
Run a simulation, evaluate bound tables, build report data
"""
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.integrate import trapezoid

from .. import __version__
from ..config.run_config import RunConfig
from ..config.settings import Settings, get_settings
from ..domain.bounds import bound_P, bound_table, compare, inverse_length_bounds, regularity_rate
from ..domain.diagnostics import TimeAverageAccumulator, alpha_exponent
from ..domain.entities import BoundReport, Checkpoint, SpectralField
from ..domain.errors import ConfigurationError, DomainError, NumericalBlowupError, OutputError
from ..domain.events import (
    BlowupDetected,
    CflExceeded,
    CheckpointWritten,
    EventBus,
    RunCompleted,
    RunStarted,
    SampleRecorded,
    event_bus,
)
from ..domain.nondim import dimensionless_time, nondimensionalize, rescale_time_series
from ..domain.solver import EtdIntegrator, blowup_guard, cfl_number, init_condition
from ..domain.spectral import configure_transforms
from ..domain.value_objects import (
    DimensionlessParams,
    NormSweep,
    Order,
    PhysicalParams,
    U0Choice,
    format_order,
    parse_order,
)
from .interfaces import ICheckpointRepository, IFigureRenderer, IRunOutputRepository
from .services.diagnostics_service import (
    SPECTRA_COLUMNS,
    DiagnosticSampler,
    SpectraWindows,
    measured_for_bounds,
    mode_column,
)

FORMAT_VERSION = 1

TIMESERIES_FILE = "timeseries.csv"
SPECTRA_FILE = "spectra.csv"
BOUNDS_FILE = "bounds.csv"
MANIFEST_FILE = "run_manifest.json"
FINAL_CHECKPOINT = "checkpoint_final.itts"
LAST_GOOD_CHECKPOINT = "checkpoint_last_good.itts"

BOUND_COLUMNS = [
    "u0_mode", "window", "T", "leading_order", "constant",
    "identifier", "description", "measured", "rhs", "ratio", "status", "satisfied",
]
BOUND_COLUMN_DOCS = {
    "u0_mode": "velocity scale convention",
    "window": "averaging window (full run or after the transient skip)",
    "T": "dimensionless averaging horizon",
    "identifier": "time-averaged quantity",
    "measured": "dimensionless time average",
    "rhs": "right-hand side of the estimate",
    "ratio": "measured / rhs",
    "status": "satisfied, boundary, exceeded, not measured, finite only or no estimate",
}


def dimensionless_sets(params: PhysicalParams, modes: Iterable[U0Choice]) -> Dict[U0Choice, DimensionlessParams]:
    """Dimensionless parameters for every convention that is defined for params"""
    result: Dict[U0Choice, DimensionlessParams] = {}
    for choice in modes:
        try:
            result[choice] = nondimensionalize(params, choice)
        except DomainError as e:
            logger.warning(f"⚠️ No dimensionless parameters for {choice.value}: {e}")
    return result


def dimensionless_from_manifest(entry: Dict[str, Any]) -> DimensionlessParams:
    return DimensionlessParams(
        alpha0=float(entry["alpha0"]),
        re_nu=float(entry["re_nu"]),
        re_beta=float(entry["re_beta"]),
        u0=float(entry["u0"]),
        length=float(entry["length"]),
        lam=float(entry["lam"]),
        choice=U0Choice.parse(entry["u0_mode"]),
    )


@dataclass
class RunResult:
    """What a finished (or aborted) run produced"""
    run_dir: Path
    steps: int
    time: float
    samples: int
    status: str
    outputs: List[Path] = field(default_factory=list)
    averages: Dict[str, Any] = field(default_factory=dict)
    bound_rows: List[Dict[str, Any]] = field(default_factory=list)


class RunSimulationUseCase:
    """Time loop with sampling, checkpoints and output files"""

    def __init__(
        self,
        config: RunConfig,
        checkpoint_repo: ICheckpointRepository,
        output_repo: IRunOutputRepository,
        bus: EventBus = event_bus,
        settings: Optional[Settings] = None,
    ):
        self.config = config
        self.checkpoint_repo = checkpoint_repo
        self.output_repo = output_repo
        self.bus = bus
        self.settings = settings or get_settings()

    def execute(self, resume: Optional[Path] = None) -> RunResult:
        config = self.config
        numerics = self.settings.numerics
        configure_transforms(numerics.fft_workers)

        grid = config.grid()
        params = config.physical_params()
        run_dir = config.run_directory()
        run_dir.mkdir(parents=True, exist_ok=True)

        # 1. Initial state
        if resume is not None:
            checkpoint = self.checkpoint_repo.load(Path(resume))
            self._check_resume(checkpoint, params)
            state = checkpoint.field
            start_step = checkpoint.step
            logger.info(f"🔁 Resuming {config.label} from step {start_step} (t={state.time:.6g})")
        else:
            state = init_condition(config.initial_condition(), grid, config.seed)
            start_step = 0

        dimensionless = dimensionless_sets(params, config.u0_modes)
        sampler = DiagnosticSampler(config.d, params, config.norm_sweep(), dimensionless)
        spectra = SpectraWindows(params, config.spectra_window)
        full_window = TimeAverageAccumulator(state.time)
        skip_window = TimeAverageAccumulator(max(state.time, config.transient_skip))

        guard = blowup_guard(params, state, numerics.blowup_factor)
        integrator = EtdIntegrator(grid, params, config.dt, guard, numerics.phi_series_threshold)
        total_steps = config.steps

        manifest = self._manifest(dimensionless, status="running")
        self.output_repo.write_manifest(run_dir / MANIFEST_FILE, manifest)

        timeseries_path = run_dir / TIMESERIES_FILE
        append = resume is not None and timeseries_path.exists()
        writer = self.output_repo.open_table(timeseries_path, sampler.columns(), append=append)

        self.bus.publish(RunStarted(
            label=config.label,
            d=config.d,
            resolution=config.resolution,
            dt=config.dt,
            t_end=config.t_end,
            start_step=start_step,
            start_time=state.time,
        ))
        started = time.perf_counter()
        samples = 0
        step = start_step

        def record(current: SpectralField, index: int, write: bool = True) -> None:
            nonlocal samples
            cfl = cfl_number(current, config.dt, grid)
            sample = sampler.sample(current, index, cfl)
            full_window.add(current.time, sample.values)
            skip_window.add(current.time, sample.values)
            spectra.add(current)
            if write:
                writer.write(sample.to_row())
            samples += 1
            self.bus.publish(SampleRecorded(
                step=index, time=current.time, energy=sample.values["E_tot"], cfl=cfl, sample_index=samples,
            ))
            if cfl > config.cfl_max:
                logger.warning(f"⚠️ CFL {cfl:.3f} exceeds {config.cfl_max} at step {index}")
                self.bus.publish(CflExceeded(step=index, time=current.time, cfl=cfl, limit=config.cfl_max))

        try:
            # 2. Time loop
            record(state, step, write=not append)
            while step < total_steps:
                try:
                    state = integrator.step(state, step + 1)
                except NumericalBlowupError as e:
                    self._on_blowup(e, state, step, params, run_dir, dimensionless)
                    raise
                step += 1
                if step % config.sample_every == 0 or step == total_steps:
                    record(state, step)
                if config.snapshot_every and step % config.snapshot_every == 0:
                    self._save(state, params, step, run_dir / self.settings.output.checkpoint_pattern.format(step=step))
        finally:
            writer.close()

        # 3. Outputs
        outputs = [timeseries_path]
        outputs.append(self._save(state, params, step, run_dir / FINAL_CHECKPOINT))
        outputs.append(self.output_repo.write_table(run_dir / SPECTRA_FILE, spectra.finish(state.time), SPECTRA_COLUMNS))

        bound_rows: List[Dict[str, Any]] = []
        windows = [("full", full_window)]
        if config.transient_skip > 0:
            windows.append(("skip", skip_window))
        sweep_pairs = list(config.norm_sweep().pairs())
        for choice, dp in dimensionless.items():
            for window_name, acc in windows:
                if not acc.keys():
                    continue
                measured = measured_for_bounds(acc.averages(), dp, config.d)
                report = compare(
                    measured, dp, config.d, sweep_pairs,
                    horizon=dimensionless_time(acc.horizon(), dp),
                    constant=config.constant,
                    leading_order=config.leading_order,
                    window=window_name,
                )
                bound_rows.extend(report.to_rows())
        outputs.append(self.output_repo.write_table(run_dir / BOUNDS_FILE, bound_rows, BOUND_COLUMNS))
        outputs.append(self.output_repo.write_sidecar(run_dir / BOUNDS_FILE, bound_sidecar_lines()))

        averages = {key: value for key, value in full_window.averages().items() if not isinstance(value, np.ndarray)}
        manifest = self._manifest(dimensionless, status="completed")
        manifest.update({
            "steps": step,
            "time": state.time,
            "samples": samples,
            "averages_full": averages,
            "averaging_horizon": full_window.horizon(),
            "bounds_note": BoundReport.NOTE,
        })
        outputs.append(self.output_repo.write_manifest(run_dir / MANIFEST_FILE, manifest))

        wall = time.perf_counter() - started
        self.bus.publish(RunCompleted(
            label=config.label, steps=step, time=state.time, samples=samples,
            wall_seconds=wall, outputs=[str(p) for p in outputs],
        ))
        logger.info(f"✅ Run {config.label} finished: {step} steps, t={state.time:.6g}, {wall:.1f}s")
        return RunResult(
            run_dir=run_dir, steps=step, time=state.time, samples=samples,
            status="completed", outputs=outputs, averages=averages, bound_rows=bound_rows,
        )

    def _check_resume(self, checkpoint: Checkpoint, params: PhysicalParams) -> None:
        grid = self.config.grid()
        if not checkpoint.grid.matches(grid):
            raise ConfigurationError(f"Checkpoint grid {checkpoint.grid!r} does not match the config {grid!r}")
        stored = checkpoint.params
        for name in ("lam", "alpha", "beta", "nu", "box_length"):
            if not math.isclose(getattr(stored, name), getattr(params, name), rel_tol=1e-15, abs_tol=0.0):
                raise ConfigurationError(f"Checkpoint {name}={getattr(stored, name)} differs from config {getattr(params, name)}")

    def _save(self, state: SpectralField, params: PhysicalParams, step: int, path: Path) -> Path:
        path = self.checkpoint_repo.save(Checkpoint(field=state, params=params, step=step), path)
        self.bus.publish(CheckpointWritten(path=str(path), step=step, time=state.time))
        return path

    def _on_blowup(
        self,
        error: NumericalBlowupError,
        last_good: SpectralField,
        step: int,
        params: PhysicalParams,
        run_dir: Path,
        dimensionless: Dict[U0Choice, DimensionlessParams],
    ) -> None:
        path: Optional[Path] = None
        try:
            path = self._save(last_good, params, step, run_dir / LAST_GOOD_CHECKPOINT)
        except OutputError as e:
            logger.error(f"❌ Could not keep the last good state: {e}")
        manifest = self._manifest(dimensionless, status="blowup")
        manifest.update({"steps": step, "time": last_good.time, "error": str(error)})
        self.output_repo.write_manifest(run_dir / MANIFEST_FILE, manifest)
        self.bus.publish(BlowupDetected(
            message=str(error.args[0]) if error.args else "blowup",
            step=error.step,
            time=error.time,
            max_amplitude=error.max_amplitude,
            checkpoint_path=str(path) if path else None,
        ))

    def _manifest(self, dimensionless: Dict[U0Choice, DimensionlessParams], status: str) -> Dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "package_version": __version__,
            "label": self.config.label,
            "status": status,
            "config": self.config.to_flat(),
            "dimensionless": {choice.value: dp.to_dict() for choice, dp in dimensionless.items()},
        }


def bound_sidecar_lines() -> List[str]:
    lines = [f"# {BOUNDS_FILE}", f"# {BoundReport.NOTE}"]
    return lines + [f"{column}: {BOUND_COLUMN_DOCS.get(column, '')}" for column in BOUND_COLUMNS]


class EvaluateBoundsUseCase:
    """Right-hand-side tables for given parameters, one block per U₀ convention"""

    def __init__(
        self,
        params: PhysicalParams,
        d: int,
        sweep: NormSweep,
        modes: Sequence[U0Choice] = (U0Choice.SQRT_ALPHA_BETA, U0Choice.NU_OVER_L),
        constant: float = 1.0,
        leading_order: bool = True,
        label: str = "",
    ):
        self.params = params
        self.d = d
        self.sweep = sweep
        self.modes = list(modes)
        self.constant = constant
        self.leading_order = leading_order
        self.label = label

    def execute(self) -> pd.DataFrame:
        rows: List[Dict[str, Any]] = []
        pairs = list(self.sweep.pairs())
        for choice, dp in dimensionless_sets(self.params, self.modes).items():
            context = {
                "label": self.label,
                "u0_mode": choice.value,
                "alpha0": dp.alpha0,
                "re_nu": dp.re_nu,
                "re_beta": dp.re_beta,
                "activity": dp.activity,
            }
            for row in bound_table(dp, self.d, pairs, self.constant, self.leading_order):
                rows.append({**context, **row})
            for identifier, rhs in inverse_length_bounds(dp, self.d, pairs, self.constant, self.leading_order).items():
                rows.append({**context, "identifier": identifier, "description": f"<L/{identifier}> <= rhs", "rhs": rhs})
            if self.d == 2:
                rows.append({
                    **context,
                    "identifier": "H1_growth_rate",
                    "description": "H1(T) <= H1(0) exp(rate T)",
                    "rhs": regularity_rate(dp.alpha0, dp.re_nu, dp.re_beta, self.constant),
                })
        logger.info(f"📐 {len(rows)} bound rows for {self.label or 'custom parameters'}")
        logger.info(f"📐 Note: {BoundReport.NOTE}")
        return pd.DataFrame(rows)


def time_mean(frame: pd.DataFrame, column: str, t: str = "t") -> float:
    """Trapezoidal (1/T)∫ of a sampled column; a single sample is its own mean"""
    data = frame[[t, column]].dropna()
    if data.empty:
        return math.nan
    times = data[t].to_numpy(dtype=float)
    values = data[column].to_numpy(dtype=float)
    span = times[-1] - times[0]
    if span <= 0:
        return float(values[-1])
    return float(trapezoid(values, times) / span)


@dataclass
class _RunData:
    path: Path
    label: str
    manifest: Dict[str, Any]
    timeseries: pd.DataFrame
    spectra: pd.DataFrame
    dimensionless: Dict[U0Choice, DimensionlessParams]
    d: int


class BuildReportUseCase:
    """Plot-ready data (and optional SVG renderings) from finished runs"""

    def __init__(
        self,
        run_dirs: Sequence[Path],
        output_dir: Optional[Path],
        output_repo: IRunOutputRepository,
        renderer: Optional[IFigureRenderer] = None,
        omit_first_shell: bool = False,
        transient_skip: float = 0.0,
    ):
        if not run_dirs:
            raise OutputError("No run directories given")
        self.run_dirs = [Path(p) for p in run_dirs]
        self.output_dir = Path(output_dir) if output_dir else self.run_dirs[0] / "report"
        self.repo = output_repo
        self.renderer = renderer
        self.omit_first_shell = omit_first_shell
        self.transient_skip = transient_skip
        self.written: List[Path] = []

    def execute(self) -> List[Path]:
        runs = [self._load(path) for path in self.run_dirs]
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for run in runs:
            target = self.output_dir if len(runs) == 1 else self.output_dir / run.label
            target.mkdir(parents=True, exist_ok=True)
            self._energy(run, target)
            self._spectra(run, target)
            self._norms(run, target)
        if len(runs) > 1:
            self._overlay(runs)
        logger.info(f"✅ Report written to {self.output_dir} ({len(self.written)} files)")
        return self.written

    # --- inputs ----------------------------------------------------------

    def _load(self, path: Path) -> _RunData:
        if not path.is_dir():
            raise OutputError(f"Missing run directory: {path}")
        manifest = self.repo.read_manifest(path / MANIFEST_FILE)
        timeseries = self.repo.read_table(path / TIMESERIES_FILE)
        spectra = self.repo.read_table(path / SPECTRA_FILE)
        dimensionless = {
            U0Choice.parse(mode): dimensionless_from_manifest(entry)
            for mode, entry in manifest.get("dimensionless", {}).items()
        }
        d = int(manifest.get("config", {}).get("d", 2))
        label = str(manifest.get("label") or path.name)
        return _RunData(path, label, manifest, timeseries, spectra, dimensionless, d)

    def _window(self, frame: pd.DataFrame) -> pd.DataFrame:
        if self.transient_skip > 0 and "t" in frame:
            return frame[frame["t"] >= self.transient_skip]
        return frame

    # --- outputs ---------------------------------------------------------

    def _emit(self, frame: pd.DataFrame, path: Path, description: Dict[str, str], x: Optional[str] = None,
              columns: Sequence[str] = (), title: str = "", logx: bool = False, logy: bool = False,
              styles: Optional[Dict[str, str]] = None, note: Optional[str] = None) -> None:
        self.repo.write_table(path, frame.to_dict("records"), list(frame.columns))
        lines = [f"# {path.name}"] + ([f"# {note}"] if note else []) + [f"{column}: {description.get(column, '')}" for column in frame.columns]
        self.written.append(path)
        self.written.append(self.repo.write_sidecar(path, lines))
        if self.renderer is not None and x is not None:
            rendered = self.renderer.render(frame, x, columns, path, title=title, logx=logx, logy=logy, styles=styles)
            if rendered is not None:
                self.written.append(rendered)

    def _energy(self, run: _RunData, target: Path) -> None:
        ts = run.timeseries
        if ts.empty:
            raise OutputError(f"No samples in {run.path / TIMESERIES_FILE}")
        frame = ts[["t", "E_tot", "H0", "H1"]].copy()
        if len(frame) > 1:
            frame["dE_dt"] = np.gradient(frame["E_tot"].to_numpy(dtype=float), frame["t"].to_numpy(dtype=float))
        else:
            frame["dE_dt"] = math.nan
        self._emit(
            frame, target / "energy_timeseries.csv",
            {"t": "time", "E_tot": "total energy", "H0": "L2 norm squared", "H1": "enstrophy",
             "dE_dt": "finite-difference dE_tot/dt"},
            x="t", columns=["E_tot"], title=f"{run.label}: E_tot(t)",
        )

    def _spectra(self, run: _RunData, target: Path) -> None:
        spectra = run.spectra
        if spectra.empty:
            return
        last = spectra[spectra["window"] == spectra["window"].max()]
        last = last[last["shell"] >= (2 if self.omit_first_shell else 1)]
        energy = last[["shell", "E"]]
        self._emit(
            energy, target / "energy_spectrum.csv",
            {"shell": "integer shell k", "E": "time-averaged E(k) over the last window"},
            x="shell", columns=["E"], title=f"{run.label}: E(k)", logx=True, logy=True,
        )
        transfer = last[["shell", "T", "T_alpha", "T_beta", "dissipation", "Pi", "Pi_beta"]]
        self._emit(
            transfer, target / "energy_transfer.csv",
            {"shell": "integer shell k", "T": "nonlinear transfer T(k)", "T_alpha": "activity injection T_alpha(k)",
             "T_beta": "cubic sink T_beta(k)", "dissipation": "viscous loss", "Pi": "flux of T", "Pi_beta": "flux of T_beta"},
            x="shell", columns=["T_alpha", "T_beta"], title=f"{run.label}: T_alpha, T_beta", logx=True,
        )

    def _norms(self, run: _RunData, target: Path) -> None:
        ts = run.timeseries
        symbol = "P" if run.d == 2 else "Q"
        table: List[Dict[str, Any]] = []
        for choice, dp in run.dimensionless.items():
            columns = [c for c in ts.columns if c.endswith(f"@{choice.value}") and c.split("_")[0] == symbol]
            if not columns:
                continue
            frame = ts[["t"] + columns].copy()
            frame.insert(1, "t_prime", rescale_time_series(ts[["t"]], dp)["t"])
            selected = [c for c in columns if c.split("_")[1] in ("0", "1")]
            self._emit(
                frame[["t", "t_prime"] + selected], target / f"norms_{choice.value}.csv",
                {"t": "time", "t_prime": "dimensionless time U0 t / L",
                 **{c: f"{c.split('@')[0]} in {choice.value} units" for c in selected}},
                x="t_prime", columns=selected, title=f"{run.label}: {symbol}_(0,m), {symbol}_(1,m)", logy=True,
            )
            windowed = self._window(frame)
            for n in sorted({int(c.split("_")[1]) for c in columns}):
                previous: Optional[Tuple[float, float]] = None
                for column in sorted((c for c in columns if int(c.split("_")[1]) == n), key=_order_of):
                    m = _order_of(column)
                    mean = time_mean(windowed, column)
                    exponent = float(alpha_exponent(n, m, run.d)) * (2.0 if run.d == 2 else 1.0)
                    raw_series = windowed[column].clip(lower=0.0) ** (1.0 / exponent)
                    raw_mean = time_mean(windowed.assign(raw=raw_series), "raw")
                    row = {"u0_mode": choice.value, "n": n, "m": format_order(m), "mean": mean, "raw_mean": raw_mean,
                           "nonincreasing": None, "raw_nondecreasing": None}
                    if previous is not None:
                        row["nonincreasing"] = bool(mean <= previous[0] * (1 + 1e-12))
                        row["raw_nondecreasing"] = bool(raw_mean >= previous[1] * (1 - 1e-12))
                    previous = (mean, raw_mean)
                    table.append(row)
        if table:
            self._emit(
                pd.DataFrame(table), target / "monotonicity.csv",
                {"u0_mode": "velocity scale convention", "n": "derivative order", "m": "Lebesgue index",
                 "mean": f"time average of {symbol}_(n,m)", "raw_mean": "time average of the norm ||grad^n u||_2m",
                 "nonincreasing": "mean <= mean at the previous m", "raw_nondecreasing": "raw_mean >= raw_mean at the previous m"},
            )

    def _overlay(self, runs: List[_RunData]) -> None:
        modes = sorted({choice for run in runs for choice in run.dimensionless}, key=lambda c: c.value)
        for choice in modes:
            overlay: List[Dict[str, Any]] = []
            table: List[Dict[str, Any]] = []
            for run in runs:
                dp = run.dimensionless.get(choice)
                if dp is None or run.d != 2:
                    continue
                windowed = self._window(run.timeseries)
                p11 = mode_column("P_1_1", choice)
                measured = time_mean(windowed, p11) if p11 in windowed else math.nan
                overlay.append({
                    "label": run.label, "re_nu": dp.re_nu, "alpha0": dp.alpha0, "activity": dp.activity,
                    "P_1_1": measured, "bound": bound_P(1, 1, dp),
                })
                row = {"label": run.label, "re_nu": dp.re_nu, "alpha0": dp.alpha0}
                for column in windowed.columns:
                    if column.endswith(f"@{choice.value}") and column.split("_")[0] == "P" and column.split("_")[1] in ("0", "1"):
                        row[column.split("@")[0]] = time_mean(windowed, column)
                table.append(row)
            if not overlay:
                continue
            frame = pd.DataFrame(overlay).sort_values("re_nu")
            description = {"label": "run", "re_nu": "Re_nu", "alpha0": "alpha0", "activity": "A0",
                           "P_1_1": "measured <P_(1,1)>", "bound": "alpha0 A0 Re_nu"}
            self._emit(frame, self.output_dir / f"p11_overlay_re_nu_{choice.value}.csv", description,
                       x="re_nu", columns=["P_1_1", "bound"], title=f"<P_(1,1)> vs Re_nu ({choice.value})",
                       logx=True, logy=True, styles={"P_1_1": "k-o", "bound": "k--"}, note=BoundReport.NOTE)
            frame = frame.sort_values("alpha0")
            self._emit(frame, self.output_dir / f"p11_overlay_alpha0_{choice.value}.csv", description,
                       x="alpha0", columns=["P_1_1", "bound"], title=f"<P_(1,1)> vs alpha0 ({choice.value})",
                       logx=True, logy=True, styles={"P_1_1": "k-o", "bound": "k--"}, note=BoundReport.NOTE)
            sweep = pd.DataFrame(table).sort_values("re_nu")
            self._emit(sweep, self.output_dir / f"p0m_p1m_{choice.value}.csv",
                       {c: ("time average" if c.startswith("P_") else c) for c in sweep.columns})


def _order_of(column: str) -> Order:
    return parse_order(column.split("@")[0].split("_")[2])
