"""
🚀 Main Entry Point
Command line for runs, the run registry, reports and bound tables
"""
import argparse
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
import sentry_sdk
from loguru import logger

from . import __version__
from .application.use_cases import BuildReportUseCase, EvaluateBoundsUseCase, RunSimulationUseCase, dimensionless_sets
from .config.registry import REGISTRY, lookup
from .config.run_config import registry, resolve_run_config
from .config.settings import get_settings
from .domain.entities import BoundReport
from .domain.errors import IttError
from .domain.events import (
    BlowupDetected,
    CflExceeded,
    CheckpointWritten,
    EventBus,
    RunCompleted,
    RunStarted,
    SampleRecorded,
    event_bus,
)
from .domain.value_objects import NormSweep, PhysicalParams, U0Choice
from .infrastructure.logging.logger_config import setup_logging
from .infrastructure.repositories.checkpoint_repository import BinaryCheckpointRepository
from .infrastructure.repositories.csv_repositories import CsvRunOutputRepository

PROGRESS_EVERY = 10

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def init_monitoring() -> bool:
    """Initialize Sentry when a DSN is configured"""
    settings = get_settings()
    dsn = settings.monitoring.dsn
    if not dsn:
        return False
    sentry_sdk.init(
        dsn=dsn,
        environment=settings.monitoring.environment or settings.environment,
        release=f"ittdns@{__version__}",
        traces_sample_rate=settings.monitoring.traces_sample_rate,
    )
    logger.debug("🛰️ Sentry initialized")
    return True


# ---------------------------------------------------------------------------
# Event handlers
# ---------------------------------------------------------------------------

def _on_started(event: RunStarted) -> None:
    logger.info(
        f"🚀 Run {event.label}: d={event.d}, N={event.resolution}, dt={event.dt:g}, "
        f"t_end={event.t_end:g} (from step {event.start_step})"
    )


def _on_sample(event: SampleRecorded) -> None:
    line = f"📊 step {event.step} t={event.time:.6g} E_tot={event.energy:.6g} C={event.cfl:.3f}"
    if event.sample_index % PROGRESS_EVERY == 0:
        logger.info(line)
    else:
        logger.debug(line)


def _on_cfl(event: CflExceeded) -> None:
    logger.debug(f"⚠️ CFL limit {event.limit} passed at t={event.time:.6g}")


def _on_checkpoint(event: CheckpointWritten) -> None:
    logger.info(f"💾 Checkpoint {event.path} (step {event.step})")


def _on_blowup(event: BlowupDetected) -> None:
    logger.error(
        f"❌ Blowup at step {event.step}, t={event.time}: {event.message}; "
        f"last good state: {event.checkpoint_path}"
    )


def _on_completed(event: RunCompleted) -> None:
    logger.info(f"✅ {event.label}: {event.samples} samples in {event.wall_seconds:.1f}s")


def subscribe_log_handlers(bus: EventBus = event_bus) -> None:
    bus.subscribe("RunStarted", _on_started)
    bus.subscribe("SampleRecorded", _on_sample)
    bus.subscribe("CflExceeded", _on_cfl)
    bus.subscribe("CheckpointWritten", _on_checkpoint)
    bus.subscribe("BlowupDetected", _on_blowup)
    bus.subscribe("RunCompleted", _on_completed)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip().lower()] = value.strip()
    return values


def cmd_run(args: argparse.Namespace) -> int:
    overrides: Dict[str, Any] = _parse_assignments(args.set)
    for key in ("resolution", "dt", "t_end", "seed", "output_dir"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    config = resolve_run_config(args.config, args.label, overrides, args.full_resolution)
    subscribe_log_handlers()
    use_case = RunSimulationUseCase(config, BinaryCheckpointRepository(), CsvRunOutputRepository())
    result = use_case.execute(resume=args.resume)
    print(result.run_dir)
    return EXIT_OK


def cmd_registry(args: argparse.Namespace) -> int:
    if args.label:
        config = registry(args.label, full_resolution=args.full_resolution)
        for key, value in config.to_flat().items():
            print(f"{key} = {value}")
        return EXIT_OK

    rows: List[Dict[str, Any]] = []
    for entry in REGISTRY.values():
        row: Dict[str, Any] = entry.to_dict()
        params = entry.physical_params(args.box_length)
        for choice, dp in dimensionless_sets(params, list(U0Choice)).items():
            tag = "U0=sqrt(a/b)" if choice is U0Choice.SQRT_ALPHA_BETA else "U0=nu/L"
            row[f"alpha0 [{tag}]"] = dp.alpha0
            row[f"Re_nu [{tag}]"] = dp.re_nu
            row[f"Re_beta [{tag}]"] = dp.re_beta
        rows.append(row)
    with pd.option_context("display.max_columns", None, "display.width", 200):
        print(pd.DataFrame(rows).to_string(index=False, float_format=lambda v: f"{v:.4g}"))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    renderer = None
    if get_settings().output.render_figures and not args.no_figures:
        from .infrastructure.plotting.figure_service import MatplotlibFigureRenderer
        renderer = MatplotlibFigureRenderer()
    use_case = BuildReportUseCase(
        run_dirs=[Path(p) for p in args.run_dirs],
        output_dir=Path(args.out) if args.out else None,
        output_repo=CsvRunOutputRepository(),
        renderer=renderer,
        omit_first_shell=args.omit_first_shell,
        transient_skip=args.transient_skip,
    )
    for path in use_case.execute():
        print(path)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    if args.label:
        entry = lookup(args.label)
        params = entry.physical_params(args.box_length)
        d, label = entry.d, entry.label
    else:
        params = PhysicalParams(lam=args.lam, alpha=args.alpha, beta=args.beta, nu=args.nu, box_length=args.box_length)
        d, label = args.d, "custom"
    modes = [U0Choice.parse(mode) for mode in args.u0_mode] if args.u0_mode else list(U0Choice)
    table = EvaluateBoundsUseCase(
        params,
        d,
        NormSweep(args.n_max, args.m_max, not args.no_infinity),
        modes=modes,
        constant=args.constant,
        leading_order=not args.full,
        label=label,
    ).execute()
    if args.csv:
        CsvRunOutputRepository().write_table(Path(args.csv), table.to_dict("records"), list(table.columns))
        logger.info(f"📄 Bound table written to {args.csv}")
    columns = [c for c in ("u0_mode", "identifier", "rhs", "description") if c in table.columns]
    with pd.option_context("display.max_rows", None, "display.width", 200):
        print(table[columns].to_string(index=False, float_format=lambda v: f"{v:.6g}"))
    print(f"\n{BoundReport.NOTE}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ittdns", description="Incompressible Toner-Tu DNS, diagnostics and bounds")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="DEBUG logging")
    parser.add_argument("--log-file", default=None, help="Log file path ('' disables)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a simulation")
    run.add_argument("--config", help="Flat key = value config file")
    run.add_argument("--label", help="Registered run label (A1-A8, F1-F7, B1-B3) or a custom name")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override any config key")
    run.add_argument("--resolution", "-N", type=int, default=None)
    run.add_argument("--dt", type=float, default=None)
    run.add_argument("--t-end", dest="t_end", type=float, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--output-dir", dest="output_dir", default=None)
    run.add_argument("--full-resolution", action="store_true", help="Use the registered (large) resolution")
    run.add_argument("--resume", type=Path, default=None, help="Checkpoint to restart from")
    run.set_defaults(handler=cmd_run)

    reg = sub.add_parser("registry", help="List registered runs or show one as a config")
    reg.add_argument("label", nargs="?")
    reg.add_argument("--full-resolution", action="store_true")
    reg.add_argument("--box-length", type=float, default=2.0 * math.pi)
    reg.set_defaults(handler=cmd_registry)

    rep = sub.add_parser("report", help="Plot-ready data from run directories")
    rep.add_argument("run_dirs", nargs="+")
    rep.add_argument("--out", default=None, help="Report directory (default: <first run>/report)")
    rep.add_argument("--omit-first-shell", action="store_true")
    rep.add_argument("--transient-skip", type=float, default=0.0, help="Average from this time on")
    rep.add_argument("--no-figures", action="store_true", help="Skip SVG renderings")
    rep.set_defaults(handler=cmd_report)

    bnd = sub.add_parser("bounds", help="Right-hand sides of the time-averaged estimates")
    bnd.add_argument("--label", help="Registered run label")
    bnd.add_argument("--d", type=int, choices=(2, 3), default=2)
    bnd.add_argument("--lam", type=float, default=1.0)
    bnd.add_argument("--alpha", type=float, default=1.0)
    bnd.add_argument("--beta", type=float, default=1.0)
    bnd.add_argument("--nu", type=float, default=0.1)
    bnd.add_argument("--box-length", type=float, default=2.0 * math.pi)
    bnd.add_argument("--n-max", type=int, default=4)
    bnd.add_argument("--m-max", type=int, default=16)
    bnd.add_argument("--no-infinity", action="store_true")
    bnd.add_argument("--u0-mode", action="append", choices=[c.value for c in U0Choice])
    bnd.add_argument("--constant", type=float, default=1.0)
    bnd.add_argument("--full", action="store_true", help="Full instead of leading-order variants")
    bnd.add_argument("--csv", default=None, help="Also write the table as CSV")
    bnd.set_defaults(handler=cmd_bounds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(level="DEBUG" if args.verbose else None, file_path=args.log_file)
    init_monitoring()

    try:
        return args.handler(args)
    except argparse.ArgumentTypeError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except IttError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("🔌 Interrupted by user")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"❌ Unexpected failure: {e}")
        sentry_sdk.capture_exception(e)
        return EXIT_FAILURE


def run_cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
