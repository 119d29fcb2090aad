#!/usr/bin/env python3
"""
nopa-bell command line: CHSH sweeps over (r, J), optimum curves, quadruplet searches and
Fock-space oracle validation, written as CSV or JSON.

Exit codes: 0 success, 2 configuration error, 3 oracle tolerance failure, 1 anything else.
"""

import argparse
import contextlib
import logging
import sys
from collections.abc import Callable, Iterable, Iterator
from pathlib import Path
from typing import Any, TextIO

import yaml
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler

from .config import config as env_config
from .errors import NopaBellError, SweepConfigError
from .models import ConvergenceRow, OptimumRecord, OracleRecord, QuadrupletRecord, SweepConfig, SweepMode, SweepRecord
from .output import write_records
from .sweep import run_convergence_report, run_optimum_curve, run_quadruplet_search, run_surface, run_validate_oracle

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_TOLERANCE_FAILURE = 3

Runner = Callable[[SweepConfig], Iterable[BaseModel]]

MODES: dict[SweepMode, tuple[Runner, type[BaseModel]]] = {
    SweepMode.SURFACE: (run_surface, SweepRecord),
    SweepMode.OPTIMUM_CURVE: (run_optimum_curve, OptimumRecord),
    SweepMode.VALIDATE_ORACLE: (run_validate_oracle, OracleRecord),
    SweepMode.QUADRUPLET_SEARCH: (lambda c: map(QuadrupletRecord.from_result, run_quadruplet_search(c)), QuadrupletRecord),
    SweepMode.CONVERGENCE_REPORT: (run_convergence_report, ConvergenceRow),
}

# argparse dest -> SweepConfig field
_FLAG_FIELDS = {
    "mode": "mode",
    "r_min": "r_min",
    "r_max": "r_max",
    "r_steps": "r_steps",
    "j_min": "j_min",
    "j_max": "j_max",
    "j_steps": "j_steps",
    "log_j": "log_j",
    "threshold": "threshold",
    "format": "output_format",
    "seed": "seed",
    "tolerance": "tolerance",
    "tail_tolerance": "tail_tolerance",
    "restarts": "restarts",
    "workers": "workers",
    "samples": "samples",
    "max_displacement": "max_displacement",
    "alpha": "alpha",
    "beta": "beta",
    "cutoffs": "cutoffs",
}


def setup_logging(level: int) -> None:
    """Rich console logging on stderr; stdout is reserved for data"""
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True)


def _complex_arg(text: str) -> dict[str, float]:
    try:
        value = complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r} (use e.g. 0.3+0.1j)")
    return {"re": value.real, "im": value.imag}


def _cutoffs_arg(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoffs must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nopa-bell", description="CHSH violation by displaced-parity measurements on the two-mode squeezed vacuum")
    parser.add_argument("--config", type=Path, help="YAML file with SweepConfig fields; flags override it")
    parser.add_argument("--mode", choices=[m.value for m in SweepMode])
    parser.add_argument("--r-min", type=float)
    parser.add_argument("--r-max", type=float)
    parser.add_argument("--r-steps", type=int)
    parser.add_argument("--j-min", type=float)
    parser.add_argument("--j-max", type=float)
    parser.add_argument("--j-steps", type=int)
    parser.add_argument("--log-j", action=argparse.BooleanOptionalAction, default=None, help="log-spaced J grid (default on)")
    threshold = parser.add_mutually_exclusive_group()
    threshold.add_argument("--threshold", type=float, help="emit only records with B above this (surface default 2.0)")
    threshold.add_argument("--no-threshold", action="store_true", help="emit every grid point")
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--output", type=Path, help="output file (default stdout)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tolerance", type=float, help="validate-oracle abs_diff tolerance")
    parser.add_argument("--tail-tolerance", type=float, help="max probability discarded by oracle cutoffs")
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--samples", type=int, help="random displacement pairs per r row (validate-oracle)")
    parser.add_argument("--max-displacement", type=float, help="max |alpha|, |beta| of random pairs (validate-oracle)")
    parser.add_argument("--alpha", type=_complex_arg, help="mode-1 displacement (convergence-report)")
    parser.add_argument("--beta", type=_complex_arg, help="mode-2 displacement (convergence-report)")
    parser.add_argument("--cutoffs", type=_cutoffs_arg, help="comma-separated increasing cutoffs (convergence-report)")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def _yaml_key_lines(text: str) -> dict[str, int]:
    """1-based line of each top-level key, for diagnostics"""
    node = yaml.compose(text)
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value}


def load_config_file(path: Path) -> tuple[dict[str, Any], dict[str, int]]:
    """
    Read a YAML sweep file

    Raises:
        SweepConfigError: unreadable file, YAML syntax error (with line) or non-mapping document
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SweepConfigError([("config", f"cannot read {path}: {e.strerror}")])
    try:
        data = yaml.safe_load(text) or {}
        lines = _yaml_key_lines(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise SweepConfigError([("config", f"YAML error: {getattr(e, 'problem', None) or e}")], line=line)
    if not isinstance(data, dict):
        raise SweepConfigError([("config", "top level must be a mapping of SweepConfig fields")], line=1)
    return data, lines


def resolve_config(args: argparse.Namespace) -> SweepConfig:
    """
    Environment defaults < YAML file < command-line flags

    Raises:
        SweepConfigError: with one (field, message) diagnostic per validation problem
    """
    merged: dict[str, Any] = {
        "seed": env_config.seed,
        "workers": env_config.workers,
        "restarts": env_config.restarts,
        "tolerance": env_config.oracle_tolerance,
        "tail_tolerance": env_config.tail_tolerance,
        "output_format": env_config.output_format,
    }
    lines: dict[str, int] = {}
    if args.config is not None:
        file_values, lines = load_config_file(args.config)
        merged.update(file_values)
    for dest, field in _FLAG_FIELDS.items():
        value = getattr(args, dest)
        if value is not None:
            merged[field] = value
    if args.no_threshold:
        merged["threshold"] = None

    try:
        return SweepConfig(**merged)
    except ValidationError as e:
        diagnostics = [(".".join(str(part) for part in err["loc"]) or "config", err["msg"]) for err in e.errors()]
        first_field = diagnostics[0][0].split(".")[0]
        raise SweepConfigError(diagnostics, line=lines.get(first_field))


@contextlib.contextmanager
def _open_output(path: Path | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as stream:
        yield stream


def run(sweep: SweepConfig, output: Path | None) -> int:
    """Execute one sweep and write its records; returns the exit code"""
    runner, record_type = MODES[sweep.mode]
    failures = 0

    def tracked(records: Iterable[BaseModel]) -> Iterator[BaseModel]:
        nonlocal failures
        for record in records:
            if isinstance(record, OracleRecord) and not record.within_tolerance:
                failures += 1
            yield record

    logger.info(f"📐 Mode {sweep.mode.value}: r in [{sweep.r_min}, {sweep.r_max}] x {sweep.r_steps}, format {sweep.output_format.value}")
    with _open_output(output) as stream:
        count = write_records(tracked(runner(sweep)), record_type, sweep, stream)
    logger.info(f"✓ Wrote {count} record(s) to {output or 'stdout'}")

    if failures:
        logger.error(f"❌ {failures} oracle comparison(s) exceeded tolerance {sweep.tolerance}")
        return EXIT_TOLERANCE_FAILURE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.getLevelNamesMapping()[args.log_level] if args.log_level else env_config.effective_log_level
    setup_logging(level)

    env_errors = env_config.validate()
    if env_errors:
        logger.error("❌ Configuration errors:")
        for error in env_errors:
            logger.error(f"  - {error}")
        return EXIT_CONFIG_ERROR

    try:
        sweep = resolve_config(args)
    except SweepConfigError as e:
        where = f" (line {e.line})" if e.line is not None else ""
        logger.error(f"❌ Invalid sweep configuration{where}:")
        for field, message in e.diagnostics:
            logger.error(f"  - {field}: {message}")
        return EXIT_CONFIG_ERROR

    try:
        return run(sweep, args.output)
    except NopaBellError as e:
        logger.error(f"❌ {e}")
        return EXIT_FAILURE
    except OSError as e:
        logger.error(f"❌ Output error: {e}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"❌ Unexpected error: {e}")
        logger.debug("Traceback:", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
