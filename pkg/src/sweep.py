"""
Parameter sweeps behind the CLI modes.

Every runner yields records in deterministic grid order. Grid points are evaluated on a thread
pool whose map() keeps input order, so the worker count never changes the output.
"""

import concurrent.futures
import logging
import math
from collections.abc import Callable, Iterable, Iterator
from typing import TypeVar

import numpy as np

from .bell_optimizer import chsh_paper_form, optimal_J, optimize_quadruplet
from .errors import NopaBellError
from .fock_oracle import convergence_report, oracle_correlation, required_cutoff
from .gaussian_core import parity_correlation
from .models import BellResult, ConvergenceRow, OptimumRecord, OracleRecord, SweepConfig, SweepMode, SweepRecord

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def r_grid(config: SweepConfig) -> list[float]:
    return np.linspace(config.r_min, config.r_max, config.r_steps).tolist()


def j_grid(config: SweepConfig) -> list[float]:
    if config.log_j:
        return np.geomspace(config.j_min, config.j_max, config.j_steps).tolist()
    return np.linspace(config.j_min, config.j_max, config.j_steps).tolist()


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> Iterator[R]:
    """map() on a thread pool when workers > 1; results always come back in input order"""
    if workers <= 1:
        yield from map(fn, items)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, items)


def _passes(config: SweepConfig, b: float) -> bool:
    return config.threshold is None or b > config.threshold


def _require_mode(config: SweepConfig, mode: SweepMode) -> None:
    if config.mode is not mode:
        raise ValueError(f"Runner for {mode.value} called with mode {config.mode.value}")


def run_surface(config: SweepConfig) -> Iterator[SweepRecord]:
    """B = chsh_paper_form(r, J) over the grid, row-major in (r, J), filtered by threshold"""
    _require_mode(config, SweepMode.SURFACE)
    points = [(r, j) for r in r_grid(config) for j in j_grid(config)]
    emitted = 0
    for (r, j), result in zip(points, ordered_map(lambda p: chsh_paper_form(*p), points, config.workers), strict=True):
        if _passes(config, result.B):
            emitted += 1
            yield SweepRecord(r=r, J=j, B=result.B, violates=result.violates_local_bound)
    logger.info(f"✓ Surface: {emitted}/{len(points)} grid points emitted (threshold={config.threshold})")


def _e2r_product(j: float, r: float) -> float:
    return math.exp(math.log(j) + 2.0 * r) if j > 0.0 else 0.0


def run_optimum_curve(config: SweepConfig) -> Iterator[OptimumRecord]:
    """(J*, B*) for each r on the grid, with J* e^{2r} to expose the ln2/3 asymptote"""
    _require_mode(config, SweepMode.OPTIMUM_CURVE)
    rs = r_grid(config)
    for r, (j_star, result) in zip(rs, ordered_map(optimal_J, rs, config.workers), strict=True):
        if not _passes(config, result.B):
            continue
        yield OptimumRecord(
            r=r,
            J=j_star,
            B=result.B,
            violates=result.violates_local_bound,
            J_star=j_star,
            B_star=result.B,
            J_star_times_e2r=_e2r_product(j_star, r),
        )


def random_displacement_pairs(seed: int, row: int, samples: int, max_displacement: float) -> list[tuple[complex, complex]]:
    """Uniform points in the disk |z| <= max_displacement, reproducible per (seed, row)"""
    rng = np.random.default_rng([seed, row])
    radius = max_displacement * np.sqrt(rng.uniform(0.0, 1.0, (samples, 2)))
    angle = rng.uniform(0.0, 2.0 * math.pi, (samples, 2))
    points = radius * np.exp(1j * angle)
    return [(complex(a), complex(b)) for a, b in points]


def _compare(config: SweepConfig, r: float, alpha: complex, beta: complex) -> OracleRecord:
    closed_form = parity_correlation(r, alpha, beta)
    base = {
        "r": r,
        "alpha_re": alpha.real,
        "alpha_im": alpha.imag,
        "beta_re": beta.real,
        "beta_im": beta.imag,
        "closed_form": closed_form,
    }
    try:
        cutoff = required_cutoff(r, config.tail_tolerance)
        oracle = oracle_correlation(r, alpha, beta, cutoff=cutoff, tolerance=config.tail_tolerance)
    except NopaBellError as e:
        logger.warning(f"⚠️  Oracle failed at r={r}, alpha={alpha}, beta={beta}: {e}")
        return OracleRecord(**base, cutoff=None, oracle=None, abs_diff=None, within_tolerance=False, error=str(e))
    abs_diff = abs(closed_form - oracle)
    return OracleRecord(**base, cutoff=cutoff, oracle=oracle, abs_diff=abs_diff, within_tolerance=abs_diff <= config.tolerance)


def run_validate_oracle(config: SweepConfig) -> Iterator[OracleRecord]:
    """
    Closed form against the Fock-space oracle on `samples` random displacement pairs per r row

    Callers treat any record with within_tolerance False as a failed validation.
    """
    _require_mode(config, SweepMode.VALIDATE_ORACLE)
    tasks = [
        (r, alpha, beta)
        for row, r in enumerate(r_grid(config))
        for alpha, beta in random_displacement_pairs(config.seed, row, config.samples, config.max_displacement)
    ]
    failures = 0
    for record in ordered_map(lambda task: _compare(config, *task), tasks, config.workers):
        if not record.within_tolerance:
            failures += 1
        yield record
    if failures:
        logger.warning(f"⚠️  Oracle validation: {failures}/{len(tasks)} comparison(s) outside tolerance {config.tolerance}")
    else:
        logger.info(f"✓ Oracle validation: {len(tasks)} comparison(s) within tolerance {config.tolerance}")


def run_quadruplet_search(config: SweepConfig) -> Iterator[BellResult]:
    """Best general quadruplet per r row; the search seed is (seed, row) so runs are reproducible"""
    _require_mode(config, SweepMode.QUADRUPLET_SEARCH)
    for row, r in enumerate(r_grid(config)):
        result = optimize_quadruplet(r, restarts=config.restarts, seed=[config.seed, row], workers=config.workers)
        if _passes(config, result.B):
            yield result


def run_convergence_report(config: SweepConfig) -> Iterator[ConvergenceRow]:
    """Oracle convergence in the cutoff at (r_min, alpha, beta)"""
    _require_mode(config, SweepMode.CONVERGENCE_REPORT)
    yield from convergence_report(config.r_min, config.alpha, config.beta, config.cutoffs)
