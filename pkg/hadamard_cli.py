"""
Hadamard means command-line interface

Subcommands:
    simulate  Run a contamination experiment and write CSV (and optional SVG)
    means     Read a point file and print each requested mean
    check     Run the geometric property suites and print a pass/fail table
    bound     Monte-Carlo check of the law of large numbers bound

Exit codes: 0 success, 1 invalid input, 2 numeric or convergence failure,
3 failed check.

Usage:
    python hadamard_cli.py simulate --experiment spd-diagonal --epsilon 0.05 --n-max 5000 --seed 7
    python hadamard_cli.py check --space spd --cases 1000
    python hadamard_cli.py bound --generator euclidean-hetero --reps 500
"""

import argparse
import logging
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from config import get_config
from models.book_point import BookPoint
from models.experiment import parse_estimators
from models.trace import EstimatorTag
from services.bounds import DEFAULT_N_GRID, monte_carlo_bound_check
from services.config_file import config_from_values, load_config
from services.errors import CapacityError, CheckFailedError, DomainError, NumericError
from services.frechet import OracleSpace, frechet_oracle, lim_palfia
from services.geometry.euclidean import EuclideanSpace
from services.geometry.open_book import BookSpace
from services.geometry.properties import check_metric_axioms
from services.geometry.spd import SpdSpace
from services.harness import run_experiment
from services.means import es_sahib_mean, hansen_mean, inductive_mean, resampled_mean
from services.reporting import emit_csv, emit_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2
EXIT_CHECK_FAILED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hadamard_cli',
        description='Means and contamination experiments on Hadamard spaces'
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    sim = sub.add_parser('simulate', help='Run a contamination experiment')
    sim.add_argument('--config', help='Experiment file (key = value)')
    sim.add_argument('--experiment', choices=['spd-diagonal', 'open-book', 'spd_diagonal', 'open_book'])
    sim.add_argument('--epsilon', type=float, help='Contamination level in [0, 1]')
    sim.add_argument('--n-max', type=int, help='Sequence length')
    sim.add_argument('--seed', type=int, help='Base seed (overrides HADAMARD_SEED and the file)')
    sim.add_argument('--estimators', help='Comma-separated: inductive,hansen,resampled,lim_palfia,es_sahib')
    sim.add_argument('--replications', type=int)
    sim.add_argument('--lp-exponent', type=float, help='Lim–Palfia budget exponent')
    sim.add_argument('--trace-stride', type=int)
    sim.add_argument('--output-dir', help='Directory for CSV/SVG output')
    sim.add_argument('--emit-svg', action='store_true', help='Also write SVG line charts')
    sim.add_argument('--workers', type=int, default=1, help='Worker processes for replications')

    means = sub.add_parser('means', help='Print means of a point file')
    means.add_argument('--space', required=True, choices=['euclidean', 'spd', 'open-book'])
    means.add_argument('--points', required=True, help='Point file, one point per line')
    means.add_argument('--estimators', default='inductive,hansen,resampled,lim_palfia',
                       help='Comma-separated estimator list')
    means.add_argument('--seed', type=int, default=0, help='Seed of the resampled mean')
    means.add_argument('--lp-steps', type=int, help='Lim–Palfia step budget (default n²)')
    means.add_argument('--sheets', type=int, default=3, help='Sheets of the open book')

    check = sub.add_parser('check', help='Geometric property suites')
    check.add_argument('--space', default='all', choices=['all', 'euclidean', 'spd', 'open-book'])
    check.add_argument('--cases', type=int, default=1000)
    check.add_argument('--dim', type=int, help='Dimension (spine dimension for open-book)')
    check.add_argument('--tol', type=float, default=1e-8)
    check.add_argument('--seed', type=int, default=0)

    bound = sub.add_parser('bound', help='Monte-Carlo law of large numbers bound check')
    bound.add_argument('--generator', default='euclidean-hetero',
                       choices=['euclidean-hetero', 'spd-commuting-hetero', 'euclidean-growing'])
    bound.add_argument('--reps', type=int, default=500)
    bound.add_argument('--grid', default=','.join(str(n) for n in DEFAULT_N_GRID),
                       help='Comma-separated sample sizes')
    bound.add_argument('--seed', type=int, default=0)
    bound.add_argument('--noise', type=float, default=1.0)
    bound.add_argument('--drift', type=float, default=1.0)

    return parser


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def resolve_seed(flag: Optional[int], file_seed: Optional[int]) -> int:
    """Flag, then HADAMARD_SEED, then the file value, then 0."""
    if flag is not None:
        return flag
    env_seed = get_config().base_seed_override()
    if env_seed is not None:
        return env_seed
    return file_seed if file_seed is not None else 0


def cmd_simulate(args) -> int:
    cfg = get_config()
    overrides = {
        'experiment': args.experiment,
        'epsilon': args.epsilon,
        'n_max': args.n_max,
        'estimators': args.estimators,
        'replications': args.replications,
        'lp_budget_exponent': args.lp_exponent,
        'trace_stride': args.trace_stride,
    }
    if args.config:
        config = load_config(args.config, overrides)
    else:
        config = config_from_values(overrides)

    seed = resolve_seed(args.seed, config.base_seed if args.config else None)
    if seed != config.base_seed:
        values = config.to_dict()
        values['base_seed'] = seed
        config = config_from_values(values)

    result = run_experiment(config, max_workers=args.workers)

    out_dir = args.output_dir or cfg.OUTPUT_DIR
    stem = f"{config.experiment.value}_eps{config.epsilon:g}_seed{config.base_seed}"
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    emit_csv(result, csv_path)
    try:
        with open(os.path.join(out_dir, f"{stem}.cfg"), 'w', encoding='utf-8') as f:
            f.write(config.to_text())
    except OSError as e:
        raise NumericError(f"Could not write config echo: {e}") from e

    print(f"[OK] {len(result.rows)} rows written to {csv_path}")
    if args.emit_svg:
        for path in emit_svg(result.rows, out_dir, suffix=f"_eps{config.epsilon:g}"):
            print(f"[OK] chart {path}")
    return EXIT_OK


# ----------------------------------------------------------------------
# means
# ----------------------------------------------------------------------

def read_points(path: str, space_name: str) -> List:
    """
    Parse a point file: one point per line, '#' comments.

    euclidean: coordinates; spd: the dim² entries row by row;
    open-book: sheet t x_1 .. x_d.
    """
    try:
        with open(path, encoding='utf-8') as f:
            lines = f.readlines()
    except OSError as e:
        raise DomainError(f"Cannot read point file {path}: {e}", field="points")

    points = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].replace(',', ' ').strip()
        if not line:
            continue
        try:
            values = [float(v) for v in line.split()]
        except ValueError:
            raise DomainError(f"Line {lineno} of {path} is not numeric", field="points")

        if space_name == 'euclidean':
            points.append(np.array(values))
        elif space_name == 'spd':
            dim = int(round(math.sqrt(len(values))))
            if dim * dim != len(values):
                raise DomainError(f"Line {lineno}: {len(values)} entries is not a square matrix", field="points")
            points.append(np.array(values).reshape(dim, dim))
        else:
            if len(values) < 2 or values[0] != int(values[0]):
                raise DomainError(f"Line {lineno}: expected 'sheet t x...'", field="points")
            points.append(BookPoint(sheet=int(values[0]), t=values[1], spine=tuple(values[2:])))

    if not points:
        raise DomainError(f"No points in {path}", field="points")
    return points


def _space_for(space_name: str, points: Sequence, sheets: int):
    if space_name == 'euclidean':
        return EuclideanSpace(dim=points[0].shape[0]), OracleSpace.EUCLIDEAN
    if space_name == 'spd':
        return SpdSpace(dim=points[0].shape[0]), OracleSpace.SPD_COMMUTING
    space = BookSpace(k=sheets, d=len(points[0].spine))
    return space, OracleSpace.OPEN_BOOK


def _format_point(p) -> str:
    if isinstance(p, BookPoint):
        return str(p)
    return np.array2string(np.asarray(p), precision=10, separator=', ').replace('\n', '')


def cmd_means(args) -> int:
    points = read_points(args.points, args.space)
    space, oracle = _space_for(args.space, points, args.sheets)
    if args.space == 'open-book':
        points = [space.canonicalize(p) for p in points]
    tags = parse_estimators(args.estimators)

    print(f"{len(points)} points on {space.name}")
    for tag in tags:
        if tag is EstimatorTag.INDUCTIVE:
            value = inductive_mean(space, points).final
        elif tag is EstimatorTag.HANSEN:
            value = hansen_mean(space, points, record_at=[len(points)]).final
        elif tag is EstimatorTag.RESAMPLED:
            value = resampled_mean(space, points, seed=args.seed).final
        elif tag is EstimatorTag.LIM_PALFIA:
            result = lim_palfia(space, points, total_steps=args.lp_steps)
            value = result.estimate
            print(f"  lim_palfia certificate: {result.error_certificate:.6g}")
        else:
            value = es_sahib_mean(space, points)
        print(f"  {tag.value}: {_format_point(value)}")

    book = space if isinstance(space, BookSpace) else None
    try:
        print(f"  frechet (exact): {_format_point(frechet_oracle(oracle, points, space=book))}")
    except DomainError as e:
        print(f"  frechet (exact): not available ({e})")
    return EXIT_OK


# ----------------------------------------------------------------------
# check
# ----------------------------------------------------------------------

def check_suites(space_name: str, dim: Optional[int]):
    if space_name == 'euclidean':
        return [EuclideanSpace(dim or 1)] if dim else [EuclideanSpace(1), EuclideanSpace(3)]
    if space_name == 'spd':
        return [SpdSpace(dim)] if dim else [SpdSpace(2), SpdSpace(5)]
    if space_name == 'open-book':
        return [BookSpace(3, dim)] if dim is not None else [BookSpace(3, 1), BookSpace(4, 2)]
    return check_suites('euclidean', None) + check_suites('spd', None) + check_suites('open-book', None)


def _label(space) -> str:
    if isinstance(space, BookSpace):
        return f"open_book k={space.k} d={space.d}"
    return f"{space.name} dim={space.dim}"


def cmd_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    failed = []

    print("=" * 70)
    print(f"{'space':<22}{'property':<22}{'max violation':>16}   result")
    print("=" * 70)
    for space in check_suites(args.space, args.dim):
        label = _label(space)
        report = check_metric_axioms(space, lambda s=space: s.sample(rng), args.cases, args.tol, rng=rng)
        for name, value, ok in report.as_rows():
            print(f"{label:<22}{name:<22}{value:>16.3e}   {'[OK]' if ok else '[FAIL]'}")
        failed += [f"{label}:{item}" for item in report.failed_items]
    print("=" * 70)

    if failed:
        raise CheckFailedError("Geometric property check failed", failed_items=failed)
    print("[OK] all properties within tolerance")
    return EXIT_OK


# ----------------------------------------------------------------------
# bound
# ----------------------------------------------------------------------

def cmd_bound(args) -> int:
    try:
        grid = [int(v) for v in args.grid.split(',') if v.strip()]
    except ValueError:
        raise DomainError(f"Malformed grid {args.grid!r}", field="grid")

    report = monte_carlo_bound_check(args.generator, n_grid=grid, replications=args.reps,
                                     base_seed=args.seed, drift=args.drift, noise=args.noise)
    print("=" * 70)
    print(f"Generator: {report.generator}  replications: {report.replications}")
    print(f"{'n':>8}{'empirical':>16}{'3·sem':>14}{'bound':>16}   result")
    print("=" * 70)
    for row in report.rows:
        print(f"{row.n:>8}{row.empirical:>16.6e}{3 * row.sem:>14.3e}{row.bound:>16.6e}   "
              f"{'[OK]' if row.passed else '[FAIL]'}")
    print("=" * 70)
    if report.cesaro_p is not None:
        print(f"Cesàro decay exponent p ≈ {report.cesaro_p:.3f}")
    if report.strong_law is not None:
        print(f"Support growth q = {report.growth_q}: almost sure convergence condition "
              f"{'holds' if report.strong_law else 'does not hold'}")

    if not report.passed:
        raise CheckFailedError("Law of large numbers bound violated", failed_items=report.failed_items)
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'means': cmd_means,
    'check': cmd_check,
    'bound': cmd_bound,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and map library errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    cfg = get_config()
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, cfg.LOG_LEVEL, logging.INFO),
        format='%(levelname)s: %(name)s: %(message)s'
    )

    try:
        cfg.validate()
        return COMMANDS[args.command](args)
    except CheckFailedError as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (DomainError, CapacityError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
