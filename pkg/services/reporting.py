"""
CSV and SVG output for experiment results.

The CSV is the single source of truth; the charts are derived from its rows.
"""

import csv
import logging
import os
from collections import defaultdict
from typing import Iterable, List

import numpy as np

from models.experiment import RunResult, RunRow
from services.errors import NumericError

logger = logging.getLogger(__name__)

CSV_HEADER = ["experiment", "estimator", "replication", "n", "metric", "value"]


def format_value(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(value), '.17g')


def emit_csv(result: RunResult, path: str):
    """
    Write rows in RunResult order with the fixed header.

    Raises:
        NumericError: If the file cannot be written
    """
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for row in result.rows:
                writer.writerow([row.experiment, row.estimator, row.replication, row.n,
                                 row.metric, format_value(row.value)])
    except OSError as e:
        raise NumericError(f"Could not write CSV to {path}: {e}") from e

    logger.info(f"Wrote {len(result.rows)} rows to {path}")


def read_csv(path: str) -> List[RunRow]:
    """Rows of a CSV written by emit_csv."""
    try:
        with open(path, encoding='utf-8', newline='') as f:
            reader = csv.DictReader(f)
            return [
                RunRow(
                    experiment=r['experiment'],
                    estimator=r['estimator'],
                    replication=int(r['replication']),
                    n=int(r['n']),
                    metric=r['metric'],
                    value=float(r['value'])
                )
                for r in reader
            ]
    except OSError as e:
        raise NumericError(f"Could not read CSV from {path}: {e}") from e


def emit_svg(rows: Iterable[RunRow], out_dir: str, suffix: str = "") -> List[str]:
    """
    Line charts of the replication mean, one per (experiment, metric).

    One series per estimator, n on a log axis. NaN rows are skipped.

    Returns:
        Paths of the written SVG files
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    series = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    for row in rows:
        if np.isfinite(row.value):
            series[(row.experiment, row.metric)][row.estimator][row.n].append(row.value)

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for (experiment, metric), by_estimator in sorted(series.items()):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for estimator, by_n in sorted(by_estimator.items()):
            ns = sorted(by_n)
            ax.plot(ns, [np.mean(by_n[n]) for n in ns], label=estimator, linewidth=1.2)
        ax.set_xscale('log')
        ax.set_xlabel('n')
        ax.set_ylabel(f'{metric} distance to limit')
        ax.set_title(f'{experiment}{suffix}')
        ax.legend()
        ax.grid(True, which='both', alpha=0.3)

        path = os.path.join(out_dir, f"{experiment}_{metric}{suffix}.svg")
        try:
            fig.savefig(path, format='svg')
        except OSError as e:
            raise NumericError(f"Could not write SVG to {path}: {e}") from e
        finally:
            plt.close(fig)
        written.append(path)
        logger.info(f"Wrote chart {path}")

    return written
