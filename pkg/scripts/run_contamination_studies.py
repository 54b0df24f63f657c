"""
Run every contamination level of both simulation studies.

Diagonal SPD sequence at epsilon 0, 0.02, 0.05, 0.10 and the open book
sequence at epsilon 0, 0.02, 0.30, 0.35. Writes one CSV (and config echo)
per level plus SVG charts, then prints the final distances per estimator.

Usage:
    python scripts/run_contamination_studies.py [--n-max 5000] [--replications 20] [--workers 4]
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from config import get_config
from models.experiment import study_presets
from services.errors import HadamardError
from services.harness import run_experiment
from services.reporting import emit_csv, emit_svg


def summarize(result):
    """Replication mean of the final intrinsic distance per estimator."""
    n_max = result.config_echo.n_max
    estimators = sorted({row.estimator for row in result.rows})
    for estimator in estimators:
        values = result.values(estimator, 'intrinsic', n_max)
        print(f"    {estimator:<12} d(estimate, limit) at n={n_max}: {np.nanmean(values):.4f}")


def main():
    cfg = get_config()
    parser = argparse.ArgumentParser(description='Reproduce both contamination studies')
    parser.add_argument('--n-max', type=int, default=None, help='Sequence length')
    parser.add_argument('--replications', type=int, default=None, help='Replications per level')
    parser.add_argument('--seed', type=int, default=0, help='Base seed')
    parser.add_argument('--workers', type=int, default=1, help='Worker processes')
    parser.add_argument('--output-dir', default=cfg.OUTPUT_DIR, help='Output directory')
    parser.add_argument('--no-svg', action='store_true', help='Skip chart output')
    args = parser.parse_args()

    logging.basicConfig(level=getattr(logging, cfg.LOG_LEVEL, logging.INFO), format='%(levelname)s: %(message)s')

    presets = study_presets(n_max=args.n_max, replications=args.replications, base_seed=args.seed)

    print("=" * 70)
    print(f"Running {len(presets)} experiment configurations")
    print("=" * 70)

    failures = 0
    for config in presets:
        label = f"{config.experiment.value}_eps{config.epsilon:g}"
        print(f"\n{label} (n_max={config.n_max}, replications={config.replications})")
        try:
            result = run_experiment(config, max_workers=args.workers)
            emit_csv(result, os.path.join(args.output_dir, f"{label}.csv"))
            with open(os.path.join(args.output_dir, f"{label}.cfg"), 'w', encoding='utf-8') as f:
                f.write(config.to_text())
            if not args.no_svg:
                emit_svg(result.rows, args.output_dir, suffix=f"_eps{config.epsilon:g}")
            summarize(result)
            print(f"  [OK] {label}")
        except (HadamardError, OSError) as e:
            failures += 1
            print(f"  [FAIL] {label}: {e}")

    print("\n" + "=" * 70)
    if failures:
        print(f"[FAIL] {failures} configuration(s) failed")
        return 2
    print(f"[OK] All results written to {args.output_dir}")
    print("=" * 70)
    return 0


if __name__ == "__main__":
    sys.exit(main())
