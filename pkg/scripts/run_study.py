"""Desk-scale sampling study: contract random coefficient vectors over a grid.

    python3 scripts/run_study.py --n-list 5,6,7,8,9,10,11,12 --k-list 3,4,5 --out study.csv
"""

import argparse
import sys
import time

from objcontract.bench import StudyGrid, run_study, summarize
from objcontract.cli import _int_list, _sampler_list
from objcontract.contraction import ContractionConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-list", type=_int_list, default=(5, 6, 7, 8, 9, 10, 11, 12))
    ap.add_argument("--k-list", type=_int_list, default=(3, 4, 5))
    ap.add_argument("--samplers", type=_sampler_list, default=("uniform", "oom", "log"))
    ap.add_argument("--samples-per-cell", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="study.csv")
    args = ap.parse_args()

    grid = StudyGrid(args.samplers, args.n_list, args.k_list, args.samples_per_cell, args.seed)
    start = time.monotonic()

    def progress(r):
        print(f"{time.monotonic() - start:8.1f}s {r.sampler:>18} n={r.n:<3} k={r.k} #{r.sample_index} "
              f"{r.status:<17} gamma%={float(100 * r.gamma):7.2f} {r.runtime:7.2f}s", flush=True)

    records = run_study(grid, ContractionConfig(time_limit=args.time_limit),
                        workers=args.workers, progress=progress)
    summary = summarize(records)
    with open(args.out, "w") as fh:
        fh.write(summary.csv)
    print(summary.table())
    bad = [r for r in records if r.verified is False]
    print(f"{len(records)} records, {len(bad)} failed order verification, "
          f"{time.monotonic() - start:.0f}s total")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
