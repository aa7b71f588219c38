#!/usr/bin/env python3
"""Run CGA, QEA and HQEA on a 200- and a 500-item instance and print the
mean-best table at 50/100/250/500/1000 generations.

    python scripts/table1_trend.py --out results/trend --runs 10
"""

import argparse
from pathlib import Path

from hqea.bench_cli import ExperimentSpec, cmd_run, cmd_table
from hqea.knapsack import generate_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/trend"))
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500])
    ap.add_argument("--profile", default="strongly_correlated")
    ap.add_argument("--instance-seed", type=int, default=1)
    ap.add_argument("--master-seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    paths = []
    for n in args.sizes:
        inst = generate_instance(n, args.profile, args.instance_seed)
        path = args.out / f"{inst.id}.json"
        inst.save(path)
        paths.append(str(path))

    traces = args.out / "traces"
    cmd_run(ExperimentSpec(
        instances=paths, runs=args.runs, master_seed=args.master_seed,
        output_dir=str(traces), workers=args.workers,
    ))
    cmd_table(traces)


if __name__ == "__main__":
    main()
