"""Benchmark harness: ``hqea-bench gen | run | table | walkdist``.

Exit codes: 0 success, 2 usage/validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .algorithms import ALGORITHMS, CGAParams, OptimizerConfig, RunTrace, run_algorithm
from .knapsack import PROFILES, KnapsackInstance, generate_instance
from .qhw_search import SearchParams
from .quantum_walk import run_walk, to_angle_distribution
from .rng import derive_seed, label_key

log = logging.getLogger("hqea.bench")

OUTPUT_DIR_ENV = "HQEA_OUTPUT_DIR"
DEFAULT_CHECKPOINTS = (50, 100, 250, 500, 1000)
TRACE_HEADER = ("algorithm", "instance_id", "seed", "generation", "best_fitness")
WALK_HEADER = ("position", "angle_rad", "probability")


class UsageError(Exception):
    """Invalid arguments or experiment spec (exit code 2)."""


class HarnessError(Exception):
    """Missing inputs or inconsistent trace sets (exit code 1)."""


@dataclass
class ExperimentSpec:
    instances: list[str] = field(default_factory=list)
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    runs: int = 10
    checkpoints: list[int] = field(default_factory=lambda: list(DEFAULT_CHECKPOINTS))
    master_seed: int = 0
    output_dir: str = "traces"
    max_generations: int = 1000
    population_size: int = 10
    migration_period: int = 100
    local_n: int = 10
    remote_n: int = 100
    n_max: int = 100
    trials: int = 5
    fraction: float = 0.2
    crossover_rate: float = 0.65
    mutation_rate: float = 0.05
    elitism: int = 1
    workers: int | None = None

    def validate(self) -> None:
        if not self.instances:
            raise UsageError("no instance files given")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise UsageError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        if self.runs < 1:
            raise UsageError("runs must be >= 1")
        if list(self.checkpoints) != sorted(set(self.checkpoints)) or not self.checkpoints:
            raise UsageError(f"checkpoints must be strictly increasing, got {self.checkpoints}")
        if self.checkpoints[0] < 1:
            raise UsageError("checkpoints must be >= 1")
        if self.checkpoints[-1] > self.max_generations:
            raise UsageError(
                f"checkpoint {self.checkpoints[-1]} exceeds max_generations {self.max_generations}"
            )
        try:
            self.optimizer_config()
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def optimizer_config(self) -> OptimizerConfig:
        search = dict(n_max=self.n_max, trials=self.trials, fraction=self.fraction)
        return OptimizerConfig(
            population_size=self.population_size,
            max_generations=self.max_generations,
            migration_period=self.migration_period,
            local=SearchParams.local(walk_steps=self.local_n, **search),
            remote=SearchParams.remote(walk_steps=self.remote_n, **search),
            cga=CGAParams(self.crossover_rate, self.mutation_rate, self.elitism),
        )

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentSpec:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UsageError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**d)


def run_seed(master_seed: int, inst_id: str, run: int) -> int:
    """Seed shared by every algorithm for run ``run`` on one instance."""
    return derive_seed(master_seed, "run", label_key(inst_id), run)


def trace_path(output_dir, inst_id: str, algorithm: str, run: int) -> Path:
    return Path(output_dir) / f"{inst_id}__{algorithm}__run{run:03d}.csv"


def write_trace(trace: RunTrace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        w.writerows(trace.csv_rows())


def read_trace(path) -> RunTrace:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise HarnessError(f"{path}: empty trace")
    try:
        rows.sort(key=lambda r: int(r["generation"]))
        gens = [int(r["generation"]) for r in rows]
        if gens != list(range(1, len(rows) + 1)):
            raise HarnessError(f"{path}: generations are not 1..{len(rows)}")
        first = rows[0]
        return RunTrace(
            first["algorithm"], first["instance_id"], int(first["seed"]),
            [int(r["best_fitness"]) for r in rows],
        )
    except (KeyError, ValueError) as exc:
        raise HarnessError(f"{path}: malformed trace ({exc})") from None


def _run_job(job) -> str:
    algorithm, inst_path, config, seed, path = job
    inst = KnapsackInstance.load(inst_path)
    write_trace(run_algorithm(algorithm, inst, config, seed), path)
    return str(path)


def cmd_gen(num_items: int, profile: str, seed: int, out_path=None) -> Path:
    inst = generate_instance(num_items, profile, seed)
    if out_path is None:
        out_path = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{inst.id}.json"
    out_path = Path(out_path)
    inst.save(out_path)
    print(inst.id)
    return out_path


def cmd_run(spec: ExperimentSpec) -> list[Path]:
    """Run every (instance, algorithm, run) triple; one trace CSV per run."""
    spec.validate()
    missing = [p for p in spec.instances if not Path(p).is_file()]
    if missing:
        raise HarnessError(f"instance file not found: {', '.join(missing)}")
    try:
        instances = [(p, KnapsackInstance.load(p)) for p in spec.instances]
    except (ValueError, json.JSONDecodeError) as exc:
        raise HarnessError(f"bad instance file: {exc}") from None
    config = spec.optimizer_config()
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = []
    for path, inst in instances:
        for r in range(spec.runs):
            seed = run_seed(spec.master_seed, inst.id, r)
            for alg in spec.algorithms:
                jobs.append((alg, path, config, seed, trace_path(out, inst.id, alg, r)))

    workers = spec.workers or os.cpu_count() or 1
    log.info("running %d jobs on %d worker(s)", len(jobs), workers)
    if workers == 1 or len(jobs) == 1:
        done = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_job, jobs))
    return [Path(p) for p in done]


def round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def aggregate(traces: Sequence[RunTrace], checkpoints: Sequence[int]) -> dict:
    """Mean best-so-far per (instance, checkpoint, algorithm), rounded half up.

    Every algorithm must have a trace for every seed seen on that instance.
    """
    by_inst = defaultdict(lambda: defaultdict(dict))
    for tr in traces:
        by_inst[tr.instance_id][tr.algorithm][tr.seed] = tr

    gaps = []
    for inst_id, algs in sorted(by_inst.items()):
        seeds = set().union(*(s.keys() for s in algs.values()))
        for alg, runs in sorted(algs.items()):
            for seed in sorted(seeds - runs.keys()):
                gaps.append(f"{inst_id}/{alg}/seed={seed}")
            for seed, tr in runs.items():
                if len(tr.best_per_generation) < max(checkpoints):
                    gaps.append(
                        f"{inst_id}/{alg}/seed={seed} has {len(tr.best_per_generation)} "
                        f"generations < checkpoint {max(checkpoints)}"
                    )
    if gaps:
        raise HarnessError("missing runs: " + "; ".join(gaps))

    table = {}
    for inst_id, algs in sorted(by_inst.items()):
        rows = {}
        for k in checkpoints:
            rows[k] = {
                alg: round_half_up(Fraction(sum(t.best_at(k) for t in runs.values()), len(runs)))
                for alg, runs in algs.items()
            }
        table[inst_id] = rows
    return table


def _alg_order(table: dict) -> list[str]:
    present = {a for rows in table.values() for cells in rows.values() for a in cells}
    return [a for a in ALGORITHMS if a in present] + sorted(present - set(ALGORITHMS))


def format_table(table: dict) -> str:
    algs = _alg_order(table)
    id_w = max([len("Instance")] + [len(i) for i in table])
    head = f"{'Instance':<{id_w}}  {'Iterations':>10}" + "".join(f"  {a:>8}" for a in algs)
    rule = "-" * len(head)
    lines = [head, rule]
    for inst_id, rows in table.items():
        for i, (k, cells) in enumerate(rows.items()):
            label = inst_id if i == 0 else ""
            lines.append(
                f"{label:<{id_w}}  {k:>10}" + "".join(f"  {cells.get(a, ''):>8}" for a in algs)
            )
        lines.append(rule)
    return "\n".join(lines) + "\n"


def write_table_csv(table: dict, path) -> None:
    algs = _alg_order(table)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance_id", "iterations", *algs])
        for inst_id, rows in table.items():
            for k, cells in rows.items():
                w.writerow([inst_id, k, *(cells.get(a, "") for a in algs)])


def cmd_table(trace_dir, checkpoints=DEFAULT_CHECKPOINTS, out_csv=None) -> dict:
    trace_dir = Path(trace_dir)
    files = sorted(p for p in trace_dir.glob("*.csv") if p.name != "table.csv")
    if not files:
        raise HarnessError(f"no trace CSVs in {trace_dir}")
    table = aggregate([read_trace(p) for p in files], list(checkpoints))
    write_table_csv(table, out_csv or trace_dir / "table.csv")
    sys.stdout.write(format_table(table))
    return table


def walk_rows(n: int, n_max: int) -> list[tuple[int, float, float]]:
    if n < 0 or n > n_max:
        raise UsageError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
    dist = to_angle_distribution(run_walk(n), n_max)
    return [
        (int(k), float(a), float(p))
        for k, a, p in zip(dist.positions, dist.angles, dist.probabilities)
        if p > 0
    ]


def cmd_walkdist(n: int, n_max: int, out_path) -> list[tuple[int, float, float]]:
    rows = walk_rows(n, n_max)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WALK_HEADER)
        w.writerows((k, repr(a), repr(p)) for k, a, p in rows)
    return rows


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqea-bench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a knapsack instance file")
    g.add_argument("--items", type=int, required=True)
    g.add_argument("--profile", choices=PROFILES, default="strongly_correlated")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, default=None)

    r = sub.add_parser("run", help="run optimizers and write trace CSVs")
    r.add_argument("--spec", type=Path, help="JSON experiment spec; flags override its keys")
    r.add_argument("--instances", nargs="+")
    r.add_argument("--algorithms", nargs="+", choices=ALGORITHMS)
    r.add_argument("--runs", type=int)
    r.add_argument("--generations", type=int, dest="max_generations")
    r.add_argument("--checkpoints", type=_int_list)
    r.add_argument("--master-seed", type=int, dest="master_seed")
    r.add_argument("--out", dest="output_dir")
    r.add_argument("--workers", type=int)
    for key, typ in (("local_n", int), ("remote_n", int), ("n_max", int), ("trials", int),
                     ("fraction", float), ("population_size", int)):
        r.add_argument("--" + key.replace("_", "-"), type=typ, dest=key)

    t = sub.add_parser("table", help="aggregate traces into a mean-best table")
    t.add_argument("trace_dir", type=Path)
    t.add_argument("--checkpoints", type=_int_list, default=list(DEFAULT_CHECKPOINTS))
    t.add_argument("--out", type=Path, default=None)

    w = sub.add_parser("walkdist", help="export the walk angle distribution as CSV")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--n-max", type=int, default=100, dest="n_max")
    w.add_argument("--out", type=Path, required=True)
    return parser


def spec_from_args(args) -> ExperimentSpec:
    base = {}
    if args.spec is not None:
        try:
            base = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise HarnessError(f"spec file not found: {args.spec}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"spec file {args.spec} is not valid JSON: {exc}") from None
    spec = ExperimentSpec.from_dict(base)
    if os.environ.get(OUTPUT_DIR_ENV):
        spec.output_dir = os.environ[OUTPUT_DIR_ENV]
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(ExperimentSpec)
        if getattr(args, f.name, None) is not None
    }
    return replace(spec, **overrides)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "gen":
            if args.items < 1:
                raise UsageError("--items must be >= 1")
            cmd_gen(args.items, args.profile, args.seed, args.out)
        elif args.command == "run":
            spec = spec_from_args(args)
            paths = cmd_run(spec)
            print(f"wrote {len(paths)} trace files to {spec.output_dir}")
        elif args.command == "table":
            cmd_table(args.trace_dir, args.checkpoints, args.out)
        elif args.command == "walkdist":
            cmd_walkdist(args.n, args.n_max, args.out)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (HarnessError, OSError) as exc:
        print(f"hqea-bench: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
