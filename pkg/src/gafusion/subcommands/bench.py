import csv
import functools
import multiprocessing as mp
import os
import pathlib
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional

import numpy as np
import toml
from pydantic import BaseModel, Field, ValidationError, model_validator
from rich import print
from rich.table import Table

from ..energy import evaluate, relative_energy, zero_labeling
from ..exceptions import DegenerateReferenceError, ManifestError
from ..instance_io import read_energy
from ..logger import logger as log
from ..solver import SolverFactory
from ..solvers import SolverConfig
from ..solvers.model import Algorithm

RUNS_HEADER = ["instance", "algorithm", "seed", "final_energy", "relative_energy", "iterations", "wall_ms"]
SUMMARY_HEADER = ["instance", "algorithm", "runs", "mean_energy", "mean_relative_energy"]


class InstanceEntry(BaseModel):
    path: pathlib.Path


class BenchManifest(BaseModel):
    seeds: Optional[List[int]] = None
    master_seed: Optional[int] = Field(default=None, ge=0)
    repeats: Optional[int] = Field(default=None, gt=0)
    budget_s: Optional[float] = Field(default=None, gt=0)
    max_iterations: Optional[int] = Field(default=None, gt=0)
    algorithms: List[Algorithm]
    instances: List[InstanceEntry]

    @model_validator(mode="after")
    def _check_matrix(self) -> "BenchManifest":
        if not self.instances or not self.algorithms:
            raise ValueError("the manifest lists no instances or no algorithms")
        if self.seeds is None and (self.master_seed is None or self.repeats is None):
            raise ValueError("give either seeds or master_seed and repeats")
        if self.budget_s is None and self.max_iterations is None:
            raise ValueError("give budget_s or max_iterations")
        return self

    def run_seeds(self) -> List[int]:
        """Explicit seeds, or one seed per repeat derived from the master seed."""
        if self.seeds is not None:
            return self.seeds
        return [
            int(np.random.SeedSequence([self.master_seed, repeat]).generate_state(1, np.uint64)[0])
            for repeat in range(self.repeats)
        ]


def load_manifest(path: pathlib.Path) -> BenchManifest:
    try:
        content = toml.load(path)

    except toml.TomlDecodeError as exc:
        raise ManifestError(exc.msg, exc.lineno) from exc

    if not content:
        raise ManifestError(f"{path} is empty")

    try:
        manifest = BenchManifest(**content)

    except ValidationError as exc:
        raise ManifestError(f"invalid manifest {path}: {exc}") from exc

    # instance paths are relative to the manifest
    for entry in manifest.instances:
        if not entry.path.is_absolute():
            entry.path = pathlib.Path(path).parent / entry.path
    return manifest


class RunTask(NamedTuple):
    instance: pathlib.Path
    config: SolverConfig


class RunResult(NamedTuple):
    instance: pathlib.Path
    algorithm: str
    seed: int
    final_energy: float
    zero_energy: float
    iterations: int
    wall_ms: float


@functools.lru_cache(maxsize=8)
def _load(path: pathlib.Path):
    return read_energy(path)


def run_one(task: RunTask) -> RunResult:
    energy = _load(task.instance)
    _, trace = SolverFactory.from_config(task.config).minimize(energy)
    last = trace.records[-1]
    return RunResult(
        instance=task.instance,
        algorithm=task.config.algorithm,
        seed=task.config.seed,
        final_energy=trace.final_energy,
        zero_energy=evaluate(energy, zero_labeling(energy)),
        iterations=last.iteration,
        wall_ms=last.wall_ms,
    )


def worker_count(task_count: int) -> int:
    threads = os.environ.get("MRF_THREADS")
    workers = int(threads) if threads else mp.cpu_count()
    return max(1, min(workers, task_count))


def run_matrix(manifest: BenchManifest) -> List[RunResult]:
    tasks = [
        RunTask(
            entry.path,
            SolverConfig.build(
                algorithm=algorithm,
                seed=seed,
                time_budget=manifest.budget_s,
                max_iterations=manifest.max_iterations,
            ),
        )
        for entry in manifest.instances
        for algorithm in manifest.algorithms
        for seed in manifest.run_seeds()
    ]

    workers = worker_count(len(tasks))
    log.info(f"Running {len(tasks)} runs on {workers} workers")
    if workers == 1:
        return [run_one(task) for task in tasks]

    with mp.Pool(workers) as pool:
        return pool.map(run_one, tasks)


def _relative(result: RunResult, best: float) -> Optional[float]:
    try:
        return relative_energy(result.final_energy, best, result.zero_energy)

    except DegenerateReferenceError:
        log.warning(f"relative energy undefined on {result.instance}: best run equals the zero labeling")
        return None


def _mean(values: List[Optional[float]]) -> Optional[float]:
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def _real(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.17g}"


def write_reports(results: List[RunResult], out: pathlib.Path) -> Dict[str, pathlib.Path]:
    out.mkdir(parents=True, exist_ok=True)
    best: Dict[pathlib.Path, float] = defaultdict(lambda: np.inf)
    for result in results:
        best[result.instance] = min(best[result.instance], result.final_energy)

    cells = defaultdict(list)
    runs_path = out / "runs.csv"
    with open(runs_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for result in results:
            relative = _relative(result, best[result.instance])
            cells[(str(result.instance), result.algorithm)].append((result.final_energy, relative))
            writer.writerow(
                [
                    str(result.instance),
                    result.algorithm,
                    result.seed,
                    _real(result.final_energy),
                    _real(relative),
                    result.iterations,
                    f"{result.wall_ms:.3f}",
                ]
            )

    table = Table(title="Benchmark summary")
    for column in SUMMARY_HEADER:
        table.add_column(column)

    summary_path = out / "summary.csv"
    with open(summary_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for (instance, algorithm), values in cells.items():
            mean_energy = _mean([energy for energy, _ in values])
            mean_relative = _mean([relative for _, relative in values])
            row = [instance, algorithm, len(values), _real(mean_energy), _real(mean_relative)]
            writer.writerow(row)
            table.add_row(
                pathlib.Path(instance).name,
                algorithm,
                str(len(values)),
                f"{mean_energy:.6g}",
                "-" if mean_relative is None else f"{mean_relative:.2f}",
            )

    print(table)
    return {"runs": runs_path, "summary": summary_path}


def bench_subcommand(manifest_path: pathlib.Path, out: pathlib.Path) -> Dict[str, pathlib.Path]:
    manifest = load_manifest(manifest_path)
    reports = write_reports(run_matrix(manifest), out)
    print(f"Wrote {reports['runs']} and {reports['summary']}")
    return reports
