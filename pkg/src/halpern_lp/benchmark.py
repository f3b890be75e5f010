"""Benchmark harness: solve a directory of MPS files and summarize by SGM10."""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .mps_io import read_mps
from .solver import SolverConfig, solve

logger = logging.getLogger(__name__)

BENCH_SCHEMA = "halpern_lp.benchmark/1"
SIZE_CLASSES = ("small", "medium", "large")
SMALL_LIMIT = 3600.0
LARGE_LIMIT = 18000.0
MPS_SUFFIXES = (".mps", ".mps.gz", ".MPS", ".MPS.gz", ".free-mps", ".free-mps.gz")


def sgm10(times, shift: float = 10.0) -> float:
    """Shifted geometric mean ``prod(t_i + shift)^(1/n) - shift``, in log space."""
    t = np.asarray(times, dtype=np.float64).reshape(-1)
    if t.size == 0:
        raise ValueError("sgm10 needs at least one time")
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("times must be nonnegative")
    return float(np.exp(np.mean(np.log(t + shift))) - shift)


def size_class(nnz: int) -> str:
    """Class by constraint-matrix nonzeros; anything under 1M counts as small."""
    if nnz < 1_000_000:
        return "small"
    if nnz <= 10_000_000:
        return "medium"
    return "large"


@dataclass
class BenchmarkRecord:
    name: str
    status: str
    solve_seconds: float
    iterations: int = 0
    restarts: int = 0
    size_class: str | None = None
    nnz: int = 0
    time_limit: float = SMALL_LIMIT
    objective: float | None = None
    residuals: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def solved(self) -> bool:
        return self.status == "optimal"

    @property
    def scored_time(self) -> float:
        """Time entering SGM10; unsolved instances count at their limit."""
        return self.solve_seconds if self.solved else self.time_limit


def _finite(d: dict) -> dict:
    return {k: (v if isinstance(v, (int, float)) and math.isfinite(v) else str(v))
            for k, v in d.items()}


def solve_file(path, cfg: SolverConfig, small_limit=SMALL_LIMIT, large_limit=LARGE_LIMIT):
    """Parse and solve one file; failures come back as an ``error`` record."""
    name = Path(path).name
    try:
        problem = read_mps(path)
    except Exception as exc:  # recorded, never raised
        logger.error("%s: parse failed: %s", name, exc)
        return BenchmarkRecord(name, "error", small_limit, time_limit=small_limit,
                               error=f"{type(exc).__name__}: {exc}")
    cls = size_class(problem.A.nnz)
    limit = large_limit if cls == "large" else small_limit
    try:
        report = solve(problem, cfg.replace(time_limit=limit))
    except Exception as exc:
        logger.error("%s: solve failed: %s", name, exc)
        return BenchmarkRecord(name, "error", limit, size_class=cls, nnz=problem.A.nnz,
                               time_limit=limit, error=f"{type(exc).__name__}: {exc}")
    return BenchmarkRecord(
        name=name,
        status=report.status,
        solve_seconds=report.solve_seconds,
        iterations=report.iterations,
        restarts=report.restarts,
        size_class=cls,
        nnz=problem.A.nnz,
        time_limit=limit,
        objective=report.objective,
        residuals=_finite(report.residuals.scalars()) if report.residuals else {},
    )


def summarize(records: list[BenchmarkRecord]) -> dict:
    """Solved count and SGM10 per size class and overall."""
    groups = {c: [r for r in records if r.size_class == c] for c in SIZE_CLASSES}
    groups["total"] = list(records)
    out = {}
    for key, recs in groups.items():
        out[key] = {
            "instances": len(recs),
            "solved": sum(r.solved for r in recs),
            "sgm10": sgm10([r.scored_time for r in recs]) if recs else None,
        }
    return out


def format_table(summary: dict, label: str = "") -> str:
    head = f"{'':>12}" + "".join(f"{c.capitalize():>20}" for c in (*SIZE_CLASSES, "total"))
    sub = f"{'':>12}" + "".join(f"{'Count':>10}{'Time':>10}" for _ in range(4))
    cells = []
    for c in (*SIZE_CLASSES, "total"):
        s = summary[c]
        t = "-" if s["sgm10"] is None else f"{s['sgm10']:.2f}"
        cells.append(f"{s['solved']:>10}{t:>10}")
    return "\n".join([head, sub, f"{label:>12}" + "".join(cells)])


def find_instances(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise NotADirectoryError(f"{directory} is not a directory")
    return sorted(p for p in d.iterdir() if p.is_file() and p.name.endswith(MPS_SUFFIXES))


def run_benchmark(
    directory,
    cfg: SolverConfig | None = None,
    small_limit: float = SMALL_LIMIT,
    large_limit: float = LARGE_LIMIT,
    workers: int = 1,
    out_dir=None,
) -> dict:
    """Solve every MPS file in ``directory``.

    Medium instances share ``small_limit``. With ``workers > 1`` each
    instance runs in its own worker process. If ``out_dir`` is given, writes
    ``benchmark.json`` and ``benchmark.txt`` there.
    """
    cfg = cfg or SolverConfig()
    files = find_instances(directory)
    if not files:
        logger.warning("no MPS files found in %s", directory)
    if workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(solve_file, f, cfg, small_limit, large_limit) for f in files]
            records = [f.result() for f in futures]
    else:
        records = [solve_file(f, cfg, small_limit, large_limit) for f in files]

    summary = summarize(records)
    report = {
        "schema": BENCH_SCHEMA,
        "epsilon": cfg.epsilon,
        "limits": {"small": small_limit, "medium": small_limit, "large": large_limit},
        "records": [asdict(r) for r in records],
        "summary": summary,
    }
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "benchmark.json"), "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
        with open(os.path.join(out_dir, "benchmark.txt"), "w", encoding="utf-8") as fh:
            fh.write(format_table(summary, f"eps={cfg.epsilon:g}") + "\n")
    return report
