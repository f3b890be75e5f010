"""
Reading MPS files and benchmarking a directory
==============================================

Writes a few small MPS models to a temporary directory, reads one back,
and runs the benchmark harness, which scores solve times by the shifted
geometric mean with shift 10 (SGM10).
"""

import json
import tempfile
from pathlib import Path

from halpern_lp import SolverConfig, read_mps, solve, write_solution
from halpern_lp.benchmark import format_table, run_benchmark, sgm10

MODEL = """NAME          DEMO
ROWS
 N  COST
 G  DEMAND
 L  CAPACITY
 E  BALANCE
COLUMNS
    X         COST         2.0   DEMAND       1.0
    X         CAPACITY     1.0   BALANCE      1.0
    Y         COST         3.0   DEMAND       1.0
    Y         BALANCE     -1.0
    Z         COST        -1.0   CAPACITY     1.0
RHS
    RHS       DEMAND       4.0   CAPACITY     6.0
    RHS       BALANCE      0.0
RANGES
    RNG       DEMAND       2.0
BOUNDS
 UP BND       Z            3.0
 MI BND       Y
ENDATA
"""

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "demo.mps").write_text(MODEL)
    (tmp / "broken.mps").write_text("NAME BROKEN\nROWS\n N obj\nCOLUMNS\n x nowhere 1\nENDATA\n")

    problem = read_mps(tmp / "demo.mps")
    print("rows", problem.con_names, "bounds",
          list(zip(problem.con_lower.tolist(), problem.con_upper.tolist())))
    print("columns", problem.var_names, "bounds",
          list(zip(problem.var_lower.tolist(), problem.var_upper.tolist())))

    report = solve(problem, SolverConfig(epsilon=1e-8))
    write_solution(report, tmp / "demo.json", include_vectors=True)
    doc = json.loads((tmp / "demo.json").read_text())
    print("report:", {k: doc[k] for k in ("status", "objective", "iterations", "x")})

    # Parse failures become "error" records and are scored at the time limit.
    bench = run_benchmark(tmp, SolverConfig(epsilon=1e-6), small_limit=60.0)
    for rec in bench["records"]:
        print(f"  {rec['name']:<12} {rec['status']:<8} {rec['solve_seconds']:.3f}s")
    print(format_table(bench["summary"], "eps=1e-6"))

print("sgm10 of (10, 40):", sgm10([10.0, 40.0]))
