"""
Solving a small LP
==================

A two-variable production problem, stated in the solver's native form
``min c'x  s.t.  lc <= Ax <= uc,  lv <= x <= uv``.
"""

import numpy as np

from halpern_lp import LpProblem, SolverConfig, kkt_residuals, solve

# maximize 3x + 2y  subject to  x + y <= 4,  x + 3y <= 6,  0 <= x <= 3
problem = LpProblem.from_arrays(
    c=[3.0, 2.0],
    A=[[1.0, 1.0], [1.0, 3.0]],
    var_lower=[0.0, 0.0],
    var_upper=[3.0, np.inf],
    con_lower=[-np.inf, -np.inf],
    con_upper=[4.0, 6.0],
    maximize=True,
)

# Maximization is stored as minimization of -c; the report restores the sense.
print("stored cost vector:", problem.c)

report = solve(problem, SolverConfig(epsilon=1e-8))
print("status    ", report.status)
print("objective ", report.objective)          # 11 at the vertex (3, 1)
print("x         ", report.x)
print("y         ", report.y)
print("iterations", report.iterations, "restarts", report.restarts)

# The residuals can be recomputed from the returned vectors alone.
res = kkt_residuals(problem, report.x, report.y)
for key, value in res.scalars().items():
    print(f"  {key:<11} {value:.3e}")

# Each iteration costs two sparse products, and each termination check two more.
print("matrix products:", report.matrix_products,
      "=", 2 * report.iterations, "+", 2 * report.kkt_checks)
