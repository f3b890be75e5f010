"""
Watching the fixed-point residual
=================================

The solver reports the residual ``||z - PDHG(z)||_P`` at every iteration
through a callback. Here three variants run on the same random LP:
plain anchoring, reflected anchoring, and the default (reflection plus
adaptive restarts with the PID primal weight).
"""

import numpy as np

from halpern_lp import LpProblem, SolverConfig, solve

rng = np.random.default_rng(0)
m, n = 40, 60
A = rng.standard_normal((m, n)) * (rng.random((m, n)) < 0.3)
x0 = rng.random(n)
y0 = rng.random(m)
# rows Ax >= A x0 with a nonnegative dual make the LP feasible and bounded
problem = LpProblem.from_arrays(A.T @ y0 + rng.random(n), A, np.zeros(n), np.full(n, np.inf),
                                A @ x0, np.full(m, np.inf))

variants = {
    "plain":     SolverConfig(restarts=False, gamma=0.0, pid=False),
    "reflected": SolverConfig(restarts=False, gamma=1.0, pid=False),
    "default":   SolverConfig(),
}

traces = {}
for name, cfg in variants.items():
    seen = []
    cfg = cfg.replace(epsilon=1e-300, iteration_limit=2000)
    solve(problem, cfg, callback=lambda info: seen.append(info.residual))
    traces[name] = np.array(seen)

print(f"{'iteration':>10}" + "".join(f"{k:>14}" for k in traces))
for k in (1, 10, 50, 100, 200, 400, 800, 1600, 1999):
    print(f"{k:>10}" + "".join(f"{traces[name][k]:>14.3e}" for name in traces))

# Without restarts the residual decays like 1/k: k * r(z^k) stays bounded.
k = np.arange(1, 2000)
print("\nmax k * r(z^k), plain anchoring:", float(np.max(k * traces["plain"][1:])))

# With restarts the decay becomes linear on this instance.
report = solve(problem, SolverConfig(epsilon=1e-8))
print("default solver at eps=1e-8:", report.status, report.iterations, "iterations,",
      report.restarts, "restarts, final primal weight", round(report.primal_weight, 4))
