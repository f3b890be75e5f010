"""
Preconditioning and the constant stepsize
=========================================

Badly scaled rows and columns inflate ``||A||`` and slow the iteration.
Ruiz equilibration followed by one Pock-Chambolle pass evens them out;
the stepsize is then ``0.99 / ||A||`` from power iteration on the scaled
matrix.
"""

import numpy as np

from halpern_lp import LpProblem, SolverConfig, SparseMatrix, solve
from halpern_lp.pdhg import default_stepsize, power_iteration_norm
from halpern_lp.scaling import precondition

rng = np.random.default_rng(1)
m, n = 30, 45
A = rng.standard_normal((m, n)) * (rng.random((m, n)) < 0.4)
A *= np.exp(rng.uniform(-4, 4, (m, 1))) * np.exp(rng.uniform(-4, 4, (1, n)))
x0 = rng.random(n)
problem = LpProblem.from_arrays(rng.random(n) + 0.1, A, np.zeros(n), np.full(n, 10.0),
                                A @ x0 - 1, A @ x0 + 1)

absA = np.abs(A)
print("row max-abs spread before:", absA.max(axis=1).min(), "to", absA.max(axis=1).max())

scaled, info = precondition(problem)
S = np.abs(scaled.A.toarray())
print("row max-abs spread after: ", S.max(axis=1).min(), "to", S.max(axis=1).max())
print("same sparsity pattern:", bool(((S != 0) == (absA != 0)).all()))

# Power iteration against a dense SVD.
est, converged, iters = power_iteration_norm(scaled.A, return_info=True)
true = np.linalg.svd(scaled.A.toarray(), compute_uv=False)[0]
print(f"||A_scaled||: power iteration {est:.6f} after {iters} steps, SVD {true:.6f}")
print("stepsize eta =", default_stepsize(est))

# Iterations are run on the scaled instance; optimality is judged on the original one.
for scaling in (True, False):
    r = solve(problem, SolverConfig(epsilon=1e-6, scaling=scaling, iteration_limit=100_000))
    print(f"scaling={scaling!s:<5}  {r.status:<15} {r.iterations:>7} iterations  "
          f"objective {r.objective:.8f}")

# A tiny sanity check: a single nonzero needs one power step.
print("single entry 7:", power_iteration_norm(SparseMatrix(np.array([[7.0]])), max_iters=1))
