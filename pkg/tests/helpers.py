"""Instance generators and independent oracles shared by the tests."""

import math

import numpy as np
from scipy.optimize import linprog

from halpern_lp import LpProblem

INF = np.inf


def random_lp(rng, m, n, density=0.5):
    """Random LP that is feasible and bounded by construction.

    A feasible primal point ``x0`` fixes the row bounds around ``A x0``, and a
    sign-compatible dual pair ``(y0, r0)`` fixes ``c = A'y0 + r0``.
    """
    A = rng.standard_normal((m, n)) * (rng.random((m, n)) < density)
    x0 = 2.0 * rng.random(n)
    has_lo = rng.random(n) < 0.8
    has_up = rng.random(n) < 0.3
    lv = np.where(has_lo, 0.0, -INF)
    uv = np.where(has_up, x0 + rng.random(n), INF)
    ax = A @ x0
    kind = rng.integers(0, 4, m)  # 0 eq, 1 ge, 2 le, 3 ranged
    lc = np.select([kind == 0, kind == 1, kind == 2], [ax, ax - rng.random(m), -INF],
                   ax - rng.random(m))
    uc = np.select([kind == 0, kind == 1, kind == 2], [ax, INF, ax + rng.random(m)],
                   ax + rng.random(m))
    y0 = np.select([kind == 1, kind == 2], [rng.random(m), -rng.random(m)],
                   rng.standard_normal(m))
    r0 = np.select([has_lo & ~has_up, ~has_lo & has_up, ~has_lo & ~has_up],
                   [rng.random(n), -rng.random(n), 0.0], rng.standard_normal(n))
    c = A.T @ y0 + r0
    return LpProblem.from_arrays(c, A, lv, uv, lc, uc)


def reference_objective(problem):
    """Optimal objective from HiGHS, in the problem's original sense."""
    A = problem.A.toarray()
    lc, uc = problem.con_lower, problem.con_upper
    eq = lc == uc
    up = np.isfinite(uc) & ~eq
    lo = np.isfinite(lc) & ~eq
    A_ub = np.vstack([A[up], -A[lo]])
    b_ub = np.concatenate([uc[up], -lc[lo]])
    bounds = [(None if math.isinf(l) else l, None if math.isinf(u) else u)
              for l, u in zip(problem.var_lower, problem.var_upper)]
    res = linprog(problem.c, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                  A_eq=A[eq] if eq.any() else None, b_eq=lc[eq] if eq.any() else None,
                  bounds=bounds, method="highs")
    assert res.status == 0, res.message
    val = res.fun + problem.objective_offset
    return -val if problem.maximize else val


def dense_kkt(problem, x, y):
    """Straight-line dense evaluation of the four KKT quantities."""
    A = problem.A.toarray()
    m, n = A.shape
    slack = [problem.c[j] - sum(A[i, j] * y[i] for i in range(m)) for j in range(n)]
    r = []
    for j in range(n):
        lo_fin = math.isfinite(problem.var_lower[j])
        up_fin = math.isfinite(problem.var_upper[j])
        s = slack[j]
        if lo_fin and up_fin:
            r.append(s)
        elif lo_fin:
            r.append(max(s, 0.0))
        elif up_fin:
            r.append(min(s, 0.0))
        else:
            r.append(0.0)

    def p(v, lo, up):
        total = 0.0
        for vi, li, ui in zip(v, lo, up):
            if vi > 0:
                if math.isinf(ui):
                    return math.inf
                total += ui * vi
            elif vi < 0:
                if math.isinf(li):
                    return math.inf
                total += li * vi  # -l * |v|
        return total

    pc = p([-v for v in y], problem.con_lower, problem.con_upper)
    pv = p([-v for v in r], problem.var_lower, problem.var_upper)
    cx = sum(problem.c[j] * x[j] for j in range(n))
    gap = abs(cx + pc + pv)
    ax = [sum(A[i, j] * x[j] for j in range(n)) for i in range(m)]
    pinf = math.sqrt(sum(
        (ax[i] - min(max(ax[i], problem.con_lower[i]), problem.con_upper[i])) ** 2
        for i in range(m)))
    deq = math.sqrt(sum((slack[j] - r[j]) ** 2 for j in range(n)))
    return {"gap_abs": gap, "primal_inf": pinf, "dual_eq": deq, "dual_cone": 0.0,
            "primal_objective": cx}


def lp(c, A, lv, uv, lc, uc, **kw):
    return LpProblem.from_arrays(c, A, lv, uv, lc, uc, **kw)


# (name, problem, optimal objective in the original sense)
TINY_LPS = [
    ("scalar", lp([1.0], [[1.0]], [0.0], [INF], [1.0], [INF]), 1.0),
    # three constraints active at (1, 1) in the plane
    ("degenerate", lp([1.0, 1.0], [[1.0, 1.0], [1.0, 0.0], [0.0, 1.0]], [0, 0], [INF, INF],
                      [2.0, 1.0, 1.0], [INF] * 3), 2.0),
    ("equality", lp([1.0, 2.0, 3.0], [[1.0, 1.0, 1.0]], [0, 0, 0], [INF] * 3, [1.0], [1.0]), 1.0),
    ("box_only", lp([1.0, -2.0, 0.5], np.zeros((0, 3)), [-1.0, 0.0, 2.0], [3.0, 4.0, 5.0],
                    [], []), -8.0),
    ("free_variable", lp([1.0, 1.0], [[1.0, -1.0]], [-INF, 0.0], [INF, INF], [2.0], [2.0]), 2.0),
    ("maximize", lp([3.0, 2.0], [[1.0, 1.0], [1.0, 3.0]], [0, 0], [3.0, INF], [-INF, -INF],
                    [4.0, 6.0], maximize=True), 11.0),
    ("ranged_row", lp([-1.0, 0.0], [[1.0, 1.0]], [0, 0], [INF, INF], [1.0], [3.0]), -3.0),
    ("upper_bounded", lp([2.0, -1.0], [[1.0, 1.0]], [-2.0, -INF], [5.0, 3.0], [0.0], [INF]),
     -7.0),
    ("offset", lp([1.0], [[1.0]], [0.0], [INF], [2.0], [INF], objective_offset=5.0), 7.0),
    ("two_var_vertex", lp([-1.0, -1.0], [[1.0, 2.0], [3.0, 1.0]], [0, 0], [INF, INF],
                          [-INF, -INF], [4.0, 6.0]), -2.8),
    # rank-deficient transportation problem
    ("transportation", lp([1.0, 3.0, 2.0, 1.0],
                          [[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]],
                          [0] * 4, [INF] * 4, [3.0, 2.0, 2.0, 3.0], [3.0, 2.0, 2.0, 3.0]), 7.0),
    ("zero_problem", lp([0.0, 0.0], np.zeros((1, 2)), [-INF, -INF], [INF, INF], [-1.0], [1.0]),
     0.0),
    ("fixed_variable", lp([1.0, 1.0], [[1.0, 1.0]], [3.0, 0.0], [3.0, INF], [5.0], [INF]), 5.0),
]


# criterion number -> (passed, detail); printed by the session summary hook
ACCEPTANCE = {}
