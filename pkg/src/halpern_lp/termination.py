"""Relative KKT residuals on the original instance and the optimality test."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .lp_model import LpProblem, NumericalBreakdownError, p_support


@dataclass(frozen=True)
class ToleranceConfig:
    epsilon: float = 1e-4
    check_interval: int = 64
    time_limit: float = 3600.0
    iteration_limit: int | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.check_interval < 1:
            raise ValueError(f"check_interval must be >= 1, got {self.check_interval}")
        if self.time_limit < 0:
            raise ValueError(f"time_limit must be nonnegative, got {self.time_limit}")
        if self.iteration_limit is not None and self.iteration_limit < 0:
            raise ValueError("iteration_limit must be nonnegative")


@dataclass(frozen=True)
class KktResiduals:
    """Absolute residuals, the terms they are built from, and their scales.

    Each inequality reads ``residual <= epsilon * denominator``; the
    ``*_rel`` properties give ``residual / denominator``.
    """

    gap_abs: float
    primal_inf: float
    dual_eq: float
    dual_cone: float
    primal_objective: float
    dual_con_term: float
    dual_var_term: float
    gap_denom: float
    primal_denom: float
    dual_denom: float

    @property
    def gap_rel(self) -> float:
        return self.gap_abs / self.gap_denom

    @property
    def primal_rel(self) -> float:
        return self.primal_inf / self.primal_denom

    @property
    def dual_eq_rel(self) -> float:
        return self.dual_eq / self.dual_denom

    @property
    def dual_cone_rel(self) -> float:
        return self.dual_cone / self.dual_denom

    @property
    def max_rel(self) -> float:
        return max(self.gap_rel, self.primal_rel, self.dual_eq_rel, self.dual_cone_rel)

    def scalars(self) -> dict:
        """The six headline residuals."""
        return {
            "gap_abs": self.gap_abs,
            "gap_rel": self.gap_rel,
            "primal_inf": self.primal_inf,
            "primal_rel": self.primal_rel,
            "dual_eq": self.dual_eq,
            "dual_cone": self.dual_cone,
        }

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(gap_rel=self.gap_rel, primal_rel=self.primal_rel,
                 dual_eq_rel=self.dual_eq_rel, dual_cone_rel=self.dual_cone_rel)
        return d


def dual_cone_bounds(problem: LpProblem) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise bounds of the reduced-cost cone.

    A finite variable lower bound admits a nonnegative reduced cost, a finite
    upper bound a nonpositive one; a free variable forces zero.
    """
    lo = np.where(np.isfinite(problem.var_upper), -np.inf, 0.0)
    hi = np.where(np.isfinite(problem.var_lower), np.inf, 0.0)
    return lo, hi


def reduced_costs(problem: LpProblem, y, aty=None) -> np.ndarray:
    """Sign-feasible part of the dual slack ``c - A'y``."""
    if aty is None:
        aty = problem.A.rmatvec(np.asarray(y, dtype=np.float64))
    lo, hi = dual_cone_bounds(problem)
    return np.clip(problem.c - aty, lo, hi)


def kkt_residuals(problem: LpProblem, x, y, ax=None, aty=None) -> KktResiduals:
    """Evaluate the four relative-KKT quantities at ``(x, y)``.

    ``problem`` must be the unscaled instance. ``ax``/``aty`` may be passed
    when the products are already known.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise NumericalBreakdownError("NaN in iterate passed to kkt_residuals")
    if ax is None:
        ax = problem.A.matvec(x)
    if aty is None:
        aty = problem.A.rmatvec(y)
    slack = problem.c - aty
    lo, hi = dual_cone_bounds(problem)
    r = np.clip(slack, lo, hi)

    primal_obj = float(problem.c @ x)
    con_term = p_support(-y, problem.con_lower, problem.con_upper)
    var_term = p_support(-r, problem.var_lower, problem.var_upper)
    dual_terms = con_term + var_term
    if math.isinf(dual_terms):
        gap_abs = math.inf
        gap_denom = 1.0 + abs(primal_obj)
    else:
        gap_abs = abs(primal_obj + dual_terms)
        gap_denom = 1.0 + abs(dual_terms) + abs(primal_obj)

    primal_inf = float(np.linalg.norm(ax - np.clip(ax, problem.con_lower, problem.con_upper)))
    bounds = np.concatenate([problem.con_lower, problem.con_upper])
    primal_denom = 1.0 + float(np.linalg.norm(bounds[np.isfinite(bounds)]))

    dual_eq = float(np.linalg.norm(slack - r))
    dual_cone = float(np.linalg.norm(r - np.clip(r, lo, hi)))
    dual_denom = 1.0 + float(np.linalg.norm(problem.c))

    values = (gap_abs, primal_inf, dual_eq, dual_cone, primal_obj)
    if any(isinstance(v, float) and math.isnan(v) for v in values):
        raise NumericalBreakdownError("NaN in KKT residuals")
    return KktResiduals(
        gap_abs=gap_abs,
        primal_inf=primal_inf,
        dual_eq=dual_eq,
        dual_cone=dual_cone,
        primal_objective=primal_obj,
        dual_con_term=con_term,
        dual_var_term=var_term,
        gap_denom=gap_denom,
        primal_denom=primal_denom,
        dual_denom=dual_denom,
    )


def is_optimal(res: KktResiduals, tol: ToleranceConfig | float) -> bool:
    eps = tol.epsilon if isinstance(tol, ToleranceConfig) else float(tol)
    return (
        res.gap_abs <= eps * res.gap_denom
        and res.primal_inf <= eps * res.primal_denom
        and res.dual_eq <= eps * res.dual_denom
        and res.dual_cone <= eps * res.dual_denom
    )
