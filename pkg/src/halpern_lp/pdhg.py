"""One PDHG step, its canonical norm, and the constant stepsize rule."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .lp_model import Iterate, LpProblem, NumericalBreakdownError, SparseMatrix

logger = logging.getLogger(__name__)

STEP_MULTIPLIER = 0.99
PSD_CLAMP = 1e-12
# relative drift allowed in cached products built by linear combination
CACHE_DRIFT = 1e-10
EXACT_EIGEN = 4 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class StepConfig:
    """Stepsize ``eta``, primal weight ``omega`` and reflection ``gamma``.

    The primal and dual steps are ``tau = eta / omega`` and
    ``sigma = eta * omega``.
    """

    eta: float
    omega: float = 1.0
    gamma: float = 1.0
    matrix_norm_estimate: float = 0.0

    def __post_init__(self):
        if not (self.eta > 0 and np.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ValueError(f"omega must be positive and finite, got {self.omega}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")

    @property
    def tau(self) -> float:
        return self.eta / self.omega

    @property
    def sigma(self) -> float:
        return self.eta * self.omega

    def with_omega(self, omega: float) -> StepConfig:
        return StepConfig(self.eta, omega, self.gamma, self.matrix_norm_estimate)


@dataclass
class PdhgStepOutput:
    """Result of one PDHG step from ``z``.

    ``point`` carries fresh products ``A x+`` and ``A' y+``. ``delta_*`` are
    the displacement ``z - z+`` including the matching displacement of the
    cached ``A x``.
    """

    point: Iterate
    delta_x: np.ndarray
    delta_y: np.ndarray
    delta_ax: np.ndarray


def pdhg_step(z: Iterate, problem: LpProblem, cfg: StepConfig) -> PdhgStepOutput:
    """Apply one PDHG update to ``z``; costs exactly two matrix products."""
    A = problem.A
    tau, sigma = cfg.tau, cfg.sigma
    x_new = z.x - tau * (problem.c - z.aty)
    np.clip(x_new, problem.var_lower, problem.var_upper, out=x_new)
    ax_new = A.matvec(x_new)
    extrap = 2.0 * ax_new - z.ax
    w = z.y / sigma - extrap
    proj = np.clip(w, -problem.con_upper, -problem.con_lower)
    y_new = z.y - sigma * extrap - sigma * proj
    aty_new = A.rmatvec(y_new)
    return PdhgStepOutput(
        point=Iterate(x_new, y_new, ax_new, aty_new),
        delta_x=z.x - x_new,
        delta_y=z.y - y_new,
        delta_ax=z.ax - ax_new,
    )


def _quadratic_form(dx, dy, dax, cfg: StepConfig, noise: float = 0.0) -> float:
    tx = (cfg.omega / cfg.eta) * float(dx @ dx)
    ty = float(dy @ dy) / (cfg.eta * cfg.omega)
    cross = 2.0 * float(dy @ dax)
    radicand = tx + ty + cross
    if radicand < 0.0:
        if radicand < -PSD_CLAMP * (tx + ty + abs(cross)) - noise:
            raise NumericalBreakdownError(
                f"P-norm radicand {radicand:.3e} is negative "
                f"(primal {tx:.3e}, dual {ty:.3e}, cross {cross:.3e}); "
                f"eta={cfg.eta:.6g} may exceed 1/||A||"
            )
        radicand = 0.0
    return float(np.sqrt(radicand))


def p_norm(x, y, cfg: StepConfig, problem: LpProblem, ax=None) -> float:
    """Norm induced by ``P = [[omega/eta I, A'], [A, 1/(eta omega) I]]``.

    Pass ``ax`` to reuse a known ``A @ x`` instead of a fresh product.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if ax is None:
        ax = problem.A.matvec(x)
    return _quadratic_form(x, y, ax, cfg)


def fixed_point_residual(step_out: PdhgStepOutput, cfg: StepConfig) -> float:
    """``||z - PDHG(z)||_P`` from an already computed step; no matrix products.

    The cached ``A x`` of a Halpern iterate carries rounding from the linear
    combinations that built it. Once the displacement itself is at that
    level, the cross term is noise, so the clamp window is widened by a
    bound on the cached-product error.
    """
    ax_new = step_out.point.ax
    ax_old = ax_new + step_out.delta_ax
    noise = (2.0 * CACHE_DRIFT * float(np.linalg.norm(step_out.delta_y))
             * (float(np.linalg.norm(ax_new)) + float(np.linalg.norm(ax_old))))
    return _quadratic_form(step_out.delta_x, step_out.delta_y, step_out.delta_ax, cfg, noise)


def power_iteration_norm(
    A: SparseMatrix,
    tol: float = 1e-4,
    max_iters: int = 5000,
    seed: int = 0,
    return_info: bool = False,
):
    """Estimate the spectral norm of ``A`` by power iteration on ``A'A``.

    Stops once the relative change of the estimate is below ``tol`` and the
    eigen-residual ``||A'A v - lam v|| / lam`` is below ``tol`` as well; the
    change alone stalls early when the top two singular values are close.
    The estimate is a Rayleigh quotient and never exceeds the true norm.

    Returns the estimate, or ``(estimate, converged, iterations)`` when
    ``return_info`` is set.
    """
    m, n = A.shape
    if A.nnz == 0:
        return (0.0, True, 0) if return_info else 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        w = A.rmatvec(A.matvec(v))
        lam = float(v @ w)
        if lam <= 0.0:
            # start vector in the null space; reseed
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            continue
        new_estimate = np.sqrt(lam)
        change = abs(new_estimate - estimate) / new_estimate
        resid = float(np.linalg.norm(w - lam * v)) / lam
        estimate = new_estimate
        v = w / np.linalg.norm(w)
        # an exact eigenpair needs no confirming second step
        if resid < tol and (change < tol or resid <= EXACT_EIGEN):
            converged = True
            break
    if not converged:
        logger.warning("power iteration stopped after %d iterations without converging", it)
    if return_info:
        return estimate, converged, it
    return estimate


def default_stepsize(norm_estimate: float, multiplier: float = STEP_MULTIPLIER) -> float:
    """Constant stepsize ``multiplier / ||A||``; 1.0 for an empty matrix."""
    if norm_estimate < 0:
        raise ValueError(f"norm estimate must be nonnegative, got {norm_estimate}")
    if norm_estimate == 0:
        return 1.0
    return multiplier / norm_estimate
