"""Halpern anchoring with reflection, adaptive restarts, and the PID primal weight."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .lp_model import Iterate, LpProblem
from .pdhg import PdhgStepOutput, StepConfig, pdhg_step

LOG_STEP_LIMIT = math.log(10.0)
OMEGA_MIN = 1e-8
OMEGA_MAX = 1e8
DEGENERATE_MOVE = 1e-10


class RestartReason(enum.Enum):
    NONE = "none"
    SUFFICIENT = "sufficient"
    NECESSARY_NO_PROGRESS = "necessary_no_progress"
    ARTIFICIAL = "artificial"

    def __bool__(self):
        return self is not RestartReason.NONE


def initial_weight() -> float:
    return 1.0


def halpern_reflected_step(
    z: Iterate, anchor: Iterate, k: int, cfg: StepConfig, problem: LpProblem
) -> tuple[Iterate, PdhgStepOutput]:
    """Advance ``z`` by one reflected Halpern step toward ``anchor``.

    ``z_next = (k+1)/(k+2) * ((1+gamma) PDHG(z) - gamma z) + 1/(k+2) * anchor``.
    The cached products of ``z_next`` follow from linearity, so the only
    matrix products are the two inside :func:`pdhg_step`.
    """
    out = pdhg_step(z, problem, cfg)
    return _combine(z, out.point, anchor, k, cfg.gamma), out


def _combine(z: Iterate, t: Iterate, anchor: Iterate, k: int, gamma: float) -> Iterate:
    w = (k + 1.0) / (k + 2.0)
    a = 1.0 / (k + 2.0)
    wt = w * (1.0 + gamma)
    wz = -w * gamma

    def mix(tv, zv, av):
        out = wt * tv
        if wz:
            out += wz * zv
        out += a * av
        return out

    return Iterate(
        mix(t.x, z.x, anchor.x),
        mix(t.y, z.y, anchor.y),
        mix(t.ax, z.ax, anchor.ax),
        mix(t.aty, z.aty, anchor.aty),
    )


@dataclass
class RestartState:
    """Bookkeeping for the current restart epoch.

    ``r_anchor`` is ``None`` until the first step of an epoch measures the
    residual at the anchor.
    """

    anchor: Iterate
    beta_sufficient: float = 0.2
    beta_necessary: float = 0.8
    beta_artificial: float = 0.36
    k: int = 0
    epoch: int = 0
    total_iterations: int = 0
    r_anchor: float | None = None
    r_prev: float = math.inf
    restarts: int = 0

    def __post_init__(self):
        if not 0.0 < self.beta_sufficient < self.beta_necessary < 1.0:
            raise ValueError(
                "need 0 < beta_sufficient < beta_necessary < 1, got "
                f"{self.beta_sufficient}, {self.beta_necessary}"
            )
        if not 0.0 < self.beta_artificial < 1.0:
            raise ValueError(f"beta_artificial must lie in (0, 1), got {self.beta_artificial}")


def check_restart(state: RestartState, r_current: float) -> RestartReason:
    """Return the first restart condition that holds at ``r_current``.

    Priority is sufficient decay, then necessary decay without local
    progress, then the artificial length cap. ``state.r_prev`` is set to
    ``r_current`` on every call. The first call of an epoch only records
    the anchor residual and never fires.
    """
    if state.r_anchor is None:
        state.r_anchor = state.r_prev = r_current
        return RestartReason.NONE
    r_anchor = state.r_anchor
    r_prev = state.r_prev
    state.r_prev = r_current
    if r_current <= state.beta_sufficient * r_anchor:
        return RestartReason.SUFFICIENT
    if r_current <= state.beta_necessary * r_anchor and r_current > r_prev:
        return RestartReason.NECESSARY_NO_PROGRESS
    if state.k >= state.beta_artificial * state.total_iterations:
        return RestartReason.ARTIFICIAL
    return RestartReason.NONE


@dataclass
class PidState:
    """PID controller on the log primal weight.

    ``x_start``/``y_start`` snapshot the iterate at the start of the epoch;
    the distance moved since then stands in for the unknown distance to the
    optimum.
    """

    kp: float = 0.5
    ki: float = 0.0
    kd: float = 0.0
    omega: float = 1.0
    integral: float = 0.0
    e_prev: float = 0.0
    x_start: np.ndarray | None = field(default=None, repr=False)
    y_start: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    def snapshot(self, z: Iterate):
        self.x_start = z.x.copy()
        self.y_start = z.y.copy()


def weight_error(omega: float, dx: float, dy: float) -> float:
    """Log-ratio of the weighted primal and dual distances."""
    return math.log((math.sqrt(omega) * dx) / (dy / math.sqrt(omega)))


def pid_update(pid: PidState, z_current: Iterate) -> float:
    """Update and return the primal weight from the movement over the epoch.

    An epoch in which either block barely moved carries no information and
    enters the controller with zero error.
    """
    dx = float(np.linalg.norm(z_current.x - pid.x_start))
    dy = float(np.linalg.norm(z_current.y - pid.y_start))
    if (dx < DEGENERATE_MOVE * (1.0 + float(np.linalg.norm(z_current.x)))
            or dy < DEGENERATE_MOVE * (1.0 + float(np.linalg.norm(z_current.y)))):
        e = 0.0
    else:
        e = weight_error(pid.omega, dx, dy)
    integral = pid.integral + e
    step = pid.kp * e + pid.ki * integral + pid.kd * (e - pid.e_prev)
    if abs(step) > LOG_STEP_LIMIT:
        step = math.copysign(LOG_STEP_LIMIT, step)
        integral = 0.0
    log_omega = min(max(math.log(pid.omega) - step, math.log(OMEGA_MIN)), math.log(OMEGA_MAX))
    pid.omega = math.exp(log_omega)
    pid.integral = integral
    pid.e_prev = e
    return pid.omega


def do_restart(
    state: RestartState, z_current: Iterate, pid: PidState | None, cfg: StepConfig
) -> StepConfig:
    """Re-anchor at ``z_current`` and refresh the primal weight.

    Returns the step configuration to use for the next epoch. Pass
    ``pid=None`` to keep the weight fixed.
    """
    state.anchor = z_current.copy()
    state.k = 0
    state.epoch += 1
    state.restarts += 1
    state.r_anchor = None
    state.r_prev = math.inf
    if pid is None:
        return cfg
    omega = pid_update(pid, z_current)
    pid.snapshot(z_current)
    return cfg.with_omega(omega)
