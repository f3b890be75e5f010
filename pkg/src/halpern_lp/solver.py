"""Restarted Halpern PDHG with reflection: the full solve loop."""

from __future__ import annotations

import configparser
import dataclasses
import logging
import math
import os
import time
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .lp_model import Iterate, LpProblem
from .mps_io import SolutionReport
from .pdhg import StepConfig, default_stepsize, fixed_point_residual, power_iteration_norm
from .restart import (
    PidState,
    RestartReason,
    RestartState,
    check_restart,
    do_restart,
    halpern_reflected_step,
    initial_weight,
)
from .scaling import ScalingInfo, precondition, unscale_iterate
from .termination import KktResiduals, ToleranceConfig, is_optimal, kkt_residuals, reduced_costs

logger = logging.getLogger(__name__)

CONFIG_ENV = "HALPERN_LP_CONFIG"
HIGH_ACCURACY = 1e-8

# dotted config key -> SolverConfig field
CONFIG_KEYS = {
    "tol.epsilon": "epsilon",
    "tol.check_interval": "check_interval",
    "limits.time_seconds": "time_limit",
    "limits.iterations": "iteration_limit",
    "scaling.enabled": "scaling",
    "scaling.ruiz_iters": "ruiz_iters",
    "scaling.pock_chambolle": "pock_chambolle",
    "stepsize.multiplier": "step_multiplier",
    "power.tol": "power_tol",
    "power.max_iters": "power_max_iters",
    "power.seed": "seed",
    "restart.enabled": "restarts",
    "restart.beta_sufficient": "beta_sufficient",
    "restart.beta_necessary": "beta_necessary",
    "restart.beta_artificial": "beta_artificial",
    "reflection.gamma": "gamma",
    "pid.enabled": "pid",
    "pid.kp": "kp",
    "pid.ki": "ki",
    "pid.kd": "kd",
    "weight.initial": "initial_weight",
    "output.verbosity": "verbosity",
    "output.path": "output_path",
    "output.vectors": "output_vectors",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """All solver settings; see :data:`CONFIG_KEYS` for the file-key names."""

    epsilon: float = 1e-4
    check_interval: int = 64
    time_limit: float = 3600.0
    iteration_limit: int | None = None
    scaling: bool = True
    ruiz_iters: int = 10
    pock_chambolle: bool = True
    step_multiplier: float = 0.99
    power_tol: float = 1e-4
    power_max_iters: int = 5000
    seed: int = 0
    restarts: bool = True
    beta_sufficient: float = 0.2
    beta_necessary: float = 0.8
    beta_artificial: float = 0.36
    gamma: float = 1.0
    pid: bool = True
    kp: float = 0.5
    ki: float = 0.0
    kd: float = 0.0
    initial_weight: float = initial_weight()
    verbosity: int = 0
    output_path: str | None = None
    output_vectors: bool = False

    def __post_init__(self):
        self.tolerance()
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"reflection.gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 < self.beta_sufficient < self.beta_necessary < 1.0:
            raise ConfigError("need 0 < restart.beta_sufficient < restart.beta_necessary < 1")
        if not 0.0 < self.beta_artificial < 1.0:
            raise ConfigError("restart.beta_artificial must lie in (0, 1)")
        if not 0.0 < self.step_multiplier < 1.0:
            raise ConfigError("stepsize.multiplier must lie in (0, 1)")
        if not self.initial_weight > 0:
            raise ConfigError("weight.initial must be positive")
        if self.ruiz_iters < 0 or self.power_max_iters < 1 or not self.power_tol > 0:
            raise ConfigError("invalid scaling/power-iteration settings")

    def tolerance(self) -> ToleranceConfig:
        try:
            return ToleranceConfig(self.epsilon, self.check_interval, self.time_limit,
                                   self.iteration_limit)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def replace(self, **changes) -> SolverConfig:
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, mapping: dict[str, Any], base: SolverConfig | None = None) -> SolverConfig:
        """Build from dotted keys (``"tol.epsilon"`` etc.); unknown keys raise."""
        base = base or cls()
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        changes = {}
        for key, raw in mapping.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            name = CONFIG_KEYS[key]
            changes[name] = _coerce(raw, getattr(base, name), types[name], key)
        return base.replace(**changes)

    @classmethod
    def from_file(cls, path: str | os.PathLike, base: SolverConfig | None = None) -> SolverConfig:
        """Read an INI file whose ``[section]``/``key`` pairs form the dotted keys."""
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        mapping = {f"{sec}.{key}": val for sec in parser.sections()
                   for key, val in parser.items(sec)}
        return cls.from_mapping(mapping, base)

    def to_mapping(self) -> dict[str, Any]:
        return {key: getattr(self, name) for key, name in CONFIG_KEYS.items()}


def _coerce(raw, default, annotation: str, key: str):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    if "None" in annotation and text.lower() in ("", "none", "inf", "unlimited"):
        return None
    try:
        if "bool" in annotation:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if "int" in annotation and "float" not in annotation:
            return int(text)
        if "float" in annotation:
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None
    return text


def load_config(path: str | os.PathLike | None = None, **overrides) -> SolverConfig:
    """Config from ``path`` (or ``$HALPERN_LP_CONFIG``), then keyword overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    cfg = SolverConfig.from_file(path) if path else SolverConfig()
    return cfg.replace(**overrides) if overrides else cfg


@dataclass
class IterationInfo:
    """Passed to the ``callback`` of :func:`solve` after every iteration.

    Vectors live in the scaled space. ``residual`` is the fixed-point
    residual of the iterate the step started from.
    """

    iteration: int
    z: Iterate
    pdhg_point: Iterate
    residual: float
    restart: RestartReason
    step: StepConfig
    epoch: int


def _check(problem: LpProblem, point: Iterate, info: ScalingInfo):
    orig = unscale_iterate(point, info)
    x, y = orig.x, orig.y
    ax = problem.A.matvec(x)
    aty = problem.A.rmatvec(y)
    return x, y, aty, kkt_residuals(problem, x, y, ax=ax, aty=aty)


def solve(
    problem: LpProblem,
    cfg: SolverConfig | None = None,
    callback: Callable[[IterationInfo], None] | None = None,
) -> SolutionReport:
    """Solve ``problem`` to relative KKT tolerance ``cfg.epsilon``.

    Termination is always judged on the unscaled instance, at the PDHG
    output of the current Halpern iterate (which lies inside the variable
    bounds and dual sign constraints).
    """
    cfg = cfg or SolverConfig()
    tol = cfg.tolerance()
    start = time.perf_counter()

    if cfg.scaling:
        scaled, info = precondition(problem, cfg.ruiz_iters, cfg.pock_chambolle)
    else:
        scaled, info = problem, ScalingInfo.identity(problem)

    norm = power_iteration_norm(scaled.A, cfg.power_tol, cfg.power_max_iters, cfg.seed)
    eta = default_stepsize(norm, cfg.step_multiplier)
    step = StepConfig(eta, cfg.initial_weight, cfg.gamma, norm)

    z = Iterate.zeros(scaled)
    state = RestartState(z.copy(), cfg.beta_sufficient, cfg.beta_necessary, cfg.beta_artificial)
    pid = PidState(cfg.kp, cfg.ki, cfg.kd, omega=cfg.initial_weight) if cfg.pid else None
    if pid is not None:
        pid.snapshot(z)

    products_before = scaled.A.products + (problem.A.products if scaled is not problem else 0)
    checks = 0
    best = None  # (max_rel, x, y, aty, residuals)
    status = None
    iteration = 0
    out = None
    last_checked = -1

    def record(point):
        nonlocal checks, best, last_checked
        checks += 1
        last_checked = iteration
        x, y, aty, res = _check(problem, point, info)
        if best is None or res.max_rel <= best[0] or is_optimal(res, tol):
            best = (res.max_rel, x, y, aty, res)
        return res

    while True:
        if tol.iteration_limit is not None and iteration >= tol.iteration_limit:
            status = "iteration_limit"
            break
        if time.perf_counter() - start >= tol.time_limit:
            status = "time_limit"
            break

        z_next, out = halpern_reflected_step(z, state.anchor, state.k, step, scaled)
        r = fixed_point_residual(out, step)
        iteration += 1
        state.total_iterations = iteration
        reason = RestartReason.NONE
        if cfg.restarts:
            reason = check_restart(state, r)
        elif state.r_anchor is None:
            state.r_anchor = r
        state.k += 1
        z = z_next
        if callback is not None:
            callback(IterationInfo(iteration, z, out.point, r, reason, step, state.epoch))
        if reason:
            step = do_restart(state, z, pid, step)

        if reason or iteration % tol.check_interval == 0:
            res = record(out.point)
            if cfg.verbosity > 0:
                logger.info(
                    "iter %7d  epoch %4d  gap %.2e  pinf %.2e  dinf %.2e  omega %.3e  r %.3e",
                    iteration, state.epoch, res.gap_rel, res.primal_rel, res.dual_eq_rel,
                    step.omega, r,
                )
            if is_optimal(res, tol):
                status = "optimal"
                break

    if status != "optimal" and last_checked != iteration:
        record(out.point if out is not None else z)
    products = scaled.A.products + (problem.A.products if scaled is not problem else 0)
    elapsed = time.perf_counter() - start

    _, x, y, aty, res = best
    halpern = _check(problem, z, info)[3]
    return SolutionReport(
        status=status,
        x=x,
        y=y,
        reduced_costs=reduced_costs(problem, y, aty=aty),
        objective=problem.objective(x),
        residuals=res,
        iterations=iteration,
        solve_seconds=elapsed,
        restarts=state.restarts,
        epsilon=tol.epsilon,
        primal_weight=step.omega,
        initial_weight=cfg.initial_weight,
        step_size=step.eta,
        matrix_norm_estimate=norm,
        matrix_products=products - products_before,
        kkt_checks=checks,
        halpern_residuals=halpern,
        name=problem.name,
    )
