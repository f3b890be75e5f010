"""Diagonal preconditioning: Ruiz equilibration and Pock-Chambolle scaling.

The scaled instance uses ``A_s = D_r A D_c``, ``c_s = D_c c``, variable
bounds divided by ``D_c`` and row bounds multiplied by ``D_r``. Its iterates
map back through ``x = D_c x_s`` and ``y = D_r y_s``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .lp_model import Iterate, LpProblem


@dataclass(frozen=True)
class ScalingInfo:
    row_scale: np.ndarray
    col_scale: np.ndarray
    active: bool = True

    @classmethod
    def identity(cls, problem: LpProblem, active: bool = False) -> ScalingInfo:
        m, n = problem.A.shape
        return cls(np.ones(m), np.ones(n), active)

    def compose(self, row: np.ndarray, col: np.ndarray) -> ScalingInfo:
        return ScalingInfo(self.row_scale * row, self.col_scale * col, True)


def _apply(problem: LpProblem, row: np.ndarray, col: np.ndarray) -> LpProblem:
    return problem.with_data(
        c=problem.c * col,
        A=problem.A.scaled(row, col),
        var_lower=problem.var_lower / col,
        var_upper=problem.var_upper / col,
        con_lower=problem.con_lower * row,
        con_upper=problem.con_upper * row,
    )


def _inv_sqrt(norms: np.ndarray) -> np.ndarray:
    out = np.ones_like(norms)
    nz = norms > 0
    out[nz] = 1.0 / np.sqrt(norms[nz])
    return out


def _row_col_max(A: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    absA = abs(A)
    m, n = A.shape
    row = absA.max(axis=1).toarray().ravel() if n else np.zeros(m)
    col = absA.max(axis=0).toarray().ravel() if m else np.zeros(n)
    return row, col


def ruiz_equilibrate(
    problem: LpProblem, iterations: int = 10, info: ScalingInfo | None = None
) -> tuple[LpProblem, ScalingInfo]:
    """Run ``iterations`` passes of infinity-norm equilibration."""
    if info is None:
        info = ScalingInfo.identity(problem, active=True)
    scaled = problem
    for _ in range(iterations):
        row_max, col_max = _row_col_max(scaled.A.csr)
        row, col = _inv_sqrt(row_max), _inv_sqrt(col_max)
        scaled = _apply(scaled, row, col)
        info = info.compose(row, col)
    return scaled, info


def pock_chambolle_scale(
    problem: LpProblem, info: ScalingInfo | None = None
) -> tuple[LpProblem, ScalingInfo]:
    """One pass scaling rows and columns by ``1/sqrt`` of their 1-norms."""
    if info is None:
        info = ScalingInfo.identity(problem, active=True)
    absA = abs(problem.A.csr)
    row = _inv_sqrt(np.asarray(absA.sum(axis=1)).ravel())
    col = _inv_sqrt(np.asarray(absA.sum(axis=0)).ravel())
    return _apply(problem, row, col), info.compose(row, col)


def precondition(
    problem: LpProblem, ruiz_iters: int = 10, pock_chambolle: bool = True
) -> tuple[LpProblem, ScalingInfo]:
    scaled, info = ruiz_equilibrate(problem, ruiz_iters)
    if pock_chambolle:
        scaled, info = pock_chambolle_scale(scaled, info)
    return scaled, info


def unscale_iterate(z: Iterate, info: ScalingInfo) -> Iterate:
    """Map a scaled-instance iterate to the original instance.

    Cached products are carried over: the original ``A x`` is the scaled one
    divided by the row scales, and likewise ``A' y`` by the column scales.
    """
    ax = None if z.ax is None else z.ax / info.row_scale
    aty = None if z.aty is None else z.aty / info.col_scale
    return Iterate(z.x * info.col_scale, z.y * info.row_scale, ax, aty)


def scale_iterate(z: Iterate, info: ScalingInfo) -> Iterate:
    return Iterate(z.x / info.col_scale, z.y / info.row_scale)
