"""LP instance container and the elementary set operations built on it.

The instance is held in two-sided-bounds form::

    min  c'x + offset   s.t.   lc <= A x <= uc,   lv <= x <= uv

with dual multipliers ``y`` for the rows and reduced costs ``r = c - A'y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class LpError(Exception):
    """Base class for solver errors."""


class InvalidProblemError(LpError, ValueError):
    """The instance data violates a structural invariant."""


class NumericalBreakdownError(LpError, ArithmeticError):
    """A quantity that must be nonnegative or finite came out otherwise."""


class SparseMatrix:
    """Sparse matrix stored in both CSR and CSC layouts.

    ``A @ x`` streams the row-major copy and ``A.T @ y`` the column-major
    one. Every product increments :attr:`products`, which the solver uses to
    audit its matrix-vector budget.
    """

    def __init__(self, data, shape: tuple[int, int] | None = None):
        if sp.issparse(data):
            mat = sp.csr_matrix(data, dtype=np.float64)
        else:
            arr = np.asarray(data, dtype=np.float64)
            if arr.size == 0 and shape is not None:
                arr = np.zeros(shape)
            mat = sp.csr_matrix(np.atleast_2d(arr) if arr.ndim < 2 else arr)
        if shape is not None and mat.shape != tuple(shape):
            mat = sp.csr_matrix(mat, shape=shape)
        mat.sum_duplicates()
        mat.eliminate_zeros()
        mat.sort_indices()
        if not np.all(np.isfinite(mat.data)):
            raise InvalidProblemError("matrix entries must be finite")
        self._csr = mat
        self._csc = mat.tocsc()
        self._csc.sort_indices()
        self.products = 0

    @classmethod
    def from_triplets(cls, rows, cols, vals, shape):
        return cls(sp.coo_matrix((vals, (rows, cols)), shape=shape))

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def csr(self) -> sp.csr_matrix:
        return self._csr

    @property
    def csc(self) -> sp.csc_matrix:
        return self._csc

    def matvec(self, x: np.ndarray) -> np.ndarray:
        self.products += 1
        return self._csr @ x

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        """Return ``A.T @ y`` computed from the column-major layout."""
        self.products += 1
        # csc of A is csr of A.T, so this walks contiguous columns of A
        return self._csc.T @ y

    def scaled(self, row_scale: np.ndarray, col_scale: np.ndarray) -> SparseMatrix:
        return SparseMatrix(sp.diags(row_scale) @ self._csr @ sp.diags(col_scale))

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, SparseMatrix) else False
        a, b = self._csr, other._csr
        return (
            np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def _as_vector(v, n: int, name: str) -> np.ndarray:
    arr = np.array(v, dtype=np.float64).reshape(-1)
    if arr.shape != (n,):
        raise InvalidProblemError(f"{name} has length {arr.size}, expected {n}")
    if np.any(np.isnan(arr)):
        raise InvalidProblemError(f"{name} contains NaN")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Validated LP instance; always stored as a minimization.

    Parameters
    ----------
    c : array_like
        Objective coefficients, length ``n``.
    A : SparseMatrix or array_like
        Constraint matrix, ``m x n``.
    var_lower, var_upper : array_like
        Variable bounds; ``-inf``/``inf`` allowed.
    con_lower, con_upper : array_like
        Row activity bounds; equal entries give equality rows.
    objective_offset : float
        Constant added to ``c'x``.
    maximize : bool
        If true, the data describe a maximization. ``c`` and the offset are
        negated on construction and :attr:`sense` records the original sense.
    """

    c: np.ndarray
    A: SparseMatrix
    var_lower: np.ndarray
    var_upper: np.ndarray
    con_lower: np.ndarray
    con_upper: np.ndarray
    objective_offset: float = 0.0
    maximize: bool = False
    name: str = ""
    var_names: tuple[str, ...] | None = field(default=None, repr=False)
    con_names: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        A = self.A if isinstance(self.A, SparseMatrix) else SparseMatrix(self.A)
        m, n = A.shape
        c = _as_vector(self.c, n, "c")
        if not np.all(np.isfinite(c)):
            raise InvalidProblemError("c must be finite")
        offset = float(self.objective_offset)
        if not np.isfinite(offset):
            raise InvalidProblemError("objective offset must be finite")
        if self.maximize:
            c = -c
            c.setflags(write=False)
            offset = -offset
        lv = _as_vector(self.var_lower, n, "var_lower")
        uv = _as_vector(self.var_upper, n, "var_upper")
        lc = _as_vector(self.con_lower, m, "con_lower")
        uc = _as_vector(self.con_upper, m, "con_upper")
        for lo, hi, what in ((lv, uv, "variable"), (lc, uc, "constraint")):
            bad = np.flatnonzero(lo > hi)
            if bad.size:
                raise InvalidProblemError(
                    f"{what} bounds crossed at index {bad[0]}: {lo[bad[0]]} > {hi[bad[0]]}"
                )
            if np.any(lo == np.inf) or np.any(hi == -np.inf):
                raise InvalidProblemError(f"{what} bounds must not be +inf below or -inf above")
        for name, value in (("c", c), ("A", A), ("var_lower", lv), ("var_upper", uv),
                            ("con_lower", lc), ("con_upper", uc), ("objective_offset", offset)):
            object.__setattr__(self, name, value)

    @classmethod
    def from_arrays(cls, c, A, var_lower, var_upper, con_lower, con_upper, **kw) -> LpProblem:
        return cls(c=c, A=A, var_lower=var_lower, var_upper=var_upper,
                   con_lower=con_lower, con_upper=con_upper, **kw)

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_cons(self) -> int:
        return self.A.shape[0]

    @property
    def sense(self) -> str:
        return "max" if self.maximize else "min"

    def objective(self, x: np.ndarray) -> float:
        """Objective value in the original sense, offset included."""
        val = float(self.c @ x) + self.objective_offset
        return -val if self.maximize else val

    def with_data(self, **changes) -> LpProblem:
        """Copy with some fields replaced; data are taken as already normalized."""
        kw = dict(c=self.c, A=self.A, var_lower=self.var_lower, var_upper=self.var_upper,
                  con_lower=self.con_lower, con_upper=self.con_upper,
                  objective_offset=self.objective_offset, maximize=False, name=self.name,
                  var_names=self.var_names, con_names=self.con_names)
        kw.update(changes)
        maximize = self.maximize
        prob = LpProblem(**kw)
        object.__setattr__(prob, "maximize", maximize)
        return prob

    def same_data(self, other: LpProblem) -> bool:
        return (
            self.maximize == other.maximize
            and self.objective_offset == other.objective_offset
            and self.A == other.A
            and all(np.array_equal(getattr(self, f), getattr(other, f))
                    for f in ("c", "var_lower", "var_upper", "con_lower", "con_upper"))
        )


@dataclass
class Iterate:
    """Primal-dual pair with cached products ``A x`` and ``A' y``.

    A cache is valid when its vector is not ``None``.
    """

    x: np.ndarray
    y: np.ndarray
    ax: np.ndarray | None = None
    aty: np.ndarray | None = None

    @classmethod
    def zeros(cls, problem: LpProblem) -> Iterate:
        m, n = problem.A.shape
        return cls(np.zeros(n), np.zeros(m), np.zeros(m), np.zeros(n))

    @classmethod
    def with_products(cls, x, y, A: SparseMatrix) -> Iterate:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        return cls(x, y, A.matvec(x), A.rmatvec(y))

    def copy(self) -> Iterate:
        return Iterate(
            self.x.copy(), self.y.copy(),
            None if self.ax is None else self.ax.copy(),
            None if self.aty is None else self.aty.copy(),
        )


def _check_bounds(v, lo, hi):
    v, lo, hi = (np.asarray(a, dtype=np.float64) for a in (v, lo, hi))
    if not (v.shape == lo.shape == hi.shape):
        raise ValueError(f"length mismatch: {v.shape}, {lo.shape}, {hi.shape}")
    if np.any(lo > hi):
        raise InvalidProblemError("lower bound exceeds upper bound")
    return v, lo, hi


def project_box(v, lower, upper) -> np.ndarray:
    """Euclidean projection onto ``{t : lower <= t <= upper}``."""
    v, lower, upper = _check_bounds(v, lower, upper)
    return np.minimum(np.maximum(v, lower), upper)


def p_support(y, lower, upper) -> float:
    """Evaluate ``upper' y+ - lower' y-`` with ``0 * inf = 0``.

    Returns ``inf`` when a positive part meets an infinite upper bound or a
    negative part meets an infinite lower bound.
    """
    y, lower, upper = _check_bounds(y, lower, upper)
    pos = np.maximum(y, 0.0)
    neg = np.maximum(-y, 0.0)
    up = pos > 0
    dn = neg > 0
    if np.any(np.isinf(upper[up])) or np.any(np.isinf(lower[dn])):
        return np.inf
    return float(upper[up] @ pos[up] - lower[dn] @ neg[dn])


def project_dual_cone(s, problem: LpProblem) -> np.ndarray:
    """Project onto ``-S = [-con_upper, -con_lower]``."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (problem.num_cons,):
        raise ValueError(f"expected length {problem.num_cons}, got {s.shape}")
    return np.minimum(np.maximum(s, -problem.con_upper), -problem.con_lower)
