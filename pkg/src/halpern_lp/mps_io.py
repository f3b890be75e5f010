"""MPS reading (fixed and free format) and solution report output.

Bound values and right-hand sides with magnitude at least ``1e30`` are read
as infinite, as are the tokens ``inf``/``infinity``.
"""

from __future__ import annotations

import gzip
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .lp_model import InvalidProblemError, LpProblem, SparseMatrix
from .termination import KktResiduals

logger = logging.getLogger(__name__)

MPS_INFINITY = 1e30
REPORT_SCHEMA = "halpern_lp.solution/1"

_SECTIONS = {"NAME", "OBJSENSE", "OBJSENS", "OBJNAME", "ROWS", "COLUMNS", "RHS",
             "RANGES", "BOUNDS", "ENDATA"}
_VALUE_BOUNDS = {"UP", "LO", "FX", "LI", "UI"}
_FLAG_BOUNDS = {"FR", "MI", "PL", "BV"}
# fixed-format field slices (0-based, end-exclusive)
_FIXED_FIELDS = ((1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61))


class MpsParseError(InvalidProblemError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _number(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MpsParseError(f"expected a number, got {tok!r}", lineno) from None
    if math.isnan(v):
        raise MpsParseError("NaN is not a valid value", lineno)
    if v >= MPS_INFINITY:
        return math.inf
    if v <= -MPS_INFINITY:
        return -math.inf
    return v


def _fixed_fields(line: str) -> list[str]:
    padded = line.ljust(61)
    fields = [padded[a:b].strip() for a, b in _FIXED_FIELDS]
    # tail beyond column 61 is ignored in fixed format
    while fields and not fields[-1]:
        fields.pop()
    return fields


class _Builder:
    def __init__(self):
        self.name = ""
        self.maximize = False
        self.objective: str | None = None
        self.objname: str | None = None
        self.dropped_n: set[str] = set()
        self.row_index: dict[str, int] = {}
        self.row_types: list[str] = []
        self.col_index: dict[str, int] = {}
        self.entries: dict[tuple[int, int], float] = {}
        self.cost: dict[int, float] = {}
        self.rhs: dict[int, float] = {}
        self.ranges: dict[int, float] = {}
        self.obj_rhs = 0.0
        self.rhs_set: str | None = None
        self.range_set: str | None = None
        self.bound_set: str | None = None
        self.lower: dict[int, float] = {}
        self.upper: dict[int, float] = {}
        self.integer_warned = False

    # ROWS
    def add_row(self, kind: str, name: str, lineno: int):
        kind = kind.upper()
        if kind == "N":
            if self.objname is not None and name != self.objname:
                self.dropped_n.add(name)
            elif self.objective is None:
                self.objective = name
            else:
                logger.warning("line %d: dropping extra objective row %r", lineno, name)
                self.dropped_n.add(name)
            return
        if kind not in ("E", "L", "G"):
            raise MpsParseError(f"unknown row type {kind!r}", lineno)
        if name in self.row_index or name == self.objective:
            raise MpsParseError(f"duplicate row {name!r}", lineno)
        self.row_index[name] = len(self.row_types)
        self.row_types.append(kind)

    def _row(self, name: str, lineno: int) -> int | None:
        """Row index, ``-1`` for the objective, ``None`` for a dropped N row."""
        if name == self.objective:
            return -1
        if name in self.dropped_n:
            return None
        try:
            return self.row_index[name]
        except KeyError:
            raise MpsParseError(f"undeclared row {name!r}", lineno) from None

    def _col(self, name: str, lineno: int) -> int:
        try:
            return self.col_index[name]
        except KeyError:
            raise MpsParseError(f"undeclared column {name!r}", lineno) from None

    # COLUMNS
    def add_entries(self, col: str, pairs: list[tuple[str, str]], lineno: int):
        j = self.col_index.setdefault(col, len(self.col_index))
        for row, tok in pairs:
            i = self._row(row, lineno)
            v = _number(tok, lineno)
            if math.isinf(v):
                raise MpsParseError("matrix coefficients must be finite", lineno)
            if i is None:
                continue
            if i == -1:
                if j in self.cost:
                    raise MpsParseError(f"duplicate entry ({row}, {col})", lineno)
                self.cost[j] = v
            else:
                if (i, j) in self.entries:
                    raise MpsParseError(f"duplicate entry ({row}, {col})", lineno)
                self.entries[(i, j)] = v

    # RHS / RANGES
    def add_rhs(self, setname: str | None, pairs, lineno: int, ranges: bool):
        attr = "range_set" if ranges else "rhs_set"
        current = getattr(self, attr)
        if setname is not None:
            if current is None:
                setattr(self, attr, setname)
            elif setname != current:
                logger.warning("line %d: ignoring additional set %r", lineno, setname)
                return
        target = self.ranges if ranges else self.rhs
        for row, tok in pairs:
            i = self._row(row, lineno)
            v = _number(tok, lineno)
            if i is None:
                continue
            if i == -1:
                if not ranges:
                    self.obj_rhs = v
                continue
            if i in target:
                raise MpsParseError(f"duplicate {'range' if ranges else 'rhs'} for {row!r}", lineno)
            target[i] = v

    # BOUNDS
    def add_bound(self, kind: str, setname: str | None, col: str, tok: str | None, lineno: int):
        kind = kind.upper()
        if setname is not None:
            if self.bound_set is None:
                self.bound_set = setname
            elif setname != self.bound_set:
                logger.warning("line %d: ignoring additional bound set %r", lineno, setname)
                return
        j = self._col(col, lineno)
        value = None if tok is None else _number(tok, lineno)
        if kind in _VALUE_BOUNDS and value is None:
            raise MpsParseError(f"bound {kind} needs a value", lineno)
        if kind in ("LI", "UI", "BV") and not self.integer_warned:
            logger.warning("line %d: integer bound %s relaxed to its continuous box", lineno, kind)
            self.integer_warned = True
        if kind in ("LO", "LI"):
            self.lower[j] = value
        elif kind in ("UP", "UI"):
            if value < 0 and j not in self.lower:
                logger.warning("line %d: negative upper bound on %r sets lower bound to -inf",
                               lineno, col)
                self.lower[j] = -math.inf
            self.upper[j] = value
        elif kind == "FX":
            self.lower[j] = value
            self.upper[j] = value
        elif kind == "FR":
            self.lower[j] = -math.inf
            self.upper[j] = math.inf
        elif kind == "MI":
            self.lower[j] = -math.inf
        elif kind == "PL":
            self.upper[j] = math.inf
        elif kind == "BV":
            self.lower[j] = 0.0
            self.upper[j] = 1.0
        else:
            raise MpsParseError(f"unknown bound type {kind!r}", lineno)

    def build(self) -> LpProblem:
        m, n = len(self.row_types), len(self.col_index)
        c = np.zeros(n)
        for j, v in self.cost.items():
            c[j] = v
        lc = np.empty(m)
        uc = np.empty(m)
        for i, kind in enumerate(self.row_types):
            b = self.rhs.get(i, 0.0)
            if kind == "E":
                lc[i] = uc[i] = b
            elif kind == "L":
                lc[i], uc[i] = -math.inf, b
            else:
                lc[i], uc[i] = b, math.inf
            if i in self.ranges:
                rng = self.ranges[i]
                if kind == "G":
                    uc[i] = b + abs(rng)
                elif kind == "L":
                    lc[i] = b - abs(rng)
                elif rng >= 0:
                    uc[i] = b + rng
                else:
                    lc[i] = b + rng
        lv = np.zeros(n)
        uv = np.full(n, math.inf)
        for j, v in self.lower.items():
            lv[j] = v
        for j, v in self.upper.items():
            uv[j] = v
        if self.entries:
            keys = np.array(list(self.entries.keys()), dtype=np.int64)
            vals = np.array(list(self.entries.values()))
        else:
            keys = np.zeros((0, 2), dtype=np.int64)
            vals = np.zeros(0)
        A = SparseMatrix.from_triplets(keys[:, 0], keys[:, 1], vals, (m, n))
        rows = sorted(self.row_index, key=self.row_index.get)
        cols = sorted(self.col_index, key=self.col_index.get)
        return LpProblem(
            c=c, A=A, var_lower=lv, var_upper=uv, con_lower=lc, con_upper=uc,
            objective_offset=-self.obj_rhs if self.obj_rhs else 0.0,
            maximize=self.maximize, name=self.name,
            var_names=tuple(cols), con_names=tuple(rows),
        )


def _pairs(fields: list[str], lineno: int) -> list[tuple[str, str]]:
    if len(fields) % 2:
        raise MpsParseError("expected name/value pairs", lineno)
    return [(fields[i], fields[i + 1]) for i in range(0, len(fields), 2)]


def parse_mps(stream: IO[str] | Iterable[str], fmt: str = "free") -> LpProblem:
    """Read an MPS model from an iterable of lines.

    Parameters
    ----------
    stream : text stream or iterable of str
    fmt : {"free", "fixed"}
        ``"fixed"`` slices fields by column position, which permits spaces
        inside names. Fixed-format files without such names also parse in
        free mode.

    Raises
    ------
    MpsParseError
        On malformed input, with the offending line number.
    """
    if fmt not in ("free", "fixed"):
        raise ValueError(f"fmt must be 'free' or 'fixed', got {fmt!r}")
    b = _Builder()
    section = None
    seen_end = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n").rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if not line[0].isspace():
            head, *rest = line.split(None, 1)
            head = head.upper()
            if head not in _SECTIONS:
                raise MpsParseError(f"unknown section {head!r}", lineno)
            section = head
            arg = rest[0].strip() if rest else ""
            if head == "NAME":
                b.name = arg
            elif head in ("OBJSENSE", "OBJSENS") and arg:
                b.maximize = _sense(arg, lineno)
            elif head == "OBJNAME" and arg:
                b.objname = arg
            elif head == "ENDATA":
                seen_end = True
                break
            elif arg and head not in ("RHS", "RANGES", "BOUNDS"):
                raise MpsParseError(f"unexpected text after {head}", lineno)
            continue

        fields = _fixed_fields(line) if fmt == "fixed" else line.split()
        if section in ("OBJSENSE", "OBJSENS"):
            b.maximize = _sense(fields[-1], lineno)
        elif section == "OBJNAME":
            b.objname = fields[-1]
        elif section == "ROWS":
            if fmt == "fixed":
                fields = [f for f in fields if f]
            if len(fields) != 2:
                raise MpsParseError("ROWS line needs a type and a name", lineno)
            b.add_row(fields[0], fields[1], lineno)
        elif section == "COLUMNS":
            _columns_line(b, fields, fmt, lineno)
        elif section in ("RHS", "RANGES"):
            if fmt == "fixed":
                setname = fields[1] or None if len(fields) > 1 else None
                data = fields[2:]
            elif len(fields) % 2:
                setname, data = fields[0], fields[1:]
            else:
                setname, data = None, fields
            b.add_rhs(setname, _pairs(data, lineno), lineno, ranges=section == "RANGES")
        elif section == "BOUNDS":
            _bounds_line(b, fields, fmt, lineno)
        else:
            raise MpsParseError(f"data line outside a data section ({section})", lineno)
    if not seen_end:
        raise MpsParseError("missing ENDATA")
    if b.objective is None:
        logger.warning("no objective row; using zero objective")
    return b.build()


def _sense(tok: str, lineno: int) -> bool:
    t = tok.upper()
    if t in ("MAX", "MAXIMIZE"):
        return True
    if t in ("MIN", "MINIMIZE"):
        return False
    raise MpsParseError(f"unknown objective sense {tok!r}", lineno)


def _columns_line(b: _Builder, fields: list[str], fmt: str, lineno: int):
    if any(f.strip("'\"").upper() == "MARKER" for f in fields[1:]):
        if not b.integer_warned:
            logger.warning("line %d: integrality markers ignored (continuous relaxation)", lineno)
            b.integer_warned = True
        return
    if fmt == "fixed":
        col, data = fields[1], [f for f in fields[2:]]
    else:
        col, data = fields[0], fields[1:]
    if not col:
        raise MpsParseError("missing column name", lineno)
    b.add_entries(col, _pairs(data, lineno), lineno)


def _bounds_line(b: _Builder, fields: list[str], fmt: str, lineno: int):
    if fmt == "fixed":
        kind = fields[0]
        setname = fields[1] if len(fields) > 1 and fields[1] else None
        col = fields[2] if len(fields) > 2 else ""
        tok = fields[3] if len(fields) > 3 and fields[3] else None
        if not col:
            raise MpsParseError("BOUNDS line without a column", lineno)
        b.add_bound(kind, setname, col, tok, lineno)
        return
    kind = fields[0].upper()
    n = len(fields)
    if kind in _VALUE_BOUNDS:
        if n == 4:
            setname, col, tok = fields[1], fields[2], fields[3]
        elif n == 3:
            setname, col, tok = None, fields[1], fields[2]
        else:
            raise MpsParseError(f"malformed {kind} bound", lineno)
    elif kind in _FLAG_BOUNDS:
        if n == 4:
            setname, col, tok = fields[1], fields[2], fields[3]
        elif n == 3:
            setname, col, tok = fields[1], fields[2], None
        elif n == 2:
            setname, col, tok = None, fields[1], None
        else:
            raise MpsParseError(f"malformed {kind} bound", lineno)
        if kind != "BV":
            tok = None
    else:
        raise MpsParseError(f"unknown bound type {kind!r}", lineno)
    b.add_bound(kind, setname, col, tok, lineno)


def read_mps(path: str | os.PathLike, fmt: str = "free") -> LpProblem:
    """Read an MPS file; a ``.gz`` suffix selects gzip decompression."""
    path = os.fspath(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        prob = parse_mps(fh, fmt=fmt)
    if not prob.name:
        object.__setattr__(prob, "name", os.path.basename(path).split(".")[0])
    return prob


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "Inf" if v > 0 else "-Inf"
    return repr(float(v))


def _exact_range(lo: float, hi: float):
    """Row sense, RHS and range width that reproduce ``[lo, hi]`` bit-exactly.

    ``hi - lo`` can round, so neighbouring widths a few ulps away are tried.
    """
    width = hi - lo
    candidates = [width]
    up = down = width
    for _ in range(8):
        up, down = np.nextafter(up, math.inf), np.nextafter(down, -math.inf)
        candidates += [float(up), float(down)]
    for w in candidates:
        if lo + w == hi:
            return "G", lo, w
        if hi - w == lo:
            return "L", hi, w
    return None, lo, width


def to_canonical_mps(problem: LpProblem) -> str:
    """Free-format text that :func:`parse_mps` maps back to ``problem``.

    Used for roundtrip checks; this is not a general MPS writer.
    """
    m, n = problem.A.shape
    rows = list(problem.con_names) if problem.con_names else [f"R{i}" for i in range(m)]
    cols = list(problem.var_names) if problem.var_names else [f"C{j}" for j in range(n)]
    sign = -1.0 if problem.maximize else 1.0
    c = sign * problem.c
    offset = sign * problem.objective_offset
    out = io.StringIO()
    w = out.write
    w(f"NAME {problem.name or 'LP'}\n")
    if problem.maximize:
        w("OBJSENSE\n    MAX\n")
    w("ROWS\n N OBJ\n")
    kinds, rhs, ranges = [], {}, {}
    for i in range(m):
        lo, hi = problem.con_lower[i], problem.con_upper[i]
        if lo == hi:
            kind, b = "E", lo
        elif math.isinf(lo) and math.isinf(hi):
            kind, b = "G", -math.inf
        elif math.isinf(hi):
            kind, b = "G", lo
        elif math.isinf(lo):
            kind, b = "L", hi
        else:
            kind, b, width = _exact_range(lo, hi)
            ranges[i] = width
            if kind is None:
                kind, b = "G", lo
                logger.warning("row %s: range cannot be written exactly", rows[i])
        kinds.append(kind)
        if b != 0:
            rhs[i] = b
        w(f" {kind} {rows[i]}\n")
    w("COLUMNS\n")
    csc = problem.A.csc
    for j in range(n):
        w(f"    {cols[j]} OBJ {_fmt(c[j])}\n")
        for p in range(csc.indptr[j], csc.indptr[j + 1]):
            w(f"    {cols[j]} {rows[csc.indices[p]]} {_fmt(csc.data[p])}\n")
    w("RHS\n")
    if offset != 0:
        w(f"    RHS OBJ {_fmt(-offset)}\n")
    for i, b in rhs.items():
        w(f"    RHS {rows[i]} {_fmt(b)}\n")
    if ranges:
        w("RANGES\n")
        for i, r in ranges.items():
            w(f"    RNG {rows[i]} {_fmt(r)}\n")
    w("BOUNDS\n")
    for j in range(n):
        lo, hi = problem.var_lower[j], problem.var_upper[j]
        if lo == hi:
            w(f" FX BND {cols[j]} {_fmt(lo)}\n")
            continue
        if math.isinf(lo) and math.isinf(hi):
            w(f" FR BND {cols[j]}\n")
            continue
        if math.isinf(lo):
            w(f" MI BND {cols[j]}\n")
        elif lo != 0:
            w(f" LO BND {cols[j]} {_fmt(lo)}\n")
        if not math.isinf(hi):
            w(f" UP BND {cols[j]} {_fmt(hi)}\n")
    w("ENDATA\n")
    return out.getvalue()


@dataclass
class SolutionReport:
    """Outcome of one solve, in the original space and objective sense.

    ``residuals`` are evaluated on the unscaled instance at the reported
    ``x``/``y``. ``halpern_residuals`` holds the same quantities at the
    last Halpern iterate, for diagnostics.
    """

    status: str
    x: np.ndarray
    y: np.ndarray
    reduced_costs: np.ndarray
    objective: float
    residuals: KktResiduals | None
    iterations: int
    solve_seconds: float
    restarts: int
    epsilon: float = 0.0
    primal_weight: float = 1.0
    initial_weight: float = 1.0
    step_size: float = 0.0
    matrix_norm_estimate: float = 0.0
    matrix_products: int = 0
    kkt_checks: int = 0
    halpern_residuals: KktResiduals | None = None
    name: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == "optimal"


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def report_dict(report: SolutionReport, include_vectors: bool = False) -> dict:
    doc = {
        "schema": REPORT_SCHEMA,
        "name": report.name,
        "status": report.status,
        "converged": report.converged,
        "objective": _jsonable(report.objective),
        "epsilon": report.epsilon,
        "iterations": report.iterations,
        "restarts": report.restarts,
        "solve_seconds": report.solve_seconds,
        "kkt_checks": report.kkt_checks,
        "matrix_products": report.matrix_products,
        "primal_weight": report.primal_weight,
        "initial_weight": report.initial_weight,
        "step_size": report.step_size,
        "matrix_norm_estimate": report.matrix_norm_estimate,
        "num_vars": int(np.size(report.x)),
        "num_cons": int(np.size(report.y)),
        "residuals": None,
        "halpern_residuals": None,
    }
    if report.residuals is not None:
        doc["residuals"] = {k: _jsonable(v) for k, v in report.residuals.as_dict().items()}
    if report.halpern_residuals is not None:
        doc["halpern_residuals"] = {
            k: _jsonable(v) for k, v in report.halpern_residuals.as_dict().items()
        }
    if report.extra:
        doc["extra"] = report.extra
    if include_vectors:
        doc["x"] = [float(v) for v in report.x]
        doc["y"] = [float(v) for v in report.y]
        doc["reduced_costs"] = [float(v) for v in report.reduced_costs]
    return doc


def write_solution(report: SolutionReport, destination, include_vectors: bool = False):
    """Write ``report`` as a JSON document to a path or text stream.

    The document carries ``schema``, ``status``, ``converged``,
    ``objective``, the residuals (absolute, relative and denominators), the
    iteration/restart counts and timings; ``x``, ``y`` and
    ``reduced_costs`` are added when ``include_vectors`` is set.
    """
    doc = report_dict(report, include_vectors)
    text = json.dumps(doc, indent=2)
    if hasattr(destination, "write"):
        destination.write(text + "\n")
        return
    try:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    except OSError as exc:
        raise RuntimeError(f"could not write solution to {destination}: {exc}") from exc
