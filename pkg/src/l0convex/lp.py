"""Small dense linear programming: two-phase primal simplex with Bland's rule.

The solver works on stacks of problems that share one sparsity pattern (the
same relations and the same pattern of finite variable bounds) but have their
own coefficients.  Each problem in a stack follows exactly the pivot sequence
it would follow on its own: all updates are elementwise along the stack axis,
entering/leaving choices are made per problem.  Evaluating a polyhedral
function on every atom of a finite probability space is one such stack.

Problems are posed as maximization.  Every row receives its own artificial
column; rows whose slack can start basic leave that artificial idle, so the
initial basis is always a permutation of unit columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .errors import StructuralError

__all__ = [
    "LPConfig",
    "LPStatus",
    "LPProblem",
    "LPResult",
    "BatchResult",
    "DEFAULT_CONFIG",
    "solve",
    "solve_batch",
]


@dataclass(frozen=True)
class LPConfig:
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    pivot_tol: float = 1e-9
    iter_factor: int = 10000


DEFAULT_CONFIG = LPConfig()


class LPStatus(IntEnum):
    OPTIMAL = 0
    INFEASIBLE = 1
    UNBOUNDED = 2
    NUMERICAL_FAILURE = 3

    def __str__(self):
        return self.name.lower()


_RELATIONS = {"<=": 1, "≤": 1, "==": 0, "=": 0, ">=": -1, "≥": -1}


@dataclass(frozen=True)
class LPProblem:
    """maximize ``objective . x`` subject to row constraints and variable bounds.

    ``constraints`` holds ``(coefficients, relation, bound)`` triples with
    relation one of ``"<="``, ``"=="`` or ``">="``.  Bounds default to
    ``x >= 0``; use ``-inf``/``inf`` for free directions.
    """

    objective: Sequence[float]
    constraints: Sequence[tuple] = ()
    lower: Sequence[float] | None = None
    upper: Sequence[float] | None = None

    def arrays(self):
        c = np.asarray(self.objective, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise StructuralError("an LP needs at least one variable")
        nv = c.size
        rows, rels, rhs = [], [], []
        for coeffs, rel, bound in self.constraints:
            coeffs = np.asarray(coeffs, dtype=float)
            if coeffs.shape != (nv,):
                raise StructuralError(f"constraint has {coeffs.shape} coefficients, expected {nv}")
            if rel not in _RELATIONS:
                raise StructuralError(f"unknown relation {rel!r}")
            rows.append(coeffs)
            rels.append(_RELATIONS[rel])
            rhs.append(float(bound))
        A = np.array(rows, dtype=float).reshape(len(rows), nv)
        lower = np.zeros(nv) if self.lower is None else np.asarray(self.lower, dtype=float)
        upper = np.full(nv, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if lower.shape != (nv,) or upper.shape != (nv,):
            raise StructuralError("bounds must have one entry per variable")
        return c, A, np.array(rhs), np.array(rels, dtype=int), lower, upper


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: float
    x: np.ndarray | None = None
    ray: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == LPStatus.OPTIMAL


@dataclass(frozen=True)
class BatchResult:
    """Stacked outcome; ``x`` is the optimizer (or last feasible vertex when unbounded)."""

    status: np.ndarray
    value: np.ndarray
    x: np.ndarray
    ray: np.ndarray
    iterations: np.ndarray

    def __len__(self):
        return self.status.shape[0]

    def result(self, k: int) -> LPResult:
        st = LPStatus(int(self.status[k]))
        x = self.x[k].copy() if st in (LPStatus.OPTIMAL, LPStatus.UNBOUNDED) else None
        ray = self.ray[k].copy() if st == LPStatus.UNBOUNDED else None
        return LPResult(st, float(self.value[k]), x, ray, int(self.iterations[k]))


def solve(p: LPProblem, config: LPConfig = DEFAULT_CONFIG) -> LPResult:
    c, A, b, rels, lower, upper = p.arrays()
    batch = solve_batch(c[None], A[None], b[None], rels, lower, upper, config)
    return batch.result(0)


def _standardize(c, A, b, rels, lower, upper):
    """Substitute ``x = offset + M y`` with ``y >= 0``; add rows for two-sided bounds."""
    B, m, nv = A.shape
    cols, offset, extra = [], np.zeros(nv), []
    for i in range(nv):
        lo, hi = lower[i], upper[i]
        if np.isnan(lo) or np.isnan(hi) or lo > hi:
            raise StructuralError(f"invalid bounds for variable {i}: [{lo}, {hi}]")
        if np.isfinite(lo):
            offset[i] = lo
            cols.append((i, 1.0))
            if np.isfinite(hi):
                extra.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    M = np.zeros((nv, len(cols)))
    for k, (i, s) in enumerate(cols):
        M[i, k] = s
    A_std = A @ M
    b_std = b - A @ offset
    c_std = c @ M
    rel_std = rels
    if extra:
        ny = len(cols)
        rows = np.zeros((len(extra), ny))
        for r, (k, width) in enumerate(extra):
            rows[r, k] = 1.0
        A_std = np.concatenate([A_std, np.broadcast_to(rows, (B,) + rows.shape)], axis=1)
        b_std = np.concatenate([b_std, np.broadcast_to([w for _, w in extra], (B, len(extra)))], axis=1)
        rel_std = np.concatenate([rels, np.ones(len(extra), dtype=int)])
    # a >= row becomes a <= row
    flip = np.where(rel_std == -1, -1.0, 1.0)
    A_std = A_std * flip[None, :, None]
    b_std = b_std * flip[None, :]
    rel_std = np.where(rel_std == -1, 1, rel_std)
    return c_std, A_std, b_std, rel_std, M, offset


def _run(T, basis, active, n_enter, art_lo, phase2, limit, iters, config):
    """Pivot every active problem to termination.  Returns the per-problem unbounded mask."""
    B = T.shape[0]
    m = T.shape[1] - 1
    unbounded = np.zeros(B, dtype=bool)
    ray_col = np.full(B, -1)
    rows_idx = np.arange(m + 1)
    while True:
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        stalled = iters[idx] >= limit
        if stalled.any():
            active[idx[stalled]] = False
            idx = idx[~stalled]
            if idx.size == 0:
                break
        red = T[idx, m, :n_enter]
        cand = red > config.opt_tol
        has = cand.any(axis=1)
        active[idx[~has]] = False
        idx = idx[has]
        if idx.size == 0 or m == 0:
            if m == 0 and idx.size:
                unbounded[idx] = True
                ray_col[idx] = cand[has].argmax(axis=1)
                active[idx] = False
            break
        j = cand[has].argmax(axis=1)  # Bland: lowest improving index
        col = T[idx[:, None], rows_idx[None, :m], j[:, None]]
        rhs = np.maximum(T[idx, :m, -1], 0.0)
        bas = basis[idx]
        ok = col > config.pivot_tol
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ok, rhs / np.where(ok, col, 1.0), np.inf)
        if phase2:
            # an artificial still basic at level zero must leave before anything moves
            forced = (bas >= art_lo) & (np.abs(col) > config.pivot_tol)
            ratio = np.where(forced, 0.0, ratio)
            ok = ok | forced
        anyrow = ok.any(axis=1)
        if not anyrow.all():
            ub = idx[~anyrow]
            unbounded[ub] = True
            ray_col[ub] = j[~anyrow]
            active[ub] = False
            idx, j, col, ratio, bas = idx[anyrow], j[anyrow], col[anyrow], ratio[anyrow], bas[anyrow]
            if idx.size == 0:
                continue
        best = ratio.min(axis=1)
        tie = ratio <= best[:, None] + 1e-12 * (1.0 + best[:, None])
        big = np.iinfo(basis.dtype).max
        r = np.where(tie, bas, big).argmin(axis=1)  # Bland: lowest leaving basic index
        piv = T[idx, r, :] / T[idx, r, j][:, None]
        colfull = T[idx[:, None], rows_idx[None, :], j[:, None]]
        T[idx] -= colfull[:, :, None] * piv[:, None, :]
        T[idx, r, :] = piv
        T[idx[:, None], rows_idx[None, :], j[:, None]] = 0.0
        T[idx, r, j] = 1.0
        basis[idx, r] = j
        iters[idx] += 1
    return unbounded, ray_col


def solve_batch(c, A, b, relations, lower=None, upper=None, config: LPConfig = DEFAULT_CONFIG) -> BatchResult:
    """Solve ``B`` structurally identical LPs.

    ``c`` is ``(B, nv)``, ``A`` is ``(B, m, nv)``, ``b`` is ``(B, m)``;
    ``relations`` is a length-``m`` sequence of ``"<="``/``"=="``/``">="`` (or
    the codes 1/0/-1) shared by the stack, as are the bounds.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[1] == 0:
        raise StructuralError("objective stack must have shape (B, nv) with nv >= 1")
    B, nv = c.shape
    A = np.asarray(A, dtype=float).reshape(B, -1, nv) if np.size(A) else np.zeros((B, 0, nv))
    m = A.shape[1]
    b = np.asarray(b, dtype=float).reshape(B, m)
    rels = np.array([_RELATIONS[r] if isinstance(r, str) else int(r) for r in relations], dtype=int)
    if rels.shape != (m,):
        raise StructuralError(f"{rels.size} relations for {m} rows")
    lower = np.zeros(nv) if lower is None else np.broadcast_to(np.asarray(lower, dtype=float), (nv,))
    upper = np.full(nv, np.inf) if upper is None else np.broadcast_to(np.asarray(upper, dtype=float), (nv,))
    if not (np.isfinite(c).all() and np.isfinite(A).all() and np.isfinite(b).all()):
        raise StructuralError("LP data must be finite")

    c_s, A_s, b_s, rel_s, M, offset = _standardize(c, A, b, rels, lower, upper)
    m = A_s.shape[1]
    ny = A_s.shape[2]
    le_rows = np.flatnonzero(rel_s == 1)
    n_sl = le_rows.size
    ncol = ny + n_sl + m
    art_lo = ny + n_sl

    T = np.zeros((B, m + 1, ncol + 1))
    T[:, :m, :ny] = A_s
    for k, i in enumerate(le_rows):
        T[:, i, ny + k] = 1.0
    T[:, :m, -1] = b_s
    neg = b_s < 0.0
    T[:, :m, :] = np.where(neg[:, :, None], -T[:, :m, :], T[:, :m, :])
    T[:, np.arange(m), art_lo + np.arange(m)] = 1.0

    basis = np.tile(art_lo + np.arange(m), (B, 1)).astype(np.int64)
    slack_ok = np.zeros((B, m), dtype=bool)
    slack_ok[:, le_rows] = ~neg[:, le_rows]
    for k, i in enumerate(le_rows):
        basis[slack_ok[:, i], i] = ny + k
    art_rows = ~slack_ok

    limit = config.iter_factor * (nv + m)
    iters = np.zeros(B, dtype=np.int64)
    status = np.full(B, int(LPStatus.OPTIMAL))

    # phase 1: maximize minus the sum of the working artificials
    T[:, m, :] = np.einsum("bi,bij->bj", art_rows.astype(float), T[:, :m, :])
    T[:, m, art_lo:ncol] = 0.0
    active = art_rows.any(axis=1)
    _run(T, basis, active, art_lo, art_lo, False, limit, iters, config)
    stalled = iters >= limit
    scale = 1.0 + np.abs(b_s).max(axis=1, initial=0.0)
    infeasible = (T[:, m, -1] > config.feas_tol * scale) & ~stalled
    status[infeasible] = int(LPStatus.INFEASIBLE)
    status[stalled] = int(LPStatus.NUMERICAL_FAILURE)

    # phase 2
    go = status == int(LPStatus.OPTIMAL)
    cfull = np.zeros((B, ncol))
    cfull[:, :ny] = c_s
    cb = np.take_along_axis(cfull, basis, axis=1)
    T[:, m, :ncol] = cfull - np.einsum("bi,bij->bj", cb, T[:, :m, :ncol])
    T[:, m, -1] = -np.einsum("bi,bi->b", cb, T[:, :m, -1])
    active = go.copy()
    unbounded, ray_col = _run(T, basis, active, art_lo, art_lo, True, limit, iters, config)
    status[go & (iters >= limit) & ~unbounded] = int(LPStatus.NUMERICAL_FAILURE)
    status[unbounded] = int(LPStatus.UNBOUNDED)

    y = np.zeros((B, ncol))
    np.put_along_axis(y, basis, T[:, :m, -1], axis=1)
    y = np.maximum(y, 0.0)
    x = offset[None, :] + y[:, :ny] @ M.T
    value = np.einsum("bi,bi->b", c, x)

    ray = np.zeros((B, nv))
    ub = np.flatnonzero(unbounded)
    for k in ub:
        ry = np.zeros(ncol)
        jj = ray_col[k]
        ry[jj] = 1.0
        for i in range(m):
            ry[basis[k, i]] -= T[k, i, jj]
        ray[k] = M @ ry[:ny]
    value[unbounded] = np.inf
    value[status == int(LPStatus.INFEASIBLE)] = -np.inf
    value[status == int(LPStatus.NUMERICAL_FAILURE)] = np.nan

    # optimizers must satisfy the original rows
    opt = status == int(LPStatus.OPTIMAL)
    if opt.any() and A.shape[1]:
        lhs = np.einsum("bij,bj->bi", A, x)
        viol = np.where(rels == 1, lhs - b, np.where(rels == -1, b - lhs, np.abs(lhs - b)))
        tol = config.feas_tol * (1.0 + np.abs(b) + np.abs(A).sum(axis=2) * np.abs(x).max(axis=1, keepdims=True))
        bad = opt & (viol > tol).any(axis=1)
        status[bad] = int(LPStatus.NUMERICAL_FAILURE)
        value[bad] = np.nan
    return BatchResult(status, value, x, ray, iters)
