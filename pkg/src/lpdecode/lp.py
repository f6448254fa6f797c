"""Dense LP solver for ``min c.u  s.t.  0 <= u <= 1,  a_k.u >= b_k``.

The solver is a bounded-variable dual simplex working on the full tableau
``B^-1 [A | -I]``.  Starting from the all-slack basis with every variable at
the bound its cost favours gives a dual feasible start, so no phase one is
needed.  Single-variable constraints are folded into the variable bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "EPS_FEAS",
    "EPS_OPT",
    "EPS_ACT",
    "LinearConstraint",
    "LpProblem",
    "LpSolution",
    "LpNumericalError",
    "solve",
    "IncrementalSolver",
    "add_constraints",
    "remove_constraints",
    "to_lp_text",
]

EPS_FEAS = 1e-9
EPS_OPT = 1e-9
EPS_ACT = 1e-9

_PIVOT_TOL = 1e-11
_REFACTOR_EVERY = 64


class LpNumericalError(RuntimeError):
    """The simplex iteration limit was exceeded or the basis became singular."""


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coefficients[t] * u[indices[t]]) >= bound``.

    ``origin`` is ``"box"`` for bound constraints, ``"row"`` for a parity
    inequality of original check ``row`` and ``"rpc"`` for one derived from a
    redundant check.  Parity constraints keep the generating check support and
    the odd subset so that duplicates can be recognised.
    """

    indices: tuple[int, ...]
    coefficients: tuple[float, ...]
    bound: float
    origin: str = "box"
    row: Optional[int] = None
    support: Optional[tuple[int, ...]] = None
    subset: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if len(self.indices) != len(self.coefficients):
            raise ValueError("indices and coefficients differ in length")
        if self.origin not in ("box", "row", "rpc"):
            raise ValueError(f"unknown origin {self.origin!r}")

    @property
    def is_parity(self) -> bool:
        return self.origin != "box"

    @property
    def key(self) -> tuple:
        return (self.support, self.subset) if self.is_parity else (self.indices, self.coefficients, self.bound)

    def evaluate(self, u) -> float:
        """Left-hand side minus bound (the slack) at ``u``."""
        u = np.asarray(u, dtype=float)
        return float(np.dot(self.coefficients, u[list(self.indices)])) - self.bound


@dataclass(frozen=True)
class LpProblem:
    n: int
    objective: np.ndarray
    constraints: tuple[LinearConstraint, ...] = ()

    def __post_init__(self):
        obj = np.array(self.objective, dtype=float)
        if obj.shape != (self.n,):
            raise ValueError(f"objective must have length {self.n}")
        if self.n < 1:
            raise ValueError("need at least one variable")
        if not np.all(np.isfinite(obj)):
            raise ValueError("objective coefficients must be finite")
        obj.setflags(write=False)
        object.__setattr__(self, "objective", obj)
        cons = tuple(self.constraints)
        for c in cons:
            _check_indices(c, self.n)
        object.__setattr__(self, "constraints", cons)

    @property
    def parity_count(self) -> int:
        return sum(1 for c in self.constraints if c.is_parity)


@dataclass(frozen=True)
class LpSolution:
    status: str
    point: Optional[np.ndarray]
    objective_value: float
    slacks: np.ndarray = field(repr=False)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _check_indices(c: LinearConstraint, n: int) -> None:
    for i in c.indices:
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range 0..{n - 1}")


def add_constraints(problem: LpProblem, cuts: Iterable[LinearConstraint]) -> LpProblem:
    cuts = tuple(cuts)
    for c in cuts:
        _check_indices(c, problem.n)
    return replace(problem, constraints=problem.constraints + cuts)


def remove_constraints(
    problem: LpProblem,
    slacks: Sequence[float],
    predicate: Callable[[LinearConstraint, float], bool],
) -> LpProblem:
    """Drop every constraint for which ``predicate(constraint, slack)`` is true."""
    if len(slacks) != len(problem.constraints):
        raise ValueError("need one slack per constraint")
    kept = tuple(c for c, s in zip(problem.constraints, slacks) if not predicate(c, float(s)))
    return replace(problem, constraints=kept)


# solver ---------------------------------------------------------------------

def _presolve(problem: LpProblem):
    """Fold single-variable constraints into bounds; return (lo, hi, rows) or None if infeasible."""
    lo = np.zeros(problem.n)
    hi = np.ones(problem.n)
    rows: list[LinearConstraint] = []
    for con in problem.constraints:
        nz = [(i, a) for i, a in zip(con.indices, con.coefficients) if a != 0.0]
        if len(nz) == 0:
            if con.bound > EPS_FEAS:
                return None
        elif len(nz) == 1:
            i, a = nz[0]
            if a > 0:
                lo[i] = max(lo[i], con.bound / a)
            else:
                hi[i] = min(hi[i], con.bound / a)
        else:
            rows.append(con)
    if np.any(lo > hi + EPS_FEAS):
        return None
    return lo, np.maximum(hi, lo), rows


def solve(problem: LpProblem) -> LpSolution:
    """Solve from scratch."""
    pre = _presolve(problem)
    if pre is None:
        return _infeasible(problem)
    lo, hi, rows = pre
    core = _DualSimplex(problem.objective, lo, hi)
    core.add_rows(rows)
    return _finish(problem, core, lo, hi)


def _finish(problem: LpProblem, core: "_DualSimplex", lo, hi) -> LpSolution:
    status, u, pivots = core.run()
    if status != "optimal":
        return _infeasible(problem, pivots)
    u = np.clip(u, lo, hi)
    slacks = np.array([con.evaluate(u) for con in problem.constraints])
    u.setflags(write=False)
    return LpSolution("optimal", u, float(problem.objective @ u), slacks, pivots)


def _infeasible(problem: LpProblem, pivots: int = 0) -> LpSolution:
    return LpSolution("infeasible", None, float("nan"), np.full(len(problem.constraints), np.nan), pivots)


class IncrementalSolver:
    """An LP whose constraint set changes between solves.

    The simplex basis is kept across :meth:`add` and :meth:`remove`, so a
    re-solve starts from the previous optimum.  Dropping constraints that are
    inactive there leaves that optimum in place.  Bound constraints present
    at construction become variable bounds; everything added later is a row.
    """

    def __init__(self, problem: LpProblem):
        pre = _presolve(problem)
        if pre is None:
            raise ValueError("initial constraints are infeasible")
        self._lo, self._hi, rows = pre
        in_rows = {id(c) for c in rows}
        fixed = tuple(c for c in problem.constraints if id(c) not in in_rows)
        self._fixed = len(fixed)
        self._rows: list[LinearConstraint] = list(rows)
        self._problem = replace(problem, constraints=fixed + tuple(rows))
        self._core = _DualSimplex(problem.objective, self._lo, self._hi)
        self._core.add_rows(rows)
        self.last: Optional[LpSolution] = None

    @property
    def problem(self) -> LpProblem:
        return self._problem

    def add(self, constraints: Iterable[LinearConstraint]) -> None:
        constraints = list(constraints)
        self._problem = add_constraints(self._problem, constraints)
        self._core.add_rows(constraints)
        self._rows.extend(constraints)
        self.last = None

    def remove(self, predicate: Callable[[LinearConstraint, float], bool]) -> int:
        """Drop rows (never the bounds) matching ``predicate(constraint, slack)`` at the last solution."""
        if self.last is None:
            raise RuntimeError("remove() needs slacks from a preceding solve()")
        slacks = self.last.slacks[self._fixed:]
        doomed = [k for k, (c, s) in enumerate(zip(self._rows, slacks)) if predicate(c, float(s))]
        if not doomed:
            return 0
        self._core.remove_rows(doomed)
        gone = set(doomed)
        self._rows = [c for k, c in enumerate(self._rows) if k not in gone]
        fixed = self._problem.constraints[: self._fixed]
        self._problem = replace(self._problem, constraints=fixed + tuple(self._rows))
        self.last = None
        return len(doomed)

    def solve(self) -> LpSolution:
        self.last = _finish(self._problem, self._core, self._lo, self._hi)
        return self.last


class _DualSimplex:
    """Bounded-variable dual simplex on the dense tableau ``B^-1 [A | -I]``.

    Columns ``0..n-1`` are the decision variables, column ``n + k`` is the
    surplus of row ``k`` (``a_k.u - s_k = b_k``, ``s_k >= 0``).
    """

    def __init__(self, c, lo, hi):
        self.n = n = len(c)
        self.c = np.asarray(c, dtype=float)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.A = np.zeros((0, n))
        self.b = np.zeros(0)
        self.basis = np.zeros(0, dtype=np.int64)
        self.at_upper = self.c < 0
        self.xn = np.where(self.at_upper, self.hi, self.lo)
        self.T = np.zeros((0, n))
        self.beta = np.zeros(0)
        self.d = self.c.copy()
        self.fresh = True

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def _full(self) -> np.ndarray:
        return np.hstack([self.A, -np.eye(self.m)])

    def _bounds(self):
        lower = np.concatenate([self.lo, np.zeros(self.m)])
        upper = np.concatenate([self.hi, np.full(self.m, np.inf)])
        return lower, upper

    def add_rows(self, rows: Sequence[LinearConstraint]) -> None:
        if not rows:
            return
        k = len(rows)
        A_new = np.zeros((k, self.n))
        b_new = np.empty(k)
        for t, con in enumerate(rows):
            for i, a in zip(con.indices, con.coefficients):
                A_new[t, i] += a
            b_new[t] = con.bound
        m = self.m
        # each new surplus enters the basis; express its row in the current basis
        T = np.hstack([self.T, np.zeros((m, k))])
        full_new = np.hstack([A_new, np.zeros((k, m)), -np.eye(k)])
        coeffs = full_new[:, self.basis]
        rows_new = full_new - coeffs @ T
        beta_new = b_new - coeffs @ self.beta
        # the surplus coefficient is -1 in every new row
        self.T = np.vstack([T, -rows_new])
        self.beta = np.concatenate([self.beta, -beta_new])
        self.basis = np.concatenate([self.basis, np.arange(self.n + m, self.n + m + k)])
        self.A = np.vstack([self.A, A_new])
        self.b = np.concatenate([self.b, b_new])
        self.d = np.concatenate([self.d, np.zeros(k)])
        self.at_upper = np.concatenate([self.at_upper, np.zeros(k, dtype=bool)])
        self.xn = np.concatenate([self.xn, np.zeros(k)])

    def remove_rows(self, rows: Sequence[int]) -> None:
        rows = np.asarray(sorted(rows), dtype=np.int64)
        cols = self.n + rows
        keep_cols = np.setdiff1d(np.arange(self.n + self.m), cols)
        keep_rows = np.setdiff1d(np.arange(self.m), rows)
        basic_pos = {int(v): r for r, v in enumerate(self.basis)}
        all_basic = all(int(c) in basic_pos for c in cols)
        self.A = self.A[keep_rows]
        self.b = self.b[keep_rows]
        if not all_basic:
            self._restart()
            return
        drop_pos = np.array([basic_pos[int(c)] for c in cols], dtype=np.int64)
        keep_pos = np.setdiff1d(np.arange(len(self.basis)), drop_pos)
        self.T = self.T[np.ix_(keep_pos, keep_cols)]
        self.beta = self.beta[keep_pos]
        remap = np.full(self.n + self.m + len(rows), -1, dtype=np.int64)
        remap[keep_cols] = np.arange(len(keep_cols))
        self.basis = remap[self.basis[keep_pos]]
        self.d = self.d[keep_cols]
        self.at_upper = self.at_upper[keep_cols]
        self.xn = self.xn[keep_cols]

    def _restart(self) -> None:
        m = self.m
        self.basis = np.arange(self.n, self.n + m)
        self.at_upper = np.concatenate([self.c < 0, np.zeros(m, dtype=bool)])
        self.xn = np.concatenate([np.where(self.c < 0, self.hi, self.lo), np.zeros(m)])
        self.T = np.hstack([-self.A, np.eye(m)])
        self.beta = -self.b.copy()
        self.d = np.concatenate([self.c, np.zeros(m)])

    def _refactor(self) -> None:
        full = self._full()
        B = full[:, self.basis]
        try:
            self.T = np.linalg.solve(B, full)
            self.beta = np.linalg.solve(B, self.b)
        except np.linalg.LinAlgError as exc:
            raise LpNumericalError("singular basis") from exc
        cost = np.concatenate([self.c, np.zeros(self.m)])
        self.d = cost - cost[self.basis] @ self.T
        self.d[self.basis] = 0.0

    def run(self):
        n, m = self.n, self.m
        N = n + m
        lower, upper = self._bounds()
        basis = self.basis
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basis] = True
        at_upper = self.at_upper
        xn = self.xn
        xn[basis] = 0.0

        max_pivots = 50 * N + 1000
        degenerate_limit = 5 * N
        degenerate_run = 0
        bland = False
        since_refactor = 0
        pivots = 0

        while True:
            T, beta, d = self.T, self.beta, self.d
            xb = beta - T @ xn
            below = lower[basis] - xb
            above = xb - upper[basis]
            infeas = np.maximum(below, above)
            candidates = np.flatnonzero(infeas > EPS_FEAS)
            if candidates.size == 0:
                if since_refactor:
                    # confirm on a fresh factorisation before declaring optimality
                    self._refactor()
                    since_refactor = 0
                    continue
                break
            if pivots >= max_pivots:
                raise LpNumericalError(f"dual simplex exceeded {max_pivots} pivots")

            if bland:
                r = int(candidates[np.argmin(basis[candidates])])
            else:
                r = int(candidates[np.argmax(infeas[candidates])])
            to_lower = below[r] > 0

            alpha = T[r]
            if to_lower:
                ok = ((~at_upper) & (alpha < -_PIVOT_TOL)) | (at_upper & (alpha > _PIVOT_TOL))
            else:
                ok = ((~at_upper) & (alpha > _PIVOT_TOL)) | (at_upper & (alpha < -_PIVOT_TOL))
            elig = np.flatnonzero(ok & ~is_basic)
            if elig.size == 0:
                if since_refactor:
                    self._refactor()
                    since_refactor = 0
                    continue
                return "infeasible", None, pivots

            ratios = np.abs(d[elig]) / np.abs(alpha[elig])
            best = ratios.min()
            ties = elig[ratios <= best + 1e-12]
            if bland or ties.size == 1:
                q = int(ties[0])
            else:
                q = int(ties[np.argmax(np.abs(alpha[ties]))])

            if best <= 1e-12:
                degenerate_run += 1
                if degenerate_run > degenerate_limit:
                    bland = True
            else:
                degenerate_run = 0

            piv = alpha[q]
            leaving = int(basis[r])
            T[r] /= piv
            beta[r] /= piv
            col = T[:, q].copy()
            col[r] = 0.0
            T -= np.outer(col, T[r])
            beta -= col * beta[r]
            d -= d[q] * T[r]
            d[q] = 0.0

            is_basic[leaving] = False
            at_upper[leaving] = not to_lower
            xn[leaving] = lower[leaving] if to_lower else upper[leaving]
            basis[r] = q
            is_basic[q] = True
            at_upper[q] = False
            xn[q] = 0.0
            pivots += 1
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                self._refactor()
                since_refactor = 0

        x = xn.copy()
        x[basis] = self.beta - self.T @ xn
        return "optimal", x[:n], pivots


def to_lp_text(problem: LpProblem) -> str:
    """CPLEX-LP style dump for eyeballing or feeding to an external solver."""

    def term(a: float, i: int, first: bool) -> str:
        sign = "-" if a < 0 else ("" if first else "+")
        mag = abs(a)
        coef = "" if mag == 1 else f"{mag:.17g} "
        return f"{sign} {coef}u{i + 1}".strip() if first else f"{sign} {coef}u{i + 1}"

    nz = [(i, float(a)) for i, a in enumerate(problem.objective) if a != 0]
    objective = " ".join(term(a, i, k == 0) for k, (i, a) in enumerate(nz)) or "0 u1"
    lines = ["Minimize", f" obj: {objective}", "Subject To"]
    for k, con in enumerate(problem.constraints):
        lhs = " ".join(term(a, i, t == 0) for t, (i, a) in enumerate(zip(con.indices, con.coefficients)))
        tag = con.origin if con.row is None else f"{con.origin}{con.row + 1}"
        lines.append(f" c{k + 1}_{tag}: {lhs} >= {con.bound:.17g}")
    lines.append("Bounds")
    lines += [f" 0 <= u{i + 1} <= 1" for i in range(problem.n)]
    lines.append("End")
    return "\n".join(lines) + "\n"
