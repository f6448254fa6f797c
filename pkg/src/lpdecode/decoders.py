"""Adaptive LP decoders: ALP, ACG-ALP and ACG-MALP-B/C, plus the static LP.

All variants share one loop: solve, round, optionally drop inactive
constraints, search the rows of ``H`` for cuts, fall back to redundant
parity checks when ``H`` gives nothing and the point is fractional, and stop
when no new cut turns up.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .cuts import THETA, TOLERANCE, ParityCut, SolutionVector, cut_to_constraint, sweep
from .gf2 import BinaryMatrix
from .lp import EPS_ACT, EPS_FEAS, IncrementalSolver, LinearConstraint, LpProblem, solve
from .rpc import find_rpc_cuts

__all__ = [
    "Variant",
    "DecoderConfig",
    "IterationRecord",
    "DecodeResult",
    "DecoderError",
    "DecoderInvariantError",
    "init_constraints",
    "round_solution",
    "decode",
    "is_codeword",
    "static_lp_decode",
    "STATIC_MAX_DEGREE",
    "ITERATION_TRACE_HEADER",
    "write_iteration_trace",
]

STATIC_MAX_DEGREE = 12


class DecoderError(RuntimeError):
    pass


class DecoderInvariantError(DecoderError):
    """A loop invariant checked under ``check_invariants=True`` did not hold."""


class Variant(str, enum.Enum):
    ALP = "alp"
    ACG_ALP = "acg-alp"
    ACG_MALP_B = "acg-malp-b"
    ACG_MALP_C = "acg-malp-c"

    @classmethod
    def parse(cls, name) -> "Variant":
        if isinstance(name, cls):
            return name
        return cls(str(name).strip().lower().replace("_", "-"))

    @property
    def uses_rpc(self) -> bool:
        return self is not Variant.ALP

    @property
    def removes(self) -> bool:
        return self in (Variant.ACG_MALP_B, Variant.ACG_MALP_C)


@dataclass(frozen=True)
class DecoderConfig:
    variant: Variant = Variant.ACG_ALP
    max_iterations: int = 200  # 0 means unlimited
    tau: float = TOLERANCE
    check_invariants: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if not 0.0 < self.tau < 1e-3:
            raise ValueError("tau must lie in (0, 1e-3)")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")

    @property
    def theta(self) -> float:
        return 1.0 - self.tau


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    objective: float
    constraints: int
    cuts_h: int
    cuts_rpc: int
    added: int
    removed: int


@dataclass(frozen=True)
class DecodeResult:
    outcome: str  # "codeword" | "pseudocodeword" | "iteration_limit"
    point: np.ndarray = field(repr=False)
    objective: float
    records: tuple[IterationRecord, ...] = ()

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def integral(self) -> bool:
        return bool(np.all((self.point == 0.0) | (self.point == 1.0)))

    @property
    def bits(self) -> Optional[np.ndarray]:
        return self.point.astype(np.uint8) if self.outcome == "codeword" else None

    @property
    def final_constraints(self) -> int:
        return self.records[-1].constraints if self.records else 0

    @property
    def accumulated_constraints(self) -> int:
        return sum(r.constraints for r in self.records)

    @property
    def cuts_h(self) -> int:
        return sum(r.cuts_h for r in self.records)

    @property
    def cuts_rpc(self) -> int:
        return sum(r.cuts_rpc for r in self.records)

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "point": self.point.tolist(),
            "bits": None if self.bits is None else self.bits.tolist(),
            "objective": self.objective,
            "iterations": self.iterations,
            "final_constraints": self.final_constraints,
            "accumulated_constraints": self.accumulated_constraints,
            "cuts_h": self.cuts_h,
            "cuts_rpc": self.cuts_rpc,
            "records": [asdict(r) for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecodeResult":
        return cls(
            outcome=data["outcome"],
            point=np.asarray(data["point"], dtype=float),
            objective=float(data["objective"]),
            records=tuple(IterationRecord(**r) for r in data["records"]),
        )


ITERATION_TRACE_HEADER = ["iteration", "objective", "constraints", "cuts_h", "cuts_rpc", "added", "removed"]


def write_iteration_trace(result: DecodeResult, path) -> None:
    """One CSV line per iteration of a decode."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ITERATION_TRACE_HEADER)
        for r in result.records:
            w.writerow([r.iteration, repr(r.objective), r.constraints, r.cuts_h, r.cuts_rpc, r.added, r.removed])


def init_constraints(gamma) -> list[LinearConstraint]:
    """One bound per bit so that the first LP returns the hard decision."""
    out = []
    for i, g in enumerate(np.asarray(gamma, dtype=float)):
        if g >= 0:
            out.append(LinearConstraint((i,), (1.0,), 0.0, "box"))
        else:
            out.append(LinearConstraint((i,), (-1.0,), -1.0, "box"))
    return out


def round_solution(x, tau: float = TOLERANCE) -> SolutionVector:
    v = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    v = np.where(v < tau, 0.0, v)
    v = np.where(v > 1.0 - tau, 1.0, v)
    return SolutionVector(v)


def is_codeword(bits, H: BinaryMatrix) -> bool:
    b = np.asarray(bits).astype(np.int64)
    if b.shape != (H.n,):
        raise ValueError(f"expected {H.n} bits")
    return not np.any((H.bits.astype(np.int64) @ b) & 1)


def decode(gamma, H: BinaryMatrix, cfg: DecoderConfig = DecoderConfig()) -> DecodeResult:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (H.n,):
        raise ValueError(f"LLR vector has length {gamma.size}, code length is {H.n}")
    variant = cfg.variant
    theta = cfg.theta
    supports = H.supports
    check = cfg.check_invariants

    lp = IncrementalSolver(LpProblem(H.n, gamma, tuple(init_constraints(gamma))))
    present: dict[tuple, int] = {}
    row_count = np.zeros(H.m, dtype=np.int64)
    records: list[IterationRecord] = []
    prev_objective = -np.inf
    just_added: list[LinearConstraint] = []
    outcome = "iteration_limit"
    u = None
    objective = float("nan")

    def forget(con: LinearConstraint):
        present[con.key] -= 1
        if not present[con.key]:
            del present[con.key]
        if con.origin == "row":
            row_count[con.row] -= 1

    while True:
        if cfg.max_iterations and len(records) >= cfg.max_iterations:
            break
        sol = lp.solve()
        if not sol.optimal:
            raise DecoderError("LP became infeasible; constraints are inconsistent")
        objective = sol.objective_value
        if check:
            if objective < prev_objective - 10 * EPS_FEAS:
                raise DecoderInvariantError(
                    f"objective decreased from {prev_objective} to {objective}")
            for con in just_added:
                if con.evaluate(sol.point) < -EPS_FEAS:
                    raise DecoderInvariantError("an added cut is still violated after re-solving")
        u = round_solution(sol.point, cfg.tau)
        problem = lp.problem
        in_lp = problem.parity_count

        removed = 0
        if variant.removes:
            slacks = sol.slacks
            parity = np.array([c.is_parity for c in problem.constraints], dtype=bool)
            inactive = parity & (slacks > EPS_ACT)
            if variant is Variant.ACG_MALP_B:
                drop = inactive
            elif inactive.any():
                drop = inactive & (slacks > slacks[inactive].mean())
            else:
                drop = inactive
            removed = int(drop.sum())
            if removed:
                doomed = {id(c) for c, d in zip(problem.constraints, drop) if d}
                for con in problem.constraints:
                    if id(con) in doomed:
                        forget(con)
                lp.remove(lambda c, s: id(c) in doomed)
                if check:
                    again = solve(lp.problem)
                    if abs(again.objective_value - objective) > 10 * EPS_FEAS:
                        raise DecoderInvariantError(
                            f"dropping inactive constraints moved the optimum "
                            f"from {objective} to {again.objective_value}")

        if check and variant.removes:
            actual = np.zeros(H.m, dtype=np.int64)
            for con in lp.problem.constraints:
                if con.origin == "row":
                    actual[con.row] += 1
            if not np.array_equal(actual, row_count):
                raise DecoderInvariantError("row ledger disagrees with the constraints in the LP")

        if variant.removes:
            rows = np.flatnonzero(row_count == 0)
            h_cuts = _fresh(sweep(u, H.bits, rows, supports=supports, theta=theta), present)
            if not h_cuts:
                # rows that already hold a constraint may still cut at the new point
                busy = np.flatnonzero(row_count > 0)
                h_cuts = _fresh(sweep(u, H.bits, busy, supports=supports, theta=theta), present)
        else:
            h_cuts = _fresh(sweep(u, H.bits, supports=supports, theta=theta), present)

        rpc_cuts: list[ParityCut] = []
        if not h_cuts and variant.uses_rpc and not u.is_integral:
            rpc_cuts = _fresh(find_rpc_cuts(H, u, theta=theta), present)

        cuts = h_cuts + rpc_cuts
        records.append(IterationRecord(
            iteration=len(records) + 1,
            objective=objective,
            constraints=in_lp,
            cuts_h=len(h_cuts),
            cuts_rpc=len(rpc_cuts),
            added=len(cuts),
            removed=removed,
        ))
        if not cuts:
            outcome = "codeword" if u.is_integral else "pseudocodeword"
            break

        just_added = [cut_to_constraint(c) for c in cuts]
        if check:
            for con in just_added:
                if con.evaluate(u.values) > -(1.0 - theta) + 1e-12:
                    raise DecoderInvariantError("a new cut is not violated at the current point")
        lp.add(just_added)
        for con in just_added:
            present[con.key] = present.get(con.key, 0) + 1
            if con.origin == "row":
                row_count[con.row] += 1
        prev_objective = objective

    if outcome == "codeword" and not is_codeword(u.values, H):
        raise DecoderInvariantError("integral output fails a parity check")
    return DecodeResult(outcome, np.array(u.values), objective, tuple(records))


def _fresh(cuts: list[ParityCut], present: dict) -> list[ParityCut]:
    out, seen = [], set()
    for c in cuts:
        if c.key in present or c.key in seen:
            continue
        seen.add(c.key)
        out.append(c)
    return out


def static_lp_decode(gamma, H: BinaryMatrix, tau: float = TOLERANCE) -> DecodeResult:
    """Solve the LP with every parity inequality of every row of ``H`` at once."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (H.n,):
        raise ValueError(f"LLR vector has length {gamma.size}, code length is {H.n}")
    if H.row_weights.max() > STATIC_MAX_DEGREE:
        raise ValueError(f"row degree exceeds {STATIC_MAX_DEGREE}; static LP too large")
    constraints = []
    for j, support in enumerate(H.supports):
        for k in range(1, len(support) + 1, 2):
            for V in combinations(support, k):
                constraints.append(cut_to_constraint(ParityCut(support, V, float("nan"), "row", j)))
    problem = LpProblem(H.n, gamma, tuple(constraints))
    sol = solve(problem)
    if not sol.optimal:
        raise DecoderError("static LP infeasible")
    u = round_solution(sol.point, tau)
    outcome = "codeword" if u.is_integral else "pseudocodeword"
    record = IterationRecord(1, sol.objective_value, len(constraints), 0, 0, 0, 0)
    return DecodeResult(outcome, np.array(u.values), sol.objective_value, (record,))
