"""Parity inequalities, cut conditions and the cut-search routine.

For a check with support ``N`` and an odd subset ``V`` of ``N`` the parity
inequality reads::

    sum_{i in V} (1 - u_i) + sum_{i in N \\ V} u_i >= 1

A check can violate at most one of its parity inequalities at any point of
the unit cube, and :func:`cut_search` finds it in time linear in the check
degree.  Comparisons use ``THETA = 1 - 1e-6`` in place of 1 so that
solver round-off never produces false cuts.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from .lp import LinearConstraint

__all__ = [
    "THETA",
    "SolutionVector",
    "ParityCut",
    "parity_lhs",
    "g_minimum",
    "necessary_condition",
    "necessary_condition_gap_form",
    "sufficient_condition",
    "sufficient_condition_gap_form",
    "cut_search",
    "brute_force_cut",
    "cut_to_constraint",
    "sweep",
]

TOLERANCE = 1e-6
THETA = 1.0 - TOLERANCE
BRUTE_FORCE_MAX_DEGREE = 20


@dataclass(frozen=True, eq=False)
class SolutionVector:
    """A point of ``[0, 1]^n``; ``integral_mask[i]`` is true iff ``values[i]`` is 0 or 1."""

    values: np.ndarray
    integral_mask: np.ndarray

    def __init__(self, values):
        v = np.array(values, dtype=float)
        if v.ndim != 1:
            raise ValueError("expected a vector")
        if np.any(~((v >= 0.0) & (v <= 1.0))):
            raise ValueError("entries must lie in [0, 1]")
        mask = (v == 0.0) | (v == 1.0)
        v.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "integral_mask", mask)

    def __len__(self) -> int:
        return self.values.size

    @property
    def is_integral(self) -> bool:
        return bool(self.integral_mask.all())

    @property
    def fractional(self) -> np.ndarray:
        return np.flatnonzero(~self.integral_mask)


@dataclass(frozen=True)
class ParityCut:
    """A violated parity inequality: check support, odd subset and its left side."""

    support: tuple[int, ...]
    subset: tuple[int, ...]
    lhs: float
    origin: str = "row"
    row: Optional[int] = None

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.support, self.subset)


def _vals(u) -> np.ndarray:
    return u.values if isinstance(u, SolutionVector) else np.asarray(u, dtype=float)


def parity_lhs(u, support: Sequence[int], subset: Iterable[int]) -> float:
    vals = _vals(u)
    inside = set(subset)
    if not inside.issubset(support):
        raise ValueError("subset is not contained in the support")
    total = 0.0
    for i in support:
        x = float(vals[i])
        total += (1.0 - x) if i in inside else x
    return total


def _split(vals, support):
    T = [i for i in support if vals[i] > 0.5]
    S = [i for i in support if 0.0 < vals[i] < 1.0]
    return T, S


def g_minimum(u, support: Sequence[int]) -> float:
    """``g(T)``: the parity left side at ``T = {i : u_i > 1/2}``, the minimiser over all subsets."""
    vals = _vals(u)
    T, _ = _split(vals, support)
    return parity_lhs(vals, support, T)


def necessary_condition(u, support: Sequence[int]) -> bool:
    """``g(T) < THETA``; a check with no fractional neighbour cuts iff its parity fails."""
    vals = _vals(u)
    T, S = _split(vals, support)
    if not S:
        return len(T) % 2 == 1
    return parity_lhs(vals, support, T) < THETA


def necessary_condition_gap_form(u, support: Sequence[int]) -> bool:
    """The same test written over the fractional neighbours only."""
    vals = _vals(u)
    T, S = _split(vals, support)
    if not S:
        return len(T) % 2 == 1
    gaps = sum(abs(0.5 - float(vals[i])) for i in S)
    return 0.5 * len(S) - gaps < THETA


def sufficient_condition(u, support: Sequence[int]) -> bool:
    vals = _vals(u)
    T, S = _split(vals, support)
    if not S:
        return len(T) % 2 == 1
    g = parity_lhs(vals, support, T)
    return g + 2.0 * min(abs(0.5 - float(vals[i])) for i in S) < THETA


def sufficient_condition_gap_form(u, support: Sequence[int]) -> bool:
    vals = _vals(u)
    T, S = _split(vals, support)
    if not S:
        return len(T) % 2 == 1
    gaps = [abs(0.5 - float(vals[i])) for i in S]
    return 0.5 * len(S) - sum(gaps) + 2.0 * min(gaps) < THETA


def cut_search(u, support: Sequence[int], *, origin: str = "row", row: Optional[int] = None,
               theta: float = THETA) -> Optional[ParityCut]:
    """Return the violated parity inequality of this check at ``u``, if any.

    Ties in the distance to 1/2 go to the smallest index; with no fractional
    neighbour the smallest index of the support is toggled.
    """
    if len(support) == 0:
        return None
    vals = _vals(u)
    support = tuple(sorted(support))
    T, S = _split(vals, support)
    V = set(T)
    if len(V) % 2 == 0:
        if S:
            i_star = min(S, key=lambda i: (abs(0.5 - float(vals[i])), i))
        else:
            i_star = min(support)
        V ^= {i_star}
    subset = tuple(sorted(V))
    lhs = parity_lhs(vals, support, subset)
    if lhs < theta:
        return ParityCut(support, subset, lhs, origin, row)
    return None


_odd_subset_cache: dict[int, tuple[np.ndarray, list[tuple[int, ...]]]] = {}


def _odd_subsets(d: int):
    if d not in _odd_subset_cache:
        subsets = [s for k in range(1, d + 1, 2) for s in combinations(range(d), k)]
        subsets.sort()
        sign = np.ones((len(subsets), d))
        for r, s in enumerate(subsets):
            sign[r, list(s)] = -1.0
        _odd_subset_cache[d] = (sign, subsets)
    return _odd_subset_cache[d]


def brute_force_cut(u, support: Sequence[int]) -> list[tuple[int, ...]]:
    """Every odd subset whose parity inequality is violated, lexicographically ordered.

    Enumerates all ``2**(d-1)`` odd subsets; the final decision for each
    candidate is made with :func:`parity_lhs`.
    """
    support = tuple(sorted(support))
    d = len(support)
    if d > BRUTE_FORCE_MAX_DEGREE:
        raise ValueError(f"degree {d} exceeds brute-force limit {BRUTE_FORCE_MAX_DEGREE}")
    if d == 0:
        return []
    vals = _vals(u)
    local = np.array([float(vals[i]) for i in support])
    sign, subsets = _odd_subsets(d)
    sizes = (sign < 0).sum(axis=1)
    approx = sizes + sign @ local
    found = []
    for r in np.flatnonzero(approx < THETA + 1e-9):
        V = tuple(support[k] for k in subsets[r])
        if parity_lhs(vals, support, V) < THETA:
            found.append(V)
    return sorted(found)


def cut_to_constraint(cut: ParityCut) -> LinearConstraint:
    """Rewrite the cut as ``-sum_V u_i + sum_{N\\V} u_i >= 1 - |V|``."""
    inside = set(cut.subset)
    coefs = tuple(-1.0 if i in inside else 1.0 for i in cut.support)
    return LinearConstraint(
        indices=cut.support,
        coefficients=coefs,
        bound=1.0 - len(cut.subset),
        origin=cut.origin,
        row=cut.row,
        support=cut.support,
        subset=cut.subset,
    )


def sweep(u: SolutionVector, bits: np.ndarray, rows: Optional[Iterable[int]] = None,
          *, origin: str = "row", supports=None, theta: float = THETA) -> list[ParityCut]:
    """Run :func:`cut_search` over the rows of a binary matrix.

    A vectorised evaluation of the minimum achievable left side screens out
    rows that cannot cut; survivors are decided by :func:`cut_search`.
    """
    vals = u.values
    rows = np.arange(bits.shape[0]) if rows is None else np.fromiter(rows, dtype=np.int64)
    if rows.size == 0:
        return []
    sub = bits[rows].astype(bool)
    above = vals > 0.5
    frac = ~u.integral_mask
    contrib = np.where(above, 1.0 - vals, vals)
    g = sub @ contrib
    odd = (sub @ above.astype(np.int64)) % 2 == 1
    gap = np.abs(0.5 - vals)
    min_gap = np.where(sub & frac, gap, np.inf).min(axis=1)
    # integral-only rows toggle an integral entry, which costs exactly 1
    extra = np.where(odd, 0.0, np.where(np.isfinite(min_gap), 2.0 * min_gap, 1.0))
    candidates = rows[g + extra < theta + 1e-9]
    cuts = []
    for j in candidates.tolist():
        support = supports[j] if supports is not None else tuple(np.flatnonzero(bits[j]).tolist())
        cut = cut_search(u, support, origin=origin, row=j, theta=theta)
        if cut is not None:
            cuts.append(cut)
    return cuts
