"""Adaptive generation of redundant parity checks (RPCs) from a pseudocodeword.

The columns of ``H`` are reordered so that fractional positions come first,
sorted by closeness to 0 or 1, then zeros, then ones.  Reducing the
fractional block to reduced row echelon form concentrates few, confident
fractional positions in each row, and the rows of the resulting equivalent
matrix are then searched for cuts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cuts import THETA, ParityCut, SolutionVector, sweep
from .gf2 import BinaryMatrix, ColumnPermutation, partial_rref, permute_columns

__all__ = [
    "FractionalSplit",
    "RedundantMatrix",
    "sort_permutation",
    "transform",
    "build_redundant_matrix",
    "weight_one_fractional_rows",
    "find_rpc_cuts",
]


@dataclass(frozen=True)
class FractionalSplit:
    a: int
    b: int
    permutation: ColumnPermutation

    @property
    def n(self) -> int:
        return len(self.permutation)


@dataclass(frozen=True)
class RedundantMatrix:
    split: FractionalSplit
    reduced: BinaryMatrix  # rows reduced, columns still permuted
    pivots: tuple[int, ...]
    matrix: BinaryMatrix  # columns restored to the original order


def sort_permutation(p: SolutionVector) -> FractionalSplit:
    vals = p.values
    frac = np.flatnonzero(~p.integral_mask)
    order = np.argsort(np.abs(0.5 - vals[frac]), kind="stable")
    zeros = np.flatnonzero(vals == 0.0)
    ones = np.flatnonzero(vals == 1.0)
    mapping = np.concatenate([frac[order], zeros, ones]).tolist()
    return FractionalSplit(len(frac), len(zeros), ColumnPermutation(tuple(mapping)))


def transform(H: BinaryMatrix, p: SolutionVector) -> RedundantMatrix:
    if len(p) != H.n:
        raise ValueError(f"point has length {len(p)}, matrix has {H.n} columns")
    split = sort_permutation(p)
    if split.a == 0:
        return RedundantMatrix(split, permute_columns(H, split.permutation), (), H)
    reduced, pivots = partial_rref(permute_columns(H, split.permutation), split.a)
    restored = permute_columns(reduced, split.permutation.inverse())
    return RedundantMatrix(split, reduced, pivots, restored)


def build_redundant_matrix(H: BinaryMatrix, p: SolutionVector) -> BinaryMatrix:
    return transform(H, p).matrix


def weight_one_fractional_rows(Hbar: BinaryMatrix, a: int) -> list[int]:
    if a == 0:
        return []
    return np.flatnonzero(Hbar.bits[:, :a].sum(axis=1) == 1).tolist()


def find_rpc_cuts(H: BinaryMatrix, p: SolutionVector, *, theta: float = THETA) -> list[ParityCut]:
    """Cuts at ``p`` from every row of the redundant matrix, deduplicated, in row order."""
    Ht = build_redundant_matrix(H, p)
    seen = set()
    cuts = []
    for cut in sweep(p, Ht.bits, origin="rpc", theta=theta):
        if cut.key not in seen:
            seen.add(cut.key)
            cuts.append(cut)
    return cuts
