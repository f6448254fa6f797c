"""Dense binary matrices over GF(2).

Rows are stored as ``uint8`` numpy arrays so that row additions are
vectorised XORs.  Matrices are immutable once constructed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "AlistError",
    "BinaryMatrix",
    "ColumnPermutation",
    "parse_alist",
    "to_alist",
    "read_alist",
    "write_alist",
    "permute_columns",
    "partial_rref",
    "rref",
    "rank",
    "nullspace",
    "row_span",
    "row_space_equal",
]


class AlistError(ValueError):
    """Raised for malformed alist input; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BinaryMatrix:
    """An ``m x n`` matrix over GF(2)."""

    __slots__ = ("bits", "__dict__")

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("BinaryMatrix needs a 2-d array")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"BinaryMatrix must be at least 1x1, got {arr.shape}")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self.bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BinaryMatrix":
        # trusted constructor for arrays already known to be 0/1 uint8
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        obj.bits = arr
        return obj

    @classmethod
    def zeros(cls, m: int, n: int) -> "BinaryMatrix":
        return cls(np.zeros((m, n), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def m(self) -> int:
        return self.bits.shape[0]

    @property
    def n(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    @cached_property
    def supports(self) -> tuple[tuple[int, ...], ...]:
        """Column indices of the ones in each row, i.e. N(j) for check j."""
        return tuple(tuple(np.flatnonzero(row).tolist()) for row in self.bits)

    @property
    def row_weights(self) -> np.ndarray:
        return self.bits.sum(axis=1, dtype=np.int64)

    @property
    def col_weights(self) -> np.ndarray:
        return self.bits.sum(axis=0, dtype=np.int64)

    def row(self, j: int) -> np.ndarray:
        return self.bits[j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix(m={self.m}, n={self.n})"

    def __str__(self) -> str:
        return "\n".join("".join(str(int(b)) for b in row) for row in self.bits)


@dataclass(frozen=True)
class ColumnPermutation:
    """Column reordering: new column ``k`` is original column ``mapping[k]``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError("mapping must be a permutation of 0..n-1")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> "ColumnPermutation":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def inverse(self) -> "ColumnPermutation":
        inv = [0] * len(self.mapping)
        for new, old in enumerate(self.mapping):
            inv[old] = new
        return ColumnPermutation(tuple(inv))

    def then(self, other: "ColumnPermutation") -> "ColumnPermutation":
        """Permutation equal to applying ``self`` first and ``other`` second."""
        if len(other) != len(self):
            raise ValueError("permutation lengths differ")
        return ColumnPermutation(tuple(self.mapping[k] for k in other.mapping))

    def apply(self, values: Sequence) -> np.ndarray:
        return np.asarray(values)[list(self.mapping)]


# alist I/O ------------------------------------------------------------------

def _ints(line_no: int, text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise AlistError(line_no, f"expected integers, got {text.strip()!r}") from None


def parse_alist(text: str) -> BinaryMatrix:
    """Parse MacKay's alist format.

    Zero entries in the index lists are padding and ignored.  Column and row
    lists must describe the same set of ones.
    """
    lines = text.splitlines()
    # leading blank lines are tolerated; afterwards the layout is positional
    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1

    def line(k: int, may_be_empty: bool = False) -> tuple[int, str]:
        # an empty row or column list may be a blank line, or missing at the end of the file
        pos = start + k
        if pos >= len(lines):
            if may_be_empty:
                return pos + 1, ""
            raise AlistError(pos + 1, "unexpected end of input")
        return pos + 1, lines[pos]

    no, txt = line(0)
    header = _ints(no, txt)
    if len(header) != 2:
        raise AlistError(no, "header must be 'n m'")
    n, m = header
    if n < 1 or m < 1:
        raise AlistError(no, f"invalid dimensions n={n} m={m}")

    no, txt = line(1)
    maxdeg = _ints(no, txt)
    if len(maxdeg) != 2:
        raise AlistError(no, "second line must hold max column and row degree")
    max_col, max_row = maxdeg

    no, txt = line(2)
    col_deg = _ints(no, txt)
    if len(col_deg) != n:
        raise AlistError(no, f"expected {n} column degrees, got {len(col_deg)}")
    no, txt = line(3)
    row_deg = _ints(no, txt)
    if len(row_deg) != m:
        raise AlistError(no, f"expected {m} row degrees, got {len(row_deg)}")
    if col_deg and max(col_deg) > max_col:
        raise AlistError(start + 2, "column degree exceeds declared maximum")
    if row_deg and max(row_deg) > max_row:
        raise AlistError(start + 2, "row degree exceeds declared maximum")

    by_col = np.zeros((m, n), dtype=np.uint8)
    for i in range(n):
        no, txt = line(4 + i, col_deg[i] == 0)
        idx = [v for v in _ints(no, txt) if v != 0]
        if len(idx) != col_deg[i]:
            raise AlistError(no, f"column {i + 1} lists {len(idx)} entries, degree is {col_deg[i]}")
        for v in idx:
            if not 1 <= v <= m:
                raise AlistError(no, f"row index {v} out of range 1..{m}")
            if by_col[v - 1, i]:
                raise AlistError(no, f"duplicate row index {v}")
            by_col[v - 1, i] = 1

    by_row = np.zeros((m, n), dtype=np.uint8)
    for j in range(m):
        no, txt = line(4 + n + j, row_deg[j] == 0)
        idx = [v for v in _ints(no, txt) if v != 0]
        if len(idx) != row_deg[j]:
            raise AlistError(no, f"row {j + 1} lists {len(idx)} entries, degree is {row_deg[j]}")
        for v in idx:
            if not 1 <= v <= n:
                raise AlistError(no, f"column index {v} out of range 1..{n}")
            if by_row[j, v - 1]:
                raise AlistError(no, f"duplicate column index {v}")
            by_row[j, v - 1] = 1
        if not np.array_equal(by_row[j], by_col[j]):
            raise AlistError(no, f"row {j + 1} is inconsistent with the column lists")

    return BinaryMatrix._wrap(by_col)


def to_alist(M: BinaryMatrix) -> str:
    """Canonical alist text: ascending indices, single spaces, no padding."""
    cols = [np.flatnonzero(M.bits[:, i]) + 1 for i in range(M.n)]
    rows = [np.flatnonzero(M.bits[j]) + 1 for j in range(M.m)]
    cw = [len(c) for c in cols]
    rw = [len(r) for r in rows]
    out = [
        f"{M.n} {M.m}",
        f"{max(cw)} {max(rw)}",
        " ".join(map(str, cw)),
        " ".join(map(str, rw)),
    ]
    out += [" ".join(map(str, c.tolist())) for c in cols]
    out += [" ".join(map(str, r.tolist())) for r in rows]
    return "\n".join(out) + "\n"


def read_alist(path) -> BinaryMatrix:
    with open(path, encoding="ascii") as fh:
        return parse_alist(fh.read())


def write_alist(M: BinaryMatrix, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(to_alist(M))


# elimination ----------------------------------------------------------------

def permute_columns(M: BinaryMatrix, perm: ColumnPermutation) -> BinaryMatrix:
    if len(perm) != M.n:
        raise ValueError(f"permutation has length {len(perm)}, matrix has {M.n} columns")
    return BinaryMatrix._wrap(M.bits[:, list(perm.mapping)])


def _eliminate(A: np.ndarray, k: int) -> list[int]:
    """In-place Gauss-Jordan over the first ``k`` columns of ``A``."""
    m = A.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(k):
        if r == m:
            break
        hits = np.flatnonzero(A[r:, c])
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return pivots


def partial_rref(M: BinaryMatrix, k: int) -> tuple[BinaryMatrix, tuple[int, ...]]:
    """Row-reduce ``M`` so that its first ``k`` columns are in reduced row echelon form.

    Pivots are taken column by column from the left, using the topmost
    eligible row.  The remaining columns undergo the same row operations.
    Returns the transformed matrix and the pivot column of each pivot row.
    """
    if not 0 <= k <= M.n:
        raise ValueError(f"k={k} out of range 0..{M.n}")
    A = M.bits.copy()
    pivots = _eliminate(A, k)
    return BinaryMatrix._wrap(A), tuple(pivots)


def rref(M: BinaryMatrix) -> tuple[BinaryMatrix, tuple[int, ...]]:
    return partial_rref(M, M.n)


def rank(M: BinaryMatrix) -> int:
    return len(rref(M)[1])


def nullspace(M: BinaryMatrix) -> np.ndarray:
    """Basis of ``{x : M x = 0}`` as the rows of a ``uint8`` array."""
    R, pivots = rref(M)
    free = [c for c in range(M.n) if c not in set(pivots)]
    basis = np.zeros((len(free), M.n), dtype=np.uint8)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for r, p in enumerate(pivots):
            basis[t, p] = R.bits[r, f]
    return basis


SPAN_ENUMERATION_LIMIT = 24


def row_span(M: BinaryMatrix) -> set[bytes]:
    """All ``2**m`` GF(2) combinations of the rows, as packed byte strings."""
    m = M.m
    if m > SPAN_ENUMERATION_LIMIT:
        raise ValueError(f"refusing to enumerate 2**{m} combinations")
    span: set[bytes] = set()
    rows = M.bits.astype(np.int64)
    chunk = 1 << min(m, 16)
    for base in range(0, 1 << m, chunk):
        combos = ((np.arange(base, base + chunk)[:, None] >> np.arange(m)) & 1)
        words = (combos @ rows) & 1
        packed = np.packbits(words.astype(np.uint8), axis=1)
        span.update(map(bytes, packed))
    return span


def row_space_equal(A: BinaryMatrix, B: BinaryMatrix, *, enumerate_limit: int = 12) -> bool:
    """True iff ``A`` and ``B`` span the same GF(2) row space.

    Small matrices are compared by enumerating both spans; larger ones by
    comparing the nonzero rows of their reduced row echelon forms.
    """
    if A.n != B.n:
        raise ValueError(f"column counts differ: {A.n} vs {B.n}")
    if max(A.m, B.m) <= enumerate_limit:
        return row_span(A) == row_span(B)
    RA, pa = rref(A)
    RB, pb = rref(B)
    return pa == pb and np.array_equal(RA.bits[: len(pa)], RB.bits[: len(pb)])


def from_rows(rows: Iterable[Sequence[int]]) -> BinaryMatrix:
    return BinaryMatrix([list(r) for r in rows])
