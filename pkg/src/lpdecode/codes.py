"""Parity-check matrices used by tests, examples and the CLI."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .gf2 import BinaryMatrix, rank, read_alist

__all__ = [
    "hamming74",
    "tanner155",
    "gallager_regular",
    "code_rate",
    "load_code",
    "BUILTIN_CODES",
]


def hamming74() -> BinaryMatrix:
    return BinaryMatrix([
        [1, 1, 1, 0, 1, 0, 0],
        [0, 1, 1, 1, 0, 1, 0],
        [1, 1, 0, 1, 0, 0, 1],
    ])


def _circulant(size: int, shift: int) -> np.ndarray:
    return np.roll(np.eye(size, dtype=np.uint8), shift, axis=1)


def tanner155() -> BinaryMatrix:
    """The (155, 64) Tanner code: a 3 x 5 array of 31 x 31 circulant permutations.

    Block ``(s, t)`` is shifted by ``b**s * a**t mod 31`` with ``a = 2`` of
    order 5 and ``b = 5`` of order 3 in GF(31).
    """
    p, a, b = 31, 2, 5
    blocks = [[_circulant(p, (pow(b, s, p) * pow(a, t, p)) % p) for t in range(5)] for s in range(3)]
    return BinaryMatrix(np.block(blocks))


def gallager_regular(n: int, wc: int, wr: int, seed: int) -> BinaryMatrix:
    """Random ``(wc, wr)``-regular matrix from ``wc`` stacked, column-permuted bands."""
    if n % wr:
        raise ValueError("n must be a multiple of the row weight")
    rng = np.random.default_rng(seed)
    band_rows = n // wr
    base = np.zeros((band_rows, n), dtype=np.uint8)
    for r in range(band_rows):
        base[r, r * wr:(r + 1) * wr] = 1
    for _ in range(1000):
        bands = [base] + [base[:, rng.permutation(n)] for _ in range(wc - 1)]
        H = np.vstack(bands)
        if len({row.tobytes() for row in H}) == H.shape[0]:
            return BinaryMatrix(H)
    raise RuntimeError("could not draw a matrix without repeated rows")


def code_rate(H: BinaryMatrix) -> float:
    """Actual rate ``k / n`` with ``k = n - rank(H)``."""
    return (H.n - rank(H)) / H.n


BUILTIN_CODES = {
    "hamming74": hamming74,
    "tanner155": tanner155,
}


def load_code(name_or_path) -> BinaryMatrix:
    """An alist file path, or the name of a built-in code."""
    key = str(name_or_path)
    if key in BUILTIN_CODES:
        return BUILTIN_CODES[key]()
    path = Path(key)
    return read_alist(path)
