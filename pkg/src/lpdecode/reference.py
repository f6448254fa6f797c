"""Baseline decoders: exhaustive maximum-likelihood and sum-product BP."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import BinaryMatrix, nullspace

__all__ = [
    "ML_MAX_DIMENSION",
    "codewords",
    "ml_decode",
    "BpConfig",
    "BpResult",
    "bp_decode",
    "bp_posteriors",
]

ML_MAX_DIMENSION = 20


@lru_cache(maxsize=16)
def _codebook(H: BinaryMatrix) -> np.ndarray:
    basis = nullspace(H).astype(np.int64)
    k = basis.shape[0]
    if k > ML_MAX_DIMENSION:
        raise ValueError(f"code dimension {k} exceeds the enumeration limit {ML_MAX_DIMENSION}")
    msgs = (np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1
    words = (msgs @ basis) & 1
    # lexicographic order makes the first minimiser the lexicographically smallest one
    order = np.lexsort(words.T[::-1])
    return words[order].astype(np.uint8)


def codewords(H: BinaryMatrix) -> np.ndarray:
    """Every codeword of ``H``, one per row, in lexicographic order."""
    return _codebook(H)


def ml_decode(gamma, H: BinaryMatrix) -> tuple[np.ndarray, float]:
    """The codeword of least cost ``gamma . c``; ties go to the lexicographically smallest."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (H.n,):
        raise ValueError(f"LLR vector has length {gamma.size}, code length is {H.n}")
    words = _codebook(H)
    costs = words @ gamma
    best = int(np.argmin(costs))
    return words[best].copy(), float(costs[best])


@dataclass(frozen=True)
class BpConfig:
    max_iterations: int = 100
    clamp: float = 50.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.clamp > 0:
            raise ValueError("clamp must be positive")


@dataclass(frozen=True)
class BpResult:
    bits: np.ndarray
    converged: bool
    iterations: int


class _Graph:
    """Edges of the Tanner graph, grouped by check degree for vectorised updates."""

    def __init__(self, H: BinaryMatrix):
        _, cols = np.nonzero(H.bits)  # row-major, so each check's edges are contiguous
        self.n = H.n
        self.cols = cols
        starts = np.concatenate(([0], np.cumsum(H.row_weights)))
        self.groups = []
        for d in np.unique(H.row_weights):
            if d == 0:
                continue
            checks = np.flatnonzero(H.row_weights == d)
            self.groups.append(starts[checks][:, None] + np.arange(d)[None, :])


def _exclusive_product(t: np.ndarray) -> np.ndarray:
    """Product of every row except the entry itself, without division."""
    ones = np.ones((t.shape[0], 1))
    prefix = np.cumprod(np.hstack([ones, t[:, :-1]]), axis=1)
    suffix = np.cumprod(np.hstack([ones, t[:, :0:-1]]), axis=1)[:, ::-1]
    return prefix * suffix


def _iterate(gamma, H: BinaryMatrix, cfg: BpConfig):
    """Flooding sum-product in the LLR domain.

    ``gamma`` is the channel LLR ``log P(y|0) / P(y|1)``, so positive values
    favour bit 0.  Yields ``(iteration, posterior LLRs)``, starting with the
    channel values at iteration 0.
    """
    graph = _Graph(H)
    L = np.clip(np.asarray(gamma, dtype=float), -cfg.clamp, cfg.clamp)
    limit = np.tanh(cfg.clamp / 2.0)
    v2c = L[graph.cols]
    yield 0, L
    for it in range(1, cfg.max_iterations + 1):
        t = np.tanh(np.clip(v2c, -cfg.clamp, cfg.clamp) / 2.0)
        prod = np.empty_like(t)
        for edges in graph.groups:
            prod[edges] = _exclusive_product(t[edges])
        c2v = 2.0 * np.arctanh(np.clip(prod, -limit, limit))
        post = L + np.bincount(graph.cols, weights=c2v, minlength=graph.n)
        v2c = post[graph.cols] - c2v
        yield it, post


def _hard(llr: np.ndarray) -> np.ndarray:
    return (llr < 0).astype(np.uint8)  # an LLR of exactly 0 decides 0


def bp_decode(gamma, H: BinaryMatrix, cfg: BpConfig = BpConfig()) -> BpResult:
    """Sum-product decoding, stopping at the first hard decision that is a codeword."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (H.n,):
        raise ValueError(f"LLR vector has length {gamma.size}, code length is {H.n}")
    Hi = H.bits.astype(np.int64)
    bits = _hard(gamma)
    it = 0
    for it, post in _iterate(gamma, H, cfg):
        bits = _hard(post)
        if not np.any((Hi @ bits) & 1):
            return BpResult(bits, True, it)
    return BpResult(bits, False, it)


def bp_posteriors(gamma, H: BinaryMatrix, iterations: int, clamp: float = 50.0) -> np.ndarray:
    """Posterior LLRs after exactly ``iterations`` rounds, without early stopping."""
    post = np.asarray(gamma, dtype=float)
    for it, post in _iterate(gamma, H, BpConfig(max(iterations, 1), clamp)):
        if it == iterations:
            break
    return post
