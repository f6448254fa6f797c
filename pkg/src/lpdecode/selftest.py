"""Quick oracle-equivalence checks runnable from an installed package."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .codes import code_rate, gallager_regular, hamming74
from .cuts import brute_force_cut, cut_search
from .decoders import DecoderConfig, Variant, decode, static_lp_decode
from .reference import ml_decode
from .sim import ChannelConfig, frame_rng, simulate_llr_frame

__all__ = ["CheckResult", "random_point", "check_cut_search", "check_alp_vs_static",
           "check_ml_certificate", "run_all"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_point(rng: np.random.Generator, d: int) -> np.ndarray:
    """Entries drawn from a mixture of exact 0, exact 1 and uniform(0, 1)."""
    kind = rng.integers(0, 3, d)
    return np.where(kind == 0, 0.0, np.where(kind == 1, 1.0, rng.random(d)))


def check_cut_search(trials: int = 2000, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        d = int(rng.integers(2, 13))
        u = random_point(rng, d)
        support = tuple(range(d))
        cut = cut_search(u, support)
        found = brute_force_cut(u, support)
        expect = [] if cut is None else [cut.subset]
        bad += found != expect
    return CheckResult("cut search vs brute force", bad == 0, f"{bad} mismatches in {trials} trials")


def _codes():
    codes = [("hamming74", hamming74())]
    codes += [(f"gallager{n}", gallager_regular(n, 3, 4, seed=n)) for n in (12, 16, 20)]
    return codes


def check_alp_vs_static(frames: int = 50, snr_db: float = 2.0, seed: int = 0) -> CheckResult:
    worst = 0.0
    for _, H in _codes():
        ch = ChannelConfig(snr_db, code_rate(H), seed)
        for t in range(frames):
            gamma = simulate_llr_frame(ch, H.n, frame_rng(seed, t))
            a = decode(gamma, H, DecoderConfig(Variant.ALP, max_iterations=0))
            b = static_lp_decode(gamma, H)
            worst = max(worst, abs(a.objective - b.objective))
    return CheckResult("ALP objective vs static LP", worst <= 1e-6, f"max difference {worst:.2e}")


def check_ml_certificate(frames: int = 50, snr_db: float = 2.0, seed: int = 0) -> CheckResult:
    worst = 0.0
    for _, H in _codes():
        ch = ChannelConfig(snr_db, code_rate(H), seed)
        for t in range(frames):
            gamma = simulate_llr_frame(ch, H.n, frame_rng(seed, t))
            _, ml_cost = ml_decode(gamma, H)
            for v in Variant:
                res = decode(gamma, H, DecoderConfig(v, max_iterations=0))
                if res.outcome == "codeword":
                    worst = max(worst, abs(float(gamma @ res.point) - ml_cost))
    return CheckResult("integral outputs are ML", worst <= 1e-9, f"max cost gap {worst:.2e}")


CHECKS: tuple[Callable[[], CheckResult], ...] = (check_cut_search, check_alp_vs_static, check_ml_certificate)


def run_all() -> list[CheckResult]:
    return [check() for check in CHECKS]
