"""Monte-Carlo frame error rate simulation on the BPSK/AWGN channel.

Frame ``t`` of a run draws its noise from ``default_rng([seed, t])`` so every
frame is reproducible on its own.  Frames are decoded in fixed-size batches
and folded into the report in frame order; the stopping rule is applied
frame by frame during the fold, which makes the report independent of how
many worker processes decoded the batch.
"""
from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from .decoders import DecodeResult, DecoderConfig, Variant, decode, static_lp_decode
from .gf2 import BinaryMatrix
from .reference import BpConfig, bp_decode, ml_decode

__all__ = [
    "LLR_CLAMP",
    "BATCH_SIZE",
    "VARIANTS",
    "ChannelConfig",
    "FrameRecord",
    "FerReport",
    "CSV_HEADER",
    "TRACE_HEADER",
    "frame_rng",
    "simulate_llr_frame",
    "classify_error",
    "decode_frame",
    "aggregate",
    "run_fer",
    "write_trace",
    "read_trace",
]

LLR_CLAMP = 1e6
BATCH_SIZE = 32
VARIANTS = ("alp", "acg-alp", "acg-malp-b", "acg-malp-c", "bp100", "bp1000", "ml", "static-lp")


@dataclass(frozen=True)
class ChannelConfig:
    eb_n0_db: float
    code_rate: float
    seed: int = 0
    frames: int = 1000
    stop_errors: int = 0  # 0 runs exactly `frames` frames

    def __post_init__(self):
        if not 0.0 < self.code_rate < 1.0:
            raise ValueError("code rate must lie in (0, 1)")
        if self.frames < 0 or self.stop_errors < 0:
            raise ValueError("frame and error counts must be non-negative")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.code_rate * 10.0 ** (self.eb_n0_db / 10.0))


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**64 - 1), int(frame)])


def simulate_llr_frame(cfg: ChannelConfig, n: int, rng: np.random.Generator,
                       codeword: Optional[np.ndarray] = None) -> np.ndarray:
    """LLRs ``2 r / sigma^2`` for BPSK (bit 0 -> +1) over AWGN.

    The all-zero word is sent unless ``codeword`` is given.
    """
    s2 = cfg.sigma2
    x = np.ones(n) if codeword is None else 1.0 - 2.0 * np.asarray(codeword, dtype=float)
    r = x + rng.normal(0.0, math.sqrt(s2), n)
    return np.clip(2.0 * r / s2, -LLR_CLAMP, LLR_CLAMP)


def classify_error(outcome: str, bits: Optional[np.ndarray], transmitted=None) -> str:
    """``correct``, ``incorrect_codeword``, ``pseudocodeword`` or ``iteration_limit``."""
    if outcome == "iteration_limit":
        return "iteration_limit"
    if outcome == "pseudocodeword" or bits is None:
        return "pseudocodeword"
    sent = np.zeros_like(bits) if transmitted is None else np.asarray(transmitted)
    return "correct" if np.array_equal(bits, sent) else "incorrect_codeword"


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    status: str  # a classify_error label
    iterations: int
    final_constraints: int
    accumulated_constraints: int
    cuts_h: int
    cuts_rpc: int
    seconds: float = field(default=0.0, compare=False)

    @property
    def error(self) -> bool:
        return self.status != "correct"


def _from_result(frame: int, res: DecodeResult, seconds: float) -> FrameRecord:
    return FrameRecord(frame, classify_error(res.outcome, res.bits), res.iterations,
                       res.final_constraints, res.accumulated_constraints,
                       res.cuts_h, res.cuts_rpc, seconds)


def decode_frame(variant: str, gamma: np.ndarray, H: BinaryMatrix, frame: int = 0,
                 decoder: Optional[DecoderConfig] = None) -> FrameRecord:
    """Decode one frame with any of :data:`VARIANTS` and summarise it."""
    t0 = time.perf_counter()
    if variant.startswith("bp"):
        res = bp_decode(gamma, H, BpConfig(max_iterations=int(variant[2:])))
        status = classify_error("codeword", res.bits) if res.converged else "iteration_limit"
        return FrameRecord(frame, status, res.iterations, 0, 0, 0, 0, time.perf_counter() - t0)
    if variant == "ml":
        bits, _ = ml_decode(gamma, H)
        return FrameRecord(frame, classify_error("codeword", bits), 1, 0, 0, 0, 0, time.perf_counter() - t0)
    if variant == "static-lp":
        res = static_lp_decode(gamma, H)
    else:
        cfg = decoder or DecoderConfig()
        res = decode(gamma, H, DecoderConfig(Variant.parse(variant), cfg.max_iterations, cfg.tau,
                                             cfg.check_invariants))
    return _from_result(frame, res, time.perf_counter() - t0)


CSV_HEADER = ("snr_db,frames,errors,pseudo,incorrect,fer,ml_lb,mean_iters,mean_final_constraints,"
              "mean_accum_constraints,mean_cuts_H,mean_cuts_rpc,seconds").split(",")

TRACE_HEADER = ["snr_db", "variant", "frame", "status", "iterations", "final_constraints",
                "accumulated_constraints", "cuts_h", "cuts_rpc", "seconds"]


@dataclass(frozen=True)
class FerReport:
    snr_db: float
    variant: str
    frames_sent: int
    frame_errors: int
    pseudocodeword_errors: int
    incorrect_codeword_errors: int
    iteration_limit_errors: int
    fer: float
    ml_lower_bound: float
    mean_iterations: float
    mean_final_constraints: float
    mean_accumulated_constraints: float
    mean_cuts_h: float  # cuts from rows of H per iteration, over all iterations
    mean_cuts_rpc: float
    seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FerReport":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    def csv_row(self) -> list:
        return [self.snr_db, self.frames_sent, self.frame_errors, self.pseudocodeword_errors,
                self.incorrect_codeword_errors, _fmt(self.fer), _fmt(self.ml_lower_bound),
                _fmt(self.mean_iterations), _fmt(self.mean_final_constraints),
                _fmt(self.mean_accumulated_constraints), _fmt(self.mean_cuts_h),
                _fmt(self.mean_cuts_rpc), f"{self.seconds:.3f}"]


def _fmt(x: float) -> str:
    return repr(float(x))


def aggregate(records: Sequence[FrameRecord], snr_db: float, variant: str,
              seconds: Optional[float] = None) -> FerReport:
    """Fold per-frame records into a report.  Sums only, so order does not matter."""
    n = len(records)
    counts = {"pseudocodeword": 0, "incorrect_codeword": 0, "iteration_limit": 0}
    iters = final = accum = cuts_h = cuts_rpc = 0
    for r in records:
        if r.error:
            counts[r.status] += 1
        iters += r.iterations
        final += r.final_constraints
        accum += r.accumulated_constraints
        cuts_h += r.cuts_h
        cuts_rpc += r.cuts_rpc
    errors = sum(counts.values())

    def mean(total, count):
        return total / count if count else 0.0

    return FerReport(
        snr_db=float(snr_db),
        variant=variant,
        frames_sent=n,
        frame_errors=errors,
        pseudocodeword_errors=counts["pseudocodeword"],
        incorrect_codeword_errors=counts["incorrect_codeword"],
        iteration_limit_errors=counts["iteration_limit"],
        fer=mean(errors, n),
        ml_lower_bound=mean(counts["incorrect_codeword"], n),
        mean_iterations=mean(iters, n),
        mean_final_constraints=mean(final, n),
        mean_accumulated_constraints=mean(accum, n),
        mean_cuts_h=mean(cuts_h, iters),
        mean_cuts_rpc=mean(cuts_rpc, iters),
        seconds=sum(r.seconds for r in records) if seconds is None else seconds,
    )


# worker side ----------------------------------------------------------------

_worker_state: dict = {}


def _init_worker(bits: np.ndarray, variant: str, channel: ChannelConfig, decoder: Optional[DecoderConfig]):
    _worker_state.update(H=BinaryMatrix(bits), variant=variant, channel=channel, decoder=decoder)


def _decode_range(frames: Sequence[int]) -> list[FrameRecord]:
    H = _worker_state["H"]
    channel = _worker_state["channel"]
    out = []
    for t in frames:
        gamma = simulate_llr_frame(channel, H.n, frame_rng(channel.seed, t))
        out.append(decode_frame(_worker_state["variant"], gamma, H, t, _worker_state["decoder"]))
    return out


def run_fer(H: BinaryMatrix, variant: str, channel: ChannelConfig, *, jobs: int = 1,
            decoder: Optional[DecoderConfig] = None, trace: Optional[list] = None) -> FerReport:
    """Simulate until ``channel.frames`` frames or ``channel.stop_errors`` errors.

    Per-frame records are appended to ``trace`` when a list is passed.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {', '.join(VARIANTS)}")
    t0 = time.perf_counter()
    records: list[FrameRecord] = []
    errors = 0
    pool = None
    if jobs > 1:
        pool = ProcessPoolExecutor(jobs, initializer=_init_worker,
                                   initargs=(np.asarray(H.bits), variant, channel, decoder))
    else:
        _init_worker(np.asarray(H.bits), variant, channel, decoder)
    try:
        start = 0
        done = False
        while start < channel.frames and not done:
            batch = list(range(start, min(start + BATCH_SIZE * max(jobs, 1), channel.frames)))
            start = batch[-1] + 1
            if pool is None:
                decoded = _decode_range(batch)
            else:
                chunks = [batch[k::jobs] for k in range(jobs)]
                decoded = sorted((r for part in pool.map(_decode_range, chunks) for r in part),
                                 key=lambda r: r.frame)
            for rec in decoded:
                records.append(rec)
                errors += rec.error
                if channel.stop_errors and errors >= channel.stop_errors:
                    done = True
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    if trace is not None:
        trace.extend(records)
    return aggregate(records, channel.eb_n0_db, variant, time.perf_counter() - t0)


def write_trace(path, rows: Iterable[tuple[float, str, FrameRecord]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for snr, variant, r in rows:
            w.writerow([snr, variant, r.frame, r.status, r.iterations, r.final_constraints,
                        r.accumulated_constraints, r.cuts_h, r.cuts_rpc, f"{r.seconds:.6f}"])


def read_trace(path) -> list[tuple[float, str, FrameRecord]]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRACE_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: trace is missing columns {sorted(missing)}")
        for row in reader:
            out.append((float(row["snr_db"]), row["variant"], FrameRecord(
                int(row["frame"]), row["status"], int(row["iterations"]),
                int(row["final_constraints"]), int(row["accumulated_constraints"]),
                int(row["cuts_h"]), int(row["cuts_rpc"]), float(row["seconds"]))))
    return out
