"""Command-line interface: ``lpdecode {decode,sweep,selftest,stats}``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 selftest failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .codes import code_rate, load_code
from .decoders import DecoderConfig, Variant, decode, static_lp_decode, write_iteration_trace
from .gf2 import AlistError
from .reference import BpConfig, bp_decode, ml_decode
from .sim import (
    CSV_HEADER,
    VARIANTS,
    ChannelConfig,
    FerReport,
    aggregate,
    read_trace,
    run_fer,
    write_trace,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SELFTEST = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _snr_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("SNR list is empty")
    return vals


def _variant(text: str) -> str:
    name = text.strip().lower().replace("_", "-")
    if name not in VARIANTS:
        raise argparse.ArgumentTypeError(f"unknown variant {text!r}; choose from {', '.join(VARIANTS)}")
    return name


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lpdecode", description="Adaptive LP decoding of binary linear codes.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--code", help="alist file or built-in name (hamming74, tanner155)")
        sp.add_argument("--variant", type=_variant, default="acg-alp")
        sp.add_argument("--max-iterations", type=int, default=200, help="0 means unlimited")
        sp.add_argument("--check-invariants", action="store_true")
        sp.add_argument("--config", help="file of key=value lines; command-line flags take precedence")

    d = sub.add_parser("decode", help="decode one frame of LLRs and print JSON")
    common(d)
    d.add_argument("--llr", help="text file with one LLR per line")
    d.add_argument("--trace", help="write one CSV line per decoder iteration here")

    s = sub.add_parser("sweep", help="simulate FER over a list of Eb/N0 points")
    common(s)
    s.add_argument("--snr", type=_snr_list, help="comma separated Eb/N0 values in dB")
    s.add_argument("--seed", type=int, default=0, help="overridden by LPDEC_SEED")
    s.add_argument("--frames", type=int, default=1000)
    s.add_argument("--stop-errors", type=int, default=0)
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--csv", help="write one row per SNR point here (default: stdout)")
    s.add_argument("--json", help="write the full reports here")
    s.add_argument("--trace", help="write one row per frame here")

    sub.add_parser("selftest", help="run the oracle equivalence checks")

    st = sub.add_parser("stats", help="summarise trace files")
    st.add_argument("traces", nargs="+")
    st.add_argument("--csv", help="output path (default: stdout)")
    return p


def _read_config(path: str) -> dict:
    out = {}
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("lpdecode: a command is required (decode, sweep, selftest, stats)")
    if getattr(args, "config", None):
        try:
            conf = _read_config(args.config)
        except OSError as exc:
            raise FileNotFoundError(exc.filename or args.config) from exc
        # re-parse with the file as defaults, so explicit flags still win
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sp._actions}
        for key, value in conf.items():
            if key not in known or key in ("config", "help"):
                raise UsageError(f"{args.config}: unknown key {key!r}")
            action = known[key]
            if action.nargs == 0:
                value = value.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    value = action.type(value)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"{args.config}: bad value for {key}: {exc}")
            sp.set_defaults(**{key: value})
        args = parser.parse_args(argv)
    return args


def _decoder(args) -> DecoderConfig:
    if args.max_iterations < 0:
        raise UsageError("--max-iterations must be >= 0")
    variant = args.variant if args.variant in [v.value for v in Variant] else Variant.ACG_ALP
    return DecoderConfig(variant, args.max_iterations, check_invariants=args.check_invariants)


def _load(args):
    if not args.code:
        raise UsageError("--code is required")
    return load_code(args.code)


def cmd_decode(args) -> int:
    if not args.llr:
        raise UsageError("--llr is required")
    H = _load(args)
    text = Path(args.llr).read_text().split()
    try:
        gamma = np.array([float(x) for x in text])
    except ValueError as exc:
        raise UsageError(f"{args.llr}: {exc}")
    if gamma.size != H.n:
        raise UsageError(f"{args.llr}: {gamma.size} values, code length is {H.n}")
    v = args.variant
    if v.startswith("bp"):
        r = bp_decode(gamma, H, BpConfig(int(v[2:])))
        out = {"outcome": "codeword" if r.converged else "iteration_limit", "bits": r.bits.tolist(),
               "iterations": r.iterations}
    elif v == "ml":
        bits, cost = ml_decode(gamma, H)
        out = {"outcome": "codeword", "bits": bits.tolist(), "objective": cost}
    elif v == "static-lp":
        out = static_lp_decode(gamma, H).to_dict()
    else:
        res = decode(gamma, H, _decoder(args))
        if args.trace:
            write_iteration_trace(res, args.trace)
        out = res.to_dict()
    out["variant"] = v
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _write_csv(path: Optional[str], reports: Sequence[FerReport]) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in reports:
            w.writerow(r.csv_row())
    finally:
        if path:
            fh.close()


def cmd_sweep(args) -> int:
    if not args.snr:
        raise UsageError("--snr is required")
    if args.jobs < 1 or args.frames < 0 or args.stop_errors < 0:
        raise UsageError("--jobs must be >= 1, --frames and --stop-errors >= 0")
    seed = args.seed
    if "LPDEC_SEED" in os.environ:
        try:
            seed = int(os.environ["LPDEC_SEED"])
        except ValueError:
            raise UsageError("LPDEC_SEED must be an integer")
    H = _load(args)
    rate = code_rate(H)
    reports, traces = [], []
    for snr in args.snr:
        frames: list = []
        ch = ChannelConfig(snr, rate, seed, args.frames, args.stop_errors)
        rep = run_fer(H, args.variant, ch, jobs=args.jobs, decoder=_decoder(args), trace=frames)
        reports.append(rep)
        traces.extend((snr, args.variant, f) for f in frames)
        print(f"{snr:g} dB: {rep.frame_errors}/{rep.frames_sent} errors, fer={rep.fer:.3e}, "
              f"accumulated constraints={rep.mean_accumulated_constraints:.1f}", file=sys.stderr)
    _write_csv(args.csv, reports)
    if args.json:
        doc = {"code": args.code, "variant": args.variant, "seed": seed,
               "reports": [r.to_dict() for r in reports]}
        Path(args.json).write_text(json.dumps(doc, indent=2) + "\n")
    if args.trace:
        write_trace(args.trace, traces)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all
    ok = True
    for r in run_all():
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        ok &= r.passed
    return EXIT_OK if ok else EXIT_SELFTEST


def cmd_stats(args) -> int:
    groups: dict[tuple[str, float], list] = {}
    for path in args.traces:
        try:
            rows = read_trace(path)
        except ValueError as exc:
            raise UsageError(str(exc))
        for snr, variant, rec in rows:
            groups.setdefault((variant, snr), []).append(rec)
    reports = [aggregate(recs, snr, variant) for (variant, snr), recs in sorted(groups.items())]
    _write_csv(args.csv, reports)
    return EXIT_OK


COMMANDS = {"decode": cmd_decode, "sweep": cmd_sweep, "selftest": cmd_selftest, "stats": cmd_stats}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except AlistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
