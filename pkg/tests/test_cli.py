import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import REPO
from lpdecode.cli import main
from lpdecode.sim import CSV_HEADER, FerReport

HAMMING = str(REPO / "codes" / "hamming74.alist")


@pytest.fixture
def llr_file(tmp_path):
    p = tmp_path / "frame.txt"
    p.write_text("\n".join(str(x) for x in [1.5, -0.2, 0.8, 1.1, 0.9, 1.3, 0.7]) + "\n")
    return str(p)


def test_decode_prints_json(llr_file, capsys):
    assert main(["decode", "--code", HAMMING, "--llr", llr_file, "--variant", "acg-alp"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["outcome"] == "codeword" and out["iterations"] >= 1
    assert {"cuts_h", "cuts_rpc", "accumulated_constraints"} <= set(out)


@pytest.mark.parametrize("variant", ["alp", "acg-malp-b", "acg-malp-c", "bp100", "bp1000", "ml", "static-lp"])
def test_decode_variants(llr_file, capsys, variant):
    assert main(["decode", "--code", HAMMING, "--llr", llr_file, "--variant", variant]) == 0
    assert json.loads(capsys.readouterr().out)["bits"] == [0] * 7


def test_decode_trace(llr_file, tmp_path):
    t = tmp_path / "it.csv"
    assert main(["decode", "--code", "hamming74", "--llr", llr_file, "--trace", str(t)]) == 0
    assert t.read_text().startswith("iteration,objective,constraints")


def test_decode_wrong_length(tmp_path, capsys):
    p = tmp_path / "short.txt"
    p.write_text("1\n2\n")
    assert main(["decode", "--code", HAMMING, "--llr", str(p)]) == 1


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["sweep", "--code", HAMMING]) == 1  # no SNR list
    assert main(["sweep", "--code", HAMMING, "--snr", "1", "--variant", "nope"]) == 1
    assert main(["sweep", "--code", HAMMING, "--snr", "x"]) == 1
    assert main(["decode", "--llr", "x.txt"]) == 1


def test_io_errors(tmp_path, llr_file):
    assert main(["decode", "--code", str(tmp_path / "missing.alist"), "--llr", llr_file]) == 2
    bad = tmp_path / "bad.alist"
    bad.write_text("3 1\n")
    assert main(["decode", "--code", str(bad), "--llr", llr_file]) == 2
    assert main(["decode", "--code", HAMMING, "--llr", str(tmp_path / "none.txt")]) == 2


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_sweep_outputs(tmp_path):
    c, j, t = tmp_path / "out.csv", tmp_path / "out.json", tmp_path / "trace.csv"
    rc = main(["sweep", "--code", HAMMING, "--variant", "acg-malp-c", "--snr", "1.0,2.0",
               "--frames", "60", "--jobs", "1", "--csv", str(c), "--json", str(j), "--trace", str(t)])
    assert rc == 0
    rows = read_csv(c)
    assert rows[0] == CSV_HEADER and len(rows) == 3
    assert [float(r[0]) for r in rows[1:]] == [1.0, 2.0]
    doc = json.loads(j.read_text())
    reports = [FerReport.from_dict(d) for d in doc["reports"]]
    # parse, emit, parse is a fixpoint
    assert [FerReport.from_dict(r.to_dict()) for r in reports] == reports
    assert json.loads(json.dumps([r.to_dict() for r in reports])) == doc["reports"]
    assert len(read_csv(t)) == 121


def test_stats_reaggregates_traces(tmp_path, capsys):
    c, t = tmp_path / "out.csv", tmp_path / "trace.csv"
    main(["sweep", "--code", HAMMING, "--snr", "1.5", "--frames", "40", "--jobs", "1",
          "--csv", str(c), "--trace", str(t)])
    s = tmp_path / "stats.csv"
    assert main(["stats", str(t), "--csv", str(s)]) == 0
    a, b = read_csv(c), read_csv(s)
    assert a[0] == b[0]
    assert a[1][:12] == b[1][:12]  # everything but wall time
    assert main(["stats", str(c)]) == 1  # not a trace


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# sweep settings\ncode = {HAMMING}\nsnr = 1.0,3.0\nframes = 25\nvariant = alp\njobs = 1\n")
    out = tmp_path / "o.csv"
    assert main(["sweep", "--config", str(cfg), "--frames", "10", "--csv", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 3 and all(r[1] == "10" for r in rows[1:])
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["sweep", "--config", str(bad), "--snr", "1"]) == 1
    assert main(["sweep", "--config", str(tmp_path / "nope.cfg"), "--snr", "1"]) == 2


def test_seed_environment_override(tmp_path, monkeypatch):
    args = ["sweep", "--code", HAMMING, "--snr", "0.5", "--frames", "200", "--jobs", "1"]
    a, b, c = (tmp_path / f"{k}.csv" for k in "abc")
    main(args + ["--seed", "1", "--csv", str(a)])
    monkeypatch.setenv("LPDEC_SEED", "1")
    main(args + ["--seed", "99", "--csv", str(b)])
    monkeypatch.setenv("LPDEC_SEED", "2")
    main(args + ["--seed", "1", "--csv", str(c)])
    ra, rb, rc = (read_csv(p)[1][:12] for p in (a, b, c))
    assert ra == rb and ra != rc
    monkeypatch.setenv("LPDEC_SEED", "abc")
    assert main(args) == 1


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3 and "FAIL" not in out


def test_selftest_failure_exit_code(monkeypatch):
    from lpdecode import selftest
    monkeypatch.setattr(selftest, "run_all", lambda: [selftest.CheckResult("x", False, "broken")])
    assert main(["selftest"]) == 3


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "lpdecode.cli", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
