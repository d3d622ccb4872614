import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from smoothprog import cli
from smoothprog.errors import NumericalError

ROOT = Path(__file__).resolve().parents[1]


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sieve_and_counts(capsys, tmp_path):
    path = tmp_path / "t.bin"
    code, out, _ = _run(capsys, "sieve", "--x-max", "1000", "--x", "100", "--y", "10", "--q", "4",
                        "--a", "1", "--save", str(path))
    assert code == 0
    rec = json.loads(out)
    assert rec["psi"] == 46 and path.exists()
    code, out, _ = _run(capsys, "sieve", "--load", str(path), "--x", "100", "--y", "100")
    assert code == 0 and json.loads(out)["psi"] == 100


def test_small_subcommands(capsys):
    code, out, _ = _run(capsys, "rho", "2")
    assert code == 0 and abs(json.loads(out)["rho"] - (1 - math.log(2))) < 1e-6
    code, out, _ = _run(capsys, "alpha", "--x", "4", "--y", "2")
    assert code == 0 and abs(json.loads(out)["alpha"] - math.log2(1.5)) < 1e-12
    code, out, _ = _run(capsys, "chars", "--q", "8")
    assert code == 0 and len(out.splitlines()) == 4
    code, out, _ = _run(capsys, "constants", "--A", "10", "--D", "10")
    assert json.loads(out)["Q_A"] == 51_500_000


def test_scanning_subcommands(capsys):
    code, out, _ = _run(capsys, "lzeros", "--label", "4:1", "--sigma0", "0.25", "--t0", "0", "--t1", "7")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("character_label") and len(lines) == 2
    code, out, _ = _run(capsys, "classify", "--q", "5", "--T-max", "10")
    assert code == 0 and json.loads(out)["q"] == 5
    code, out, _ = _run(capsys, "checkers", "--q", "5", "--T-max", "10")
    assert code == 0 and all(json.loads(l)["verdict"] == "PASS" for l in out.splitlines())
    code, out, _ = _run(capsys, "charsum", "--q", "17", "--N", "50", "--e0", "2")
    assert code == 0 and len(out.splitlines()) == 1 + 15
    code, out, _ = _run(capsys, "equidist", "--q", "4", "--y", "100", "--x", "1000", "10000")
    assert code == 0 and out.splitlines()[-1].startswith("# kendall_tau=")


def test_exit_codes(capsys, tmp_path, monkeypatch):
    code, _, err = _run(capsys, "alpha", "--x", "1", "--y", "10")
    assert code == 2 and err
    assert _run(capsys, "run", "--config", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiments = [\"nope\"]\n", encoding="utf-8")
    assert _run(capsys, "run", "--config", str(bad))[0] == 2
    assert _run(capsys, "sieve", "--x-max", str(10**13))[0] == 4

    def boom(*a, **k):
        raise NumericalError("forced")
    monkeypatch.setattr("smoothprog.saddle.solve_alpha", boom)
    assert _run(capsys, "alpha", "--x", "100", "--y", "10")[0] == 3
    with pytest.raises(SystemExit) as exc:
        cli.main(["alpha"])
    assert exc.value.code == 2


def test_run_subcommand_prints_digest(capsys, tmp_path):
    code, out, _ = _run(capsys, "run", "--config", str(ROOT / "configs" / "reference.json"),
                        "--set", "experiments=[\"constants\"]", "--output-dir", str(tmp_path))
    assert code == 0 and len(out.strip()) == 64
    assert (tmp_path / "constants.jsonl").exists()


def test_module_entry_point(tmp_path):
    env = dict(os.environ, SMOOTHPROG_THREADS="2")
    proc = subprocess.run([sys.executable, "-m", "smoothprog", "constants", "--A", "10"],
                          capture_output=True, text=True, env=env, cwd=tmp_path)
    assert proc.returncode == 0 and json.loads(proc.stdout)["k0"] == 103
