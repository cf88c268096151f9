import json
from pathlib import Path

import pytest

from jetcount.cli import main

DATA = str(Path(__file__).resolve().parent.parent / "demos" / "data" / "examples.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_jet(capsys):
    code, out, _ = run(capsys, "jet", DATA, "--scheme", "cusp_line", "--k", "1")
    assert code == 0
    assert out.splitlines() == ["x1*x2^2", "x1^(1)*x2^2 + 2*x1*x2*x2^(1)"]


def test_count_and_fiber(capsys):
    assert run(capsys, "count", DATA, "--scheme", "double_point", "--p", "3", "--k", "2")[:2] == (0, "3\n")
    assert run(capsys, "count", DATA, "--scheme", "axes", "--p", "3", "--k", "2", "--jetring")[:2] == (0, "21\n")
    code, out, _ = run(capsys, "fiber", DATA, "--morphism", "q3", "--y", "0", "--p", "5", "--k", "1",
                       "--filter", "singular")
    assert (code, out) == (0, "1\n")


def test_diagnose_writes_artifacts(capsys, tmp_path):
    out = tmp_path / "run"
    code, _, _ = run(capsys, "diagnose", DATA, "--morphism", "square", "--primes", "3,5", "--kmax", "4",
                     "--out", str(out), "--jobs", "1")
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == ["config.json", "gh_table.csv", "verdicts.json"]
    verdicts = {v["kind"]: v for v in json.loads((out / "verdicts.json").read_text())}
    assert verdicts["FRS"]["outcome"] == "refuted"
    assert verdicts["jet-flat"]["fitted"]["epsilon"] == {"num": 1, "den": 2}


def test_config_echo_replays(capsys, tmp_path):
    first = tmp_path / "a"
    run(capsys, "table", DATA, "--morphism", "q3", "--primes", "3", "--kmax", "2", "--cap", "5", "--seed", "4",
        "--out", str(first), "--jobs", "2")
    echo = json.loads((first / "config.json").read_text())
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({k: echo[k] for k in ("primes", "kmax", "cap", "seed", "budget", "prime_floor")}))
    second = tmp_path / "b"
    code, _, _ = run(capsys, "table", DATA, "--morphism", "q3", "--config", str(cfg), "--out", str(second),
                     "--jobs", "1")
    assert code == 0
    assert (first / "gh_table.csv").read_bytes() == (second / "gh_table.csv").read_bytes()
    assert (first / "config.json").read_bytes() == (second / "config.json").read_bytes()


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"primes": [3], "kmax": 1}))
    code, out, _ = run(capsys, "table", DATA, "--morphism", "square", "--config", str(cfg), "--kmax", "2")
    assert code == 0
    assert {line.split(",")[1] for line in out.splitlines()[1:]} == {"1", "2"}


def test_presburger(capsys):
    assert run(capsys, "presburger", "sup", "s * q^(-s) ; s >= 0", "--q", "2")[1] == "bounded sup=1/2 argmax=1 tail=2\n"
    assert run(capsys, "presburger", "classify", "1 - q^(s) ; s >= 1")[1] == "counterexample s=1 q=2 value=-1\n"
    assert run(capsys, "presburger", "eval", "q^(-s)", "--q", "5", "--s", "3")[1] == "1/125\n"
    assert run(capsys, "presburger", "sup", "q^(s)", "--q", "2")[1].startswith("unbounded")


@pytest.mark.parametrize("argv", [
    ["count", DATA, "--scheme", "nope", "--p", "3", "--k", "1"],
    ["table", DATA, "--morphism", "q3", "--primes", "4"],
    ["table", DATA, "--morphism", "q3", "--kmax", "0"],
    ["count", "/no/such/file", "--scheme", "x", "--p", "3", "--k", "1"],
    ["presburger", "eval", "q^", "--q", "2", "--s", "1"],
    ["frobnicate"],
])
def test_validation_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_bad_config_names_the_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"primez": [3]}))
    code, _, err = run(capsys, "table", DATA, "--morphism", "q3", "--config", str(cfg))
    assert code == 2 and "primez" in err


def test_budget_refusal_exits_1(capsys):
    code, _, err = run(capsys, "count", DATA, "--scheme", "axes", "--p", "3", "--k", "9", "--budget", "100")
    assert code == 1 and "budget" in err
