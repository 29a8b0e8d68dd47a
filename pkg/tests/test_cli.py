import json
import subprocess
import sys
from pathlib import Path

import pytest

from freeword.cli import main
from support import FIXTURES

WEIGHTED = str(FIXTURES / "weighted_example.json")
TEXTBOX = str(FIXTURES / "textbox.json")
GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = {
    "analyze_running_example": ["analyze", "--regex", "a(aa+b)*", "--weights", '{"a":0,"b":0}'],
    "chain_weighted_example": ["chain", "--dfa", WEIGHTED],
    "chain_textbox": ["chain", "--dfa", TEXTBOX, "--variant", "plain"],
    "suite_t1": ["suite-eval", "--dfa", TEXTBOX, "--suite", str(FIXTURES / "t1.txt")],
    "suite_t2": ["suite-eval", "--dfa", TEXTBOX, "--suite", str(FIXTURES / "t2.txt")],
    "oracle_running_example": ["oracle-rate", "--regex", "a(aa+b)*", "--weights", '{"a":0,"b":0}'],
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    data = json.loads(out)
    assert data["schema"] == "freeword/1"
    return data


def test_analyze_running_example(capsys):
    data = run_json(capsys, *GOLDEN_RUNS["analyze_running_example"])
    assert data["rate_per_symbol"] == pytest.approx(0.4812, abs=1e-4)
    assert data["strongly_connected"] is True and data["aperiodic"] is True
    assert data["violations"] == []


def test_chain_running_example(capsys):
    data = run_json(capsys, "chain", "--dfa", WEIGHTED)
    probs = {(p["from"], p["symbol"]): p["probability"] for p in data["probabilities"]}
    assert probs[("q1", "a")] == pytest.approx(0.9514, abs=1e-4)
    assert probs[("q1", "b")] == pytest.approx(0.0486, abs=1e-4)
    assert probs[("q1", "<>")] == 0.0
    assert sum(data["stationary_split"].values()) == pytest.approx(1.0, abs=1e-5)


def test_chain_emit_writes_report(capsys, tmp_path):
    target = tmp_path / "chain.json"
    data = run_json(capsys, "chain", "--dfa", WEIGHTED, "--diamond-weight", "-1000", "--emit", str(target))
    assert json.loads(target.read_text()) == data


def test_generate_is_reproducible(capsys):
    argv = ["generate", "--dfa", WEIGHTED, "--seed", "1", "-n", "3", "--min-length", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    assert first[0] == 0
    assert "seed: 1" in first[2]
    words = [line.split() for line in first[1].splitlines()]
    assert len(words) >= 3 and all(len(w) > 5 for w in words)


def test_generate_raw_and_json(capsys):
    data = run_json(capsys, "generate", "--dfa", WEIGHTED, "--weights", '{"a":0,"b":0}', "--diamond-weight", "-2", "--seed", "4", "-n", "5", "--min-length", "40", "--raw", "--format", "json")
    assert data["seed"] == 4
    assert any("<>" in w for w in data["words"])
    stripped = run_json(capsys, "generate", "--dfa", WEIGHTED, "--weights", '{"a":0,"b":0}', "--diamond-weight", "-2", "--seed", "4", "-n", "5", "--min-length", "40", "--format", "json")
    assert all("<>" not in w for w in stripped["words"])
    assert len(stripped["words"]) > len(data["words"])


def test_typical_cluster_command(capsys):
    data = run_json(capsys, "typical", "--dfa", WEIGHTED, "--weights", '{"a":0,"b":0}', "--length", "3000", "--epsilon", "0.05", "--seed", "9")
    assert data["seed"] == 9 and data["verdict"]["typical"]
    assert data["words"]


def test_typical_prefix_closed_command(capsys):
    data = run_json(capsys, "typical", "--regex", "(a+b)*", "--weights", '{"a":0,"b":0}', "--length", "500", "--prefix-closed")
    assert len(data["words"][0]) == 500
    assert data["warnings"]


def test_graph_command(capsys):
    data = run_json(capsys, "graph", "--dfa", WEIGHTED)
    assert len(data["graph"]["nodes"]) == 6 and len(data["graph"]["edges"]) == 8


def test_compile_command(capsys):
    data = run_json(capsys, "compile", "--regex", "a(aa+b)*", "--weights", '{"a":2,"b":-1}')
    assert data["dfa"]["transitions"] == [["q0", "a", "q1"], ["q1", "a", "q0"], ["q1", "b", "q1"]]


def test_suite_report_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    data = run_json(capsys, "suite-eval", "--dfa", TEXTBOX, "--suite", str(FIXTURES / "t2.txt"), "--report", str(target))
    assert data["branch_coverage"] == 1.0
    assert json.loads(target.read_text()) == data


def test_detect_command(capsys, tmp_path):
    for name, lines in {"mixed": ["a b a a b", "b b a", "a a a b a b"], "flat": ["a a a a a a"] * 3, "other": ["b a b a", "a b b b a"]}.items():
        (tmp_path / f"{name}.txt").write_text("\n".join(lines) + "\n")
    argv = ["detect", "--symbols", '{"a":0,"b":0}', "--sets", str(tmp_path), "--epsilon", "0.1", "--seed", "7"]
    data = run_json(capsys, *argv)
    assert [s["id"] for s in data["sets"]] == ["flat", "mixed", "other"]
    assert data["seed"] == 7
    assert run(capsys, *argv) == run(capsys, *argv)


def test_oracle_rate_command(capsys):
    data = run_json(capsys, *GOLDEN_RUNS["oracle_running_example"])
    assert data["smoothed"] == pytest.approx(0.4812, abs=1e-3)
    assert abs(data["residual_smoothed"]) < 1e-3


def test_precision_flag(capsys):
    short = run_json(capsys, "analyze", "--dfa", WEIGHTED, "--precision", "3")
    full = run_json(capsys, "analyze", "--dfa", WEIGHTED, "--precision", "0")
    assert short["rate_per_symbol"] == 2.02
    assert full["rate_per_symbol"] == pytest.approx(2.024890963863041, abs=1e-14)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["analyze", "--regex", "a"],
        ["analyze"],
        ["generate", "--dfa", WEIGHTED, "--seed", "-3"],
        ["suite-eval", "--dfa", TEXTBOX, "--suite", "x", "--epsilon", "0"],
        ["oracle-rate", "--dfa", WEIGHTED, "--n-max", "10"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["analyze", "--regex", "a(", "--weights", '{"a":0}'], "RegexSyntaxError"),
        (["analyze", "--regex", "ac", "--weights", '{"a":0}'], "UnknownSymbol"),
        (["analyze", "--dfa", WEIGHTED, "--weights", '{"z":1}'], "UnknownSymbol"),
        (["analyze", "--dfa", "/nonexistent.json"], "FileNotFoundError"),
    ],
)
def test_domain_errors_exit_one_with_json(capsys, argv, kind):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    payload = json.loads(err)
    assert payload["error"] == kind and payload["schema"] == "freeword/1"


def test_rejected_suite_word(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("Start Exit\nStart Exit Exit\n")
    code, _, err = run(capsys, "suite-eval", "--dfa", TEXTBOX, "--suite", str(bad))
    assert code == 1
    payload = json.loads(err)
    assert (payload["index"], payload["position"]) == (1, 2)


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_reports(capsys, name):
    code, out, _ = run(capsys, *GOLDEN_RUNS[name])
    assert code == 0
    expected = json.loads((GOLDEN / f"{name}.json").read_text())
    assert json.loads(out) == expected


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "freeword.cli", "analyze", "--dfa", WEIGHTED], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schema"] == "freeword/1"
