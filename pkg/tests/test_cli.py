import json
import subprocess
import sys

import jsonschema
import pytest

from zeroswap import cli
from zeroswap.benchmarks import benchmark_path
from zeroswap.report import load_schema
from zeroswap.scheduler import CompileError

FREDKIN = str(benchmark_path("fredkin"))
GHZ = str(benchmark_path("ghz"))


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_compile_to_stdout_matches_schema(capsys):
    code, out, err = run(["compile", "--input", FREDKIN], capsys)
    assert code == cli.EXIT_OK
    report = json.loads(out)
    jsonschema.validate(report, load_schema())
    assert report["swap_count"] == 0
    assert "fredkin: cz=" in err


def test_baseline_report_matches_schema(capsys):
    code, out, _ = run(["compile", "--input", GHZ, "--strategy", "swap-baseline"], capsys)
    assert code == cli.EXIT_OK
    report = json.loads(out)
    jsonschema.validate(report, load_schema())
    assert report["movement_trace"] == [] and report["homing"] is False


def test_repeat_runs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["compile", "--input", FREDKIN, "--out", str(a)], capsys)[0] == 0
    assert run(["compile", "--input", FREDKIN, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_timing_is_opt_in(capsys):
    _, out, _ = run(["compile", "--input", FREDKIN], capsys)
    assert json.loads(out)["compile_time_s"] is None
    _, out, _ = run(["compile", "--input", FREDKIN, "--timing"], capsys)
    assert json.loads(out)["compile_time_s"] >= 0


def test_several_inputs_to_directory_and_summary(tmp_path, capsys):
    out_dir = tmp_path / "reports"
    code, _, _ = run(["compile", "--input", FREDKIN, GHZ, "--out", str(out_dir), "--jobs", "2"],
                     capsys)
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["fredkin.json", "ghz.json"]
    base = tmp_path / "ghz_base.json"
    assert run(["compile", "--input", GHZ, "--strategy", "swap-baseline", "--out", str(base)],
               capsys)[0] == 0
    code, table, _ = run(["summarize", str(out_dir / "ghz.json"), str(base),
                          str(out_dir / "fredkin.json")], capsys)
    assert code == 0
    lines = table.splitlines()
    assert lines[0].split()[:4] == ["circuit", "strategy", "qubits", "cz"]
    assert [l.split()[0] for l in lines[2:5]] == ["fredkin", "ghz", "ghz"]
    assert any(l.startswith("ghz: CZ reduction") for l in lines)


def test_placement_cache_round_trip(tmp_path, capsys):
    cache = tmp_path / "place.json"
    first = run(["compile", "--input", FREDKIN, "--placement-cache", str(cache)], capsys)[1]
    assert cache.exists()
    second = run(["compile", "--input", FREDKIN, "--placement-cache", str(cache)], capsys)[1]
    assert first == second


def test_trace_svg_written(tmp_path, capsys):
    svg = tmp_path / "trace.svg"
    assert run(["compile", "--input", FREDKIN, "--trace-svg", str(svg)], capsys)[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")


@pytest.mark.parametrize("argv", [[], ["compile"], ["bogus"], ["compile", "--input", "x", "--seed", "a"]])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == cli.EXIT_USAGE


def test_usage_error_for_svg_with_several_inputs(tmp_path, capsys):
    code, _, err = run(["compile", "--input", FREDKIN, GHZ, "--trace-svg", str(tmp_path / "t.svg")],
                       capsys)
    assert code == cli.EXIT_USAGE and "single" in err


def test_missing_input(tmp_path, capsys):
    assert run(["compile", "--input", str(tmp_path / "nope.qasm")], capsys)[0] == cli.EXIT_MISSING
    assert run(["summarize", str(tmp_path / "nope.json")], capsys)[0] == cli.EXIT_MISSING


def test_bad_qasm(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\nfoo q[0];\n')
    code, _, err = run(["compile", "--input", str(bad)], capsys)
    assert code == cli.EXIT_QASM and "bad.qasm" in err


def test_footprint_too_large(tmp_path, capsys):
    big = tmp_path / "big.qasm"
    big.write_text('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[300];\ncz q[0],q[1];\n')
    assert run(["compile", "--input", str(big)], capsys)[0] == cli.EXIT_FOOTPRINT


def test_compile_failure(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise CompileError("no progress")
    monkeypatch.setattr(cli, "compile_circuit", boom)
    code, _, err = run(["compile", "--input", FREDKIN], capsys)
    assert code == cli.EXIT_COMPILE and "no progress" in err


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("[compile]\naod_count = 0\n")
    assert run(["compile", "--input", FREDKIN, "--config", str(cfg)], capsys)[0] == cli.EXIT_CONFIG


def test_bad_placement_cache(tmp_path, capsys):
    cache = tmp_path / "place.json"
    cache.write_text("{}")
    assert run(["compile", "--input", FREDKIN, "--placement-cache", str(cache)],
               capsys)[0] == cli.EXIT_CONFIG


def test_summarize_rejects_non_reports(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text("not json")
    assert run(["summarize", str(junk)], capsys)[0] == cli.EXIT_CONFIG
    junk.write_text("{}")
    assert run(["summarize", str(junk)], capsys)[0] == cli.EXIT_CONFIG


def test_first_error_wins_with_several_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text("garbage")
    code, out, _ = run(["compile", "--input", str(tmp_path / "none.qasm"), str(bad), FREDKIN,
                        "--out", str(tmp_path / "o")], capsys)
    assert code == cli.EXIT_MISSING
    assert (tmp_path / "o" / "fredkin.json").exists()


def test_module_entry_point_in_subprocess():
    proc = subprocess.run([sys.executable, "-m", "zeroswap", "compile", "--input", FREDKIN],
                          capture_output=True, check=False)
    assert proc.returncode == 0
    again = subprocess.run([sys.executable, "-m", "zeroswap", "compile", "--input", FREDKIN],
                           capture_output=True, check=False)
    assert proc.stdout == again.stdout
