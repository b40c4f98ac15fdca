import json

import jsonschema
import pytest

from zeroswap.benchmarks import BENCHMARKS
from zeroswap.report import build_report, dumps, load_schema, summarize


@pytest.mark.parametrize("homing", [True, False])
def test_reports_match_schema_and_counts(compiled_benchmarks, homing):
    schema = load_schema()
    for name in BENCHMARKS:
        r = compiled_benchmarks[name, homing]
        report = json.loads(dumps(build_report(r)))
        jsonschema.validate(report, schema)
        assert report["cz_count"] == report["input_cz_count"] == r.circuit.cz_count
        assert report["layer_count"] == len(report["layers"])
        assert report["circuit_runtime_us"] == pytest.approx(
            sum(l["duration_us"] for l in report["layers"]))
        assert report["move_count"] == sum(e["kind"] == "move" for e in report["movement_trace"])
        assert report["homing"] is homing


def test_dumps_is_canonical(compiled_benchmarks):
    report = build_report(compiled_benchmarks["fredkin", True])
    text = dumps(report)
    assert text.endswith("\n")
    assert text == dumps(json.loads(text))
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


def _fake(name, strategy, cz, p):
    return {"circuit_name": name, "strategy": strategy, "num_qubits": 3, "cz_count": cz,
            "swap_count": 0, "trap_change_count": 0, "layer_count": 4,
            "circuit_runtime_us": 12.345, "fidelity": {"p_success": p},
            "parallel": {"copies": 7, "total_execution_time_us": 2.5e6}}


def test_summary_table_layout():
    table = summarize([_fake("b", "parallax", 8, 0.5), _fake("a", "parallax", 4, 0.6),
                       _fake("b", "swap-baseline", 10, 0.4)])
    lines = table.splitlines()
    assert [l.split()[:2] for l in lines[2:5]] == [["a", "parallax"], ["b", "parallax"],
                                                   ["b", "swap-baseline"]]
    assert lines[2].split()[-4:] == ["12.3", "0.6000", "7", "2.500"]
    assert lines[-1] == "b: CZ reduction 20.0%, success change +25.0%"
    assert len({len(l) for l in lines[:2]}) == 1
