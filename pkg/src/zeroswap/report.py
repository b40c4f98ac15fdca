"""Compile reports: JSON serialization and the cross-report comparison table."""
from __future__ import annotations

import json
from importlib import resources

from .baseline import BaselineResult
from .scheduler import movement_trace

REPORT_VERSION = 1


def _pt(p):
    return [float(p[0]), float(p[1])]


def _layer_dict(layer):
    mv = layer.movement
    return {
        "index": layer.index,
        "gates": list(layer.gates),
        "ejected": list(layer.ejected),
        "duration_us": layer.duration_us,
        "recovery_us": layer.recovery_us,
        "move_out_us": layer.move_out_us,
        "gate_phase_us": layer.gate_phase_us,
        "home_us": layer.home_us,
        "trap_change_us": layer.trap_change_us,
        "moves": [{
            "qubit": m.target_qubit, "from": _pt(m.start), "to": _pt(m.end), "depth": m.depth,
            "induced": [{"qubit": q, "from": _pt(s), "to": _pt(e)} for q, s, e in m.induced],
        } for m in mv.moves],
        "trap_changes": [{
            "qubit": tc.qubit, "partner": tc.partner, "origin": _pt(tc.slm_origin),
            "spot": _pt(tc.spot), "partner_spot": _pt(tc.partner_spot),
            "travel_um": tc.travel_um, "duration_us": tc.duration_us, "depth": tc.depth,
        } for tc in mv.trap_changes],
    }


def _baseline_layer_dict(layer, routed):
    ops = [routed.ops[i] for i in layer.ops]
    return {
        "index": layer.index,
        "ops": [{"kind": op.kind, "slots": list(op.qubits), "gate": op.source} for op in ops],
        "duration_us": layer.duration_us,
    }


def build_report(result, *, include_timing=False):
    """Plain-dict report for a :class:`~zeroswap.pipeline.CompileResult`."""
    cfg = result.config
    sched = result.schedule
    circuit = result.circuit
    topo = result.topology
    baseline = isinstance(sched, BaselineResult)
    cz_total = sched.cz_count
    report = {
        "report_version": REPORT_VERSION,
        "circuit_name": result.name,
        "strategy": cfg.strategy,
        "seed": cfg.seed,
        "machine": cfg.machine,
        "homing": cfg.homing if not baseline else False,
        "aod_count": cfg.aod_count,
        "num_qubits": circuit.num_qubits,
        "input_cz_count": circuit.cz_count,
        "cz_count": cz_total,
        "cz_count_total": cz_total,
        "u3_count": sched.u3_count,
        "swap_count": sched.swap_count,
        "trap_change_count": sched.trap_change_count,
        "trap_change_cz_fraction": (sched.trap_change_count / circuit.cz_count
                                    if circuit.cz_count else 0.0),
        "move_count": 0 if baseline else sched.move_count,
        "layer_count": len(sched.layers),
        "circuit_runtime_us": sched.total_runtime_us,
        "fidelity": result.fidelity.as_dict(),
        "parallel": result.plan.as_dict(),
        "topology": {
            "extent": list(topo.extent),
            "margin": topo.margin,
            "unit_um": topo.unit_um,
            "bounds_um": [float(v) for v in topo.bounds_um()],
            "interaction_radius_um": topo.interaction_radius_um,
            "blockade_radius_um": topo.blockade_radius_um,
            "home_positions_um": [_pt(p) for p in result.context.positions],
            "aod_qubits": sorted(result.aod.occupancy),
        },
        "compile_time_s": round(result.compile_time_s, 3) if include_timing else None,
    }
    if baseline:
        report["layers"] = [_baseline_layer_dict(layer, sched.routed) for layer in sched.layers]
        report["movement_trace"] = []
    else:
        report["layers"] = [_layer_dict(layer) for layer in sched.layers]
        report["movement_trace"] = movement_trace(sched)
    return report


def dumps(report):
    """Canonical text form: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema():
    text = resources.files("zeroswap").joinpath("data/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


SUMMARY_COLUMNS = (
    ("circuit", "circuit_name", "{}"),
    ("strategy", "strategy", "{}"),
    ("qubits", "num_qubits", "{}"),
    ("cz", "cz_count", "{}"),
    ("swaps", "swap_count", "{}"),
    ("trap_chg", "trap_change_count", "{}"),
    ("layers", "layer_count", "{}"),
    ("runtime_us", "circuit_runtime_us", "{:.1f}"),
    ("p_success", None, "{:.4f}"),
    ("copies", None, "{}"),
    ("exec_time_s", None, "{:.3f}"),
)


def summary_rows(reports):
    rows = []
    for r in reports:
        row = []
        for _, key, fmt in SUMMARY_COLUMNS:
            if key is not None:
                value = r[key]
            elif fmt == "{:.4f}":
                value = r["fidelity"]["p_success"]
            elif fmt == "{}":
                value = r["parallel"]["copies"]
            else:
                value = r["parallel"]["total_execution_time_us"] * 1e-6
            row.append(fmt.format(value))
        rows.append(row)
    return rows


def summarize(reports):
    """Fixed-width comparison table, one row per report, sorted by circuit then strategy."""
    reports = sorted(reports, key=lambda r: (r["circuit_name"], r["strategy"]))
    header = [name for name, _, _ in SUMMARY_COLUMNS]
    rows = summary_rows(reports)
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(v.rjust(w) if i >= 2 else v.ljust(w)
                               for i, (v, w) in enumerate(zip(row, widths))).rstrip())
    lines += _pairwise(reports)
    return "\n".join(lines) + "\n"


def _pairwise(reports):
    """Relative CZ and success change of parallax against the baseline, per circuit."""
    by = {}
    for r in reports:
        by.setdefault(r["circuit_name"], {})[r["strategy"]] = r
    out = []
    for name in sorted(by):
        pair = by[name]
        if "parallax" in pair and "swap-baseline" in pair:
            p, b = pair["parallax"], pair["swap-baseline"]
            cz_red = 1 - p["cz_count"] / b["cz_count"] if b["cz_count"] else 0.0
            pb = b["fidelity"]["p_success"]
            gain = p["fidelity"]["p_success"] / pb - 1 if pb > 0 else float("inf")
            out.append(f"{name}: CZ reduction {cz_red:.1%}, success change {gain:+.1%}")
    if out:
        out.insert(0, "")
    return out
