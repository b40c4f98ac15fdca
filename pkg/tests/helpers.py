"""Small shared helpers for the test modules."""
from zeroswap.validate import check_schedule


def ops_of(circuit):
    """Circuit as plain ``(kind, qubits, params)`` triples for the oracles."""
    return [(g.kind, g.qubits, g.params) for g in circuit.gates]


def kinds_of(circuit):
    return [(g.kind, g.qubits) for g in circuit.gates]


def problems(result):
    """Validator findings for a compile result."""
    ctx = result.context
    return check_schedule(result.circuit, result.schedule, radius_um=ctx.radius_um,
                          blockade_um=ctx.blockade_um, min_sep_um=ctx.min_sep_um,
                          eps_um=ctx.eps_um, params=ctx.params,
                          max_recursion=ctx.max_recursion)


def scheduled_ops(result):
    """Gate triples in executed (layer, then shuffled) order."""
    c = result.circuit
    return [(c.gates[g].kind, c.gates[g].qubits, c.gates[g].params)
            for g in result.schedule.executed_order()]
