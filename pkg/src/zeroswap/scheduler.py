"""Layer-by-layer scheduling with movement, blockade serialization and homing."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .hardware import gate_phase_us
from .layout import RANGE_TOL, distance
from .movement import ArrayState, MoveFailed, MovementResult, TrapChangeFailed, home
from .qasm import CZ, U3
from .rng import ShuffleRng


class CompileError(RuntimeError):
    """The scheduler could not make progress (configuration exhausted)."""


@dataclass
class Layer:
    index: int
    gates: tuple  # executed gate ids in shuffled order
    ejected: tuple
    movement: MovementResult
    duration_us: float
    move_out_us: float = 0.0
    gate_phase_us: float = 0.0
    home_us: float = 0.0
    trap_change_us: float = 0.0
    # positions for replay and validation
    start_positions: np.ndarray = field(default=None, repr=False)
    gate_positions: np.ndarray = field(default=None, repr=False)
    end_positions: np.ndarray = field(default=None, repr=False)
    aod_qubits: frozenset = frozenset()
    move_gate: int = -1
    # moves of earlier layers undone at the start of this one (no-homing recovery)
    recovery: tuple = ()
    recovery_us: float = 0.0


@dataclass
class Schedule:
    layers: list
    num_qubits: int
    cz_count: int
    u3_count: int
    trap_change_count: int
    rng_seed: int
    homing: bool
    swap_count: int = 0

    @property
    def total_runtime_us(self):
        return sum(layer.duration_us for layer in self.layers)

    @property
    def move_count(self):
        return sum(len(layer.movement.moves) for layer in self.layers)

    def executed_order(self):
        return [gid for layer in self.layers for gid in layer.gates]


@dataclass(frozen=True)
class SchedulerContext:
    """Everything the scheduler needs besides the circuit."""

    positions: np.ndarray
    aod_qubits: frozenset
    radius_um: float
    blockade_um: float
    unit_um: float
    bounds: tuple
    min_sep_um: float
    eps_um: float
    params: object
    homing: bool = True
    max_recursion: int = 80
    corridor_pushes: bool = True


def build_layer(circuit, pointer):
    """Ready gates, one entry per gate, in order of the first ready qubit."""
    layer = []
    seen = set()
    for q in range(circuit.num_qubits):
        order = circuit.per_qubit_order[q]
        if pointer[q] >= len(order):
            continue
        gid = order[pointer[q]]
        if gid in seen:
            continue
        gate = circuit.gates[gid]
        if all(pointer[p] < len(circuit.per_qubit_order[p])
               and circuit.per_qubit_order[p][pointer[p]] == gid for p in gate.qubits):
            layer.append(gate)
            seen.add(gid)
    return layer


def _in_range(pos, a, b, radius):
    return distance(pos[a], pos[b]) <= radius + RANGE_TOL


def resolve_movement(candidate, state, ctx):
    """Bring out-of-range CZ pairs together; returns (kept, ejected, result, trap gates).

    At most one move-into-range happens per layer. Gates with two static
    atoms get a trap change; a gate whose move fails also falls back to a
    trap change when it has a static operand.
    """
    result = MovementResult()
    kept, ejected = [], []
    trap_gates = []
    move_gate = None
    for g in candidate:
        if g.kind != CZ or _in_range(state.pos, *g.qubits, ctx.radius_um):
            kept.append(g)
            continue
        a, b = g.qubits
        movers = [q for q in (a, b) if q in state.aod]
        if movers and result.moves:
            ejected.append(g)
            continue
        moved = False
        for m in movers:
            anchor = b if m == a else a
            try:
                mv = state.move_into_range(m, anchor, ctx.radius_um, ctx.unit_um)
            except MoveFailed:
                continue
            result.moves.append(mv)
            move_gate = g.id
            moved = True
            break
        if moved:
            kept.append(g)
        elif len(movers) < 2:
            trap_gates.append(g)
        else:
            ejected.append(g)
    # a move may push other atoms out of range
    still = []
    for g in kept:
        if g.kind == CZ and not _in_range(state.pos, *g.qubits, ctx.radius_um):
            ejected.append(g)
        else:
            still.append(g)
    kept = still
    trap_changes = {}
    for g in trap_gates:
        tc = None
        for t in g.qubits:
            if t in state.aod:
                continue
            partner = g.qubits[1] if t == g.qubits[0] else g.qubits[0]
            try:
                tc = state.trap_change(t, partner, ctx.radius_um, ctx.unit_um, ctx.params)
                break
            except TrapChangeFailed:
                continue
        if tc is None:
            ejected.append(g)
        else:
            trap_changes[g.id] = tc
            kept.append(g)
    return kept, ejected, result, trap_changes, move_gate


def enforce_blockade(gates, positions, trap_changes, blockade_um, rng):
    """Shuffle, then keep CZ gates first-come while they stay clear of earlier ones."""
    order = rng.shuffle(gates)
    kept, ejected = [], []
    kept_pts = np.zeros((0, 2))
    for g in order:
        if g.kind == U3:
            kept.append(g)
            continue
        (ax, ay), (bx, by) = _gate_points(g, positions, trap_changes)
        if kernels.blockade_hit(ax, ay, bx, by, kept_pts, blockade_um):
            ejected.append(g)
            continue
        kept.append(g)
        kept_pts = np.ascontiguousarray(np.vstack([kept_pts, [[ax, ay], [bx, by]]]))
    return kept, ejected


def _gate_points(g, positions, trap_changes):
    a, b = g.qubits
    pa, pb = tuple(positions[a]), tuple(positions[b])
    tc = trap_changes.get(g.id)
    if tc is not None:
        pa, pb = (tc.spot, tc.partner_spot) if tc.qubit == a else (tc.partner_spot, tc.spot)
    return (float(pa[0]), float(pa[1])), (float(pb[0]), float(pb[1]))


def compile_schedule(circuit, ctx, seed):
    """Run build / resolve / shuffle / blockade / execute / home until done."""
    state = ArrayState(ctx.positions, ctx.aod_qubits, ctx.bounds, ctx.min_sep_um,
                       ctx.eps_um, ctx.max_recursion,
                       corridor_um=ctx.unit_um if ctx.corridor_pushes else None)
    rng = ShuffleRng(seed)
    pointer = [0] * circuit.num_qubits
    remaining = len(circuit.gates)
    layers = []
    trap_total = 0
    params = ctx.params
    drift = []  # moves not yet homed (no-homing mode)
    while remaining:
        candidate = build_layer(circuit, pointer)
        start = state.pos.copy()
        recovery = ()
        kept, ejected, movement, trap_changes, move_gate = resolve_movement(candidate, state, ctx)
        gate_pos = state.pos.copy()
        executed, blocked = enforce_blockade(kept, gate_pos, trap_changes, ctx.blockade_um, rng)
        if not executed and drift:
            # drifted atoms may block every route; return them home and retry
            home(state, movement.moves)
            home(state, drift)
            recovery, drift = tuple(drift), []
            kept, ejected, movement, trap_changes, move_gate = resolve_movement(candidate, state, ctx)
            gate_pos = state.pos.copy()
            executed, blocked = enforce_blockade(kept, gate_pos, trap_changes, ctx.blockade_um, rng)
        ejected += blocked
        if not executed:
            names = ", ".join(f"{g.kind}{g.qubits}#{g.id}" for g in candidate)
            raise CompileError(f"no gate could run in layer {len(layers)}: {names}")
        done = {g.id for g in executed}
        movement.trap_changes = [trap_changes[gid] for gid in sorted(trap_changes) if gid in done]
        for g in executed:
            for q in g.qubits:
                pointer[q] += 1
        remaining -= len(executed)
        trap_total += len(movement.trap_changes)

        out_us = params.move_time_us(movement.max_distance_um)
        if ctx.homing:
            home(state, movement.moves)
            home_us = out_us
        else:
            home_us = 0.0
            drift += movement.moves
        recovery_us = params.move_time_us(
            max((distance(start[q], ctx.positions[q]) for q in range(len(start))), default=0.0)
        ) if recovery else 0.0
        phase = gate_phase_us(any(g.kind == U3 for g in executed),
                              any(g.kind == CZ for g in executed), params)
        tc_us = sum(tc.duration_us for tc in movement.trap_changes)
        layers.append(Layer(
            index=len(layers),
            gates=tuple(g.id for g in executed),
            ejected=tuple(sorted(g.id for g in ejected)),
            movement=movement,
            duration_us=recovery_us + out_us + phase + home_us + tc_us,
            move_out_us=out_us, gate_phase_us=phase, home_us=home_us, trap_change_us=tc_us,
            start_positions=start, gate_positions=gate_pos, end_positions=state.pos.copy(),
            aod_qubits=frozenset(state.aod),
            move_gate=move_gate if move_gate is not None else -1,
            recovery=recovery, recovery_us=recovery_us,
        ))
    return Schedule(layers, circuit.num_qubits, circuit.cz_count, circuit.u3_count,
                    trap_total, seed, ctx.homing)


def movement_trace(schedule):
    """Movement events as dicts (one JSON line each)."""
    out = []
    for layer in schedule.layers:
        for m in reversed(layer.recovery):
            out.append(_event(layer.index, m.target_qubit, "home", m.end, m.start, layer.recovery_us))
            for q, s, e in m.induced:
                out.append(_event(layer.index, q, "home", e, s, layer.recovery_us))
        for m in layer.movement.moves:
            out.append(_event(layer.index, m.target_qubit, "move", m.start, m.end, layer.move_out_us))
            for q, s, e in m.induced:
                out.append(_event(layer.index, q, "induced", s, e, layer.move_out_us))
            if schedule.homing:
                out.append(_event(layer.index, m.target_qubit, "home", m.end, m.start, layer.home_us))
                for q, s, e in m.induced:
                    out.append(_event(layer.index, q, "home", e, s, layer.home_us))
        for tc in layer.movement.trap_changes:
            out.append(_event(layer.index, tc.qubit, "trap_change", tc.slm_origin, tc.spot,
                              tc.duration_us))
    return out


def _event(layer, qubit, kind, start, end, duration):
    return {"layer": layer, "qubit": qubit, "kind": kind,
            "from": [round(float(start[0]), 9), round(float(start[1]), 9)],
            "to": [round(float(end[0]), 9), round(float(end[1]), 9)],
            "duration_us": round(float(duration), 9)}
