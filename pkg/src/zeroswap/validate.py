"""Independent replay checks for compiled schedules.

Nothing here trusts the movement engine's bookkeeping: positions are
rebuilt from the recorded steps and every constraint is re-measured by
brute force.
"""
from __future__ import annotations

import math

import numpy as np

from .hardware import gate_phase_us
from .layout import RANGE_TOL
from .qasm import CZ, U3

X, Y = 0, 1


def _apply(pos, leg):
    for q, axis, _, new in leg:
        pos[q, axis] = new


def _revert(pos, leg):
    for q, axis, old, _ in reversed(leg):
        pos[q, axis] = old


def iter_checkpoints(schedule):
    """Yield ``(layer_index, phase, positions, aod_qubits)`` at every checkpoint.

    Checkpoints are the layer start, each leg of a drift recovery, the end
    of each movement leg, each leg
    of every trap-change excursion (out and back) and each homing leg.
    """
    for layer in schedule.layers:
        pos = layer.start_positions.copy()
        aod = set(layer.aod_qubits)
        yield layer.index, "start", pos.copy(), frozenset(aod)
        for m in reversed(layer.recovery):
            for leg in reversed(m.legs):
                _revert(pos, leg)
                yield layer.index, "recover", pos.copy(), frozenset(aod)
        for m in layer.movement.moves:
            for leg in m.legs:
                _apply(pos, leg)
                yield layer.index, "move", pos.copy(), frozenset(aod)
        for tc in layer.movement.trap_changes:
            # lines open before the atom is switched into the AOD and close after it leaves
            tc_aod = frozenset(aod | {tc.qubit})
            for k, leg in enumerate(tc.legs):
                _apply(pos, leg)
                yield layer.index, "trap_change", pos.copy(), tc_aod if k >= tc.insert_legs else frozenset(aod)
            for k in range(len(tc.legs) - 1, -1, -1):
                _revert(pos, tc.legs[k])
                yield layer.index, "trap_return", pos.copy(), tc_aod if k > tc.insert_legs else frozenset(aod)
        if schedule.homing:
            for m in reversed(layer.movement.moves):
                for leg in reversed(m.legs):
                    _revert(pos, leg)
                    yield layer.index, "home", pos.copy(), frozenset(aod)


def min_pair_distance(pos):
    n = pos.shape[0]
    if n < 2:
        return math.inf
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    d[np.arange(n), np.arange(n)] = math.inf
    return float(d.min())


def _line_gaps_ok(coords, eps):
    c = np.sort(np.asarray(coords, dtype=float))
    return bool(len(c) < 2 or (np.diff(c) >= eps - RANGE_TOL).all())


def check_schedule(circuit, schedule, *, radius_um, blockade_um, min_sep_um, eps_um,
                   params=None, max_recursion=80):
    """Return a list of human-readable violations (empty when the schedule is legal)."""
    problems = []
    order = schedule.executed_order()
    if sorted(order) != list(range(len(circuit.gates))):
        problems.append("executed gates are not exactly the circuit's gates")
    per_q = [[] for _ in range(circuit.num_qubits)]
    for gid in order:
        for q in circuit.gates[gid].qubits:
            per_q[q].append(gid)
    if tuple(tuple(p) for p in per_q) != circuit.per_qubit_order:
        problems.append("per-qubit gate order changed")
    if schedule.swap_count != 0:
        problems.append("schedule contains SWAP gates")
    if schedule.cz_count != circuit.cz_count:
        problems.append("CZ count differs from the input")

    prev_end = None
    for layer in schedule.layers:
        li = layer.index
        qs = [q for gid in layer.gates for q in circuit.gates[gid].qubits]
        if len(qs) != len(set(qs)):
            problems.append(f"layer {li}: a qubit appears twice")
        if not layer.gates:
            problems.append(f"layer {li}: no gate executed")
        if len(layer.movement.moves) > 1:
            problems.append(f"layer {li}: more than one move-into-range")
        for m in layer.movement.moves:
            if m.depth > max_recursion:
                problems.append(f"layer {li}: move depth {m.depth} > {max_recursion}")
        for tc in layer.movement.trap_changes:
            if tc.depth > max_recursion:
                problems.append(f"layer {li}: trap change depth {tc.depth} > {max_recursion}")
        if prev_end is not None and not np.array_equal(prev_end, layer.start_positions):
            problems.append(f"layer {li}: does not start where the previous layer ended")
        prev_end = layer.end_positions

        # replay outbound legs and compare with the recorded gate positions
        pos = layer.start_positions.copy()
        for m in reversed(layer.recovery):
            for leg in reversed(m.legs):
                _revert(pos, leg)
        for m in layer.movement.moves:
            for leg in m.legs:
                _apply(pos, leg)
        if not np.array_equal(pos, layer.gate_positions):
            problems.append(f"layer {li}: gate positions do not match the replayed moves")
        tc_gate = {}
        for tc in layer.movement.trap_changes:
            tc_gate[tuple(sorted((tc.qubit, tc.partner)))] = tc
        atoms = []
        for gid in layer.gates:
            g = circuit.gates[gid]
            if g.kind != CZ:
                continue
            pa = tuple(layer.gate_positions[g.qubits[0]])
            pb = tuple(layer.gate_positions[g.qubits[1]])
            tc = tc_gate.get(tuple(sorted(g.qubits)))
            if tc is not None:
                # the gate runs at the far end of the excursion
                exc = layer.gate_positions.copy()
                for leg in tc.legs:
                    _apply(exc, leg)
                pa, pb = tuple(exc[g.qubits[0]]), tuple(exc[g.qubits[1]])
                if tuple(exc[tc.qubit]) != tuple(tc.spot) or tuple(exc[tc.partner]) != tuple(tc.partner_spot):
                    problems.append(f"layer {li}: trap change for CZ #{gid} does not replay to its spot")
            if math.dist(pa, pb) > radius_um + RANGE_TOL:
                problems.append(f"layer {li}: CZ #{gid} out of range")
            atoms.append((gid, pa, pb))
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                for p in atoms[i][1:]:
                    for q in atoms[j][1:]:
                        if math.dist(p, q) <= blockade_um:
                            problems.append(
                                f"layer {li}: CZ #{atoms[i][0]} and #{atoms[j][0]} blockade-interfere")
        if schedule.homing and not np.array_equal(layer.end_positions, layer.start_positions):
            problems.append(f"layer {li}: homing did not restore the layer-start positions")
        if params is not None:
            kinds = [circuit.gates[g].kind for g in layer.gates]
            expect = (layer.recovery_us + layer.move_out_us + layer.home_us
                      + gate_phase_us(U3 in kinds, CZ in kinds, params)
                      + sum(tc.duration_us for tc in layer.movement.trap_changes))
            if abs(expect - layer.duration_us) > 1e-9 * max(1.0, expect):
                problems.append(f"layer {li}: duration does not add up")

    last_layer, last_aod, last_pos = None, None, None
    for li, phase, pos, aod in iter_checkpoints(schedule):
        d = min_pair_distance(pos)
        if d < min_sep_um - RANGE_TOL:
            problems.append(f"layer {li} ({phase}): atoms {d:.6g} um apart")
        members = sorted(aod)
        for axis in (X, Y):
            if not _line_gaps_ok(pos[members, axis], eps_um):
                problems.append(f"layer {li} ({phase}): AOD lines closer than {eps_um} um")
            if last_layer == li and last_aod == aod:
                before = np.argsort(last_pos[members, axis], kind="stable")
                after = np.argsort(pos[members, axis], kind="stable")
                if not np.array_equal(before, after):
                    problems.append(f"layer {li} ({phase}): AOD lines crossed")
        last_layer, last_aod, last_pos = li, aod, pos
    return problems
