import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import ops_of, problems, scheduled_ops
from oracles import random_state, simulate
from zeroswap.benchmarks import load_benchmark, random_circuit
from zeroswap.config import CompileConfig
from zeroswap.hardware import HardwareParams
from zeroswap.movement import ArrayState
from zeroswap.pipeline import assign_aod, compile_circuit, layout_circuit, make_context
from zeroswap.qasm import CZ, U3, Circuit
from zeroswap.rng import ShuffleRng
from zeroswap.scheduler import (SchedulerContext, build_layer, compile_schedule, enforce_blockade,
                                movement_trace, resolve_movement)
from zeroswap.validate import check_schedule

PARAMS = HardwareParams()


class Identity:
    """Stand-in for the shuffle generator that keeps the given order."""

    def shuffle(self, items):
        return list(items)


def ctx_of(points, aod, radius=10.0, homing=True):
    return SchedulerContext(
        positions=np.array(points, dtype=float), aod_qubits=frozenset(aod), radius_um=radius,
        blockade_um=2.5 * radius, unit_um=10.0, bounds=(0.0, 150.0, 0.0, 150.0),
        min_sep_um=4.0, eps_um=4.0, params=PARAMS, homing=homing)


def state_for(ctx):
    return ArrayState(ctx.positions, ctx.aod_qubits, ctx.bounds, ctx.min_sep_um, ctx.eps_um,
                      ctx.max_recursion, corridor_um=ctx.unit_um)


def validate(circuit, sched, ctx):
    return check_schedule(circuit, sched, radius_um=ctx.radius_um, blockade_um=ctx.blockade_um,
                          min_sep_um=ctx.min_sep_um, eps_um=ctx.eps_um, params=ctx.params)


U = (0.3, 0.1, -0.2)


def test_build_layer_dependency_stall():
    c = Circuit.from_ops(3, [(U3, (1,), U), (U3, (1,), U), (CZ, (0, 1), ()), (U3, (2,), U)])
    layer = build_layer(c, [0, 0, 0])
    assert [g.id for g in layer] == [0, 3]


def test_build_layer_lists_two_qubit_gate_once():
    c = Circuit.from_ops(2, [(CZ, (0, 1), ())])
    assert [g.id for g in build_layer(c, [0, 0])] == [0]


def test_serial_chain_gives_singleton_layers():
    c = Circuit.from_ops(1, [(U3, (0,), U)] * 3)
    ctx = ctx_of([(15, 15)], ())
    sched = compile_schedule(c, ctx, 0)
    assert [layer.gates for layer in sched.layers] == [(0,), (1,), (2,)]
    assert sched.total_runtime_us == pytest.approx(6.0)


def test_empty_circuit_empty_schedule():
    c = Circuit.from_ops(2, [])
    sched = compile_schedule(c, ctx_of([(15, 15), (25, 15)], ()), 0)
    assert sched.layers == [] and sched.total_runtime_us == 0.0


def test_single_move_per_layer_second_gate_ejected():
    # two out-of-range pairs, each with an AOD atom
    pts = [(5, 5), (55, 5), (105, 105), (55, 105)]
    ctx = ctx_of(pts, {0, 2})
    c = Circuit.from_ops(4, [(CZ, (0, 1), ()), (CZ, (2, 3), ())])
    kept, ejected, result, tcs, move_gate = resolve_movement(build_layer(c, [0] * 4),
                                                             state_for(ctx), ctx)
    assert [g.id for g in kept] == [0]
    assert [g.id for g in ejected] == [1]
    assert len(result.moves) == 1 and move_gate == 0 and not tcs


def test_static_pair_gets_trap_change_same_layer():
    pts = [(5, 5), (55, 5), (105, 105)]
    ctx = ctx_of(pts, {2})
    c = Circuit.from_ops(3, [(CZ, (0, 1), ())])
    kept, ejected, result, tcs, _ = resolve_movement(build_layer(c, [0] * 3), state_for(ctx), ctx)
    assert [g.id for g in kept] == [0] and not ejected and not result.moves
    assert set(tcs) == {0}
    sched = compile_schedule(c, ctx, 0)
    assert len(sched.layers) == 1
    assert sched.trap_change_count == 1
    assert sched.layers[0].duration_us == pytest.approx(0.8 + tcs[0].duration_us)
    assert validate(c, sched, ctx) == []


def test_all_in_range_layer_unchanged():
    pts = [(5, 5), (15, 5), (45, 5), (55, 5)]
    ctx = ctx_of(pts, set())
    c = Circuit.from_ops(4, [(CZ, (0, 1), ()), (CZ, (2, 3), ())])
    cand = build_layer(c, [0] * 4)
    kept, ejected, result, tcs, _ = resolve_movement(cand, state_for(ctx), ctx)
    assert kept == cand and not ejected and not result.moves and not tcs


def test_blockade_three_pair_chain():
    # Q0-Q1 and Q3-Q4 are far apart; Q2 sits within the blockade of Q1
    pos = np.array([(0, 0), (10, 0), (30, 0), (40, 0), (50, 0)], dtype=float)
    c = Circuit.from_ops(5, [(CZ, (0, 1), ()), (CZ, (3, 4), ()), (CZ, (2, 3), ())])
    kept, ejected = enforce_blockade(list(c.gates), pos, {}, 25.0, Identity())
    assert [g.id for g in kept] == [0, 1]
    assert [g.id for g in ejected] == [2]


def test_single_cz_never_ejected():
    pos = np.array([(0, 0), (10, 0)], dtype=float)
    c = Circuit.from_ops(2, [(CZ, (0, 1), ())])
    for seed in range(10):
        kept, ejected = enforce_blockade(list(c.gates), pos, {}, 25.0, ShuffleRng(seed))
        assert len(kept) == 1 and not ejected


def test_distant_pairs_kept_in_any_order():
    pos = np.array([(0, 0), (10, 0), (100, 0), (110, 0)], dtype=float)
    c = Circuit.from_ops(4, [(CZ, (0, 1), ()), (CZ, (2, 3), ()), (U3, (0,), U)])
    for seed in range(20):
        kept, ejected = enforce_blockade(list(c.gates[:2]), pos, {}, 25.0, ShuffleRng(seed))
        assert len(kept) == 2 and not ejected


def test_u3_never_ejected():
    pos = np.array([(0, 0), (10, 0), (20, 0), (30, 0)], dtype=float)
    c = Circuit.from_ops(4, [(CZ, (0, 1), ()), (CZ, (2, 3), ()), (U3, (0,), U)])
    for seed in range(10):
        kept, _ = enforce_blockade([c.gates[0], c.gates[1], c.gates[2]], pos, {}, 25.0,
                                   ShuffleRng(seed))
        assert 2 in {g.id for g in kept}
        assert sum(g.kind == CZ for g in kept) == 1


def test_fredkin_schedule():
    c = load_benchmark("fredkin")
    r = compile_circuit(c, CompileConfig(), name="fredkin")
    s = r.schedule
    assert s.swap_count == 0 and s.cz_count == c.cz_count
    assert sorted(s.executed_order()) == list(range(len(c.gates)))
    assert problems(r) == []
    moved = [layer.index for layer in s.layers if layer.movement.moves]
    assert moved, "the circuit needs at least one move"
    for i in moved:
        layer = s.layers[i]
        assert np.array_equal(layer.end_positions, layer.start_positions)
        assert layer.home_us == pytest.approx(layer.move_out_us)


@pytest.fixture(scope="module")
def ten_qubit_setup():
    c = random_circuit(10, 120, 77)
    cfg = CompileConfig()
    _, topo = layout_circuit(c, cfg)
    _, grid = assign_aod(c, topo, cfg)
    return c, make_context(topo, grid, cfg)


def test_every_seed_gives_a_valid_schedule(ten_qubit_setup):
    c, ctx = ten_qubit_setup
    for seed in range(100):
        sched = compile_schedule(c, ctx, seed)
        assert validate(c, sched, ctx) == [], seed
        assert len(sched.layers) <= len(c.gates)
        assert sched.rng_seed == seed


def test_schedule_is_deterministic(ten_qubit_setup):
    c, ctx = ten_qubit_setup
    a, b = compile_schedule(c, ctx, 5), compile_schedule(c, ctx, 5)
    assert [l.gates for l in a.layers] == [l.gates for l in b.layers]
    assert movement_trace(a) == movement_trace(b)


def test_no_homing_schedule_is_valid(ten_qubit_setup):
    c, ctx = ten_qubit_setup
    nctx = replace(ctx, homing=False)
    sched = compile_schedule(c, nctx, 3)
    assert validate(c, sched, nctx) == []
    assert all(l.home_us == 0.0 for l in sched.layers)


@given(st.integers(2, 7), st.integers(1, 60), st.integers(0, 10_000))
def test_schedule_preserves_semantics(n, g, seed):
    c = random_circuit(n, g, seed)
    r = compile_circuit(c, CompileConfig(seed=seed % 17))
    assert problems(r) == []
    init = random_state(n, seed)
    a = simulate(n, ops_of(c), init)
    b = simulate(n, scheduled_ops(r), init)
    assert np.max(np.abs(a - b)) <= 1e-9


def test_trace_events_are_well_formed(ten_qubit_setup):
    c, ctx = ten_qubit_setup
    sched = compile_schedule(c, ctx, 0)
    trace = movement_trace(sched)
    kinds = {e["kind"] for e in trace}
    assert kinds <= {"move", "induced", "home", "trap_change"}
    n_moves = sum(e["kind"] == "move" for e in trace)
    assert n_moves == sched.move_count
    homes = sum(e["kind"] == "home" for e in trace)
    assert homes == sum(e["kind"] in ("move", "induced") for e in trace)
    for e in trace:
        assert e["duration_us"] >= 0 and math.isfinite(e["duration_us"])
