import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zeroswap.benchmarks import load_benchmark
from zeroswap.config import CompileConfig
from zeroswap.hardware import HardwareParams
from zeroswap.parallel import plan_parallel, tile, validate_tandem
from zeroswap.pipeline import FootprintError, compile_circuit
from zeroswap.qasm import CZ, Circuit
from zeroswap.scheduler import SchedulerContext, compile_schedule


def test_three_by_three_footprint_on_large_grid():
    plan = tile((3, 3), (35, 35), 8000, 100.0)
    assert plan.copies == 121
    assert plan.tiling == (11, 11)
    assert plan.atoms_per_aod_row == 11 and plan.atoms_per_aod_col == 11
    assert plan.physical_shots == 67
    assert plan.total_execution_time_us == pytest.approx(67 * 100.0)


def test_full_grid_footprint_is_serial():
    plan = tile((16, 16), (16, 16), 8000, 50.0)
    assert plan.copies == 1 and plan.physical_shots == 8000
    assert plan.reduction_vs_serial == 0.0


def test_oversized_footprint_has_no_copies():
    assert tile((17, 3), (16, 16), 10, 1.0).copies == 0


def test_overhead_counts_per_physical_shot():
    plan = tile((4, 4), (16, 16), 100, 10.0, overhead_us=5.0)
    assert plan.total_execution_time_us == pytest.approx(math.ceil(100 / 16) * 15.0)


@given(st.integers(1, 35), st.integers(1, 35), st.integers(1, 20_000))
def test_time_non_increasing_in_copies(w, h, shots):
    plan = tile((w, h), (35, 35), shots, 1.0)
    c = plan.copies
    assert c == (35 // w) * (35 // h)
    assert plan.physical_shots / shots <= 1 / c + 1 / shots + 1e-15
    if w > 1:
        wider = tile((w - 1, h), (35, 35), shots, 1.0)
        assert wider.copies >= c
        assert wider.total_execution_time_us <= plan.total_execution_time_us


def test_reduction_at_least_97_percent_from_34_copies():
    for c in range(34, 1226):
        assert 1 - math.ceil(8000 / c) / 8000 >= 0.97


def _move_schedule():
    p = HardwareParams()
    ctx = SchedulerContext(
        positions=np.array([(5.0, 5.0), (55.0, 5.0)]), aod_qubits=frozenset({0}),
        radius_um=10.0, blockade_um=25.0, unit_um=10.0, bounds=(0.0, 60.0, 0.0, 60.0),
        min_sep_um=4.0, eps_um=4.0, params=p)
    c = Circuit.from_ops(2, [(CZ, (0, 1), ())])
    return compile_schedule(c, ctx, 0)


def test_single_copy_always_valid():
    sched = _move_schedule()
    assert validate_tandem(tile((7, 7), (7, 7), 1, 1.0), sched, 10.0, 4.0, 4.0)


def test_copies_too_close_for_the_move():
    sched = _move_schedule()
    # at a one-site pitch the copies start clear of each other, but the move
    # lands this copy's atom on the neighbour's static atom
    plan = tile((1, 16), (16, 16), 1, sched.total_runtime_us)
    start = sched.layers[0].start_positions
    assert np.abs(start[:, None, 0] - (start[None, :, 0] + 10.0)).min() >= 4.0
    check = validate_tandem(plan, sched, 10.0, 4.0, 4.0)
    assert not check
    assert check.layer == 0


def test_copies_on_one_shared_row():
    sched = _move_schedule()
    plan = tile((7, 1), (21, 1), 3, sched.total_runtime_us)
    assert plan.copies == 3 and plan.atoms_per_aod_row == 3
    assert validate_tandem(plan, sched, 10.0, 4.0, 4.0)


def test_plan_for_compiled_benchmark_validates():
    cfg = CompileConfig(machine="atom1225")
    r = compile_circuit(load_benchmark("adv"), cfg, name="adv")
    plan = r.plan
    assert plan.copies >= 1
    assert plan.copies == plan.tiling[0] * plan.tiling[1]
    assert validate_tandem(plan, r.schedule, r.topology.unit_um, 4.0, 4.0, r.context.positions)
    again = plan_parallel(r.schedule, r.topology, cfg.grid, cfg.shots, 0.0, r.context)
    assert again == plan


def test_circuit_larger_than_machine():
    c = Circuit.from_ops(300, [])
    with pytest.raises(FootprintError):
        compile_circuit(c, CompileConfig())


@pytest.mark.parametrize("name", ["fredkin", "adv", "qec", "ghz"])
def test_tandem_check_matches_slow_oracle(name, compiled_benchmarks):
    from oracles import tandem_clash
    from zeroswap.validate import iter_checkpoints
    r = compiled_benchmarks[name, True]
    cps = list(iter_checkpoints(r.schedule))
    w, h = r.plan.footprint
    for fw, fh in {(w, h), (max(w - 2, 1), h), (w, max(h - 3, 1)), (1, 1), (2, 2)}:
        plan = tile((fw, fh), (35, 35), 1, 1.0)
        got = validate_tandem(plan, r.schedule, r.topology.unit_um, 4.0, 4.0)
        want = tandem_clash(cps, plan.tiling, plan.footprint, r.topology.unit_um, 4.0, 4.0)
        assert bool(got) == (want is None)
        if want is not None:
            assert got.layer == want
