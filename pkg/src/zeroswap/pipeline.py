"""End-to-end compilation: layout, AOD assignment, scheduling, metrics."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .aod import (AODGrid, AODPlacementError, cz_partners, park_on_corridors, place_in_aod,
                  score_qubits, select_aod_atoms, unreachable_aod_pair)
from .baseline import compile_baseline
from .config import CompileConfig
from .hardware import estimate_success
from .layout import (ContinuousPlacement, anneal_placement, build_graph, compact_extent,
                     discretize, select_radius)
from .parallel import ParallelPlan, plan_parallel
from .scheduler import CompileError, SchedulerContext, compile_schedule

MARGIN_RETRIES = 2


class FootprintError(RuntimeError):
    """The circuit does not fit the machine."""


@dataclass
class CompileResult:
    name: str
    circuit: object
    config: CompileConfig
    placement: ContinuousPlacement
    topology: object
    weights: list
    aod: AODGrid
    context: SchedulerContext
    schedule: object  # Schedule or BaselineResult
    fidelity: object
    plan: ParallelPlan
    compile_time_s: float

    @property
    def strategy(self):
        return self.config.strategy


def layout_circuit(circuit, config, placement=None):
    """Placement (annealed unless given) and its snapped topology."""
    grid = config.grid
    n = circuit.num_qubits
    if n > grid.n_sites:
        raise FootprintError(f"{n} qubits exceed the {grid.n_sites} sites of {config.machine}")
    graph = build_graph(circuit)
    if placement is None:
        placement = anneal_placement(graph, config.seed, config.anneal)
    elif len(placement.coords) != n:
        raise ValueError(f"cached placement has {len(placement.coords)} qubits, circuit has {n}")
    extent = compact_extent(n, grid, config.layout_density)
    radius = select_radius(placement.as_array())
    topo = discretize(placement, radius, grid, extent=extent, node_weights=graph.node_weights(),
                      margin=config.travel_margin)
    return placement, topo


def assign_aod(circuit, topo, config, strict=False):
    """Scores plus the AOD grid.

    Candidates are taken in score order (the top-k ranking); one is skipped
    when placing it would overflow the region or leave an AOD pair with a
    shared CZ that line ordering keeps out of range. With ``strict`` no AOD
    pair may share an out-of-range CZ at all.
    """
    weights = score_qubits(circuit, topo)
    eps = config.grid.min_sep_um
    radius = topo.interaction_radius_um
    partners = cz_partners(circuit)
    pair_gap = None if strict else eps
    ranked = select_aod_atoms(weights, len(weights))
    order = sorted(ranked, key=lambda q: (-weights[q].score, q))

    def place(qubits):
        if config.aod_parking == "corridor":
            return park_on_corridors(qubits, topo)
        return place_in_aod(qubits, topo, eps, config.grid.min_sep_um)

    kept = frozenset()
    grid = place(kept)
    for q in order:
        if len(kept) >= config.aod_capacity:
            break
        try:
            trial = place(kept | {q})
        except AODPlacementError:
            continue
        if unreachable_aod_pair(trial, partners, radius, pair_gap) is None:
            kept, grid = kept | {q}, trial
    return weights, grid


def make_context(topo, aod, config):
    pos = topo.positions_um()
    for q in aod.occupancy:
        pos[q] = aod.position(q)
    return SchedulerContext(
        positions=pos, aod_qubits=aod.qubits,
        radius_um=topo.interaction_radius_um, blockade_um=topo.blockade_radius_um,
        unit_um=topo.unit_um, bounds=topo.bounds_um(),
        min_sep_um=config.grid.min_sep_um, eps_um=config.grid.min_sep_um,
        params=config.hardware, homing=config.homing, max_recursion=config.max_recursion)


def compile_circuit(circuit, config=None, *, name="circuit", placement=None):
    config = config or CompileConfig()
    t0 = time.perf_counter()
    placement, topo = layout_circuit(circuit, config, placement)
    if config.strategy == "swap-baseline":
        weights, aod = [], AODGrid((), (), {})
        ctx = make_context(topo, aod, config)
        schedule = compile_baseline(circuit, topo, config.hardware, config.seed)
    else:
        # a crowded region can leave a gate with no legal route; fall back to
        # an AOD set without out-of-range AOD pairs, then widen the empty
        # travel ring
        attempts = [(strict, extra) for extra in range(MARGIN_RETRIES + 1)
                    for strict in (False, True)]
        for k, (strict, extra) in enumerate(attempts):
            if extra or strict:
                placement, topo = layout_circuit(
                    circuit, config.with_(travel_margin=config.travel_margin + extra), placement)
            weights, aod = assign_aod(circuit, topo, config, strict=strict)
            ctx = make_context(topo, aod, config)
            try:
                schedule = compile_schedule(circuit, ctx, config.seed)
                break
            except CompileError:
                if k == len(attempts) - 1:
                    raise
    fidelity = estimate_success(schedule, circuit.num_qubits, config.hardware)
    plan = plan_parallel(schedule, topo, config.grid, config.shots,
                         config.inter_shot_overhead_us, ctx)
    if plan.copies < 1:
        raise FootprintError(f"footprint {plan.footprint} does not fit {config.machine}")
    elapsed = time.perf_counter() - t0
    return CompileResult(name, circuit, config, placement, topo, weights, aod, ctx,
                         schedule, fidelity, plan, elapsed)
