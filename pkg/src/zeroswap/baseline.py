"""Static-layout SWAP router used as the comparison baseline.

Atoms never move. An out-of-range CZ is fixed by swapping its first
operand along a breadth-first shortest path of the unit-disk graph until
it sits next to the second operand.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .layout import RANGE_TOL, distance
from .qasm import CZ, U3
from .rng import ShuffleRng

SWAP = "SWAP"


@dataclass(frozen=True)
class RoutedOp:
    kind: str
    qubits: tuple  # physical slots
    params: tuple = ()
    source: int = -1  # originating gate id, -1 for inserted SWAPs


@dataclass(frozen=True)
class RoutedCircuit:
    num_qubits: int
    ops: tuple
    swap_count: int
    original_cz_count: int
    final_mapping: tuple  # logical -> physical slot

    @property
    def cz_count_total(self):
        return self.original_cz_count + 3 * self.swap_count


def unit_disk_adjacency(positions, radius):
    pts = np.asarray(positions, dtype=float)
    n = len(pts)
    return [[j for j in range(n) if j != i and distance(pts[i], pts[j]) <= radius + RANGE_TOL]
            for i in range(n)]


def bfs_path(adj, src, dst):
    """Shortest path (node list); neighbours are expanded in ascending order."""
    parent = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    if dst not in parent:
        raise ValueError(f"slots {src} and {dst} are disconnected")
    path = [dst]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def route_with_swaps(circuit, topo):
    pos = topo.positions_um()
    adj = unit_disk_adjacency(pos, topo.interaction_radius_um)
    n = circuit.num_qubits
    l2p = list(range(n))
    p2l = list(range(n))
    ops = []
    swaps = 0
    for g in circuit.gates:
        if g.kind == U3:
            ops.append(RoutedOp(U3, (l2p[g.qubits[0]],), g.params, g.id))
            continue
        a, b = g.qubits
        pa, pb = l2p[a], l2p[b]
        if distance(pos[pa], pos[pb]) > topo.interaction_radius_um + RANGE_TOL:
            path = bfs_path(adj, pa, pb)
            for u, v in zip(path[:-2], path[1:-1]):
                ops.append(RoutedOp(SWAP, (u, v)))
                swaps += 1
                lu, lv = p2l[u], p2l[v]
                p2l[u], p2l[v] = lv, lu
                l2p[lu], l2p[lv] = v, u
            pa = l2p[a]
        ops.append(RoutedOp(CZ, (pa, pb), (), g.id))
    return RoutedCircuit(n, tuple(ops), swaps, circuit.cz_count, tuple(l2p))


@dataclass
class BaselineLayer:
    index: int
    ops: tuple  # indices into RoutedCircuit.ops
    duration_us: float


@dataclass
class BaselineResult:
    routed: RoutedCircuit
    layers: list
    u3_count: int
    rng_seed: int
    trap_change_count: int = 0
    homing: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def swap_count(self):
        return self.routed.swap_count

    @property
    def cz_count(self):
        return self.routed.cz_count_total

    @property
    def total_runtime_us(self):
        return sum(layer.duration_us for layer in self.layers)


def schedule_routed(routed, topo, params, seed):
    """Dependency layers with the same shuffle-and-blockade rule as the main scheduler."""
    pos = topo.positions_um()
    blockade = topo.blockade_radius_um
    per_slot = [[] for _ in range(routed.num_qubits)]
    for i, op in enumerate(routed.ops):
        for q in op.qubits:
            per_slot[q].append(i)
    pointer = [0] * routed.num_qubits
    remaining = len(routed.ops)
    rng = ShuffleRng(seed)
    layers = []
    while remaining:
        ready, seen = [], set()
        for q in range(routed.num_qubits):
            if pointer[q] >= len(per_slot[q]):
                continue
            i = per_slot[q][pointer[q]]
            if i in seen:
                continue
            if all(pointer[p] < len(per_slot[p]) and per_slot[p][pointer[p]] == i
                   for p in routed.ops[i].qubits):
                ready.append(i)
                seen.add(i)
        kept = []
        kept_pts = np.zeros((0, 2))
        for i in rng.shuffle(ready):
            op = routed.ops[i]
            if op.kind != U3:
                a, b = pos[op.qubits[0]], pos[op.qubits[1]]
                if kernels.blockade_hit(a[0], a[1], b[0], b[1], kept_pts, blockade):
                    continue
                kept_pts = np.ascontiguousarray(np.vstack([kept_pts, [a, b]]))
            kept.append(i)
        kinds = {routed.ops[i].kind for i in kept}
        dur = 0.0
        if U3 in kinds:
            dur = max(dur, params.u3_time_us)
        if CZ in kinds:
            dur = max(dur, params.cz_time_us)
        if SWAP in kinds:
            dur = max(dur, params.swap_time_us)
        for i in kept:
            for q in routed.ops[i].qubits:
                pointer[q] += 1
        remaining -= len(kept)
        layers.append(BaselineLayer(len(layers), tuple(kept), dur))
    return layers


def compile_baseline(circuit, topo, params, seed):
    routed = route_with_swaps(circuit, topo)
    layers = schedule_routed(routed, topo, params, seed)
    return BaselineResult(routed, layers, circuit.u3_count, seed)
