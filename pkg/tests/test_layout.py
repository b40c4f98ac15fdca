import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import connected_at, min_connecting_radius, pairwise, placement_energy, random_search_objective
from zeroswap.benchmarks import random_circuit
from zeroswap.config import AnnealConfig, GridSpec
from zeroswap.layout import (ContinuousPlacement, DiscreteTopology, anneal_placement, build_graph,
                             compact_extent, discretize, select_radius, unit_disk_connected)
from zeroswap.qasm import CZ, Circuit

GRID16 = GridSpec(16, 16)


def test_edge_weight_counts_repeated_cz():
    c = Circuit.from_ops(2, [(CZ, (0, 1), ())] * 3 + [(CZ, (1, 0), ())] * 2)
    g = build_graph(c)
    assert g.edges == {(0, 1): 5}
    assert g.node_weights() == [5, 5]


def test_select_radius_collinear():
    assert select_radius([(0, 0), (0.5, 0), (1, 0)]) == pytest.approx(0.5)


def test_select_radius_single_point():
    assert select_radius([(0.3, 0.7)]) == 0.0


@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)),
              elements=st.floats(0, 1, allow_nan=False)))
def test_select_radius_matches_brute_force(pts):
    r = select_radius(pts)
    assert r == pytest.approx(min_connecting_radius(pts), abs=1e-12)
    assert connected_at(pts, r)


def test_corners_snap_to_corner_sites():
    p = ContinuousPlacement(((0, 0), (1, 0), (0, 1), (1, 1)), 0.0)
    topo = discretize(p, 1.0, GRID16)
    assert topo.sites == ((0, 0), (15, 0), (0, 15), (15, 15))


def test_collision_goes_to_heavier_qubit():
    p = ContinuousPlacement(((0.5, 0.5), (0.5, 0.5)), 0.0)
    light_first = discretize(p, 0.0, GridSpec(3, 3), node_weights=[1, 7])
    assert light_first.sites[1] == (1, 1)
    col, row = light_first.sites[0]
    assert abs(col - 1) + abs(row - 1) == 1


def test_blockade_is_two_and_a_half_radii():
    topo = DiscreteTopology(((0, 0), (1, 0)), 10.0, 10.0, (2, 1))
    assert topo.blockade_radius_um == pytest.approx(25.0)


def test_grid_pitch_from_separation():
    g = GridSpec(16, 16, min_sep_um=4.0, padding_um=2.0)
    assert g.unit_um == pytest.approx(10.0)


@given(st.integers(1, 25), st.integers(0, 60), st.integers(0, 1000))
def test_discretized_topology_invariants(n, gates, seed):
    rng = np.random.default_rng(seed)
    p = ContinuousPlacement(tuple(map(tuple, rng.random((n, 2)))), 0.0)
    weights = list(rng.integers(0, 5, size=n))
    extent = compact_extent(n, GRID16)
    topo = discretize(p, 0.1, GRID16, extent=extent, node_weights=weights, margin=1)
    pos = topo.positions_um()
    assert len(set(topo.sites)) == n
    d = pairwise(pos)
    np.fill_diagonal(d, np.inf)
    assert d.min() >= 2 * GRID16.min_sep_um + GRID16.padding_um - 1e-9
    assert unit_disk_connected(pos, topo.interaction_radius_um)
    assert connected_at(pos, topo.interaction_radius_um)
    xmin, xmax, ymin, ymax = topo.bounds_um()
    assert (pos[:, 0] >= xmin).all() and (pos[:, 0] <= xmax).all()
    assert (pos[:, 1] >= ymin).all() and (pos[:, 1] <= ymax).all()


def test_compact_extent():
    assert compact_extent(9, GRID16) == (3, 3)
    assert compact_extent(10, GRID16) == (4, 4)
    assert compact_extent(10, GRID16, density=0.5) == (5, 5)
    with pytest.raises(ValueError):
        compact_extent(257, GRID16)


def _cycle(n):
    return {tuple(sorted((i, (i + 1) % n))): 1 for i in range(n)}


@pytest.mark.parametrize("objective", ["squared", "squared+spread"])
def test_anneal_beats_random_search(objective):
    edges = _cycle(4)
    c = Circuit.from_ops(4, [(CZ, e, ()) for e in edges])
    cfg = AnnealConfig(objective=objective)
    placed = anneal_placement(build_graph(c), seed=3, config=cfg)
    sw = cfg.spread_weight * 1.0 if objective == "squared+spread" else 0.0
    sd = 1.0  # 2x2 lattice spacing on the unit square
    best = random_search_objective(edges, 4, 10_000, seed=11, spread_weight=sw, spread_dist=sd)
    mine = float(placement_energy(edges, np.array(placed.coords), sw, sd))
    assert mine == pytest.approx(placed.objective_value, rel=1e-9, abs=1e-12)
    assert mine <= 1.05 * best + 1e-12


def test_anneal_is_deterministic():
    c = random_circuit(6, 40, 5)
    g = build_graph(c)
    a = anneal_placement(g, 9)
    b = anneal_placement(g, 9)
    assert a.coords == b.coords
    assert all(0 <= v <= 1 for xy in a.coords for v in xy)


def test_no_edges_places_everything_centrally():
    c = Circuit.from_ops(3, [])
    p = anneal_placement(build_graph(c), 0, AnnealConfig(objective="squared"))
    assert p.coords == ((0.5, 0.5),) * 3


def test_placement_json_round_trip():
    p = ContinuousPlacement(((0.1, 0.2), (0.9, 0.4)), 1.5)
    assert ContinuousPlacement.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        ContinuousPlacement.from_json({"coords": [[1.5, 0]], "objective_value": 0})


def test_radius_recomputed_after_snapping():
    p = ContinuousPlacement(((0.0, 0.0), (0.02, 0.0), (1.0, 1.0)), 0.0)
    topo = discretize(p, select_radius(p.as_array()), GRID16)
    pos = topo.positions_um()
    assert topo.interaction_radius_um == pytest.approx(min_connecting_radius(pos))
    assert math.isclose(topo.interaction_radius_um, math.dist(pos[1], pos[2]))
