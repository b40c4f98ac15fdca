"""Interaction graph, annealed placement, radius selection and grid snapping."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import dual_annealing

from . import kernels
from .config import AnnealConfig, GridSpec
from .qasm import CZ

RANGE_TOL = 1e-9
BLOCKADE_FACTOR = 2.5


def distance(p, q):
    dx = float(p[0]) - float(q[0])
    dy = float(p[1]) - float(q[1])
    return math.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class InteractionGraph:
    num_qubits: int
    edges: dict  # (i, j) with i < j -> CZ count

    @property
    def total_weight(self):
        return sum(self.edges.values())

    def node_weights(self):
        w = [0] * self.num_qubits
        for (i, j), c in self.edges.items():
            w[i] += c
            w[j] += c
        return w


def build_graph(circuit):
    edges = {}
    for g in circuit.gates:
        if g.kind == CZ:
            key = tuple(sorted(g.qubits))
            edges[key] = edges.get(key, 0) + 1
    return InteractionGraph(circuit.num_qubits, dict(sorted(edges.items())))


@dataclass(frozen=True)
class ContinuousPlacement:
    coords: tuple  # ((x, y), ...) in the unit square
    objective_value: float
    history: tuple = field(default=(), compare=False)

    def as_array(self):
        return np.array(self.coords, dtype=float).reshape(-1, 2)

    def to_json(self):
        return {"coords": [list(c) for c in self.coords], "objective_value": self.objective_value}

    @classmethod
    def from_json(cls, data):
        coords = tuple((float(x), float(y)) for x, y in data["coords"])
        for x, y in coords:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError("placement coordinates must lie in [0, 1]")
        return cls(coords, float(data["objective_value"]))


def spread_distance(n):
    """Spacing of a ceil(sqrt(n)) x ceil(sqrt(n)) lattice on the unit square."""
    k = math.ceil(math.sqrt(n))
    return 1.0 / (k - 1) if k > 1 else 0.0


def _objective_terms(graph, config):
    if graph.edges:
        ei = np.array([i for i, _ in graph.edges], dtype=np.int_)
        ej = np.array([j for _, j in graph.edges], dtype=np.int_)
        w = np.array(list(graph.edges.values()), dtype=float)
    else:
        ei = ej = np.zeros(0, dtype=np.int_)
        w = np.zeros(0)
    spread_w = 0.0
    if config.objective == "squared+spread" and graph.num_qubits > 1:
        spread_w = config.spread_weight * (float(w.max()) if w.size else 1.0)
    return ei, ej, w, spread_w, spread_distance(graph.num_qubits)


def placement_objective(graph, coords, config=AnnealConfig()):
    """Objective value of ``coords`` (array-like of shape (n, 2))."""
    ei, ej, w, sw, sd = _objective_terms(graph, config)
    x = np.ascontiguousarray(np.asarray(coords, dtype=float).ravel())
    return kernels.anneal_objective(x, ei, ej, w, sw, sd, None)


def anneal_placement(graph, seed, config=AnnealConfig()):
    """Dual-annealing placement on [0,1]^2; deterministic for a fixed seed."""
    n = graph.num_qubits
    if n < 1:
        raise ValueError("graph has no nodes")
    ei, ej, w, sw, sd = _objective_terms(graph, config)
    if not graph.edges and sw == 0.0:
        coords = tuple((0.5, 0.5) for _ in range(n))
        return ContinuousPlacement(coords, 0.0, (0.0,))

    def fun(x):
        return kernels.anneal_objective(x, ei, ej, w, sw, sd, None)

    def jac(x):
        g = np.empty_like(x)
        kernels.anneal_objective(x, ei, ej, w, sw, sd, g)
        return g

    rng = np.random.default_rng(seed)
    x0 = rng.random(2 * n)
    history = []

    def callback(x, f, context):
        history.append(float(f))
        return False

    res = dual_annealing(
        fun, bounds=[(0.0, 1.0)] * (2 * n), seed=seed, x0=x0,
        maxiter=config.maxiter, initial_temp=config.initial_temp,
        visit=config.visit, accept=config.accept, maxfun=config.maxfun,
        minimizer_kwargs={"method": "L-BFGS-B", "jac": jac},
        callback=callback,
    )
    x = np.clip(np.ascontiguousarray(res.x, dtype=float), 0.0, 1.0)
    value = fun(x)
    coords = tuple((float(x[2 * i]), float(x[2 * i + 1])) for i in range(n))
    return ContinuousPlacement(coords, value, tuple(history))


def select_radius(points):
    """Smallest radius whose unit-disk graph over ``points`` is connected."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=float).reshape(-1, 2))
    return kernels.max_mst_edge(pts)


@dataclass(frozen=True)
class DiscreteTopology:
    sites: tuple  # per qubit (col, row)
    unit_um: float
    interaction_radius_um: float
    extent: tuple  # (sites_x, sites_y) spanned by the snapped placement
    margin: int = 0  # empty sites kept free around the placement for AOD travel

    @property
    def num_qubits(self):
        return len(self.sites)

    @property
    def blockade_radius_um(self):
        return BLOCKADE_FACTOR * self.interaction_radius_um

    @property
    def region(self):
        """Sites (w, h) reserved for the circuit, travel margin included."""
        return (self.extent[0] + 2 * self.margin, self.extent[1] + 2 * self.margin)

    def positions_um(self):
        m = self.margin
        return np.array([((c + m) * self.unit_um, (r + m) * self.unit_um) for c, r in self.sites],
                        dtype=float).reshape(-1, 2)

    def bounds_um(self):
        """Axis-aligned box (xmin, xmax, ymin, ymax) that atoms must stay in."""
        w, h = self.region
        return (0.0, (w - 1) * self.unit_um, 0.0, (h - 1) * self.unit_um)

    def in_range(self, p, q):
        return distance(p, q) <= self.interaction_radius_um + RANGE_TOL


def compact_extent(n, grid, density=1.0):
    """Smallest square region holding ``n`` qubits at the given site density."""
    k = max(1, math.ceil(math.sqrt(n / density)))
    if k > grid.sites_x or k > grid.sites_y:
        if n > grid.n_sites:
            raise ValueError(f"{n} qubits do not fit a {grid.sites_x}x{grid.sites_y} grid")
        # fall back to the full grid when the square does not fit
        return grid.sites_x, grid.sites_y
    return k, k


def discretize(placement, radius, grid, extent=None, node_weights=None, margin=0):
    """Snap unit-square coordinates onto grid sites.

    Heavier qubits (by total CZ weight) claim sites first; each qubit takes
    the nearest free site, ties to the lower site index. The interaction
    radius is recomputed on the snapped positions. ``radius`` is the
    continuous-space radius and is only checked for sanity. Site indices
    are relative to the placement extent; ``margin`` empty sites surround it.
    """
    coords = placement.as_array()
    n = coords.shape[0]
    sx, sy = extent if extent is not None else (grid.sites_x, grid.sites_y)
    if n > sx * sy:
        raise ValueError(f"{n} qubits do not fit {sx}x{sy} sites")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    weights = node_weights if node_weights is not None else [0] * n
    order = sorted(range(n), key=lambda q: (-weights[q], q))
    occupied = np.zeros(sx * sy, dtype=np.uint8)
    sites = [None] * n
    for q in order:
        px = coords[q, 0] * (sx - 1)
        py = coords[q, 1] * (sy - 1)
        k = kernels.nearest_free_site(float(px), float(py), occupied, sx, sy)
        occupied[k] = 1
        sites[q] = (k % sx, k // sx)
    if sx + 2 * margin > grid.sites_x or sy + 2 * margin > grid.sites_y:
        margin = 0
    pos = np.array([(c * grid.unit_um, r * grid.unit_um) for c, r in sites], dtype=float)
    r_um = select_radius(pos)
    return DiscreteTopology(tuple(sites), grid.unit_um, r_um, (sx, sy), margin)


def unit_disk_connected(points, radius):
    """Brute-force connectivity check of the unit-disk graph."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = pts.shape[0]
    if n <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        d = np.hypot(pts[:, 0] - pts[u, 0], pts[:, 1] - pts[u, 1])
        for v in np.nonzero(d <= radius + RANGE_TOL)[0]:
            if int(v) not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == n
