"""AOD membership: qubit scoring, top-k selection and row/column placement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import RANGE_TOL, distance
from .qasm import CZ, dependency_layers

OUT_OF_RANGE_WEIGHT = 0.99
INTERFERENCE_WEIGHT = 0.01


class AODPlacementError(RuntimeError):
    """Row/column deduplication ran past the usable region."""


@dataclass(frozen=True)
class QubitWeight:
    qubit: int
    out_of_range_count: int
    interference_count: int
    score: float


@dataclass(frozen=True)
class AODGrid:
    row_coords: tuple
    col_coords: tuple
    occupancy: dict  # qubit -> (row_index, col_index)

    @property
    def qubits(self):
        return frozenset(self.occupancy)

    def position(self, q):
        r, c = self.occupancy[q]
        return (self.col_coords[c], self.row_coords[r])


def out_of_range_counts(circuit, positions, radius):
    counts = [0] * circuit.num_qubits
    for g in circuit.gates:
        if g.kind != CZ:
            continue
        a, b = g.qubits
        if distance(positions[a], positions[b]) > radius + RANGE_TOL:
            counts[a] += 1
            counts[b] += 1
    return counts


def interference_counts(circuit, positions, blockade_radius):
    """Per qubit, CZ gates that sit within blockade range of another CZ in the same nominal layer."""
    counts = [0] * circuit.num_qubits
    for layer in dependency_layers(circuit):
        czs = [circuit.gates[i] for i in layer if circuit.gates[i].kind == CZ]
        for g in czs:
            for q in g.qubits:
                for other in czs:
                    if other is g:
                        continue
                    if any(distance(positions[q], positions[p]) <= blockade_radius
                           for p in other.qubits):
                        counts[q] += 1
                        break
    return counts


def _normalize(counts):
    top = max(counts, default=0)
    return [c / top if top else 0.0 for c in counts]


def score_qubits(circuit, topo):
    pos = topo.positions_um()
    oor = out_of_range_counts(circuit, pos, topo.interaction_radius_um)
    intf = interference_counts(circuit, pos, topo.blockade_radius_um)
    n_oor, n_intf = _normalize(oor), _normalize(intf)
    return [QubitWeight(q, oor[q], intf[q],
                        OUT_OF_RANGE_WEIGHT * n_oor[q] + INTERFERENCE_WEIGHT * n_intf[q])
            for q in range(circuit.num_qubits)]


def select_aod_atoms(weights, aod_count):
    """Up to ``aod_count`` highest positive scores; ties go to the lower qubit."""
    if aod_count < 0:
        raise ValueError("aod_count must be non-negative")
    ranked = sorted((w for w in weights if w.score > 0), key=lambda w: (-w.score, w.qubit))
    return frozenset(w.qubit for w in ranked[:aod_count])


def _dedup(coords, eps):
    """Raise each coordinate to at least its predecessor plus ``eps``."""
    out = []
    for c in coords:
        if out and c < out[-1] + eps:
            c = out[-1] + eps
        out.append(c)
    return out


def place_in_aod(selected, topo, eps, min_sep, bounds=None):
    """Give every selected atom its own AOD row and column.

    Rows (columns) that coincide are shifted up (right) by ``eps`` until
    they are strictly ordered with gaps of at least ``eps``; rows are then
    bumped further up while their atom sits closer than ``min_sep`` to a
    static atom.
    """
    pos = topo.positions_um()
    xmin, xmax, ymin, ymax = bounds if bounds is not None else topo.bounds_um()
    sel = sorted(selected)
    if not sel:
        return AODGrid((), (), {})

    by_x = sorted(sel, key=lambda q: (pos[q, 0], q))
    xs = _dedup([float(pos[q, 0]) for q in by_x], eps)
    new_x = dict(zip(by_x, xs))

    static = [q for q in range(len(pos)) if q not in selected]
    static_pts = pos[static] if static else np.zeros((0, 2))
    by_y = sorted(sel, key=lambda q: (pos[q, 1], q))
    new_y = {}
    prev = None
    for q in by_y:
        y = float(pos[q, 1])
        if prev is not None and y < prev + eps:
            y = prev + eps
        while _too_close(new_x[q], y, static_pts, min_sep):
            y += eps
            if y > ymax + RANGE_TOL:
                break
        if y > ymax + RANGE_TOL:
            raise AODPlacementError(f"row for qubit {q} pushed past y={ymax} um")
        new_y[q] = y
        prev = y
    if xs[-1] > xmax + RANGE_TOL:
        raise AODPlacementError(f"column for qubit {by_x[-1]} pushed past x={xmax} um")

    col_index = {q: i for i, q in enumerate(by_x)}
    row_index = {q: i for i, q in enumerate(by_y)}
    return AODGrid(tuple(new_y[q] for q in by_y), tuple(xs),
                   {q: (row_index[q], col_index[q]) for q in sel})


def _too_close(x, y, pts, min_sep):
    if pts.shape[0] == 0:
        return False
    d = np.sqrt((pts[:, 0] - x) ** 2 + (pts[:, 1] - y) ** 2)
    return bool((d < min_sep - RANGE_TOL).any())


def trap_change_demand(circuit, positions, radius, aod_qubits):
    """Out-of-range CZ gates with no AOD operand (each needs a trap change)."""
    return sum(1 for g in circuit.gates
               if g.kind == CZ
               and not (set(g.qubits) & set(aod_qubits))
               and distance(positions[g.qubits[0]], positions[g.qubits[1]]) > radius + RANGE_TOL)


def _corridor_lines(coords, unit, lo, hi):
    """Ordered, distinct half-site lines nearest to the sorted ``coords``."""
    out = []
    for c in coords:
        h = (np.floor(c / unit - 0.5 + RANGE_TOL) + 0.5) * unit
        if c - h > unit / 2 + RANGE_TOL:
            h += unit
        if out and h < out[-1] + unit - RANGE_TOL:
            h = out[-1] + unit
        if h < lo - RANGE_TOL:
            h = (np.ceil(lo / unit - 0.5 - RANGE_TOL) + 0.5) * unit
        out.append(float(h))
    if out and out[-1] > hi + RANGE_TOL:
        raise AODPlacementError(f"AOD line pushed past {hi} um")
    return out


def park_on_corridors(selected, topo, bounds=None):
    """Give every selected atom a row and column on the half-site corridor lines.

    Each AOD atom then sits in the middle of a lattice cell, at least half a
    site from every static atom along both axes, so any later line shift that
    keeps the other axis on corridors sweeps past static atoms safely.
    """
    pos = topo.positions_um()
    unit = topo.unit_um
    xmin, xmax, ymin, ymax = bounds if bounds is not None else topo.bounds_um()
    sel = sorted(selected)
    if not sel:
        return AODGrid((), (), {})
    by_x = sorted(sel, key=lambda q: (pos[q, 0], q))
    by_y = sorted(sel, key=lambda q: (pos[q, 1], q))
    xs = _corridor_lines([float(pos[q, 0]) for q in by_x], unit, xmin, xmax)
    ys = _corridor_lines([float(pos[q, 1]) for q in by_y], unit, ymin, ymax)
    col_index = {q: i for i, q in enumerate(by_x)}
    row_index = {q: i for i, q in enumerate(by_y)}
    return AODGrid(tuple(ys), tuple(xs), {q: (row_index[q], col_index[q]) for q in sel})


def cz_partners(circuit):
    partners = {q: set() for q in range(circuit.num_qubits)}
    for g in circuit.gates:
        if g.kind == CZ:
            a, b = g.qubits
            partners[a].add(b)
            partners[b].add(a)
    return partners


def unreachable_aod_pair(grid, partners, radius, eps=None):
    """First AOD pair sharing a CZ that line ordering may keep out of range.

    Rows and columns never cross, so every AOD line lying between two AOD
    atoms adds at least one line gap to their separation. A pair that starts
    out of range is only accepted when, with every line between them packed
    at the minimum gap ``eps``, they would still fit inside ``radius``.
    With ``eps`` None every out-of-range pair counts.
    """
    cols = sorted(grid.occupancy, key=lambda q: grid.occupancy[q][1])
    rows = sorted(grid.occupancy, key=lambda q: grid.occupancy[q][0])
    col_rank = {q: i for i, q in enumerate(cols)}
    row_rank = {q: i for i, q in enumerate(rows)}
    for a in sorted(grid.occupancy):
        for b in sorted(partners[a] & set(grid.occupancy)):
            if a >= b or distance(grid.position(a), grid.position(b)) <= radius + RANGE_TOL:
                continue
            if eps is None:
                return (a, b)
            dx = abs(col_rank[a] - col_rank[b]) * eps
            dy = abs(row_rank[a] - row_rank[b]) * eps
            if math.hypot(dx, dy) > radius + RANGE_TOL:
                return (a, b)
    return None
