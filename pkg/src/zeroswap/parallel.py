"""Tiling circuit copies across the array and shot-level execution time."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layout import RANGE_TOL
from .validate import iter_checkpoints

X, Y = 0, 1


@dataclass(frozen=True)
class ParallelPlan:
    copies: int
    tiling: tuple  # (copies_x, copies_y)
    footprint: tuple  # (w, h) sites per tile, margin included
    margin: int
    atoms_per_aod_row: int
    atoms_per_aod_col: int
    shots: int
    physical_shots: int
    circuit_runtime_us: float
    inter_shot_overhead_us: float
    total_execution_time_us: float

    @property
    def serial_time_us(self):
        return self.shots * (self.circuit_runtime_us + self.inter_shot_overhead_us)

    @property
    def reduction_vs_serial(self):
        s = self.serial_time_us
        return 1.0 - self.total_execution_time_us / s if s > 0 else 0.0

    def as_dict(self):
        return {
            "copies": self.copies,
            "tiling": list(self.tiling),
            "footprint": list(self.footprint),
            "margin": self.margin,
            "atoms_per_aod_row": self.atoms_per_aod_row,
            "atoms_per_aod_col": self.atoms_per_aod_col,
            "shots": self.shots,
            "physical_shots": self.physical_shots,
            "total_execution_time_us": self.total_execution_time_us,
            "serial_time_us": self.serial_time_us,
        }


@dataclass(frozen=True)
class TandemCheck:
    ok: bool
    layer: int = -1
    reason: str = ""

    def __bool__(self):
        return self.ok


def tile(footprint, grid_sites, shots, runtime_us, overhead_us=0.0, margin=0):
    """Plan arithmetic for a footprint of ``(w, h)`` sites (margin already included)."""
    w, h = footprint
    sx, sy = grid_sites
    cx = sx // w if w > 0 else 0
    cy = sy // h if h > 0 else 0
    copies = cx * cy
    physical = math.ceil(shots / copies) if copies else 0
    total = physical * (runtime_us + overhead_us)
    return ParallelPlan(copies, (cx, cy), (w, h), margin, cx, cy, shots, physical,
                        runtime_us, overhead_us, total)


def _checkpoints(schedule, static_positions):
    if hasattr(schedule, "layers") and schedule.layers and \
            getattr(schedule.layers[0], "start_positions", None) is not None:
        return list(iter_checkpoints(schedule))
    return [(0, "static", np.asarray(static_positions, dtype=float), frozenset())]


def occupied_span(checkpoints):
    """Bounding box (xmin, xmax, ymin, ymax) of every position ever visited."""
    allpts = np.vstack([c[2] for c in checkpoints])
    return (float(allpts[:, 0].min()), float(allpts[:, 0].max()),
            float(allpts[:, 1].min()), float(allpts[:, 1].max()))


def span_sites(lo, hi, unit):
    return int(math.floor((hi - lo) / unit + RANGE_TOL)) + 1


def validate_tandem(plan, schedule, unit_um, min_sep_um, eps_um, static_positions=None):
    """Replay copy 0 against its neighbours; False (with the layer) on any clash."""
    if plan.copies <= 1:
        return TandemCheck(True)
    return _check_tandem(plan, _checkpoints(schedule, static_positions), unit_um, min_sep_um, eps_um)


def _first(mask):
    hits = np.flatnonzero(mask)
    return int(hits[0]) if len(hits) else None


def _check_tandem(plan, cps, unit_um, min_sep_um, eps_um):
    cx, cy = plan.tiling
    dx = plan.footprint[0] * unit_um
    dy = plan.footprint[1] * unit_um
    offsets = []
    if cx > 1:
        offsets.append((dx, 0.0))
    if cy > 1:
        offsets.append((0.0, dy))
        if cx > 1:
            offsets += [(dx, dy), (dx, -dy)]
    pts = np.stack([c[2] for c in cps])  # (checkpoint, atom, xy)
    # earliest failing checkpoint per check; distance clashes win ties
    fails = []
    for ox, oy in offsets:
        for lo in range(0, len(pts), 256):
            chunk = pts[lo:lo + 256]
            diff = chunk[:, :, None, :] - (chunk[:, None, :, :] + np.array([ox, oy]))
            d = np.sqrt((diff ** 2).sum(axis=3)).reshape(len(chunk), -1).min(axis=1)
            k = _first(d < min_sep_um - RANGE_TOL)
            if k is not None:
                fails.append((lo + k, 0, f"copies {d[k]:.6g} um apart ({cps[lo + k][1]})"))
                break
    # runs of checkpoints sharing a layer and an AOD set
    runs = []
    for i, (li, _, _, aod) in enumerate(cps):
        if runs and runs[-1][0] == li and runs[-1][1] == aod:
            runs[-1][2].append(i)
        else:
            runs.append((li, aod, [i]))
    for li, aod, idx in runs:
        members = sorted(aod)
        if not members:
            continue
        for axis, shift, active in ((Y, dy, cy > 1), (X, dx, cx > 1)):
            if not active:
                continue
            mine = pts[idx][:, members, axis]
            theirs = mine + shift
            both = np.sort(np.concatenate([mine, theirs], axis=1), axis=1)
            k = _first((np.diff(both, axis=1) < eps_um - RANGE_TOL).any(axis=1))
            if k is not None:
                fails.append((idx[k], 1, f"shared AOD lines closer than {eps_um} um ({cps[idx[k]][1]})"))
            if len(idx) < 2:
                continue
            signs = np.sign(theirs[:, None, :] - mine[:, :, None])
            k = _first((signs[1:] != signs[:-1]).reshape(len(idx) - 1, -1).any(axis=1))
            if k is not None:
                fails.append((idx[k + 1], 2, f"AOD lines of neighbouring copies crossed ({cps[idx[k + 1]][1]})"))
    if not fails:
        return TandemCheck(True)
    i, _, reason = min(fails)
    return TandemCheck(False, cps[i][0], reason)


def plan_parallel(schedule, topo, grid, shots, overhead_us, ctx, margin=None, max_margin=None):
    """Largest tiling whose copies replay the schedule in tandem without clashes.

    With ``margin=None`` the smallest margin (in sites) that passes
    :func:`validate_tandem` is used.
    """
    static = topo.positions_um()
    cps = _checkpoints(schedule, ctx.positions if ctx is not None else static)
    xmin, xmax, ymin, ymax = occupied_span(cps)
    w = span_sites(xmin, xmax, topo.unit_um)
    h = span_sites(ymin, ymax, topo.unit_um)
    runtime = schedule.total_runtime_us
    margins = [margin] if margin is not None else range(0, (max_margin or max(grid.sites_x, grid.sites_y)) + 1)
    plan = None
    for m in margins:
        plan = tile((w + m, h + m), (grid.sites_x, grid.sites_y), shots, runtime, overhead_us, m)
        if plan.copies <= 1:
            break
        if _check_tandem(plan, cps, topo.unit_um, grid.min_sep_um, grid.min_sep_um):
            break
    return plan
