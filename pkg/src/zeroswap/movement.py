"""AOD motion: line shifts with ordering pushes, move-into-range, trap changes, homing.

Every AOD atom owns one row and one column, so moving an atom is a
sequence of line shifts. A shift along one axis pushes neighbouring lines
ahead of it so rows (columns) stay ordered with gaps of at least ``eps``;
because ``eps`` equals the minimum separation, AOD atoms can never get too
close to each other. What remains to check is each moving atom's sweep
against the static (SLM) atoms and the region bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .layout import RANGE_TOL, distance

X, Y = 0, 1
RADIUS_SHRINK = 1e-6
MAX_DESTINATIONS = 8
DESTINATION_SPREAD_UM = 3.0


class MoveFailed(RuntimeError):
    """No legal path was found (or the push budget ran out)."""


class TrapChangeFailed(RuntimeError):
    """No legal excursion for a transient AOD trap."""


# A step is (qubit, axis, old, new); a leg is a list of steps that happen together.


@dataclass(frozen=True)
class Move:
    target_qubit: int
    start: tuple
    end: tuple
    induced: tuple  # ((qubit, start, end), ...)
    depth: int
    legs: tuple = field(repr=False, compare=False, default=())

    @property
    def max_distance_um(self):
        d = distance(self.start, self.end)
        for _, s, e in self.induced:
            d = max(d, distance(s, e))
        return d


@dataclass(frozen=True)
class TrapChange:
    qubit: int
    partner: int
    slm_origin: tuple
    spot: tuple
    partner_spot: tuple  # the partner may be pushed aside during the excursion
    transient_aod: tuple  # (row_index, col_index) at insertion
    travel_um: float
    duration_us: float
    depth: int
    legs: tuple = field(repr=False, compare=False, default=())
    insert_legs: int = 0  # leading legs that open lines before the trap switch


@dataclass
class MovementResult:
    moves: list = field(default_factory=list)
    trap_changes: list = field(default_factory=list)

    @property
    def max_distance_um(self):
        return max((m.max_distance_um for m in self.moves), default=0.0)


def trap_change_duration(travel_um, params):
    """Two trap switches plus the out-and-back travel."""
    return 2 * params.trap_switch_us + 2 * params.move_time_us(travel_um)


class ArrayState:
    """Mutable atom positions plus the AOD line order."""

    def __init__(self, positions, aod_qubits, bounds, min_sep, eps, max_recursion=80,
                 corridor_um=None):
        self.pos = np.array(positions, dtype=float).reshape(-1, 2)
        # destinations are measured from home, so drifted atoms head back
        self.home_pos = self.pos.copy()
        # when set, pushed lines land on half-site corridor lines
        self.corridor_um = corridor_um
        self.aod = set(aod_qubits)
        self.bounds = bounds
        self.min_sep = float(min_sep)
        self.eps = float(eps)
        self.max_recursion = int(max_recursion)
        self.order = [sorted(self.aod, key=lambda q: (self.pos[q, X], q)),
                      sorted(self.aod, key=lambda q: (self.pos[q, Y], q))]
        self._skip = np.zeros(len(self.pos), dtype=np.uint8)
        for q in self.aod:
            self._skip[q] = 1
        # routes and trap changes are pure functions of the state, so plans are
        # memoized on the exact positions and line order
        self._tc_cache = {}
        self._route_cache = {}

    # ----------------------------------------------------------- primitives

    def _lo_hi(self, axis):
        xmin, xmax, ymin, ymax = self.bounds
        return (xmin, xmax) if axis == X else (ymin, ymax)

    def _push_to(self, c, up):
        """Coordinate a pushed line lands on when it must clear ``c``."""
        if self.corridor_um is None:
            return c
        u = self.corridor_um
        k = (c / u - 0.5)
        k = math.ceil(k - RANGE_TOL) if up else math.floor(k + RANGE_TOL)
        return (k + 0.5) * u

    def plan_shift(self, axis, q, new):
        """Steps for moving ``q``'s line to ``new``, pushing lines in the way."""
        order = self.order[axis]
        coord = self.pos[:, axis]
        i = order.index(q)
        steps = [(q, axis, float(coord[q]), float(new))]
        if new > coord[q]:
            steps += self._push_chain(axis, order[i + 1:], new, True)
        else:
            steps += self._push_chain(axis, order[:i][::-1], new, False)
        return steps

    def _push_chain(self, axis, lines, start, up):
        coord = self.pos[:, axis]
        steps = []
        prev = start
        for j in lines:
            if up and coord[j] >= prev + self.eps - RANGE_TOL:
                break
            if not up and coord[j] <= prev - self.eps + RANGE_TOL:
                break
            prev = self._push_to(prev + self.eps if up else prev - self.eps, up)
            steps.append((j, axis, float(coord[j]), float(prev)))
        return steps

    def plan_settle(self, axis, q):
        """Steps that open a gap of ``eps`` on both sides of ``q``'s line."""
        order = self.order[axis]
        i = order.index(q)
        c = float(self.pos[q, axis])
        return (self._push_chain(axis, order[i + 1:], c, True)
                + self._push_chain(axis, order[:i][::-1], c, False))

    def leg_is_legal(self, steps):
        """Bounds plus sweep clearance of every moving atom against static atoms."""
        for q, axis, old, new in steps:
            lo, hi = self._lo_hi(axis)
            if new < lo - RANGE_TOL or new > hi + RANGE_TOL:
                return False
            if axis == X:
                x0, y0, x1, y1 = old, self.pos[q, Y], new, self.pos[q, Y]
            else:
                x0, y0, x1, y1 = self.pos[q, X], old, self.pos[q, X], new
            d, _ = kernels.segment_clearance(x0, y0, x1, y1, self.pos, self._skip)
            if d < self.min_sep - RANGE_TOL:
                return False
        return True

    def apply(self, steps):
        for q, axis, _, new in steps:
            self.pos[q, axis] = new

    def revert(self, steps):
        for q, axis, old, _ in reversed(steps):
            self.pos[q, axis] = old

    def revert_legs(self, legs):
        for leg in reversed(legs):
            self.revert(leg)

    def add_to_aod(self, q, after_ties=(False, False)):
        """Insert ``q``'s lines; equal coordinates go before (or after) existing lines."""
        self.aod.add(q)
        self._skip[q] = 1
        for axis in (X, Y):
            c = self.pos[q, axis]
            order = self.order[axis]
            i = 0
            while i < len(order) and (self.pos[order[i], axis] < c or
                                      (after_ties[axis] and self.pos[order[i], axis] == c)):
                i += 1
            order.insert(i, q)

    def remove_from_aod(self, q):
        self.aod.discard(q)
        self._skip[q] = 0
        for axis in (X, Y):
            self.order[axis].remove(q)

    def line_index(self, q):
        return (self.order[Y].index(q), self.order[X].index(q))

    # -------------------------------------------------------------- routing

    def _half_line(self, c, toward, axis, unit):
        """Nearest corridor line (half a site off the lattice) from ``c`` toward ``toward``."""
        lo, hi = self._lo_hi(axis)
        below = (math.floor(c / unit - 0.5) + 0.5) * unit
        opts = sorted([below, below + unit], key=lambda v: (abs(v - c), abs(v - toward)))
        for v in opts:
            if lo - RANGE_TOL <= v <= hi + RANGE_TOL:
                return v
        return None

    def _paths(self, start, dest, unit):
        sx, sy = start
        dx, dy = dest
        paths = [[(X, dx), (Y, dy)], [(Y, dy), (X, dx)]]
        yc = self._half_line(sy, dy, Y, unit)
        xc = self._half_line(dx, sx, X, unit)
        if yc is not None and xc is not None:
            paths.append([(Y, yc), (X, xc), (Y, dy), (X, dx)])
        xc2 = self._half_line(sx, dx, X, unit)
        yc2 = self._half_line(dy, sy, Y, unit)
        if xc2 is not None and yc2 is not None:
            paths.append([(X, xc2), (Y, yc2), (X, dx), (Y, dy)])
        return paths

    def _run_path(self, mover, path):
        """Apply a path's legs; on failure undo and raise MoveFailed."""
        legs = []
        depth = 0
        for axis, target in path:
            if abs(self.pos[mover, axis] - target) <= 1e-12:
                continue
            steps = self.plan_shift(axis, mover, target)
            depth += len(steps) - 1
            if depth > self.max_recursion or not self.leg_is_legal(steps):
                self.revert_legs(legs)
                raise MoveFailed("blocked")
            self.apply(steps)
            legs.append(steps)
        return legs, depth

    def destinations(self, mover, anchor, radius, unit=None, fine=True):
        """Candidate end points inside the anchor's disk, best first.

        Corridor crossings and lattice sites come first (ordered by travel),
        then, if ``fine``, points of a 1 um grid ordered by distance to the
        nearest point of the disk.
        """
        return self._structured(mover, anchor, radius, unit) + (
            self._fine(mover, anchor, radius) if fine else [])

    def _structured(self, mover, anchor, radius, unit):
        if not unit:
            return []
        a = self.pos[anchor]
        k = int(math.ceil(radius / unit)) + 1
        base = np.round(a / unit)
        offs = np.arange(-k, k + 1, dtype=float)
        grids = []
        for shift in (0.5, 0.0):
            gx, gy = np.meshgrid(base[X] + offs + shift, base[Y] + offs + shift)
            grids.append(np.stack([gx.ravel(), gy.ravel()], axis=1) * unit)
        cand = self._admissible(np.vstack(grids), mover, anchor, a, radius)
        # lattice points are at least half a site apart, no spreading needed
        score = np.sqrt(((cand - self._ideal(mover, anchor, radius)) ** 2).sum(axis=1))
        idx = np.lexsort((cand[:, 1], cand[:, 0], score))[:MAX_DESTINATIONS]
        return [(float(cand[i, 0]), float(cand[i, 1])) for i in idx]

    def _ideal(self, mover, anchor, radius):
        """Point of the anchor's (slightly shrunk) disk closest to the mover's home."""
        a = self.pos[anchor]
        s = self.home_pos[mover] if mover in self.aod else self.pos[mover]
        rho = radius * (1.0 - RADIUS_SHRINK)
        d = distance(s, a)
        return a + (s - a) * (rho / d) if d > 0 else a.copy()

    def _fine(self, mover, anchor, radius):
        a = self.pos[anchor]
        rho = radius * (1.0 - RADIUS_SHRINK)
        ideal = self._ideal(mover, anchor, radius)
        span = int(math.floor(rho))
        offs = np.arange(-span, span + 1, dtype=float)
        gx, gy = np.meshgrid(offs, offs)
        cand = np.stack([np.round(a[X]) + gx.ravel(), np.round(a[Y]) + gy.ravel()], axis=1)
        cand = self._admissible(np.vstack([ideal[None, :], cand]), mover, anchor, a, rho)
        if not len(cand):
            return []
        score = np.sqrt(((cand - ideal) ** 2).sum(axis=1))
        picked = []
        for k in np.lexsort((cand[:, 1], cand[:, 0], score)):
            c = cand[k]
            if all(distance(c, p) >= DESTINATION_SPREAD_UM for p in picked):
                picked.append(c)
                if len(picked) >= MAX_DESTINATIONS:
                    break
        return [(float(c[0]), float(c[1])) for c in picked]

    def _admissible(self, cand, mover, anchor, a, radius):
        if not len(cand):
            return cand
        dd = cand - a
        keep = np.sqrt(dd[:, 0] ** 2 + dd[:, 1] ** 2) <= radius
        xmin, xmax, ymin, ymax = self.bounds
        keep &= (cand[:, 0] >= xmin - RANGE_TOL) & (cand[:, 0] <= xmax + RANGE_TOL)
        keep &= (cand[:, 1] >= ymin - RANGE_TOL) & (cand[:, 1] <= ymax + RANGE_TOL)
        cand = cand[keep]
        blockers = [q for q in range(len(self.pos)) if q != mover and (q not in self.aod or q == anchor)]
        if blockers and len(cand):
            bp = self.pos[blockers]
            diff = cand[:, None, :] - bp[None, :, :]
            dist = np.sqrt((diff ** 2).sum(axis=2)).min(axis=1)
            cand = cand[dist >= self.min_sep - RANGE_TOL]
        return cand

    def _state_key(self):
        return (self.pos.tobytes(), tuple(self.order[X]), tuple(self.order[Y]), self.corridor_um)

    def route_into_range(self, mover, anchor, radius, unit):
        """Move ``mover`` within ``radius`` of ``anchor``; returns (legs, depth)."""
        if mover not in self.aod:
            raise MoveFailed(f"qubit {mover} is not AOD-trapped")
        key = (mover, anchor, radius, unit) + self._state_key()
        hit = self._route_cache.get(key)
        if hit is None:
            try:
                hit = self._route_cache[key] = self._route(mover, anchor, radius, unit)
            except MoveFailed as exc:
                self._route_cache[key] = exc
                raise
            return list(hit[0]), hit[1]
        if isinstance(hit, MoveFailed):
            raise MoveFailed(str(hit))
        legs, depth = hit
        for leg in legs:
            self.apply(leg)
        return list(legs), depth

    def _route(self, mover, anchor, radius, unit):
        start = tuple(self.pos[mover])
        snap = self.corridor_um
        # lattice destinations with corridor-snapped pushes first, then tight
        # pushes of exactly eps, then the fine destination grid
        attempts = [(self._structured(mover, anchor, radius, unit), snap)]
        if snap is not None:
            attempts.append((attempts[0][0], None))
        attempts.append((None, None))
        for dests, corridor in attempts:
            if dests is None:
                dests = self._fine(mover, anchor, radius)
            self.corridor_um = corridor
            try:
                for dest in dests:
                    for path in self._paths(start, dest, unit):
                        try:
                            legs, depth = self._run_path(mover, path)
                        except MoveFailed:
                            continue
                        if distance(self.pos[mover], self.pos[anchor]) <= radius + RANGE_TOL:
                            return legs, depth
                        self.revert_legs(legs)
            finally:
                self.corridor_um = snap
        raise MoveFailed(f"no legal path brings qubit {mover} within range of qubit {anchor}")

    # ---------------------------------------------------------- operations

    def move_into_range(self, mover, anchor, radius, unit):
        """Move record for bringing ``mover`` into range, or None if already there."""
        if distance(self.pos[mover], self.pos[anchor]) <= radius + RANGE_TOL:
            return None
        before = self.pos.copy()
        legs, depth = self.route_into_range(mover, anchor, radius, unit)
        induced = tuple((q, tuple(float(v) for v in before[q]), tuple(float(v) for v in self.pos[q]))
                        for q in _touched(legs) if q != mover)
        return Move(mover, tuple(float(v) for v in before[mover]),
                    tuple(float(v) for v in self.pos[mover]), induced, depth, tuple(legs))

    def trap_change(self, qubit, partner, radius, unit, params):
        """Out-and-back excursion of a static atom in a spare AOD row/column.

        The state is left exactly as it was found.
        """
        if qubit in self.aod:
            raise TrapChangeFailed(f"qubit {qubit} is already AOD-trapped")
        key = (qubit, partner, radius, unit, params) + self._state_key()
        hit = self._tc_cache.get(key)
        if hit is None:
            hit = self._tc_cache[key] = self._plan_trap_change(qubit, partner, radius, unit, params)
        if isinstance(hit, TrapChangeFailed):
            raise TrapChangeFailed(str(hit))
        return hit

    def _plan_trap_change(self, qubit, partner, radius, unit, params):
        """TrapChange for the current state, or the TrapChangeFailed explaining why not."""
        ties = [any(self.pos[j, axis] == self.pos[qubit, axis] for j in self.aod) for axis in (X, Y)]
        variants = [(tx, ty) for tx in (False, True)[:1 + ties[X]] for ty in (False, True)[:1 + ties[Y]]]
        error = None
        for after_ties in variants:
            try:
                return self._trap_change(qubit, partner, radius, unit, params, after_ties)
            except TrapChangeFailed as exc:
                error = exc
        return error

    def _trap_change(self, qubit, partner, radius, unit, params, after_ties):
        origin = tuple(float(v) for v in self.pos[qubit])
        before = self.pos.copy()
        self.add_to_aod(qubit, after_ties)
        transient = self.line_index(qubit)
        try:
            legs = []
            depth = 0
            for axis in (X, Y):
                steps = self.plan_settle(axis, qubit)
                if not steps:
                    continue
                depth += len(steps)
                if depth > self.max_recursion or not self.leg_is_legal(steps):
                    self.revert_legs(legs)
                    raise TrapChangeFailed(f"cannot open AOD lines at qubit {qubit}")
                self.apply(steps)
                legs.append(steps)
            n_insert = len(legs)
            try:
                out, out_depth = self.route_into_range(qubit, partner, radius, unit)
            except MoveFailed as exc:
                self.revert_legs(legs)
                raise TrapChangeFailed(str(exc)) from None
            legs += out
            depth += out_depth
            if depth > self.max_recursion:
                self.revert_legs(legs)
                raise TrapChangeFailed("push budget exhausted")
            spot = tuple(float(v) for v in self.pos[qubit])
            partner_spot = tuple(float(v) for v in self.pos[partner])
            travel = _max_net_displacement(before, self.pos, _touched(legs))
            self.revert_legs(legs)
        finally:
            self.remove_from_aod(qubit)
        return TrapChange(qubit, partner, origin, spot, partner_spot, transient, travel,
                          trap_change_duration(travel, params), depth, tuple(legs), n_insert)


def _touched(legs):
    return sorted({q for leg in legs for q, _, _, _ in leg})


def _max_net_displacement(before, after, qubits):
    return max((distance(before[q], after[q]) for q in qubits), default=0.0)


def home(state, moves):
    """Undo the given moves (newest first), restoring pre-layer positions exactly."""
    for m in reversed(moves):
        state.revert_legs(m.legs)
