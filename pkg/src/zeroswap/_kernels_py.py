"""Pure-Python/numpy implementations of the geometric hot loops.

Every function here has a twin in ``_ckernels.pyx`` with the same
signature and semantics; ``zeroswap.kernels`` picks one at import time.
"""
import math

import numpy as np


def anneal_objective(x, ei, ej, w, spread_weight, spread_dist, grad):
    """Weighted squared-distance energy plus a short-range spreading penalty.

    ``x`` is the flat coordinate vector ``[x0, y0, x1, y1, ...]``. When
    ``grad`` is not None it is overwritten with the gradient.
    """
    n = x.shape[0] // 2
    pts = x.reshape(n, 2)
    d = pts[ei] - pts[ej]
    value = float(np.dot(w, (d * d).sum(axis=1)))
    if grad is not None:
        g = np.zeros((n, 2))
        contrib = 2.0 * w[:, None] * d
        np.add.at(g, ei, contrib)
        np.subtract.at(g, ej, contrib)
    if spread_weight > 0.0 and n > 1:
        iu, ju = np.triu_indices(n, 1)
        diff = pts[iu] - pts[ju]
        dist = np.sqrt((diff * diff).sum(axis=1))
        short = spread_dist - dist
        mask = short > 0.0
        value += spread_weight * float(np.dot(short[mask], short[mask]))
        if grad is not None and mask.any():
            safe = np.where(dist[mask] > 1e-12, dist[mask], 1e-12)
            coef = (-2.0 * spread_weight * short[mask] / safe)[:, None] * diff[mask]
            np.add.at(g, iu[mask], coef)
            np.subtract.at(g, ju[mask], coef)
    if grad is not None:
        grad[:] = g.ravel()
    return value


def max_mst_edge(points):
    """Longest edge of a Euclidean minimum spanning tree (Prim, O(n^2))."""
    n = points.shape[0]
    if n < 2:
        return 0.0
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[0] = 0.0
    longest = 0.0
    for _ in range(n):
        cand = np.where(in_tree, np.inf, best)
        u = int(np.argmin(cand))
        in_tree[u] = True
        longest = max(longest, float(best[u]))
        dx = points[:, 0] - points[u, 0]
        dy = points[:, 1] - points[u, 1]
        d = np.sqrt(dx * dx + dy * dy)
        np.minimum(best, d, out=best)
    return longest


def segment_clearance(x0, y0, x1, y1, points, skip):
    """Smallest distance from segment (x0,y0)-(x1,y1) to any non-skipped point.

    Returns ``(distance, index)``; ``(inf, -1)`` when nothing is checked.
    """
    dx, dy = x1 - x0, y1 - y0
    seg2 = dx * dx + dy * dy
    px = points[:, 0] - x0
    py = points[:, 1] - y0
    if seg2 > 0.0:
        t = np.clip((px * dx + py * dy) / seg2, 0.0, 1.0)
    else:
        t = np.zeros(points.shape[0])
    ex = px - t * dx
    ey = py - t * dy
    dist = np.sqrt(ex * ex + ey * ey)
    dist = np.where(skip.astype(bool), np.inf, dist)
    if dist.size == 0:
        return math.inf, -1
    k = int(np.argmin(dist))
    if not math.isfinite(dist[k]):
        return math.inf, -1
    return float(dist[k]), k


def blockade_hit(ax, ay, bx, by, kept, radius):
    """True when either atom of a pair lies within ``radius`` of any kept atom."""
    if kept.shape[0] == 0:
        return False
    da = np.hypot(kept[:, 0] - ax, kept[:, 1] - ay)
    db = np.hypot(kept[:, 0] - bx, kept[:, 1] - by)
    return bool((da <= radius).any() or (db <= radius).any())


def nearest_free_site(px, py, occupied, sites_x, sites_y):
    """Index of the free site nearest to (px, py) in site units; -1 if full.

    Sites are indexed ``row * sites_x + col``; equal distances resolve to
    the lower index.
    """
    idx = np.arange(sites_x * sites_y)
    cols = idx % sites_x
    rows = idx // sites_x
    d2 = (cols - px) ** 2 + (rows - py) ** 2
    d2 = np.where(occupied.astype(bool), np.inf, d2)
    k = int(np.argmin(d2))
    if not math.isfinite(d2[k]):
        return -1
    return k
