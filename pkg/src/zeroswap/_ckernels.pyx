# cython: language_level=3
"""Compiled twins of ``zeroswap._kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, sqrt, INFINITY

cnp.import_array()


def anneal_objective(const double[::1] x, const long[::1] ei, const long[::1] ej,
                     const double[::1] w, double spread_weight, double spread_dist,
                     grad):
    cdef Py_ssize_t n = x.shape[0] // 2
    cdef Py_ssize_t m = ei.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double dx, dy, d, short, coef, value = 0.0
    cdef double[::1] g
    cdef bint want_grad = grad is not None
    if want_grad:
        g = grad
        for k in range(2 * n):
            g[k] = 0.0
    for k in range(m):
        i = ei[k]
        j = ej[k]
        dx = x[2 * i] - x[2 * j]
        dy = x[2 * i + 1] - x[2 * j + 1]
        value += w[k] * (dx * dx + dy * dy)
        if want_grad:
            g[2 * i] += 2.0 * w[k] * dx
            g[2 * i + 1] += 2.0 * w[k] * dy
            g[2 * j] -= 2.0 * w[k] * dx
            g[2 * j + 1] -= 2.0 * w[k] * dy
    if spread_weight > 0.0:
        for i in range(n):
            for j in range(i + 1, n):
                dx = x[2 * i] - x[2 * j]
                dy = x[2 * i + 1] - x[2 * j + 1]
                d = sqrt(dx * dx + dy * dy)
                short = spread_dist - d
                if short > 0.0:
                    value += spread_weight * short * short
                    if want_grad:
                        if d < 1e-12:
                            d = 1e-12
                        coef = -2.0 * spread_weight * short / d
                        g[2 * i] += coef * dx
                        g[2 * i + 1] += coef * dy
                        g[2 * j] -= coef * dx
                        g[2 * j + 1] -= coef * dy
    return value


def max_mst_edge(const double[:, ::1] points):
    cdef Py_ssize_t n = points.shape[0]
    if n < 2:
        return 0.0
    cdef double[::1] best = np.full(n, INFINITY)
    cdef unsigned char[::1] in_tree = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t it, v, u
    cdef double cand, dx, dy, d, longest = 0.0
    best[0] = 0.0
    for it in range(n):
        u = -1
        cand = INFINITY
        for v in range(n):
            if not in_tree[v] and best[v] < cand:
                cand = best[v]
                u = v
        if u < 0:
            break
        in_tree[u] = 1
        if cand > longest:
            longest = cand
        for v in range(n):
            if not in_tree[v]:
                dx = points[v, 0] - points[u, 0]
                dy = points[v, 1] - points[u, 1]
                d = sqrt(dx * dx + dy * dy)
                if d < best[v]:
                    best[v] = d
    return longest


def segment_clearance(double x0, double y0, double x1, double y1,
                      const double[:, ::1] points, const unsigned char[::1] skip):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t k, arg = -1
    cdef double dx = x1 - x0, dy = y1 - y0
    cdef double seg2 = dx * dx + dy * dy
    cdef double px, py, t, ex, ey, d, best = INFINITY
    for k in range(n):
        if skip[k]:
            continue
        px = points[k, 0] - x0
        py = points[k, 1] - y0
        t = 0.0
        if seg2 > 0.0:
            t = (px * dx + py * dy) / seg2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        ex = px - t * dx
        ey = py - t * dy
        d = sqrt(ex * ex + ey * ey)
        if d < best:
            best = d
            arg = k
    return best, arg


def blockade_hit(double ax, double ay, double bx, double by,
                 const double[:, ::1] kept, double radius):
    cdef Py_ssize_t k
    for k in range(kept.shape[0]):
        if hypot(kept[k, 0] - ax, kept[k, 1] - ay) <= radius:
            return True
        if hypot(kept[k, 0] - bx, kept[k, 1] - by) <= radius:
            return True
    return False


def nearest_free_site(double px, double py, const unsigned char[::1] occupied,
                      Py_ssize_t sites_x, Py_ssize_t sites_y):
    cdef Py_ssize_t k, arg = -1
    cdef double dx, dy, d2, best = INFINITY
    for k in range(sites_x * sites_y):
        if occupied[k]:
            continue
        dx = (k % sites_x) - px
        dy = (k // sites_x) - py
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
            arg = k
    return arg
