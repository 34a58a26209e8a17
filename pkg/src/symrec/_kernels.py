"""Hot numeric inner loops with optional numba acceleration.

Each kernel is written once as a plain-Python/numpy function and JIT
compiled when numba is available.  Setting ``SYMREC_NO_NUMBA=1`` (or
numba's own ``NUMBA_DISABLE_JIT``) selects the interpreted fallback;
both paths run the same code, so results are identical by construction.
``benchmarks/bench_kernels.py`` compares the two paths.
"""

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "gtw_distance_kernel",
    "count_crossings_kernel",
    "rasterize_polyline_kernel",
]


def _gtw_distance_impl(a, b):
    # Greedy alignment of two (n, 2) point sequences.  Starting from the
    # first point pair, repeatedly consume the cheapest of: advance the
    # first sequence, advance both, advance the second.  Ties prefer
    # advancing the first sequence, then the second, then both.  Once
    # one sequence sits on its last point the rest of the other is
    # matched against that point.  Cost is squared euclidean distance.
    n = a.shape[0]
    m = b.shape[0]
    i = 0
    j = 0
    dx = a[0, 0] - b[0, 0]
    dy = a[0, 1] - b[0, 1]
    d = dx * dx + dy * dy
    while i < n - 1 and j < m - 1:
        dx = a[i + 1, 0] - b[j, 0]
        dy = a[i + 1, 1] - b[j, 1]
        left = dx * dx + dy * dy
        dx = a[i + 1, 0] - b[j + 1, 0]
        dy = a[i + 1, 1] - b[j + 1, 1]
        diag = dx * dx + dy * dy
        dx = a[i, 0] - b[j + 1, 0]
        dy = a[i, 1] - b[j + 1, 1]
        right = dx * dx + dy * dy
        mu = min(left, diag, right)
        d += mu
        if left == mu:
            i += 1
        elif right == mu:
            j += 1
        else:
            i += 1
            j += 1
    if i == n - 1:
        for jj in range(j + 1, m):
            dx = a[n - 1, 0] - b[jj, 0]
            dy = a[n - 1, 1] - b[jj, 1]
            d += dx * dx + dy * dy
    else:
        for ii in range(i + 1, n):
            dx = a[ii, 0] - b[m - 1, 0]
            dy = a[ii, 1] - b[m - 1, 1]
            d += dx * dx + dy * dy
    return d


def _count_crossings_impl(p, q, skip_adjacent):
    # Count proper crossings between every segment of polyline p and
    # every segment of polyline q (both (n, 2)).  A crossing is proper
    # when the segment interiors intersect in exactly one point, so
    # touching endpoints and collinear overlap do not count.  With
    # skip_adjacent (self-intersection mode, p is q) the pair (i, i)
    # and neighbours sharing an endpoint are excluded.
    count = 0
    for i in range(p.shape[0] - 1):
        for j in range(q.shape[0] - 1):
            if skip_adjacent and j <= i + 1:
                continue
            p1x = p[i, 0]
            p1y = p[i, 1]
            p2x = p[i + 1, 0]
            p2y = p[i + 1, 1]
            q1x = q[j, 0]
            q1y = q[j, 1]
            q2x = q[j + 1, 0]
            q2y = q[j + 1, 1]
            d1 = (q2x - q1x) * (p1y - q1y) - (q2y - q1y) * (p1x - q1x)
            d2 = (q2x - q1x) * (p2y - q1y) - (q2y - q1y) * (p2x - q1x)
            d3 = (p2x - p1x) * (q1y - p1y) - (p2y - p1y) * (q1x - p1x)
            d4 = (p2x - p1x) * (q2y - p1y) - (p2y - p1y) * (q2x - p1x)
            if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
                (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
            ):
                count += 1
    return count


def _rasterize_polyline_impl(image, gx, gy):
    # Mark every grid cell a polyline passes through.  gx/gy are vertex
    # coordinates in continuous grid units (cell k spans [k, k+1)); the
    # walk is an integer cell traversal, no anti-aliasing.
    n = image.shape[0]
    for s in range(gx.shape[0] - 1):
        # plain Python floats divide to inf silently on tiny extents,
        # where numpy scalars would emit overflow warnings
        x0 = float(gx[s])
        y0 = float(gy[s])
        x1 = float(gx[s + 1])
        y1 = float(gy[s + 1])
        cx = int(x0)
        cy = int(y0)
        ex = int(x1)
        ey = int(y1)
        if cx < 0:
            cx = 0
        if cx > n - 1:
            cx = n - 1
        if cy < 0:
            cy = 0
        if cy > n - 1:
            cy = n - 1
        if ex < 0:
            ex = 0
        if ex > n - 1:
            ex = n - 1
        if ey < 0:
            ey = 0
        if ey > n - 1:
            ey = n - 1
        image[cy, cx] = 1.0
        dx = x1 - x0
        dy = y1 - y0
        step_x = 1 if dx > 0 else -1
        step_y = 1 if dy > 0 else -1
        if dx != 0.0:
            t_delta_x = abs(1.0 / dx)
            next_x = cx + 1 if step_x > 0 else cx
            t_max_x = (next_x - x0) / dx
        else:
            t_delta_x = np.inf
            t_max_x = np.inf
        if dy != 0.0:
            t_delta_y = abs(1.0 / dy)
            next_y = cy + 1 if step_y > 0 else cy
            t_max_y = (next_y - y0) / dy
        else:
            t_delta_y = np.inf
            t_max_y = np.inf
        # 4n steps bounds any in-grid traversal; guards against
        # floating-point stalls on boundary-aligned segments.
        for _ in range(4 * n + 4):
            if cx == ex and cy == ey:
                break
            if t_max_x < t_max_y:
                cx += step_x
                t_max_x += t_delta_x
            else:
                cy += step_y
                t_max_y += t_delta_y
            if cx < 0:
                cx = 0
            if cx > n - 1:
                cx = n - 1
            if cy < 0:
                cy = 0
            if cy > n - 1:
                cy = n - 1
            image[cy, cx] = 1.0
    return image


def _numba_disabled() -> bool:
    if os.environ.get("SYMREC_NO_NUMBA", "") not in ("", "0"):
        return True
    return "NUMBA_DISABLE_JIT" in os.environ


USING_NUMBA = False
if not _numba_disabled():
    try:
        from numba import njit

        gtw_distance_kernel = njit(cache=True)(_gtw_distance_impl)
        count_crossings_kernel = njit(cache=True)(_count_crossings_impl)
        rasterize_polyline_kernel = njit(cache=True)(_rasterize_polyline_impl)
        USING_NUMBA = True
    except ImportError:
        pass

if not USING_NUMBA:
    gtw_distance_kernel = _gtw_distance_impl
    count_crossings_kernel = _count_crossings_impl
    rasterize_polyline_kernel = _rasterize_polyline_impl
