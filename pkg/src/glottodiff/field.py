"""Contours, gradient field, steepest-descent path tracing and front statistics.

Contour polylines come from marching squares over a rasterized surface grid;
gradient lines follow the paper-style construction of straight steepest
descent segments between consecutive 0.1-wide contour levels, and their
per-level segment lengths feed the averaged front geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_LEVELS = tuple(round(1.0 - 0.1 * i, 1) for i in range(11))  # 1.0 .. 0.0
TRACE_LEVELS = tuple(round(0.9 - 0.1 * i, 1) for i in range(10))    # 0.9 .. 0.0
GRADIENT_FLOOR = 1e-6        # value/km below which descent direction is undefined
CROSSING_VALUE_TOL = 1e-3
MARCH_STEP_KM = 0.1
MAX_MARCH_KM = 500.0


class FieldError(ValueError):
    """Invalid input to a field operation."""


@dataclass(frozen=True)
class Grid:
    """Row-major scalar samples at cell centers; NaN marks outside-hull."""

    bbox: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    nx: int
    ny: int
    values: np.ndarray  # (ny, nx)

    @classmethod
    def empty(cls, bbox, nx, ny):
        return cls(bbox=tuple(map(float, bbox)), nx=int(nx), ny=int(ny),
                   values=np.full((int(ny), int(nx)), np.nan))

    @property
    def dx(self) -> float:
        return (self.bbox[2] - self.bbox[0]) / self.nx

    @property
    def dy(self) -> float:
        return (self.bbox[3] - self.bbox[1]) / self.ny

    @property
    def x_centers(self) -> np.ndarray:
        return self.bbox[0] + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        return self.bbox[1] + (np.arange(self.ny) + 0.5) * self.dy

    def bilinear(self, x: float, y: float) -> float:
        """Bilinear interpolation between cell centers (for verification)."""
        xs, ys = self.x_centers, self.y_centers
        j = int(np.clip(np.searchsorted(xs, x) - 1, 0, self.nx - 2))
        i = int(np.clip(np.searchsorted(ys, y) - 1, 0, self.ny - 2))
        tx = (x - xs[j]) / (xs[j + 1] - xs[j])
        ty = (y - ys[i]) / (ys[i + 1] - ys[i])
        v = self.values
        return float((1 - tx) * (1 - ty) * v[i, j] + tx * (1 - ty) * v[i, j + 1]
                     + (1 - tx) * ty * v[i + 1, j] + tx * ty * v[i + 1, j + 1])


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray  # (n, 2)
    closed: bool


@dataclass(frozen=True)
class ContourSet:
    lines: dict[float, list[Polyline]]

    def at_level(self, level: float) -> list[Polyline]:
        for key, value in self.lines.items():
            if abs(key - level) < 1e-9:
                return value
        return []


# marching-squares case table: corner bits (LL, LR, TR, TL), edge ids
# 0=bottom 1=right 2=top 3=left; ambiguous cases 5/10 resolved at runtime.
_CASE_SEGMENTS = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    3: [(3, 1)], 12: [(3, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    6: [(0, 2)], 9: [(0, 2)],
    7: [(3, 2)], 8: [(3, 2)],
}


def extract_contours(grid: Grid, levels) -> ContourSet:
    """Marching-squares contour polylines at the requested levels.

    Polylines running into NaN (outside-hull) regions stay open; closed
    loops repeat their first vertex at the end.
    """
    levels = [float(lv) for lv in np.atleast_1d(levels)]
    for lv in levels:
        if not (0.0 <= lv <= 1.0):
            raise FieldError(f"contour level {lv} outside [0, 1]")
    valid = np.isfinite(grid.values)
    if valid.sum() < 4:
        raise FieldError("grid needs at least a 2x2 block of valid cells")
    return ContourSet(lines={lv: _contour_level(grid, lv) for lv in levels})


def _contour_level(grid: Grid, level: float) -> list[Polyline]:
    v = grid.values
    xs, ys = grid.x_centers, grid.y_centers
    points: dict[tuple, tuple[float, float]] = {}
    segments: list[tuple[tuple, tuple]] = []

    def crossing(key, ia, ja, ib, jb):
        if key not in points:
            va, vb = v[ia, ja], v[ib, jb]
            t = (level - va) / (vb - va)
            points[key] = (xs[ja] + t * (xs[jb] - xs[ja]),
                           ys[ia] + t * (ys[ib] - ys[ia]))
        return key

    ny, nx = v.shape
    for i in range(ny - 1):
        for j in range(nx - 1):
            corners = (v[i, j], v[i, j + 1], v[i + 1, j + 1], v[i + 1, j])
            if any(not np.isfinite(c) for c in corners):
                continue
            case = sum(1 << k for k, c in enumerate(corners) if c > level)
            if case in (5, 10):
                center_inside = sum(corners) / 4.0 > level
                if case == 5:
                    segs = [(0, 1), (2, 3)] if center_inside else [(3, 0), (1, 2)]
                else:
                    segs = [(3, 0), (1, 2)] if center_inside else [(0, 1), (2, 3)]
            else:
                segs = _CASE_SEGMENTS[case]
            if not segs:
                continue
            edge_keys = {}
            for e in {e for seg in segs for e in seg}:
                if e == 0:
                    edge_keys[e] = crossing(("H", i, j), i, j, i, j + 1)
                elif e == 1:
                    edge_keys[e] = crossing(("V", i, j + 1), i, j + 1, i + 1, j + 1)
                elif e == 2:
                    edge_keys[e] = crossing(("H", i + 1, j), i + 1, j, i + 1, j + 1)
                else:
                    edge_keys[e] = crossing(("V", i, j), i, j, i + 1, j)
            for ea, eb in segs:
                segments.append((edge_keys[ea], edge_keys[eb]))

    return _chain_segments(segments, points)


def _chain_segments(segments, points) -> list[Polyline]:
    incident: dict[tuple, list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        incident.setdefault(a, []).append(idx)
        incident.setdefault(b, []).append(idx)

    used = [False] * len(segments)
    polylines = []

    def walk(start_key):
        chain = [start_key]
        here = start_key
        while True:
            nxt_idx = next((i for i in incident[here] if not used[i]), None)
            if nxt_idx is None:
                break
            used[nxt_idx] = True
            a, b = segments[nxt_idx]
            here = b if a == here else a
            chain.append(here)
        return chain

    # open chains first: start from crossings touched by exactly one segment
    for key, segs in incident.items():
        if len(segs) == 1 and not used[segs[0]]:
            chain = walk(key)
            polylines.append(Polyline(
                points=np.array([points[k] for k in chain]), closed=False))
    # what remains are closed loops
    for idx in range(len(segments)):
        if not used[idx]:
            chain = walk(segments[idx][0])
            pts = [points[k] for k in chain]
            pts.append(pts[0])
            polylines.append(Polyline(points=np.array(pts), closed=True))
    return polylines


def gradient_at(surface, x: float, y: float, h: float = 0.05) -> tuple[float, float]:
    """Central-difference gradient of the (clamped) surface; step in km."""
    vxp = surface(x + h, y)
    vxm = surface(x - h, y)
    vyp = surface(x, y + h)
    vym = surface(x, y - h)
    for v, p in ((vxp, (x + h, y)), (vxm, (x - h, y)),
                 (vyp, (x, y + h)), (vym, (x, y - h))):
        if math.isnan(v):
            raise FieldError(f"gradient stencil point {p} lies outside the hull")
    return (vxp - vxm) / (2.0 * h), (vyp - vym) / (2.0 * h)


@dataclass(frozen=True)
class GradientPath:
    start: tuple[float, float]
    crossings: np.ndarray          # (k, 2); 10 rows when complete
    levels: tuple[float, ...]      # level of each crossing
    segment_lengths: np.ndarray    # (k-1,)
    status: str                    # "complete" | "truncated"
    truncated_level: float | None = None  # deepest level reached when truncated

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    @property
    def total_length(self) -> float:
        return float(np.sum(self.segment_lengths))


def _nearest_on_polylines(polys, point):
    px, py = point
    best = None
    best_d2 = np.inf
    for poly in polys:
        pts = poly.points
        for a, b in zip(pts[:-1], pts[1:]):
            ab = b - a
            denom = float(ab @ ab)
            t = 0.0 if denom == 0.0 else float(np.clip(
                ((px - a[0]) * ab[0] + (py - a[1]) * ab[1]) / denom, 0.0, 1.0))
            q = a + t * ab
            d2 = (q[0] - px) ** 2 + (q[1] - py) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = (float(q[0]), float(q[1]))
    return best, math.sqrt(best_d2)


def _refine_to_level(surface, point, level, tol=CROSSING_VALUE_TOL):
    # slide along the descent direction until the surface value matches the
    # contour level; contour polylines carry rasterization error, the
    # surface itself is the authority
    x, y = point
    v = surface(x, y)
    if math.isnan(v) or abs(v - level) <= tol:
        return point
    try:
        gx, gy = gradient_at(surface, x, y)
    except FieldError:
        return point
    norm = math.hypot(gx, gy)
    if norm < GRADIENT_FLOOR:
        return point
    ux, uy = gx / norm, gy / norm  # ascending direction
    # v too low -> move up-gradient, else down
    sign = 1.0 if v < level else -1.0
    a, fa = 0.0, v - level
    step = 0.02
    t = step
    while t <= 2.0:
        q = (x + sign * t * ux, y + sign * t * uy)
        fv = surface(*q)
        if math.isnan(fv):
            return point
        if (fv - level) * fa <= 0.0:
            lo, hi = a, t
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                fm = surface(x + sign * mid * ux, y + sign * mid * uy) - level
                if abs(fm) <= tol * 0.1:
                    lo = hi = mid
                    break
                if fm * fa > 0.0:
                    lo = mid
                else:
                    hi = mid
            t = 0.5 * (lo + hi)
            return (x + sign * t * ux, y + sign * t * uy)
        a, fa = t, fv - level
        t += step
    return point


def trace_gradient_line(surface, contours: ContourSet, start,
                        snap_km: float = 0.5) -> GradientPath:
    """Steepest-descent path in straight segments through the 0.1 levels.

    The descent direction is frozen at each level crossing; the straight ray
    is marched in 0.1 km substeps until the surface value reaches the next
    level, then bisected to 1e-3 value tolerance.  Leaving the hull or
    hitting a flat spot truncates the path.
    """
    top = TRACE_LEVELS[0]
    polys = contours.at_level(top)
    if not polys:
        raise FieldError(f"no contour polylines at level {top}")
    snapped, dist = _nearest_on_polylines(polys, start)
    if dist > snap_km:
        raise FieldError(
            f"start point {tuple(start)} is {dist:.2f} km from the {top} "
            f"contour (snap limit {snap_km} km)")
    p = _refine_to_level(surface, snapped, top)

    crossings = [p]
    levels_hit = [top]
    deltas = []
    status = "complete"
    truncated_level = None

    for next_level in TRACE_LEVELS[1:]:
        try:
            gx, gy = gradient_at(surface, *p)
        except FieldError:
            status, truncated_level = "truncated", levels_hit[-1]
            break
        norm = math.hypot(gx, gy)
        if norm < GRADIENT_FLOOR:
            status, truncated_level = "truncated", levels_hit[-1]
            break
        ux, uy = -gx / norm, -gy / norm

        crossing = None
        t_prev = 0.0
        n_sub = int(MAX_MARCH_KM / MARCH_STEP_KM)
        for k in range(1, n_sub + 1):
            t = k * MARCH_STEP_KM
            v = surface(p[0] + t * ux, p[1] + t * uy)
            if math.isnan(v):
                break
            if v <= next_level + CROSSING_VALUE_TOL:
                t_cross = _bisect_crossing(surface, p, (ux, uy),
                                           t_prev, t, next_level)
                crossing = (p[0] + t_cross * ux, p[1] + t_cross * uy)
                deltas.append(t_cross)
                break
            t_prev = t
        if crossing is None:
            status, truncated_level = "truncated", levels_hit[-1]
            break
        crossings.append(crossing)
        levels_hit.append(next_level)
        p = crossing

    return GradientPath(start=tuple(map(float, start)),
                        crossings=np.array(crossings),
                        levels=tuple(levels_hit),
                        segment_lengths=np.array(deltas),
                        status=status, truncated_level=truncated_level)


def _bisect_crossing(surface, origin, direction, lo, hi, level,
                     tol=CROSSING_VALUE_TOL):
    # converge to the first point along the ray where the value reaches the
    # level; plateaus (clamped regions at 0 or 1) keep the value constant over
    # a range, so positional convergence finds the plateau's near edge
    ox, oy = origin
    ux, uy = direction
    for _ in range(80):
        if hi - lo < 1e-9:
            break
        mid = 0.5 * (lo + hi)
        v = surface(ox + mid * ux, oy + mid * uy)
        if abs(v - level) <= 0.01 * tol:
            return mid
        if v > level:
            lo = mid
        else:
            hi = mid
    return hi


def sample_starts(contours: ContourSet, level: float, n: int, seed: int):
    """n points sampled uniformly by arc length over the level's polylines."""
    polys = contours.at_level(level)
    if not polys:
        raise FieldError(f"no contour polylines at level {level}")
    seg_starts, seg_vecs, seg_lens = [], [], []
    for poly in polys:
        pts = poly.points
        d = pts[1:] - pts[:-1]
        lens = np.hypot(d[:, 0], d[:, 1])
        keep = lens > 0
        seg_starts.append(pts[:-1][keep])
        seg_vecs.append(d[keep])
        seg_lens.append(lens[keep])
    starts = np.concatenate(seg_starts)
    vecs = np.concatenate(seg_vecs)
    lens = np.concatenate(seg_lens)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    total = cum[-1]
    if total == 0.0:
        raise FieldError(f"contour at level {level} has zero length")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, total, size=n)
    idx = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(lens) - 1)
    frac = (u - cum[idx]) / lens[idx]
    pts = starts[idx] + frac[:, None] * vecs[idx]
    return [tuple(map(float, p)) for p in pts]


@dataclass(frozen=True)
class FrontStats:
    """Averaged front geometry over the complete gradient paths."""

    n_paths: int
    n_truncated: int
    mean_delta: np.ndarray     # (9,) per contour interval, top (0.9->0.8) first
    var_delta: np.ndarray      # (9,) sample variance
    mean_distance: np.ndarray  # (10,) cumulative distance from the 0.9 level
    levels: tuple[float, ...] = TRACE_LEVELS

    @property
    def w(self) -> float:
        """Front width: average distance from level 0.9 to level 0.0, km."""
        return float(np.sum(self.mean_delta))


def front_stats(paths) -> FrontStats:
    complete = [p for p in paths if p.complete]
    n_truncated = len(paths) - len(complete)
    if not complete:
        raise FieldError("no complete gradient paths to average")
    deltas = np.array([p.segment_lengths for p in complete])
    mean = deltas.mean(axis=0)
    var = (deltas.var(axis=0, ddof=1) if len(complete) > 1
           else np.zeros_like(mean))
    distance = np.concatenate([[0.0], np.cumsum(mean)])
    return FrontStats(n_paths=len(complete), n_truncated=n_truncated,
                      mean_delta=mean, var_delta=var, mean_distance=distance)
