import math

import numpy as np
import pytest

from glottodiff import surface as sf
from glottodiff.dataio import make_dataset
from glottodiff.surface import (SurfaceError, build_surface, estimate_gradients,
                                evaluate, rasterize, surface_from_points,
                                triangulate)


def circumcircle(a, b, c):
    """Brute-force circumcenter/radius oracle."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax ** 2 + ay ** 2) * (by - cy) + (bx ** 2 + by ** 2) * (cy - ay)
          + (cx ** 2 + cy ** 2) * (ay - by)) / d
    uy = ((ax ** 2 + ay ** 2) * (cx - bx) + (bx ** 2 + by ** 2) * (ax - cx)
          + (cx ** 2 + cy ** 2) * (bx - ax)) / d
    r = math.hypot(ax - ux, ay - uy)
    return (ux, uy), r


def grid_points(nx, ny, x0=0.0, y0=0.0, dx=1.0, dy=1.0):
    xs = x0 + dx * np.arange(nx)
    ys = y0 + dy * np.arange(ny)
    xx, yy = np.meshgrid(xs, ys)
    return np.column_stack([xx.ravel(), yy.ravel()])


class TestTriangulate:
    def test_three_points(self):
        tri = triangulate([(0, 0), (1, 0), (0, 1)])
        assert len(tri.triangles) == 1

    def test_square(self):
        tri = triangulate([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert len(tri.triangles) == 2
        for t in tri.triangles:
            (cx, cy), r = circumcircle(*tri.points[t])
            for k in range(4):
                if k not in t:
                    d = math.hypot(tri.points[k][0] - cx, tri.points[k][1] - cy)
                    assert d >= r - 1e-9

    def test_empty_circumcircle_random(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform(0, 10, size=(100, 2))
        tri = triangulate(pts)
        for t in tri.triangles:
            (cx, cy), r = circumcircle(*tri.points[t])
            d = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
            inside = d < r - 1e-9
            inside[t] = False
            assert not inside.any()

    def test_positive_orientation(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(0, 5, size=(30, 2))
        tri = triangulate(pts)
        a, b, c = (tri.points[tri.triangles[:, k]] for k in range(3))
        cross = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                 - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
        assert (cross > 0).all()

    def test_collinear_rejected(self):
        with pytest.raises(SurfaceError):
            triangulate([(0, 0), (1, 1), (2, 2), (3, 3)])

    def test_duplicates_rejected(self):
        with pytest.raises(SurfaceError, match="duplicate"):
            triangulate([(0, 0), (1, 0), (0, 1), (1, 0)])


class TestEstimateGradients:
    def test_linear_field(self):
        pts = grid_points(6, 6)
        tri = triangulate(pts)
        values = 0.3 + 0.05 * pts[:, 0] - 0.02 * pts[:, 1]
        grads = estimate_gradients(tri, values)
        assert np.allclose(grads[:, 0], 0.05, atol=1e-9)
        assert np.allclose(grads[:, 1], -0.02, atol=1e-9)

    def test_constant_field(self):
        pts = grid_points(5, 5)
        tri = triangulate(pts)
        grads = estimate_gradients(tri, np.full(len(pts), 0.7))
        assert np.allclose(grads, 0.0, atol=1e-12)

    def test_quadratic_interior(self):
        pts = grid_points(13, 13, dx=0.25, dy=0.25)
        tri = triangulate(pts)
        values = pts[:, 0] ** 2
        grads = estimate_gradients(tri, values)
        # pick a vertex well inside the grid
        idx = np.argmin(np.hypot(pts[:, 0] - 1.5, pts[:, 1] - 1.5))
        expected = 2.0 * pts[idx, 0]
        assert grads[idx, 0] == pytest.approx(expected, rel=0.05)
        assert abs(grads[idx, 1]) < 0.05 * expected


def lonlat_grid(nx, ny, lon0=11.0, lat0=46.0, dlon=0.02, dlat=0.02):
    out = []
    for i in range(ny):
        for j in range(nx):
            out.append((lon0 + j * dlon, lat0 + i * dlat))
    return out


class TestBuildSurface:
    def test_all_ones(self):
        pts = lonlat_grid(4, 4)
        ds = make_dataset(pts, {"f": [1.0] * 16})
        surf = build_surface(ds, "f")
        rng = np.random.default_rng(3)
        xs = rng.uniform(-1, 1, 50)
        ys = rng.uniform(-1, 1, 50)
        vals = evaluate(surf, xs, ys)
        vals = vals[np.isfinite(vals)]
        assert np.allclose(vals, 1.0, atol=1e-9)

    def test_half_plane_monotone_and_bounded(self):
        pts = grid_points(8, 10, dx=2.0, dy=2.0)
        values = (pts[:, 1] > 9.0).astype(float)
        tri = triangulate(pts)
        surf = surface_from_points(tri, values, clamp=True)
        ys = np.linspace(0.5, 17.5, 60)
        for x in (3.0, 7.0, 11.0):
            vals = np.array([evaluate(surf, x, y) for y in ys])
            assert np.nanmin(vals) >= 0.0 and np.nanmax(vals) <= 1.0
            # nondecreasing northward up to the interpolant's intrinsic
            # ringing near the step (~0.02)
            assert (np.diff(vals) >= -0.025).all()
            assert vals[0] < 0.05 and vals[-1] > 0.95

    def test_single_spike_overshoot_and_clamp(self):
        pts = grid_points(7, 7, dx=2.0, dy=2.0)
        values = np.zeros(len(pts))
        values[np.argmin(np.hypot(pts[:, 0] - 6.0, pts[:, 1] - 6.0))] = 1.0
        tri = triangulate(pts)
        raw = surface_from_points(tri, values, clamp=False)
        clamped = surface_from_points(tri, values, clamp=True)
        xs = np.linspace(0.2, 11.8, 80)
        grid_raw = np.array([[evaluate(raw, x, y) for x in xs] for y in xs])
        grid_cl = np.array([[evaluate(clamped, x, y) for x in xs] for y in xs])
        assert np.nanmin(grid_raw) < -1e-6   # unclamped overshoot below 0
        assert np.nanmin(grid_cl) == 0.0
        assert np.nanmax(grid_cl) <= 1.0

    def test_insufficient_data(self):
        ds = make_dataset([(11.0, 46.0), (11.1, 46.1), (11.2, 46.2)],
                          {"f": [1.0, None, 0.0]})
        with pytest.raises(SurfaceError, match="'f'"):
            build_surface(ds, "f")


class TestEvaluate:
    def setup_method(self):
        rng = np.random.default_rng(7)
        self.pts = rng.uniform(0, 10, size=(40, 2))
        self.values = np.clip(0.2 + 0.05 * self.pts[:, 0]
                              + 0.03 * self.pts[:, 1], 0, 1)
        tri = triangulate(self.pts)
        self.surf = surface_from_points(tri, self.values)

    def test_nodal_exactness(self):
        for (x, y), v in zip(self.pts, self.values):
            assert abs(evaluate(self.surf, x, y) - v) < 1e-12

    def test_outside_hull_marker(self):
        assert math.isnan(evaluate(self.surf, 500.0, 500.0))

    def test_linear_precision(self):
        rng = np.random.default_rng(8)
        hits = 0
        while hits < 1000:
            x, y = rng.uniform(1, 9, 2)
            v = evaluate(self.surf, x, y)
            if math.isnan(v):
                continue
            hits += 1
            assert v == pytest.approx(0.2 + 0.05 * x + 0.03 * y, abs=1e-9)


class TestC1Continuity:
    def test_directional_derivative_across_edges(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(0, 10, size=(60, 2))
        values = 0.5 + 0.3 * np.sin(pts[:, 0] / 3.0) * np.cos(pts[:, 1] / 3.0)
        tri = triangulate(pts)
        surf = surface_from_points(tri, values, clamp=False)

        h = 1e-5
        checked = 0
        for t_idx, nbrs in enumerate(tri.neighbors):
            for face, nb in enumerate(nbrs):
                if nb <= t_idx:
                    continue
                # shared edge = triangle vertices opposite the face vertex
                tri_v = tri._qhull.simplices[t_idx]
                edge = np.delete(tri_v, face)
                a, b = tri.points[edge[0]], tri.points[edge[1]]
                m = 0.5 * (a + b)
                e = b - a
                n = np.array([-e[1], e[0]]) / np.hypot(*e)
                # second-order one-sided differences from each side
                def f(p):
                    return evaluate(surf, p[0], p[1])
                d_plus = (-3 * f(m) + 4 * f(m + h * n) - f(m + 2 * h * n)) / (2 * h)
                d_minus = (3 * f(m) - 4 * f(m - h * n) + f(m - 2 * h * n)) / (2 * h)
                if math.isnan(d_plus) or math.isnan(d_minus):
                    continue
                scale = max(abs(d_plus), abs(d_minus), 1e-3)
                assert abs(d_plus - d_minus) / scale < 1e-4
                checked += 1
                if checked >= 50:
                    return
        assert checked >= 50


class TestClampSemantics:
    def test_clamp_equals_clip_of_unclamped(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(0, 10, size=(30, 2))
        values = (pts[:, 1] > 5).astype(float)
        tri = triangulate(pts)
        raw = surface_from_points(tri, values, clamp=False)
        cl = surface_from_points(tri, values, clamp=True)
        for _ in range(200):
            x, y = rng.uniform(0, 10, 2)
            v_raw = evaluate(raw, x, y)
            v_cl = evaluate(cl, x, y)
            if math.isnan(v_raw):
                assert math.isnan(v_cl)
            else:
                assert v_cl == pytest.approx(min(1.0, max(0.0, v_raw)), abs=1e-14)


class TestRasterize:
    def make_constant_surface(self):
        pts = grid_points(4, 4, dx=3.0, dy=3.0)
        tri = triangulate(pts)
        return surface_from_points(tri, np.full(len(pts), 0.4))

    def test_constant(self):
        surf = self.make_constant_surface()
        grid = rasterize(surf, (1, 1, 8, 8), 10, 10)
        assert np.allclose(grid.values, 0.4, atol=1e-9)

    def test_bbox_outside_hull(self):
        surf = self.make_constant_surface()
        grid = rasterize(surf, (100, 100, 110, 110), 5, 5)
        assert np.isnan(grid.values).all()

    def test_erfc_shaped_monotone(self):
        pts = grid_points(9, 15, dx=4.0, dy=4.0)
        values = 0.5 * np.array([math.erfc((y - 28.0) * 0.15) for y in pts[:, 1]])
        tri = triangulate(pts)
        surf = surface_from_points(tri, values)
        grid = rasterize(surf, (2, 2, 30, 54), 12, 40)
        assert np.nanmax(grid.values) <= 1.0
        assert np.nanmin(grid.values) >= 0.0
        interior = grid.values[:, 4]
        assert (np.diff(interior[np.isfinite(interior)]) <= 1e-6).all()

    def test_degenerate_bbox(self):
        surf = self.make_constant_surface()
        with pytest.raises(SurfaceError, match="bbox"):
            rasterize(surf, (5, 5, 5, 10), 4, 4)
