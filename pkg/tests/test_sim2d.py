import math

import numpy as np
import pytest

from glottodiff import sim2d
from glottodiff.models import SchmidtParams, schmidt_profile
from glottodiff.sim2d import (RadialDiffusivity, SchmidtSource, SimConfig,
                              SimError, SimState, eta_field, initial_condition,
                              point_in_polygon, read_frame, run, stability_dt,
                              step, write_frames, write_text_grid)


def base_config(**kw):
    defaults = dict(bbox=(0.0, 0.0, 16.0, 16.0), nx=16, ny=16, t_end=10.0,
                    diffusivity=0.011)
    defaults.update(kw)
    return SimConfig(**defaults)


class TestStabilityDt:
    def test_diffusion_limit(self):
        cfg = base_config(bbox=(0, 0, 16, 16), nx=16, ny=16, diffusivity=0.011)
        # oracle: 0.9 * 1 / (4 * 0.011)
        assert stability_dt(cfg) == pytest.approx(20.4545, abs=1e-3)

    def test_resolution_scaling(self):
        a = stability_dt(base_config(nx=16, ny=16))
        b = stability_dt(base_config(nx=32, ny=32))
        assert a == pytest.approx(4 * b, rel=1e-12)

    def test_advection_limit(self):
        cfg = base_config(diffusivity=1e-9, velocity=(0.05, 0.0))
        assert stability_dt(cfg) == pytest.approx(0.9 * 1.0 / 0.05, rel=1e-3)

    def test_nothing_to_simulate(self):
        with pytest.raises(SimError, match="nothing to simulate"):
            stability_dt(base_config(diffusivity=0.0))

    def test_combined_bound_keeps_convexity(self):
        # coefficient of the center cell in the update must stay nonnegative
        cfg = base_config(diffusivity=0.05, velocity=(0.04, 0.03))
        dt = stability_dt(cfg)
        d = min(cfg.dx, cfg.dy)
        assert dt * (4 * 0.05 / d ** 2 + (0.04 + 0.03) / d) <= 1.0


class TestEtaField:
    def test_constant(self):
        assert (eta_field(base_config(diffusivity=0.3)) == 0.3).all()

    def test_radial_floor(self):
        cfg = base_config(bbox=(-8, -8, 8, 8),
                          diffusivity=RadialDiffusivity(0.1, 5.0, (0.0, 0.0)))
        eta = eta_field(cfg)
        assert eta.max() <= 0.1 * 5.0 / (0.5 * cfg.dx) + 1e-12
        # far cell matches eta_hat * a / r
        xs, ys = cfg.cell_centers()
        r = math.hypot(xs[-1], ys[-1])
        assert eta[-1, -1] == pytest.approx(0.5 / r, rel=1e-12)

    def test_island_zeroed(self):
        poly = ((4.0, 4.0), (12.0, 4.0), (12.0, 12.0), (4.0, 12.0))
        eta = eta_field(base_config(diffusivity=0.2, islands=(poly,)))
        assert eta[8, 8] == 0.0
        assert eta[0, 0] == 0.2

    def test_negative_rejected(self):
        raster = np.full((16, 16), 0.1)
        raster[3, 3] = -0.1
        with pytest.raises(SimError):
            eta_field(base_config(diffusivity=raster))

    def test_point_in_polygon(self):
        square = ((0, 0), (2, 0), (2, 2), (0, 2))
        assert point_in_polygon(1, 1, square)
        assert not point_in_polygon(3, 1, square)
        concave = ((0, 0), (4, 0), (4, 4), (2, 2), (0, 4))
        assert point_in_polygon(1, 1, concave)
        assert not point_in_polygon(2, 3.5, concave)


class TestInitialCondition:
    def test_all_edges(self):
        cfg = base_config(tidal_edges=("north", "south", "east", "west"))
        grid = initial_condition(cfg)
        assert (grid[0, :] == 1).all() and (grid[-1, :] == 1).all()
        assert (grid[:, 0] == 1).all() and (grid[:, -1] == 1).all()
        assert (grid[1:-1, 1:-1] == 0).all()

    def test_no_edges(self):
        assert (initial_condition(base_config()) == 0).all()

    def test_north_edge_count(self):
        cfg = base_config(nx=64, ny=64, tidal_edges=("north",))
        assert initial_condition(cfg).sum() == 64


class TestStep:
    def test_uniform_steady_state(self):
        cfg = base_config()
        state = SimState(t=0.0, grid=np.full((16, 16), 0.5))
        out = step(state, cfg)
        assert np.array_equal(out.grid, state.grid)
        assert out.t == pytest.approx(stability_dt(cfg))

    def test_stability_violation_rejected(self):
        cfg = base_config(dt=100.0)
        with pytest.raises(SimError, match="stability"):
            step(SimState(t=0.0, grid=np.zeros((16, 16))), cfg)

    def test_tidal_profile_matches_erfc(self):
        # half-plane step: tidal south edge plus a 24 km initial band; the
        # front is far enough from the wall that it evolves as the free
        # half-plane solution
        eta = 0.011
        cfg = SimConfig(bbox=(0.0, 0.0, 1.0, 64.0), nx=4, ny=256,
                        t_end=400.0, diffusivity=eta, tidal_edges=("south",),
                        initial_fill_km=24.0)
        snap = run(cfg)[-1]
        _, ys = cfg.cell_centers()
        # the discrete step edge sits half a cell above the last filled center
        edge = ys[ys <= 24.0].max() + cfg.dy / 2
        s = ys - edge
        oracle = 0.5 * np.array(
            [math.erfc(v / (2 * math.sqrt(eta * snap.t))) for v in s])
        err = np.abs(snap.grid[:, 1] - oracle).max()
        assert err < 0.02

    def test_schmidt_source_matches_radial_oracle(self):
        eta_hat, a = 0.1, 5.0
        cfg = SimConfig(bbox=(-24.0, -24.0, 24.0, 24.0), nx=96, ny=96,
                        t_end=500.0,
                        diffusivity=RadialDiffusivity(eta_hat, a, (0.0, 0.0)),
                        schmidt_sources=(SchmidtSource(center=(0.0, 0.0)),))
        snap = run(cfg)[-1]
        xs, ys = cfg.cell_centers()
        j = np.argmin(np.abs(ys))   # row nearest the axis
        sel = (xs > 1.0) & (xs < 20.0)
        r = np.hypot(xs[sel], ys[j])
        oracle = schmidt_profile(r, snap.t, SchmidtParams(eta_hat, a))
        err = np.abs(snap.grid[j, sel] - oracle).max()
        assert err < 0.03

    def test_island_evolves_only_by_advection(self):
        poly = ((4.0, 4.0), (12.0, 4.0), (12.0, 12.0), (4.0, 12.0))
        cfg = base_config(t_end=50.0, diffusivity=0.2, islands=(poly,),
                          tidal_edges=("north", "south", "east", "west"))
        snap = run(cfg)[-1]
        assert snap.grid[8, 8] == 0.0       # no advection: frozen
        assert snap.grid[1, 1] > 0.0        # diffusion active outside


class TestRun:
    def test_zero_time(self):
        cfg = base_config(t_end=0.0, tidal_edges=("south",))
        snaps = run(cfg)
        assert len(snaps) == 1
        assert np.array_equal(snaps[0].grid, initial_condition(cfg))

    def test_snapshot_times(self):
        cfg = base_config(t_end=100.0, tidal_edges=("south",),
                          snapshot_times=(0.0, 50.0, 100.0))
        snaps = run(cfg)
        assert len(snaps) == 3
        dt = stability_dt(cfg)
        assert snaps[0].t == 0.0
        assert abs(snaps[1].t - 50.0) <= dt / 2 + 1e-9
        assert abs(snaps[2].t - 100.0) <= dt + 1e-9

    def test_causality_before_trigger(self):
        common = dict(bbox=(0.0, 0.0, 16.0, 16.0), nx=32, ny=32,
                      diffusivity=0.05, tidal_edges=("south",),
                      snapshot_times=(40.0,), t_end=40.0)
        plain = run(SimConfig(**common))[-1]
        src = SchmidtSource(center=(8.0, 12.0), t_trigger=200.0)
        with_src = run(SimConfig(schmidt_sources=(src,), **common))[-1]
        assert np.array_equal(plain.grid, with_src.grid)

    def test_island_persists_in_flooded_domain(self):
        poly = ((10.0, 10.0), (14.0, 10.0), (14.0, 14.0), (10.0, 14.0))
        cfg = SimConfig(bbox=(0.0, 0.0, 24.0, 24.0), nx=48, ny=48,
                        t_end=3000.0, diffusivity=0.1,
                        tidal_edges=("north", "south", "east", "west"),
                        schmidt_sources=(
                            SchmidtSource(center=(5.0, 5.0), t_trigger=0.0),
                            SchmidtSource(center=(19.0, 6.0), t_trigger=500.0)),
                        islands=(poly,))
        snap = run(cfg)[-1]
        xs, ys = cfg.cell_centers()
        inside = np.array([[point_in_polygon(x, y, poly) for x in xs]
                           for y in ys])
        assert snap.grid[inside].max() < 0.1
        # a ring two cells beyond the island is saturated
        ring = np.array([[(8.0 <= x <= 16.0 and 8.0 <= y <= 16.0)
                          and not (9.0 < x < 15.0 and 9.0 < y < 15.0)
                          for x in xs] for y in ys])
        assert snap.grid[ring].min() >= 0.9

    def test_determinism(self):
        cfg = base_config(t_end=30.0, tidal_edges=("west",),
                          velocity=(0.01, 0.0))
        a = run(cfg)[-1]
        b = run(cfg)[-1]
        assert np.array_equal(a.grid, b.grid)


class TestInvariants:
    def test_conservation_no_flux(self):
        cfg = SimConfig(bbox=(0.0, 0.0, 8.0, 8.0), nx=32, ny=32,
                        t_end=1.0, dt=0.1, diffusivity=0.1)
        ws = sim2d._Workspace(cfg)
        rng = np.random.default_rng(3)
        grid = rng.uniform(0.2, 0.8, (32, 32))
        total0 = grid.sum()
        for k in range(10_000):
            grid = ws.step_grid(grid, k * ws.dt)
        assert abs(grid.sum() - total0) / total0 < 1e-9

    def test_maximum_principle_random_configs(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            nx, ny = rng.integers(8, 24, 2)
            raster = rng.uniform(0, 0.3, (ny, nx))
            if rng.random() < 0.3:
                raster[rng.integers(0, ny), :] = 0.0
            edges = tuple(e for e in sim2d.EDGES if rng.random() < 0.5)
            cfg = SimConfig(bbox=(0.0, 0.0, float(nx), float(ny)),
                            nx=int(nx), ny=int(ny), t_end=20.0,
                            diffusivity=raster,
                            velocity=(rng.uniform(-0.1, 0.1),
                                      rng.uniform(-0.1, 0.1)),
                            tidal_edges=edges)
            snap = run(cfg)[-1]
            assert snap.grid.min() >= -1e-12
            assert snap.grid.max() <= 1.0 + 1e-12

    def test_first_order_convergence_with_advection(self):
        # advect+diffuse a Gaussian; upwind's O(dx) error should halve with dx
        eta, vy, t_end, dt = 0.02, 0.1, 40.0, 0.2
        y0, sigma0 = 15.0, 2.0

        def exact(y, t):
            var = sigma0 ** 2 + 2 * eta * t
            return 0.8 * sigma0 / math.sqrt(var) \
                * np.exp(-(y - y0 - vy * t) ** 2 / (2 * var))

        errors = []
        for ny in (120, 240):
            cfg = SimConfig(bbox=(0.0, 0.0, 1.5, 60.0), nx=3, ny=ny,
                            t_end=t_end, dt=dt, diffusivity=eta,
                            velocity=(0.0, vy))
            ws = sim2d._Workspace(cfg)
            _, ys = cfg.cell_centers()
            grid = np.tile(exact(ys, 0.0)[:, None], (1, 3))
            n_steps = round(t_end / dt)
            for k in range(n_steps):
                grid = ws.step_grid(grid, k * dt)
            errors.append(np.abs(grid[:, 1] - exact(ys, t_end)).max())
        ratio = errors[0] / errors[1]
        assert 1.7 <= ratio <= 2.3

    def test_translation_invariance(self):
        shift = 0.5  # one cell
        src = SchmidtSource(center=(8.0, 8.0), t_trigger=0.0)
        cfg1 = SimConfig(bbox=(0.0, 0.0, 16.0, 16.0), nx=32, ny=32,
                         t_end=30.0, diffusivity=0.05,
                         schmidt_sources=(src,))
        cfg2 = SimConfig(bbox=(shift, 0.0, 16.0 + shift, 16.0), nx=32, ny=32,
                         t_end=30.0, diffusivity=0.05,
                         schmidt_sources=(
                             SchmidtSource(center=(8.0 + shift, 8.0),
                                           t_trigger=0.0),))
        a = run(cfg1)[-1]
        b = run(cfg2)[-1]
        assert np.array_equal(a.grid, b.grid)


class TestExport:
    def test_frames_round_trip(self, tmp_path):
        cfg = base_config(t_end=40.0, tidal_edges=("south",),
                          snapshot_times=(0.0, 20.0, 40.0))
        snaps = run(cfg)
        manifest_path = write_frames(snaps, cfg, tmp_path, "demo")
        import json
        manifest = json.loads(manifest_path.read_text())
        assert len(manifest["frames"]) == len(snaps)
        assert manifest["nx"] == cfg.nx and manifest["ny"] == cfg.ny
        for frame, snap in zip(manifest["frames"], snaps):
            data = read_frame(tmp_path / frame["file"])
            assert data.shape == (cfg.nx * cfg.ny,)
            assert np.allclose(data.reshape(cfg.ny, cfg.nx), snap.grid,
                               atol=1e-6)

    def test_frames_little_endian(self, tmp_path):
        snap = SimState(t=0.0, grid=np.array([[1.0, 0.5, 0.25]] * 3))
        cfg = base_config(nx=3, ny=3)
        write_frames([snap], cfg, tmp_path, "le")
        raw = (tmp_path / "le_frame_0000.bin").read_bytes()
        assert raw[:4] == b"\x00\x00\x80\x3f"   # 1.0f little-endian

    def test_text_export(self, tmp_path):
        snap = SimState(t=12.5, grid=np.full((4, 4), 0.25))
        path = tmp_path / "grid.txt"
        write_text_grid(snap, path)
        text = path.read_text()
        assert "t=12.5" in text
        assert "0.250000" in text


class TestValidation:
    def test_bad_edge_name(self):
        with pytest.raises(SimError, match="edge"):
            base_config(tidal_edges=("up",))

    def test_snapshot_after_end(self):
        with pytest.raises(SimError, match="snapshot"):
            base_config(t_end=10.0, snapshot_times=(20.0,))

    def test_degenerate_bbox(self):
        with pytest.raises(SimError, match="bbox"):
            SimConfig(bbox=(0, 0, 0, 5), nx=8, ny=8, t_end=1.0)
