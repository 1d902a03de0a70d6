"""Explicit 2D diffusion-convection solver on a regular grid.

Flux-form FTCS diffusion with harmonic-mean face diffusivities (so that
zero-diffusivity islands block flux exactly), first-order upwind advection,
Dirichlet "tidal" edges held at G=1, Schmidt point sources clamped to 1
within a small radius from their trigger time, and reflective (no-flux)
behaviour on all non-tidal edges.

Distances in km, times in years, diffusivities in km^2/yr.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SimError(ValueError):
    """Configuration or runtime failure of the simulator."""


EDGES = ("north", "south", "east", "west")


@dataclass(frozen=True)
class RadialDiffusivity:
    """eta_hat * a / r around a center, floored at r = min(dx, dy)/2."""

    eta_hat: float
    a: float
    center: tuple[float, float]


@dataclass(frozen=True)
class SchmidtSource:
    center: tuple[float, float]
    t_trigger: float = 0.0
    r_clamp: float | None = None   # None -> one cell size


@dataclass(frozen=True)
class SimConfig:
    bbox: tuple[float, float, float, float]
    nx: int
    ny: int
    t_end: float
    dt: float = 0.0                # 0 -> auto from stability_dt
    snapshot_times: tuple[float, ...] = ()
    diffusivity: object = 0.0      # float | RadialDiffusivity | (ny, nx) array
    velocity: tuple[float, float] = (0.0, 0.0)
    tidal_edges: tuple[str, ...] = ()
    schmidt_sources: tuple[SchmidtSource, ...] = ()
    islands: tuple = ()            # polygons as tuples of (x, y)
    initial_fill_km: float = 0.0   # depth of the initial G=1 band inland of
    # each tidal edge; 0 fills just the boundary row

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.bbox
        if not (xmax > xmin and ymax > ymin):
            raise SimError(f"degenerate bbox {self.bbox}")
        if self.nx < 3 or self.ny < 3:
            raise SimError("nx and ny must be at least 3")
        if self.t_end < 0:
            raise SimError("t_end must be nonnegative")
        for e in self.tidal_edges:
            if e not in EDGES:
                raise SimError(f"unknown edge {e!r}")
        if any(t > self.t_end for t in self.snapshot_times):
            raise SimError("snapshot times must not exceed t_end")

    @property
    def dx(self) -> float:
        return (self.bbox[2] - self.bbox[0]) / self.nx

    @property
    def dy(self) -> float:
        return (self.bbox[3] - self.bbox[1]) / self.ny

    def cell_centers(self):
        xmin, ymin, _, _ = self.bbox
        xs = xmin + (np.arange(self.nx) + 0.5) * self.dx
        ys = ymin + (np.arange(self.ny) + 0.5) * self.dy
        return xs, ys


@dataclass(frozen=True)
class SimState:
    t: float
    grid: np.ndarray   # (ny, nx)


def point_in_polygon(x, y, polygon) -> bool:
    """Even-odd ray casting; points on edges count as inside."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            t = (y - y1) / (y2 - y1)
            if x < x1 + t * (x2 - x1):
                inside = not inside
    return inside


def eta_field(config: SimConfig) -> np.ndarray:
    """Cell-centered diffusivity with islands zeroed out."""
    xs, ys = config.cell_centers()
    diff = config.diffusivity
    if isinstance(diff, RadialDiffusivity):
        xx, yy = np.meshgrid(xs, ys)
        r = np.hypot(xx - diff.center[0], yy - diff.center[1])
        floor = 0.5 * min(config.dx, config.dy)
        eta = diff.eta_hat * diff.a / np.maximum(r, floor)
    elif np.ndim(diff) == 0:
        eta = np.full((config.ny, config.nx), float(diff))
    else:
        eta = np.asarray(diff, dtype=float)
        if eta.shape != (config.ny, config.nx):
            raise SimError("diffusivity raster must be (ny, nx)")
    if (eta < 0).any():
        raise SimError("diffusivity must be nonnegative")
    eta = eta.copy()
    for poly in config.islands:
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                if point_in_polygon(x, y, poly):
                    eta[j, i] = 0.0
    return eta


def stability_dt(config: SimConfig) -> float:
    """Largest stable explicit step, with a 0.9 safety factor.

    Combines the diffusive and advective limits into one bound,
    dt = 0.9 / (4 eta_max / delta^2 + (|vx| + |vy|) / delta), which keeps
    the update a convex combination of neighbours (maximum principle) even
    when both mechanisms are active.
    """
    eta = eta_field(config)
    eta_max = float(eta.max())
    vx, vy = config.velocity
    speed = abs(vx) + abs(vy)
    if eta_max == 0.0 and speed == 0.0:
        raise SimError("nothing to simulate: diffusivity and velocity both zero")
    delta = min(config.dx, config.dy)
    return 0.9 / (4.0 * eta_max / delta ** 2 + speed / delta)


def initial_condition(config: SimConfig) -> np.ndarray:
    """Zeros except G=1 on each tidal edge (plus an optional inland band)."""
    grid = np.zeros((config.ny, config.nx))
    fill = config.initial_fill_km
    if fill > 0:
        xs, ys = config.cell_centers()
        xmin, ymin, xmax, ymax = config.bbox
        if "south" in config.tidal_edges:
            grid[ys - ymin <= fill, :] = 1.0
        if "north" in config.tidal_edges:
            grid[ymax - ys <= fill, :] = 1.0
        if "west" in config.tidal_edges:
            grid[:, xs - xmin <= fill] = 1.0
        if "east" in config.tidal_edges:
            grid[:, xmax - xs <= fill] = 1.0
    _apply_tidal(grid, config)
    return grid


def _apply_tidal(grid, config):
    if "south" in config.tidal_edges:
        grid[0, :] = 1.0
    if "north" in config.tidal_edges:
        grid[-1, :] = 1.0
    if "west" in config.tidal_edges:
        grid[:, 0] = 1.0
    if "east" in config.tidal_edges:
        grid[:, -1] = 1.0


def _source_masks(config: SimConfig):
    xs, ys = config.cell_centers()
    xx, yy = np.meshgrid(xs, ys)
    masks = []
    for src in config.schmidt_sources:
        r_clamp = src.r_clamp if src.r_clamp is not None \
            else max(config.dx, config.dy)
        mask = np.hypot(xx - src.center[0], yy - src.center[1]) <= r_clamp
        if not mask.any():
            raise SimError(f"schmidt source at {src.center} clamps no cell")
        masks.append((src.t_trigger, mask))
    return masks


class _Workspace:
    """Precomputed per-config arrays for the inner step."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.dt = config.dt if config.dt > 0 else stability_dt(config)
        eta = eta_field(config)
        if config.dt > 0 and config.dt > stability_dt(config) + 1e-12:
            raise SimError(
                f"dt={config.dt} violates the stability bound "
                f"{stability_dt(config):.6g}")
        # harmonic-mean diffusivity on interior faces
        with np.errstate(divide="ignore", invalid="ignore"):
            ex = 2.0 * eta[:, 1:] * eta[:, :-1] / (eta[:, 1:] + eta[:, :-1])
            ey = 2.0 * eta[1:, :] * eta[:-1, :] / (eta[1:, :] + eta[:-1, :])
        self.eta_x = np.nan_to_num(ex)   # (ny, nx-1)
        self.eta_y = np.nan_to_num(ey)   # (ny-1, nx)
        self.sources = _source_masks(config)

    def step_grid(self, grid: np.ndarray, t: float) -> np.ndarray:
        c = self.config
        dx, dy, dt = c.dx, c.dy, self.dt
        flux_x = self.eta_x * (grid[:, 1:] - grid[:, :-1]) / dx
        flux_y = self.eta_y * (grid[1:, :] - grid[:-1, :]) / dy
        div = np.zeros_like(grid)
        div[:, :-1] += flux_x / dx
        div[:, 1:] -= flux_x / dx
        div[:-1, :] += flux_y / dy
        div[1:, :] -= flux_y / dy

        vx, vy = c.velocity
        adv = np.zeros_like(grid)
        if vx > 0:
            d = np.zeros_like(grid)
            d[:, 1:] = (grid[:, 1:] - grid[:, :-1]) / dx
            adv += vx * d
        elif vx < 0:
            d = np.zeros_like(grid)
            d[:, :-1] = (grid[:, 1:] - grid[:, :-1]) / dx
            adv += vx * d
        if vy > 0:
            d = np.zeros_like(grid)
            d[1:, :] = (grid[1:, :] - grid[:-1, :]) / dy
            adv += vy * d
        elif vy < 0:
            d = np.zeros_like(grid)
            d[:-1, :] = (grid[1:, :] - grid[:-1, :]) / dy
            adv += vy * d

        out = grid + dt * (div - adv)
        _apply_tidal(out, c)
        t_new = t + dt
        for t_trigger, mask in self.sources:
            if t_new >= t_trigger:
                out[mask] = 1.0
        if not np.isfinite(out).all():
            j, i = np.argwhere(~np.isfinite(out))[0]
            raise SimError(f"non-finite value at cell (row {j}, col {i}) "
                           f"at t={t_new:.6g}")
        return out


def step(state: SimState, config: SimConfig) -> SimState:
    """One explicit update; dt from the config (auto when 0)."""
    ws = _Workspace(config)
    return SimState(t=state.t + ws.dt, grid=ws.step_grid(state.grid, state.t))


def run(config: SimConfig) -> list[SimState]:
    """Step from t=0 to t_end, capturing the requested snapshot times.

    Each snapshot is taken at the nearest step time; with no requested
    times, a single snapshot at t_end is produced.  Deterministic for a
    fixed config.
    """
    grid = initial_condition(config)
    for t_trigger, mask in _source_masks(config):
        if t_trigger <= 0:
            grid[mask] = 1.0
    wanted = sorted(config.snapshot_times) if config.snapshot_times \
        else [config.t_end]
    if config.t_end == 0:
        return [SimState(t=0.0, grid=grid.copy())]
    ws = _Workspace(config)
    dt = ws.dt
    n_steps = max(1, math.ceil(config.t_end / dt - 1e-9))
    # snapshot at the step index closest to each requested time
    targets = {}
    for t in wanted:
        targets.setdefault(min(n_steps, round(t / dt)), []).append(t)
    snapshots = []
    t = 0.0
    if 0 in targets:
        snapshots.append(SimState(t=0.0, grid=grid.copy()))
    for k in range(1, n_steps + 1):
        grid = ws.step_grid(grid, t)
        t = k * dt
        if k in targets:
            snapshots.append(SimState(t=t, grid=grid.copy()))
    return snapshots


# ---------------------------------------------------------------------------
# snapshot export


def write_frames(snapshots, config: SimConfig, out_dir, run_id: str) -> Path:
    """Binary frame files plus a manifest; returns the manifest path.

    Frames are row-major float32, little-endian, ny*nx values.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = []
    for i, snap in enumerate(snapshots):
        name = f"{run_id}_frame_{i:04d}.bin"
        payload = snap.grid.astype("<f4").tobytes(order="C")
        (out / name).write_bytes(payload)
        frames.append({"index": i, "t": snap.t, "file": name})
    manifest = {
        "run": run_id,
        "bbox": list(config.bbox),
        "nx": config.nx,
        "ny": config.ny,
        "dtype": "float32-le",
        "order": "row-major",
        "frames": frames,
    }
    path = out / f"{run_id}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def read_frame(path) -> np.ndarray:
    data = Path(path).read_bytes()
    n = len(data) // 4
    return np.array(struct.unpack(f"<{n}f", data))


def write_text_grid(snapshot: SimState, path) -> None:
    """Plain-text export for small grids (one row per line)."""
    np.savetxt(path, snapshot.grid, fmt="%.6f", header=f"t={snapshot.t:.6g}")
