"""End-to-end analysis pipeline: surfaces, fronts, fits, comparison table.

For every selected feature: interpolate the surface, rasterize, extract
contours, sample gradient-line starting points on the 0.9 contour, trace
the lines, accumulate front statistics, fit the linear and erfc models and
derive the front widths.  Everything is deterministic for a fixed config
(seeded sampling, sorted iteration, canonical serialization).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geojson
from .config import ProjectConfig
from .dataio import Dataset
from .field import (FieldError, FrontStats, extract_contours, front_stats,
                    sample_starts, trace_gradient_line)
from .fitting import (FitResult, FittingError, compare_models,
                      derived_quantities, fit_erfc, fit_linear,
                      points_from_stats)
from .surface import build_surface, rasterize

BBOX_PAD_KM = 5.0


class PipelineError(RuntimeError):
    """Failure of a named pipeline stage."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class FrontRun:
    """Traced fronts and fits for one (feature, N) combination."""

    n_requested: int
    seed: int
    paths: tuple
    stats: FrontStats
    linear_fit: FitResult | None
    erfc_fit: FitResult | None
    linear_derived: dict | None
    erfc_derived: dict | None


@dataclass(frozen=True)
class FeatureReport:
    feature: str
    surface: object
    grid: object
    contours: object
    runs: dict[int, FrontRun]


@dataclass(frozen=True)
class PipelineResult:
    config: ProjectConfig
    dataset: Dataset
    reports: dict[str, FeatureReport]
    comparison: object


def _stage(name):
    def wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise PipelineError(name, str(exc)) from exc
    return wrap


def data_bbox(dataset: Dataset, pad_km: float = BBOX_PAD_KM):
    xy = np.array([(loc.x_km, loc.y_km) for loc in dataset.localities])
    return (float(xy[:, 0].min() - pad_km), float(xy[:, 1].min() - pad_km),
            float(xy[:, 0].max() + pad_km), float(xy[:, 1].max() + pad_km))


def analyze_feature(dataset: Dataset, feature: str,
                    config: ProjectConfig) -> FeatureReport:
    surface = _stage("surface")(build_surface, dataset, feature)
    grid = _stage("rasterize")(rasterize, surface, data_bbox(dataset),
                               config.grid_nx, config.grid_ny)
    contours = _stage("contours")(extract_contours, grid, config.levels)

    runs = {}
    for n in config.n_paths:
        starts = _stage("sample_starts")(sample_starts, contours, 0.9, n,
                                         config.seed)
        paths = []
        for start in starts:
            try:
                paths.append(trace_gradient_line(surface, contours, start,
                                                 snap_km=config.snap_km))
            except FieldError as exc:
                raise PipelineError("trace", str(exc)) from exc
        stats = _stage("front_stats")(front_stats, paths)
        points = points_from_stats(stats)
        linear_fit = erfc_fit = None
        linear_derived = erfc_derived = None
        try:
            linear_fit = fit_linear(points)
            linear_derived = derived_quantities(linear_fit, config.tau)
        except FittingError:
            pass
        try:
            erfc_fit = fit_erfc(points)
            erfc_derived = derived_quantities(erfc_fit, config.tau)
        except FittingError as exc:
            erfc_fit = exc.best
            if erfc_fit is not None:
                erfc_derived = derived_quantities(erfc_fit, config.tau)
        if linear_fit is None and erfc_fit is None:
            raise PipelineError("fit", f"no model could be fitted for "
                                       f"{feature!r} at N={n}")
        runs[n] = FrontRun(n_requested=n, seed=config.seed,
                           paths=tuple(paths), stats=stats,
                           linear_fit=linear_fit, erfc_fit=erfc_fit,
                           linear_derived=linear_derived,
                           erfc_derived=erfc_derived)
    return FeatureReport(feature=feature, surface=surface, grid=grid,
                         contours=contours, runs=runs)


def run_pipeline(dataset: Dataset, config: ProjectConfig) -> PipelineResult:
    features = config.features or dataset.features
    for f in features:
        if f not in dataset.features:
            raise PipelineError("ingest", f"unknown feature {f!r}")
    reports = {}
    for feature in features:
        reports[feature] = analyze_feature(dataset, feature, config)
    entries = {}
    for feature in features:
        for n, run in reports[feature].runs.items():
            entries[(feature, n)] = {
                "linear": run.linear_fit,
                "erfc": run.erfc_fit,
                "width": float(run.stats.w),
            }
    comparison = compare_models(entries)
    return PipelineResult(config=config, dataset=dataset, reports=reports,
                         comparison=comparison)


# ---------------------------------------------------------------------------
# deterministic writers


def stats_csv(run: FrontRun) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "mean_delta_km", "var_delta_km2",
                     "mean_distance_km"])
    # the j-th segment spans levels[j] -> levels[j+1]
    writer.writerow([f"{run.stats.levels[0]:.1f}", "", "", f"{0.0:.6f}"])
    for j in range(len(run.stats.mean_delta)):
        writer.writerow([f"{run.stats.levels[j + 1]:.1f}",
                         f"{run.stats.mean_delta[j]:.6f}",
                         f"{run.stats.var_delta[j]:.6f}",
                         f"{run.stats.mean_distance[j + 1]:.6f}"])
    return buf.getvalue()


def report_json(result: PipelineResult) -> str:
    out = {"features": {}}
    for feature, report in sorted(result.reports.items()):
        runs = {}
        for n, run in sorted(report.runs.items()):
            entry = {
                "n_requested": run.n_requested,
                "n_paths": run.stats.n_paths,
                "n_truncated": run.stats.n_truncated,
                "w_measured_km": float(run.stats.w),
            }
            if run.linear_fit is not None:
                entry["linear"] = {
                    "params": run.linear_fit.params,
                    "reduced_chi2": run.linear_fit.reduced_chi2,
                    "derived": run.linear_derived,
                }
            if run.erfc_fit is not None:
                entry["erfc"] = {
                    "params": run.erfc_fit.params,
                    "reduced_chi2": run.erfc_fit.reduced_chi2,
                    "derived": run.erfc_derived,
                }
            runs[str(n)] = entry
        out["features"][feature] = {"runs": runs}
    out["comparison"] = [
        {"feature": r.feature, "n": r.n, "linear": r.linear_chi2,
         "erfc": r.erfc_chi2, "width_km": r.width_km, "favored": r.favored}
        for r in result.comparison.rows]
    return json.dumps(out, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_outputs(result: PipelineResult, out_dir) -> list[Path]:
    """All pipeline artifacts under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    origin = result.dataset.origin
    written = []

    def emit(name: str, text: str):
        path = out / name
        path.write_text(text, encoding="utf-8", newline="")
        written.append(path)

    for feature, report in sorted(result.reports.items()):
        emit(f"contours_{feature}.geojson",
             geojson.dumps(geojson.contours_collection(
                 report.contours, feature, origin)))
        emit(f"localities_{feature}.geojson",
             geojson.dumps(geojson.localities_collection(
                 result.dataset, feature)))
        for n, run in sorted(report.runs.items()):
            emit(f"stats_{feature}_N{n}.csv", stats_csv(run))
            emit(f"paths_{feature}_N{n}.geojson",
                 geojson.dumps(geojson.paths_collection(
                     run.paths, feature, origin)))
    emit("comparison.csv", result.comparison.to_csv())
    emit("comparison.txt", result.comparison.to_text())
    emit("report.json", report_json(result))
    return written
