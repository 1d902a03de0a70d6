"""HTTP facade over the analysis pipeline.

A thin, stateless-per-request JSON/GeoJSON API: every endpoint returns
exactly what the corresponding library call produces, so the service can be
golden-tested against direct library output.  Recomputed front statistics
(new N or seed) are cached by request key; pipeline artifacts themselves
are immutable.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response

from . import geojson
from .dataio import project
from .field import FieldError, front_stats, sample_starts, trace_gradient_line
from .fitting import FittingError, derived_quantities, fit_erfc, fit_linear, \
    points_from_stats
from .models import ConvectionLaw, ErfcParams, LinearParams, ModelError, \
    erfc_evolution, linear_profile
from .pipeline import PipelineResult


def _stats_payload(stats, tau):
    points = points_from_stats(stats)
    payload = {
        "n_paths": stats.n_paths,
        "n_truncated": stats.n_truncated,
        "levels": list(stats.levels),
        "mean_delta_km": [float(v) for v in stats.mean_delta],
        "var_delta_km2": [float(v) for v in stats.var_delta],
        "mean_distance_km": [float(v) for v in stats.mean_distance],
        "w_km": float(stats.w),
        "fits": {},
    }
    try:
        fit = fit_linear(points)
        payload["fits"]["linear"] = {
            "params": fit.params,
            "reduced_chi2": fit.reduced_chi2,
            "derived": derived_quantities(fit, tau),
        }
    except FittingError:
        pass
    try:
        fit = fit_erfc(points)
        payload["fits"]["erfc"] = {
            "params": fit.params,
            "reduced_chi2": fit.reduced_chi2,
            "derived": derived_quantities(fit, tau),
        }
    except FittingError:
        pass
    return payload


def create_app(result: PipelineResult, sim_dir=None) -> FastAPI:
    app = FastAPI(title="glottodiff")
    config = result.config
    origin = result.dataset.origin
    stats_cache: dict = {}

    def report_for(feature: str):
        report = result.reports.get(feature)
        if report is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown feature {feature!r}")
        return report

    @app.get("/api/features")
    def features():
        return {"features": sorted(result.reports)}

    @app.get("/api/localities")
    def localities(feature: str):
        report_for(feature)
        return geojson.localities_collection(result.dataset, feature)

    @app.get("/api/contours")
    def contours(feature: str, levels: str | None = None):
        report = report_for(feature)
        coll = geojson.contours_collection(report.contours, feature, origin)
        if levels is not None:
            try:
                wanted = {float(v) for v in levels.split(",") if v.strip()}
            except ValueError:
                raise HTTPException(status_code=400,
                                    detail=f"malformed levels {levels!r}")
            coll["features"] = [
                f for f in coll["features"]
                if any(math.isclose(f["properties"]["level"], w, abs_tol=1e-9)
                       for w in wanted)]
        return coll

    @app.post("/api/gradient-line")
    def gradient_line(body: dict):
        for key in ("feature", "lon", "lat"):
            if key not in body:
                raise HTTPException(status_code=400,
                                    detail=f"missing field {key!r}")
        report = report_for(body["feature"])
        try:
            x, y = project(float(body["lon"]), float(body["lat"]), origin)
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if math.isnan(report.surface(x, y)):
            raise HTTPException(status_code=422,
                                detail="point outside surveyed region")
        try:
            path = trace_gradient_line(report.surface, report.contours,
                                       (x, y), snap_km=float("inf"))
        except FieldError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        feat = geojson.gradient_line_feature(path, origin)
        feat["origin"] = [origin[0], origin[1]]
        return feat

    @app.get("/api/front-stats")
    def front_stats_endpoint(feature: str, n: int | None = None,
                             seed: int | None = None):
        report = report_for(feature)
        n = n if n is not None else config.n_paths[0]
        seed = seed if seed is not None else config.seed
        if n < 1:
            raise HTTPException(status_code=400, detail="n must be >= 1")
        key = (feature, n, seed)
        if key not in stats_cache:
            run = report.runs.get(n)
            if run is not None and seed == config.seed:
                stats = run.stats
            else:
                try:
                    starts = sample_starts(report.contours, 0.9, n, seed)
                    paths = [trace_gradient_line(report.surface,
                                                 report.contours, s,
                                                 snap_km=config.snap_km)
                             for s in starts]
                    stats = front_stats(paths)
                except FieldError as exc:
                    raise HTTPException(status_code=400, detail=str(exc))
            stats_cache[key] = _stats_payload(stats, config.tau)
        payload = dict(stats_cache[key])
        payload.update({"feature": feature, "n": n, "seed": seed})
        return payload

    @app.get("/api/evolution")
    def evolution(feature: str, model: str = "erfc", t: float | None = None,
                  law: str = "none", theta: float | None = None,
                  lam: float | None = None, s_min: float = -30.0,
                  s_max: float = 60.0, samples: int = 121):
        report = report_for(feature)
        t = t if t is not None else config.tau
        lam = lam if lam is not None else config.lam
        theta = theta if theta is not None else config.theta
        run = report.runs[min(report.runs)]
        try:
            f_kind = ConvectionLaw(law, theta if law == "special" else None)
            s = np.linspace(s_min, s_max, samples)
            if model == "erfc":
                if run.erfc_fit is None:
                    raise HTTPException(status_code=404,
                                        detail="no erfc fit available")
                params = ErfcParams(tau=config.tau,
                                    kappa=run.erfc_fit.params["kappa"],
                                    s0=run.erfc_fit.params["s0"],
                                    lam=lam, f_kind=f_kind)
                values = erfc_evolution(s, t, params)
            elif model == "linear":
                if run.linear_fit is None:
                    raise HTTPException(status_code=404,
                                        detail="no linear fit available")
                slope = run.linear_fit.params["slope"]
                intercept = run.linear_fit.params["intercept"]
                if slope >= 0:
                    raise HTTPException(status_code=400,
                                        detail="linear fit has no front")
                chi = 2.0 * abs(slope)
                s1 = (1.0 - intercept) / slope
                params = LinearParams(chi=chi, tau=config.tau, s1=s1,
                                      lam=lam, f_kind=f_kind)
                values = linear_profile(s, t, params)
            else:
                raise HTTPException(status_code=400,
                                    detail=f"unknown model {model!r}")
        except ModelError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"feature": feature, "model": model, "t": t, "law": law,
                "lam": lam, "s_km": [float(v) for v in s],
                "value": [float(v) for v in values]}

    def manifest_for(run_id: str) -> dict:
        if sim_dir is None:
            raise HTTPException(status_code=404, detail="no simulation runs")
        path = Path(sim_dir) / f"{run_id}_manifest.json"
        if not path.exists():
            raise HTTPException(status_code=404,
                                detail=f"unknown run {run_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    @app.get("/api/simulation/{run_id}/frames")
    def frames(run_id: str):
        return manifest_for(run_id)

    @app.get("/api/simulation/{run_id}/frames/{index}")
    def frame(run_id: str, index: int):
        manifest = manifest_for(run_id)
        if not 0 <= index < len(manifest["frames"]):
            raise HTTPException(status_code=404,
                                detail=f"no frame {index}")
        name = manifest["frames"][index]["file"]
        payload = (Path(sim_dir) / name).read_bytes()
        return Response(content=payload,
                        media_type="application/octet-stream")

    return app
