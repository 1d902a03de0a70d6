"""Regenerate the golden service-payload fixtures used by the frontend
tests. Run from the repository root:

    python3 frontend/scripts/make_fixtures.py
"""

import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from glottodiff.config import ProjectConfig
from glottodiff.dataio import make_dataset, unproject
from glottodiff.pipeline import run_pipeline
from glottodiff.service import create_app
from glottodiff.sim2d import SimConfig, run as sim_run, write_frames

ORIGIN = (11.0, 46.0)
FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def planar_dataset():
    pts, values = [], []
    for i in range(24):
        for j in range(8):
            x = -25.0 + j * 50.0 / 7.0
            y = -22.0 + i * 44.0 / 23.0
            lon, lat = unproject(x, y, ORIGIN)
            pts.append((lon, lat))
            values.append(min(1.0, max(0.0, 1.0 - 0.07 * (y + 10.0))))
    return make_dataset(pts, {"plane": values}, origin=ORIGIN)


def dump(name, obj):
    path = FIXTURES / name
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print(path)


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    cfg = ProjectConfig(n_paths=(6,), seed=2, grid_nx=110, grid_ny=110)
    result = run_pipeline(planar_dataset(), cfg)

    sim_cfg = SimConfig(bbox=(0.0, 0.0, 8.0, 8.0), nx=8, ny=8, t_end=50.0,
                        diffusivity=0.01, tidal_edges=("south",),
                        snapshot_times=(0.0, 25.0, 50.0))
    write_frames(sim_run(sim_cfg), sim_cfg, FIXTURES, "demo")

    client = TestClient(create_app(result, sim_dir=FIXTURES))

    dump("localities.json",
         client.get("/api/localities", params={"feature": "plane"}).json())
    dump("contours.json",
         client.get("/api/contours", params={"feature": "plane"}).json())

    lon, lat = unproject(0.0, -11.0, ORIGIN)
    dump("gradient_line.json",
         client.post("/api/gradient-line",
                     json={"feature": "plane", "lon": lon,
                           "lat": lat}).json())
    resp = client.post("/api/gradient-line",
                       json={"feature": "plane", "lon": 20.0, "lat": 46.0})
    dump("gradient_line_422.json",
         {"status": resp.status_code, "body": resp.json()})

    dump("front_stats.json",
         client.get("/api/front-stats", params={"feature": "plane"}).json())

    tau = cfg.tau
    evo = client.get("/api/evolution",
                     params={"feature": "plane", "model": "erfc",
                             "t": tau, "law": "none", "lam": 0.0}).json()
    dump("evolution_tau.json", evo)
    # the fitted present-day profile sampled on the same axis, straight
    # from the pipeline's fit object (oracle for the overlay test)
    fit = result.reports["plane"].runs[6].erfc_fit
    s = np.array(evo["s_km"])
    dump("fitted_curve.json",
         {"s_km": [float(v) for v in s],
          "value": [float(v) for v in fit.predict(s)]})

    # expected decoded values for the middle frame (row-major float32)
    manifest = json.loads((FIXTURES / "demo_manifest.json").read_text())
    raw = (FIXTURES / manifest["frames"][1]["file"]).read_bytes()
    values = np.frombuffer(raw, dtype="<f4")
    dump("frame_1_expected.json", {"values": [float(v) for v in values]})


if __name__ == "__main__":
    main()
