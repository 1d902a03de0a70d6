"""Command-line interface: ingest, pipeline, evolve, simulate, serve, export.

Exit codes: 0 success, 1 internal/stage failure, 2 input error.  The output
root defaults to the GLOTTODIFF_OUTPUT environment variable (then "out"),
and every config default can be overridden by a flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ProjectConfig, load_config
from .dataio import DatasetError, load_dataset
from .models import (ConvectionLaw, ErfcParams, LinearParams, ModelError,
                     erfc_evolution, linear_profile)
from .pipeline import PipelineError, run_pipeline, write_outputs
from .sim2d import (RadialDiffusivity, SchmidtSource, SimConfig, SimError,
                    read_frame, run, write_frames, write_text_grid, SimState)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _output_root(args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(os.environ.get("GLOTTODIFF_OUTPUT", "out"))


def _load_project_config(args) -> ProjectConfig:
    overrides = {}
    for key in ("seed", "tau", "lam", "theta"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "features", None):
        overrides["features"] = tuple(args.features.split(","))
    if getattr(args, "n_paths", None):
        overrides["n_paths"] = tuple(int(v) for v in args.n_paths.split(","))
    return load_config(getattr(args, "config", None), overrides)


def cmd_ingest(args) -> int:
    try:
        dataset = load_dataset(args.input)
    except (OSError, DatasetError) as exc:
        print(f"error: stage 'ingest': {exc}", file=sys.stderr)
        return EXIT_INPUT
    counts = {f: sum(1 for (_, feat) in dataset.observations if feat == f)
              for f in dataset.features}
    print(f"localities: {len(dataset.localities)}")
    print(f"origin: {dataset.origin[0]:.6f},{dataset.origin[1]:.6f}")
    for feature in dataset.features:
        print(f"feature {feature}: {counts[feature]} observations")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    try:
        config = _load_project_config(args)
    except (OSError, ConfigError) as exc:
        print(f"error: stage 'config': {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        dataset = load_dataset(args.input)
    except (OSError, DatasetError) as exc:
        print(f"error: stage 'ingest': {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _output_root(args)
    try:
        result = run_pipeline(dataset, config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    written = write_outputs(result, out)
    for path in written:
        print(path)
    return EXIT_OK


def cmd_evolve(args) -> int:
    try:
        law = ConvectionLaw(args.law,
                            args.theta if args.law == "special" else None)
        times = [float(v) for v in args.times.split(",")]
        lo, hi, n = (float(v) for v in args.s_range.split(":"))
        s = np.linspace(lo, hi, int(n))
        if args.model == "erfc":
            params = ErfcParams(tau=args.tau, kappa=args.kappa, s0=args.s0,
                                lam=args.lam, f_kind=law)
            profiles = {t: erfc_evolution(s, t, params) for t in times}
        elif args.model == "linear":
            params = LinearParams(chi=args.chi, tau=args.tau, s1=args.s1,
                                  lam=args.lam, f_kind=law)
            profiles = {t: linear_profile(s, t, params) for t in times}
        else:
            raise ModelError(f"unknown model {args.model!r}")
    except (ModelError, ValueError) as exc:
        print(f"error: stage 'evolve': {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _output_root(args)
    out.mkdir(parents=True, exist_ok=True)
    for t in times:
        path = out / f"evolve_{args.model}_t{t:g}.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["s_km", "value"])
            for sv, gv in zip(s, profiles[t]):
                writer.writerow([f"{sv:.6f}", f"{gv:.9f}"])
        print(path)
    return EXIT_OK


def parse_scenario(path) -> SimConfig:
    """SimConfig from a flat key=value scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    kw: dict = {"schmidt_sources": [], "islands": []}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SimError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        try:
            if key == "bbox":
                kw["bbox"] = tuple(float(v) for v in raw.split(","))
            elif key in ("nx", "ny"):
                kw[key] = int(raw)
            elif key in ("t_end", "dt", "initial_fill_km"):
                kw[key] = float(raw)
            elif key == "snapshot_times":
                kw["snapshot_times"] = tuple(
                    float(v) for v in raw.split(",") if v.strip())
            elif key == "eta":
                kw["diffusivity"] = float(raw)
            elif key == "eta_radial":
                eta_hat, a, cx, cy = (float(v) for v in raw.split(","))
                kw["diffusivity"] = RadialDiffusivity(eta_hat, a, (cx, cy))
            elif key == "velocity":
                vx, vy = (float(v) for v in raw.split(","))
                kw["velocity"] = (vx, vy)
            elif key == "tidal_edges":
                kw["tidal_edges"] = tuple(
                    v.strip() for v in raw.split(",") if v.strip())
            elif key == "source":
                parts = [float(v) for v in raw.split(",")]
                if len(parts) not in (3, 4):
                    raise ValueError("source needs cx,cy,t_trigger[,r_clamp]")
                kw["schmidt_sources"].append(SchmidtSource(
                    center=(parts[0], parts[1]), t_trigger=parts[2],
                    r_clamp=parts[3] if len(parts) == 4 else None))
            elif key == "island":
                coords = [float(v) for v in raw.split(",")]
                if len(coords) < 6 or len(coords) % 2:
                    raise ValueError("island needs at least 3 x,y pairs")
                kw["islands"].append(tuple(zip(coords[::2], coords[1::2])))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise SimError(f"line {lineno}: {exc}") from exc
    for required in ("bbox", "nx", "ny", "t_end"):
        if required not in kw:
            raise SimError(f"scenario is missing {required!r}")
    kw["schmidt_sources"] = tuple(kw["schmidt_sources"])
    kw["islands"] = tuple(kw["islands"])
    return SimConfig(**kw)


def cmd_simulate(args) -> int:
    try:
        config = parse_scenario(args.scenario)
    except (OSError, SimError) as exc:
        print(f"error: stage 'scenario': {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        snapshots = run(config)
    except SimError as exc:
        print(f"error: stage 'simulate': {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = _output_root(args)
    manifest = write_frames(snapshots, config, out, args.run_id)
    print(manifest)
    return EXIT_OK


def cmd_serve(args) -> int:
    try:
        config = _load_project_config(args)
        dataset = load_dataset(args.input)
        from .pipeline import run_pipeline as _run
        result = _run(dataset, config)
    except (OSError, DatasetError, ConfigError) as exc:
        print(f"error: stage 'ingest': {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    from .service import create_app
    import uvicorn
    app = create_app(result, sim_dir=getattr(args, "sim_dir", None))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        frames = manifest["frames"]
        if not 0 <= args.frame < len(frames):
            raise ValueError(f"no frame {args.frame} "
                             f"(run has {len(frames)})")
        frame = frames[args.frame]
        data = read_frame(Path(args.manifest).parent / frame["file"])
        grid = data.reshape(manifest["ny"], manifest["nx"])
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: stage 'export': {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_text_grid(SimState(t=frame["t"], grid=grid), args.output)
    print(args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glottodiff",
        description="Geographic diffusion analysis of dialect features")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output directory "
                                     "(default $GLOTTODIFF_OUTPUT or ./out)")
        p.add_argument("--seed", type=int)
        p.add_argument("--tau", type=float)
        p.add_argument("--lam", type=float)
        p.add_argument("--theta", type=float)
        p.add_argument("--features", help="comma-separated feature labels")
        p.add_argument("--n-paths", dest="n_paths",
                       help="comma-separated path counts")

    p = sub.add_parser("ingest", help="validate and summarize a dataset")
    p.add_argument("input")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pipeline", help="run the full analysis pipeline")
    p.add_argument("input")
    add_common(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("evolve", help="sample analytic profile evolution")
    p.add_argument("--model", choices=("linear", "erfc"), required=True)
    p.add_argument("--law", choices=("none", "linear", "special"),
                   default="none")
    p.add_argument("--times", required=True,
                   help="comma-separated times in years")
    p.add_argument("--s-range", dest="s_range", default="-30:60:181",
                   help="lo:hi:n sampling of the distance axis")
    p.add_argument("--tau", type=float, default=1000.0)
    p.add_argument("--lam", type=float, default=50.0)
    p.add_argument("--theta", type=float, default=1100.0)
    p.add_argument("--kappa", type=float, default=0.3)
    p.add_argument("--s0", type=float, default=0.0)
    p.add_argument("--chi", type=float, default=0.14)
    p.add_argument("--s1", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("simulate", help="run a 2D scenario")
    p.add_argument("scenario")
    p.add_argument("--run-id", dest="run_id", default="run")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("input")
    add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--sim-dir", dest="sim_dir")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="convert a binary frame to text")
    p.add_argument("manifest")
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:   # pragma: no cover - last-resort guard
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
