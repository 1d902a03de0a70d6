"""Project configuration: defaults, flat key=value files, and overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

DEFAULT_LEVELS = tuple(round(1.0 - 0.1 * i, 10) for i in range(11))


class ConfigError(ValueError):
    """Malformed configuration input."""


@dataclass(frozen=True)
class ProjectConfig:
    input: str = ""
    features: tuple[str, ...] = ()          # empty -> all features in the data
    grid_nx: int = 200
    grid_ny: int = 200
    levels: tuple[float, ...] = DEFAULT_LEVELS
    n_paths: tuple[int, ...] = (30, 45)
    seed: int = 0
    tau: float = 1000.0                     # yr
    lam: float = 50.0                       # km
    theta: float = 1100.0                   # yr
    snap_km: float = 0.5
    output_dir: str = "out"

    def __post_init__(self):
        if (len(self.levels) < 2
                or any(b >= a for a, b in zip(self.levels, self.levels[1:]))):
            raise ConfigError("levels must be strictly decreasing")
        if not self.n_paths or any(n < 1 for n in self.n_paths):
            raise ConfigError("every N must be at least 1")
        if self.grid_nx < 2 or self.grid_ny < 2:
            raise ConfigError("grid resolution must be at least 2x2")
        if self.tau <= 0 or self.theta <= 0:
            raise ConfigError("tau and theta must be positive")


_TUPLE_FLOAT = {"levels"}
_TUPLE_INT = {"n_paths"}
_TUPLE_STR = {"features"}
_INT = {"grid_nx", "grid_ny", "seed"}
_FLOAT = {"tau", "lam", "theta", "snap_km"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _TUPLE_FLOAT:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key in _TUPLE_INT:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if key in _TUPLE_STR:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key in _INT:
            return int(raw)
        if key in _FLOAT:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return raw


def load_config(path=None, overrides: dict | None = None) -> ProjectConfig:
    """Config from a flat key=value file, with per-key overrides on top.

    Blank lines and lines starting with '#' are ignored; unknown keys are
    an error.
    """
    known = {f.name for f in fields(ProjectConfig)}
    values: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, "
                                  f"got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    for key, raw in (overrides or {}).items():
        if key not in known:
            raise ConfigError(f"unknown override {key!r}")
        values[key] = _parse_value(key, raw) if isinstance(raw, str) else raw
    return ProjectConfig(**values)
