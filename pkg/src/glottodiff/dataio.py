"""Loading, validation and planar projection of point feature observations.

Input files are UTF-8 CSV tables with header ``id,lon,lat,<feature>,...``;
feature cells are 0, 1 or empty (missing).  Localities are projected into a
local equirectangular frame (kilometers) around a dataset origin so that all
downstream geometry works on a flat plane.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

EARTH_RADIUS_KM = 6371.0088


class DatasetError(ValueError):
    """Malformed or inconsistent input data."""


def project(lon_deg: float, lat_deg: float,
            origin: tuple[float, float]) -> tuple[float, float]:
    """Local equirectangular projection to kilometers; origin maps to (0, 0).

    x = R cos(lat0) dlon,  y = R dlat (angles in radians).  Error stays below
    0.5% over the few-degree extents this toolkit targets.
    """
    _check_coord(lon_deg, lat_deg)
    lon0, lat0 = origin
    x = EARTH_RADIUS_KM * math.cos(math.radians(lat0)) * math.radians(lon_deg - lon0)
    y = EARTH_RADIUS_KM * math.radians(lat_deg - lat0)
    return x, y


def unproject(x_km: float, y_km: float,
              origin: tuple[float, float]) -> tuple[float, float]:
    """Algebraic inverse of :func:`project`."""
    lon0, lat0 = origin
    lat = lat0 + math.degrees(y_km / EARTH_RADIUS_KM)
    lon = lon0 + math.degrees(x_km / (EARTH_RADIUS_KM * math.cos(math.radians(lat0))))
    return lon, lat


def _check_coord(lon_deg: float, lat_deg: float) -> None:
    if not (-180.0 <= lon_deg <= 180.0):
        raise DatasetError(f"longitude {lon_deg} out of range [-180, 180]")
    if not (-90.0 <= lat_deg <= 90.0):
        raise DatasetError(f"latitude {lat_deg} out of range [-90, 90]")


@dataclass(frozen=True)
class Locality:
    id: str
    lon_deg: float
    lat_deg: float
    x_km: float
    y_km: float


@dataclass(frozen=True)
class FeatureObservation:
    locality_id: str
    feature: str
    value: float


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of localities and per-feature observations.

    Values are in [0, 1]; CSV-loaded data is strictly binary, synthetic
    datasets built in code may carry fractional values.
    """

    origin: tuple[float, float]
    localities: tuple[Locality, ...]
    features: tuple[str, ...]
    observations: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        ids = {loc.id for loc in self.localities}
        if len(ids) != len(self.localities):
            raise DatasetError("duplicate locality ids")
        for (loc_id, feat), value in self.observations.items():
            if loc_id not in ids:
                raise DatasetError(f"observation references unknown locality {loc_id!r}")
            if feat not in self.features:
                raise DatasetError(f"observation references unknown feature {feat!r}")
            if not (0.0 <= value <= 1.0):
                raise DatasetError(f"observation value {value} outside [0, 1]")

    def locality(self, loc_id: str) -> Locality:
        for loc in self.localities:
            if loc.id == loc_id:
                return loc
        raise KeyError(loc_id)

    def feature_points(self, feature: str):
        """(N, 2) projected coordinates and (N,) values observed for feature."""
        if feature not in self.features:
            raise DatasetError(f"unknown feature {feature!r}")
        xy, values = [], []
        for loc in self.localities:
            v = self.observations.get((loc.id, feature))
            if v is not None:
                xy.append((loc.x_km, loc.y_km))
                values.append(v)
        return np.asarray(xy, dtype=float), np.asarray(values, dtype=float)


def make_dataset(points_lonlat, features: dict[str, list[float | None]],
                 origin: tuple[float, float] | None = None,
                 ids: list[str] | None = None) -> Dataset:
    """Assemble a Dataset from raw arrays (used for synthetic data).

    ``features`` maps a label to per-locality values (None = missing).
    """
    points_lonlat = [(float(a), float(b)) for a, b in points_lonlat]
    if origin is None:
        origin = (sum(p[0] for p in points_lonlat) / len(points_lonlat),
                  sum(p[1] for p in points_lonlat) / len(points_lonlat))
    if ids is None:
        ids = [f"L{i}" for i in range(len(points_lonlat))]
    localities = []
    for loc_id, (lon, lat) in zip(ids, points_lonlat):
        x, y = project(lon, lat, origin)
        localities.append(Locality(loc_id, lon, lat, x, y))
    observations = {}
    for feat, vals in features.items():
        for loc, v in zip(localities, vals):
            if v is not None:
                observations[(loc.id, feat)] = float(v)
    return Dataset(origin=origin, localities=tuple(localities),
                   features=tuple(features), observations=observations)


def load_dataset(path, origin: tuple[float, float] | None = None) -> Dataset:
    """Load a CSV dataset; origin defaults to the centroid of all localities."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 3 or header[0] != "id" or header[1] != "lon" or header[2] != "lat":
            raise DatasetError(f"{path}: header must start with 'id,lon,lat'")
        feature_names = header[3:]
        seen_ids: dict[str, int] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"{path}: malformed row at line {lineno}")
            loc_id = row[0].strip()
            if loc_id in seen_ids:
                raise DatasetError(
                    f"{path}: duplicate locality id {loc_id!r} at line {lineno}")
            seen_ids[loc_id] = lineno
            try:
                lon = float(row[1])
                lat = float(row[2])
            except ValueError:
                raise DatasetError(
                    f"{path}: bad coordinate at line {lineno}") from None
            _check_coord(lon, lat)
            values: list[float | None] = []
            for feat, cell in zip(feature_names, row[3:]):
                cell = cell.strip()
                if cell == "":
                    values.append(None)
                elif cell in ("0", "1"):
                    values.append(float(cell))
                else:
                    raise DatasetError(
                        f"{path}: feature cell {cell!r} at line {lineno} "
                        "must be 0, 1 or empty")
            rows.append((loc_id, lon, lat, values))

    if not rows:
        raise DatasetError(f"{path}: no data rows")
    if origin is None:
        origin = (sum(r[1] for r in rows) / len(rows),
                  sum(r[2] for r in rows) / len(rows))
    return make_dataset([(r[1], r[2]) for r in rows],
                        {feat: [r[3][i] for r in rows]
                         for i, feat in enumerate(feature_names)},
                        origin=origin, ids=[r[0] for r in rows])
