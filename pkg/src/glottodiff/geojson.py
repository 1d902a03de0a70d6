"""GeoJSON (RFC 7946) serialization of pipeline geometry.

All coordinates are emitted in [lon, lat] order; every FeatureCollection
carries the dataset's projection origin as a foreign member so that the km
coordinates used internally round-trip exactly.
"""

from __future__ import annotations

import json

from .dataio import Dataset, unproject


def _lonlat(x: float, y: float, origin) -> list[float]:
    lon, lat = unproject(x, y, origin)
    return [lon, lat]


def _collection(features, origin) -> dict:
    return {
        "type": "FeatureCollection",
        "origin": [origin[0], origin[1]],
        "features": features,
    }


def localities_collection(dataset: Dataset, feature: str) -> dict:
    """Point features with the observed value per surveyed locality."""
    feats = []
    for loc in dataset.localities:
        value = dataset.observations.get((loc.id, feature))
        if value is None:
            continue
        feats.append({
            "type": "Feature",
            "geometry": {"type": "Point",
                         "coordinates": [loc.lon_deg, loc.lat_deg]},
            "properties": {"id": loc.id, "feature": feature, "value": value},
        })
    return _collection(feats, dataset.origin)


def contours_collection(contours, feature: str, origin) -> dict:
    """One MultiLineString feature per contour level."""
    feats = []
    for level in sorted(contours.lines, reverse=True):
        coords = [[_lonlat(x, y, origin) for x, y in poly.points]
                  for poly in contours.lines[level]]
        feats.append({
            "type": "Feature",
            "geometry": {"type": "MultiLineString", "coordinates": coords},
            "properties": {"feature": feature, "level": level},
        })
    return _collection(feats, origin)


def gradient_line_feature(path, origin) -> dict:
    """A traced gradient line as a LineString with per-segment widths."""
    coords = [_lonlat(x, y, origin) for x, y in path.crossings]
    return {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": coords},
        "properties": {
            "levels": list(path.levels),
            "segment_km": [float(v) for v in path.segment_lengths],
            "total_km": float(path.total_length),
            "status": path.status,
            "truncated_level": path.truncated_level,
        },
    }


def paths_collection(paths, feature: str, origin) -> dict:
    feats = []
    for path in paths:
        feat = gradient_line_feature(path, origin)
        feat["properties"]["feature"] = feature
        feats.append(feat)
    return _collection(feats, origin)


def dumps(obj: dict) -> str:
    """Deterministic serialization: sorted keys, minimal separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"
