import { markerColor } from './colormap.js';
import type { FeatureCollection, LocalityFeature } from './types.js';

export interface MarkerSpec {
  id: string;
  lon: number;
  lat: number;
  value: number;
  color: 'blue' | 'red';
}

/** One marker per surveyed locality; blue where the feature is present,
 * red where it is absent. */
export function buildMarkers(
  collection: FeatureCollection<LocalityFeature>,
): MarkerSpec[] {
  return collection.features.map((f) => ({
    id: f.properties.id,
    lon: f.geometry.coordinates[0],
    lat: f.geometry.coordinates[1],
    value: f.properties.value,
    color: markerColor(f.properties.value),
  }));
}

/** Notice text for the layer; empty features get an explicit hint rather
 * than a silently blank map. */
export function layerNotice(markers: MarkerSpec[], feature: string): string {
  if (markers.length === 0) {
    return `no observations for feature "${feature}"`;
  }
  const blue = markers.filter((m) => m.color === 'blue').length;
  return `${markers.length} localities (${blue} present, ${
    markers.length - blue
  } absent)`;
}
