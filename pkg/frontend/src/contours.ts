import { colorFor } from './colormap.js';
import type { ContourFeature, FeatureCollection } from './types.js';

export interface ContourLayerLine {
  level: number;
  color: string;
  coordinates: [number, number][][];
}

/** Drawable contour lines, one entry per level, colored by the blue-red
 * g_index colormap and ordered from the 1.0 side down. */
export function buildContourLayer(
  collection: FeatureCollection<ContourFeature>,
  visibleLevels?: number[],
): ContourLayerLine[] {
  const visible =
    visibleLevels === undefined
      ? null
      : new Set(visibleLevels.map((v) => v.toFixed(6)));
  return collection.features
    .filter(
      (f) => visible === null || visible.has(f.properties.level.toFixed(6)),
    )
    .map((f) => ({
      level: f.properties.level,
      color: colorFor(f.properties.level),
      coordinates: f.geometry.coordinates,
    }));
}
