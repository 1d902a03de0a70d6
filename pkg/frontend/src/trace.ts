import { ApiError } from './api.js';
import type { GradientLineFeature } from './types.js';

export interface SegmentRow {
  from: number; // upper contour level of the interval
  to: number; // lower contour level
  deltaKm: number; // service-reported interval width
}

export interface SegmentTable {
  rows: SegmentRow[];
  totalKm: number; // service-reported total path length
  status: 'complete' | 'truncated';
  truncatedLevel: number | null;
}

/** Side-panel table for one traced gradient line. Every number comes
 * straight from the service payload; the client only pairs each segment
 * with its bounding levels. */
export function buildSegmentTable(
  feature: GradientLineFeature,
): SegmentTable {
  const { levels, segment_km, total_km, status, truncated_level } =
    feature.properties;
  const rows = segment_km.map((deltaKm, j) => ({
    from: levels[j],
    to: levels[j + 1],
    deltaKm,
  }));
  return {
    rows,
    totalKm: total_km,
    status,
    truncatedLevel: truncated_level,
  };
}

/** Toast text for a failed trace; 422 means the click was outside the
 * surveyed hull and nothing should be drawn. */
export function traceErrorToast(err: unknown): string {
  if (err instanceof ApiError && err.status === 422) {
    return err.detail; // "point outside surveyed region"
  }
  if (err instanceof ApiError) {
    return `trace failed: ${err.detail}`;
  }
  return 'trace failed: service unreachable';
}

/** Accumulated traces; clicks append, "clear" empties the list. */
export class TraceList {
  private paths: GradientLineFeature[] = [];

  add(path: GradientLineFeature): void {
    this.paths.push(path);
  }

  clear(): void {
    this.paths = [];
  }

  all(): readonly GradientLineFeature[] {
    return this.paths;
  }

  /** Default corridor for the cross-section plot: the longest trace. */
  longest(): GradientLineFeature | null {
    let best: GradientLineFeature | null = null;
    for (const p of this.paths) {
      if (best === null || p.properties.total_km > best.properties.total_km) {
        best = p;
      }
    }
    return best;
  }
}
