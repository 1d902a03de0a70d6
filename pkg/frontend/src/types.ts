/** Payload shapes served by the analysis API. The client treats every
 * number in these structures as authoritative: no value displayed in the
 * UI is computed locally, only reformatted. */

export interface PointGeometry {
  type: 'Point';
  coordinates: [number, number];
}

export interface LineStringGeometry {
  type: 'LineString';
  coordinates: [number, number][];
}

export interface MultiLineStringGeometry {
  type: 'MultiLineString';
  coordinates: [number, number][][];
}

export interface LocalityFeature {
  type: 'Feature';
  geometry: PointGeometry;
  properties: { id: string; feature: string; value: number };
}

export interface ContourFeature {
  type: 'Feature';
  geometry: MultiLineStringGeometry;
  properties: { feature: string; level: number };
}

export interface GradientLineFeature {
  type: 'Feature';
  geometry: LineStringGeometry;
  properties: {
    levels: number[];
    segment_km: number[];
    total_km: number;
    status: 'complete' | 'truncated';
    truncated_level: number | null;
    feature?: string;
  };
  origin?: [number, number];
}

export interface FeatureCollection<F> {
  type: 'FeatureCollection';
  origin: [number, number];
  features: F[];
}

export interface FitEntry {
  params: Record<string, number>;
  reduced_chi2: number;
  derived: { k_tau: number; w_fit: number; eta: number | null };
}

export interface FrontStatsPayload {
  feature: string;
  n: number;
  seed: number;
  n_paths: number;
  n_truncated: number;
  levels: number[];
  mean_delta_km: number[];
  var_delta_km2: number[];
  mean_distance_km: number[];
  w_km: number;
  fits: { linear?: FitEntry; erfc?: FitEntry };
}

export interface EvolutionPayload {
  feature: string;
  model: string;
  t: number;
  law: string;
  lam: number;
  s_km: number[];
  value: number[];
}

export interface SimFrameEntry {
  index: number;
  t: number;
  file: string;
}

export interface SimManifest {
  run: string;
  bbox: [number, number, number, number];
  nx: number;
  ny: number;
  dtype: string;
  order: string;
  frames: SimFrameEntry[];
}
