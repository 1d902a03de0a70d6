import type {
  ContourFeature,
  EvolutionPayload,
  FeatureCollection,
  FrontStatsPayload,
  GradientLineFeature,
  LocalityFeature,
  SimManifest,
} from './types.js';

/** Error carrying the HTTP status and the service's `detail` message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
  }
}

async function raiseForStatus(resp: Response): Promise<void> {
  if (resp.ok) return;
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (typeof body.detail === 'string') detail = body.detail;
  } catch {
    /* non-JSON error body: keep the status text */
  }
  throw new ApiError(resp.status, detail);
}

/** Thin fetch wrapper over the analysis service; one method per endpoint. */
export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path);
    await raiseForStatus(resp);
    return (await resp.json()) as T;
  }

  features(): Promise<{ features: string[] }> {
    return this.getJson('/api/features');
  }

  localities(feature: string): Promise<FeatureCollection<LocalityFeature>> {
    return this.getJson(
      `/api/localities?feature=${encodeURIComponent(feature)}`,
    );
  }

  contours(
    feature: string,
    levels?: number[],
  ): Promise<FeatureCollection<ContourFeature>> {
    let path = `/api/contours?feature=${encodeURIComponent(feature)}`;
    if (levels !== undefined) path += `&levels=${levels.join(',')}`;
    return this.getJson(path);
  }

  async traceGradientLine(
    feature: string,
    lon: number,
    lat: number,
  ): Promise<GradientLineFeature> {
    const resp = await fetch(this.baseUrl + '/api/gradient-line', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ feature, lon, lat }),
    });
    await raiseForStatus(resp);
    return (await resp.json()) as GradientLineFeature;
  }

  frontStats(
    feature: string,
    n?: number,
    seed?: number,
  ): Promise<FrontStatsPayload> {
    let path = `/api/front-stats?feature=${encodeURIComponent(feature)}`;
    if (n !== undefined) path += `&n=${n}`;
    if (seed !== undefined) path += `&seed=${seed}`;
    return this.getJson(path);
  }

  evolution(
    feature: string,
    model: string,
    t: number,
    law: string,
    lam?: number,
    theta?: number,
  ): Promise<EvolutionPayload> {
    let path =
      `/api/evolution?feature=${encodeURIComponent(feature)}` +
      `&model=${model}&t=${t}&law=${law}`;
    if (lam !== undefined) path += `&lam=${lam}`;
    if (theta !== undefined) path += `&theta=${theta}`;
    return this.getJson(path);
  }

  simulationManifest(runId: string): Promise<SimManifest> {
    return this.getJson(
      `/api/simulation/${encodeURIComponent(runId)}/frames`,
    );
  }

  async simulationFrame(runId: string, index: number): Promise<ArrayBuffer> {
    const resp = await fetch(
      this.baseUrl +
        `/api/simulation/${encodeURIComponent(runId)}/frames/${index}`,
    );
    await raiseForStatus(resp);
    return resp.arrayBuffer();
  }
}
