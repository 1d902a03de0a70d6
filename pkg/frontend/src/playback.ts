import type { EvolutionPayload, SimManifest } from './types.js';
import { clampFrameIndex, lastFrameIndex } from './frames.js';

export interface OverlayPoint {
  s: number;
  value: number;
}

/** Cross-section overlay for the analytic evolution: the (s, G) samples
 * exactly as served, ready for a polyline plot. */
export function buildEvolutionOverlay(
  payload: EvolutionPayload,
): OverlayPoint[] {
  return payload.s_km.map((s, i) => ({ s, value: payload.value[i] }));
}

export interface SliderSpec {
  min: number;
  max: number;
  value: number;
  disabled: boolean;
  hint: string;
}

/** Frame slider for a simulation run; a missing run disables the slider
 * with a hint instead of rendering a broken control. */
export function simulationSlider(
  manifest: SimManifest | null,
  requested: number,
): SliderSpec {
  if (manifest === null || manifest.frames.length === 0) {
    return {
      min: 0,
      max: 0,
      value: 0,
      disabled: true,
      hint: 'no simulation run loaded',
    };
  }
  const value = clampFrameIndex(manifest, requested);
  return {
    min: 0,
    max: lastFrameIndex(manifest),
    value,
    disabled: false,
    hint: `t = ${manifest.frames[value].t} yr`,
  };
}
