import type { FrontStatsPayload } from './types.js';

export interface FitPanelLine {
  model: string;
  reducedChi2: number;
  widthKm: number;
  etaKm2PerYr: number | null;
}

/** Fit summary lines for the side panel, straight from the service's
 * front-statistics payload. */
export function buildFitPanel(stats: FrontStatsPayload): FitPanelLine[] {
  const lines: FitPanelLine[] = [];
  for (const model of ['linear', 'erfc'] as const) {
    const fit = stats.fits[model];
    if (fit === undefined) continue;
    lines.push({
      model,
      reducedChi2: fit.reduced_chi2,
      widthKm: fit.derived.w_fit,
      etaKm2PerYr: fit.derived.eta,
    });
  }
  return lines;
}

export function formatFitPanel(lines: FitPanelLine[]): string {
  if (lines.length === 0) return 'no fits available';
  return lines
    .map((l) => {
      const eta =
        l.etaKm2PerYr === null ? '' : `, eta ${l.etaKm2PerYr.toFixed(4)}`;
      return (
        `${l.model}: chi2/dof ${l.reducedChi2.toFixed(3)}, ` +
        `w ${l.widthKm.toFixed(2)} km${eta}`
      );
    })
    .join('\n');
}
