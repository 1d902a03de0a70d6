/** Client-side view state, round-tripped through the URL hash so a view
 * can be bookmarked; the service itself stays stateless. */

export interface ViewState {
  feature: string;
  levels: number[]; // visible contour levels, subset of the served set
  model: 'erfc' | 'linear';
  law: 'none' | 'linear' | 'special';
  time: number;
  runId: string | null;
  frameIndex: number;
}

export const DEFAULT_STATE: ViewState = {
  feature: '',
  levels: [],
  model: 'erfc',
  law: 'none',
  time: 0,
  runId: null,
  frameIndex: 0,
};

/** Clamp the evolution time into [0, tEnd] and drop levels that the
 * service does not actually provide. */
export function normalizeState(
  state: ViewState,
  servedLevels: number[],
  tEnd: number,
): ViewState {
  const served = new Set(servedLevels.map((v) => v.toFixed(6)));
  return {
    ...state,
    levels: state.levels.filter((v) => served.has(v.toFixed(6))),
    time: Math.max(0, Math.min(tEnd, state.time)),
  };
}

export function encodeHash(state: ViewState): string {
  const parts: string[] = [];
  if (state.feature) parts.push(`f=${encodeURIComponent(state.feature)}`);
  if (state.levels.length) parts.push(`l=${state.levels.join(',')}`);
  parts.push(`m=${state.model}`, `w=${state.law}`, `t=${state.time}`);
  if (state.runId) {
    parts.push(`r=${encodeURIComponent(state.runId)}`, `i=${state.frameIndex}`);
  }
  return '#' + parts.join('&');
}

export function decodeHash(hash: string): ViewState {
  const state: ViewState = { ...DEFAULT_STATE, levels: [] };
  const body = hash.startsWith('#') ? hash.slice(1) : hash;
  for (const part of body.split('&')) {
    const eq = part.indexOf('=');
    if (eq < 0) continue;
    const key = part.slice(0, eq);
    const value = decodeURIComponent(part.slice(eq + 1));
    switch (key) {
      case 'f':
        state.feature = value;
        break;
      case 'l':
        state.levels = value
          .split(',')
          .map(Number)
          .filter((v) => Number.isFinite(v));
        break;
      case 'm':
        if (value === 'erfc' || value === 'linear') state.model = value;
        break;
      case 'w':
        if (value === 'none' || value === 'linear' || value === 'special') {
          state.law = value;
        }
        break;
      case 't': {
        const t = Number(value);
        if (Number.isFinite(t)) state.time = t;
        break;
      }
      case 'r':
        state.runId = value;
        break;
      case 'i': {
        const i = Number(value);
        if (Number.isInteger(i) && i >= 0) state.frameIndex = i;
        break;
      }
    }
  }
  return state;
}
