import { describe, expect, it } from 'vitest';

import { clampFrameIndex, decodeFrame, frameValue } from '../src/frames.js';
import type { SimManifest } from '../src/types.js';
import { loadBinary, loadJson } from './helpers.js';

const manifest = loadJson<SimManifest>('demo_manifest.json');
const expected = loadJson<{ values: number[] }>('frame_1_expected.json');

describe('frame decoding', () => {
  it('decodes the documented float32-le row-major layout', () => {
    const frame = decodeFrame(
      loadBinary(manifest.frames[1].file),
      manifest,
    );
    expect(frame).toHaveLength(manifest.nx * manifest.ny);
    frame.forEach((v, i) => {
      expect(v).toBeCloseTo(expected.values[i], 9);
    });
  });

  it('indexes cells row-major', () => {
    const frame = decodeFrame(
      loadBinary(manifest.frames[1].file),
      manifest,
    );
    expect(frameValue(frame, manifest, 3, 2)).toBe(
      frame[2 * manifest.nx + 3],
    );
  });

  it('tidal south row is saturated, values stay within [0, 1]', () => {
    const frame = decodeFrame(
      loadBinary(manifest.frames[2].file),
      manifest,
    );
    for (let ix = 0; ix < manifest.nx; ix++) {
      expect(frameValue(frame, manifest, ix, 0)).toBeCloseTo(1.0, 6);
    }
    frame.forEach((v) => {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    });
  });

  it('rejects truncated buffers and unknown dtypes', () => {
    const buf = loadBinary(manifest.frames[0].file);
    expect(() => decodeFrame(buf.slice(0, 8), manifest)).toThrow(/bytes/);
    expect(() =>
      decodeFrame(buf, { ...manifest, dtype: 'float64-be' }),
    ).toThrow(/dtype/);
  });

  it('clamps indices into the run range', () => {
    expect(clampFrameIndex(manifest, 7)).toBe(2);
    expect(clampFrameIndex(manifest, -1)).toBe(0);
    expect(clampFrameIndex(manifest, 1.4)).toBe(1);
  });
});
