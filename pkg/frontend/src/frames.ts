import type { SimManifest } from './types.js';

/** Decode one binary simulation frame per the manifest's declared layout
 * (row-major little-endian float32). A DataView is used so the result is
 * correct on any host byte order. */
export function decodeFrame(
  buffer: ArrayBuffer,
  manifest: SimManifest,
): Float32Array {
  if (manifest.dtype !== 'float32-le') {
    throw new Error(`unsupported frame dtype ${manifest.dtype}`);
  }
  const n = manifest.nx * manifest.ny;
  if (buffer.byteLength !== 4 * n) {
    throw new Error(
      `frame is ${buffer.byteLength} bytes, expected ${4 * n}`,
    );
  }
  const view = new DataView(buffer);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = view.getFloat32(4 * i, true);
  }
  return out;
}

/** Value at grid cell (ix, iy) of a decoded row-major frame. */
export function frameValue(
  frame: Float32Array,
  manifest: SimManifest,
  ix: number,
  iy: number,
): number {
  return frame[iy * manifest.nx + ix];
}

/** Last valid slider position for a run. */
export function lastFrameIndex(manifest: SimManifest): number {
  return manifest.frames.length - 1;
}

/** Clamp a requested frame index into the run's valid range. */
export function clampFrameIndex(manifest: SimManifest, index: number): number {
  return Math.max(0, Math.min(lastFrameIndex(manifest), Math.round(index)));
}
