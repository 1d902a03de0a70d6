/** Continuous blue-red colormap: a g_index of 1 renders pure blue, 0 pure
 * red, and intermediate values blend linearly (g*blue + (1-g)*red). */

const BLUE: [number, number, number] = [0, 0, 255];
const RED: [number, number, number] = [255, 0, 0];

export function colorFor(g: number): string {
  const t = Math.max(0, Math.min(1, g));
  const mix = (b: number, r: number) => Math.round(t * b + (1 - t) * r);
  return `rgb(${mix(BLUE[0], RED[0])},${mix(BLUE[1], RED[1])},${mix(
    BLUE[2],
    RED[2],
  )})`;
}

/** Binary marker convention: present (1) is blue, absent (0) is red. */
export function markerColor(value: number): 'blue' | 'red' {
  return value >= 0.5 ? 'blue' : 'red';
}
