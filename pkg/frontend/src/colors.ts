/** Shared palette. Yellow marks absence and must outshine everything else;
 * dark pink marks selection and significant difference. */

export const COLORS = {
  yellow: '#ffd500',
  darkPink: '#d6006f',
  pinkSoft: '#f7c2dd',
  grey: '#b7bdc4',
  greyDark: '#6b7280',
  blue: '#3b7dd8',
  green: '#3fa45b',
  black: '#1f2328',
  zoneFill: 'rgba(255, 213, 0, 0.25)',
  zoneStroke: '#e6c000',
  background: '#ffffff',
};

/** Hue for an entity's color-path buckets: first bucket blue, second
 * green, further ones cycled; multi-valued entities blend. */
export function bucketColor(bucketIndex: number): string {
  const cycle = [COLORS.blue, COLORS.green, '#b88a2e', '#7b5ad6', '#2ea8a0'];
  return cycle[bucketIndex % cycle.length];
}

export function blendColors(hexes: string[]): string {
  if (hexes.length === 0) return COLORS.greyDark;
  if (hexes.length === 1) return hexes[0];
  let r = 0;
  let g = 0;
  let b = 0;
  for (const hex of hexes) {
    r += parseInt(hex.slice(1, 3), 16);
    g += parseInt(hex.slice(3, 5), 16);
    b += parseInt(hex.slice(5, 7), 16);
  }
  const n = hexes.length;
  const toHex = (v: number) => Math.round(v / n).toString(16).padStart(2, '0');
  return `#${toHex(r)}${toHex(g)}${toHex(b)}`;
}
