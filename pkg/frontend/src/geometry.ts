/** Pure 2D helpers for the map view and lasso selection. */

export interface Transform {
  scale: number;
  tx: number;
  ty: number;
}

/** Fit world-coordinate bounds into a pixel viewport with padding. */
export function fitTransform(
  points: [number, number][],
  width: number,
  height: number,
  pad = 20,
): Transform {
  if (points.length === 0) return { scale: 1, tx: width / 2, ty: height / 2 };
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    if (x < minX) minX = x;
    if (y < minY) minY = y;
    if (x > maxX) maxX = x;
    if (y > maxY) maxY = y;
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
  return {
    scale,
    tx: pad - minX * scale + (width - 2 * pad - spanX * scale) / 2,
    ty: pad - minY * scale + (height - 2 * pad - spanY * scale) / 2,
  };
}

export function toScreen(t: Transform, x: number, y: number): [number, number] {
  return [x * t.scale + t.tx, y * t.scale + t.ty];
}

export function toWorld(t: Transform, sx: number, sy: number): [number, number] {
  return [(sx - t.tx) / t.scale, (sy - t.ty) / t.scale];
}

/** Ray casting point-in-polygon. */
export function pointInPolygon(x: number, y: number, polygon: [number, number][]): boolean {
  let inside = false;
  const n = polygon.length;
  for (let i = 0; i < n; i++) {
    const [x1, y1] = polygon[i];
    const [x2, y2] = polygon[(i + 1) % n];
    if (y1 > y !== y2 > y) {
      const xCross = x1 + ((y - y1) * (x2 - x1)) / (y2 - y1);
      if (x < xCross) inside = !inside;
    }
  }
  return inside;
}

/** Indices of points inside the polygon. */
export function pointsInPolygon(
  points: [number, number][],
  polygon: [number, number][],
): number[] {
  const hits: number[] = [];
  for (let i = 0; i < points.length; i++) {
    if (pointInPolygon(points[i][0], points[i][1], polygon)) hits.push(i);
  }
  return hits;
}
