/** Map interactions: zone hit testing, lasso membership, hover wiring. */

import { describe, expect, it } from 'vitest';

import { fitTransform, pointInPolygon, pointsInPolygon, toScreen, toWorld } from '../src/geometry.js';
import { ViewState } from '../src/state.js';
import { selectionQuerySchema } from './schema.js';

describe('geometry', () => {
  it('screen transform round-trips', () => {
    const points: [number, number][] = [[-3, 2], [8, -1], [4, 9]];
    const transform = fitTransform(points, 640, 480);
    for (const [x, y] of points) {
      const [sx, sy] = toScreen(transform, x, y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(640);
      expect(sy).toBeLessThanOrEqual(480);
      const [wx, wy] = toWorld(transform, sx, sy);
      expect(wx).toBeCloseTo(x, 9);
      expect(wy).toBeCloseTo(y, 9);
    }
  });

  it('point-in-polygon on a concave shape', () => {
    const arrow: [number, number][] = [[0, 0], [4, 0], [4, 4], [2, 2], [0, 4]];
    expect(pointInPolygon(2, 1, arrow)).toBe(true);
    expect(pointInPolygon(2, 3.5, arrow)).toBe(false);
    expect(pointInPolygon(3.5, 3, arrow)).toBe(true);
  });

  it('lasso polygon captures exactly the enclosed points', () => {
    const coordinates: [number, number][] = Array.from({ length: 10 }, (_, i) => [i, 0]);
    const polygon: [number, number][] = [[3.5, -1], [6.5, -1], [6.5, 1], [3.5, 1]];
    expect(pointsInPolygon(coordinates, polygon)).toEqual([4, 5, 6]);
  });
});

describe('lasso and zone conditions from the map', () => {
  it('a closed lasso around k points yields a pending condition with k members', () => {
    const state = new ViewState();
    const coordinates: [number, number][] = Array.from({ length: 8 }, (_, i) => [i, i]);
    const polygon: [number, number][] = [[1.5, 0], [4.5, 0], [4.5, 9], [1.5, 9]];
    const members = pointsInPolygon(coordinates, polygon);
    expect(members).toEqual([2, 3, 4]);
    state.addLassoCondition(polygon);
    expect(state.pendingCount).toBe(1);
    const parsed = selectionQuerySchema.safeParse(state.buildQuery());
    expect(parsed.success).toBe(true);
  });

  it('hovering a zone exposes its missing paths for the histogram', () => {
    const state = new ViewState();
    state.zones = [
      { zone_id: 0, member_ids: [1], boundary: [], missing_path_indices: [7, 9] },
      { zone_id: 1, member_ids: [2], boundary: [], missing_path_indices: [3] },
    ];
    state.setHoveredZone(0);
    expect([...state.hoveredZoneMissingPaths()].sort()).toEqual([7, 9]);
    state.setHoveredZone(1);
    expect([...state.hoveredZoneMissingPaths()]).toEqual([3]);
    state.setHoveredZone(null);
    expect(state.hoveredZoneMissingPaths().size).toBe(0);
  });

  it('zone "+" emits a schema-valid zone condition', () => {
    const state = new ViewState();
    state.addZoneCondition(5);
    const query = state.buildQuery();
    expect(query.conditions[0]).toMatchObject({ kind: 'zone', zone_id: 5, negated: false });
    expect(selectionQuerySchema.safeParse(query).success).toBe(true);
  });
});
