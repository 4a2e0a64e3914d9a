/** Canvas scatter of entities with precomputed zones and lasso selection.
 *
 * Hovering a zone highlights it in yellow, shows a "+" affordance to add
 * it as a condition, and publishes the zone's missing paths so the
 * histogram can highlight their names. Clicking the map toggles lasso
 * mode; a closed lasso becomes a pending condition. Selected entities
 * render dark pink, others black; with no selection entities take their
 * color-path hue.
 */

import { COLORS, blendColors, bucketColor } from './colors.js';
import { Transform, fitTransform, pointInPolygon, pointsInPolygon, toScreen, toWorld } from './geometry.js';
import type { ViewState } from './state.js';
import type { MapPayload } from './types.js';

const POINT_RADIUS = 2.5;

export class MapView {
  private transform: Transform = { scale: 1, tx: 0, ty: 0 };
  private payload: MapPayload | null = null;
  private lassoPath: [number, number][] = [];
  private drawing = false;
  readonly plusButton = { x: 0, y: 0, visible: false, zoneId: -1 };

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly state: ViewState,
    private readonly onAddZone: (zoneId: number) => void,
    private readonly onLasso: (polygon: [number, number][], memberCount: number) => void,
  ) {
    canvas.addEventListener('mousemove', (event) => this.handleMove(event));
    canvas.addEventListener('mousedown', (event) => this.handleDown(event));
    canvas.addEventListener('mouseup', () => this.handleUp());
    canvas.addEventListener('click', (event) => this.handleClick(event));
    state.subscribe(() => this.render());
  }

  setPayload(payload: MapPayload): void {
    this.payload = payload;
    this.transform = fitTransform(payload.coordinates, this.canvas.width, this.canvas.height);
    this.render();
  }

  /** Zone under a screen position, if any. */
  zoneAt(screenX: number, screenY: number): number | null {
    if (!this.payload) return null;
    const [wx, wy] = toWorld(this.transform, screenX, screenY);
    for (const zone of this.payload.zones) {
      if (zone.boundary.length >= 3 && pointInPolygon(wx, wy, zone.boundary)) {
        return zone.zone_id;
      }
    }
    return null;
  }

  private handleMove(event: MouseEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const x = event.clientX - rect.left;
    const y = event.clientY - rect.top;
    if (this.drawing && this.state.lassoMode) {
      this.lassoPath.push(toWorld(this.transform, x, y));
      this.render();
      return;
    }
    this.state.setHoveredZone(this.zoneAt(x, y));
  }

  private handleDown(event: MouseEvent): void {
    if (!this.state.lassoMode) return;
    const rect = this.canvas.getBoundingClientRect();
    this.drawing = true;
    this.lassoPath = [
      toWorld(this.transform, event.clientX - rect.left, event.clientY - rect.top),
    ];
  }

  private handleUp(): void {
    if (!this.drawing) return;
    this.drawing = false;
    if (this.lassoPath.length >= 3 && this.payload) {
      const members = pointsInPolygon(this.payload.coordinates, this.lassoPath);
      this.onLasso([...this.lassoPath], members.length);
    }
    this.lassoPath = [];
    this.render();
  }

  private handleClick(event: MouseEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    const x = event.clientX - rect.left;
    const y = event.clientY - rect.top;
    if (this.plusButton.visible && Math.hypot(x - this.plusButton.x, y - this.plusButton.y) < 12) {
      this.onAddZone(this.plusButton.zoneId);
      return;
    }
    if (this.zoneAt(x, y) === null) {
      // clicking empty map space switches region/lasso mode
      this.state.toggleLassoMode();
    }
  }

  entityColor(entityId: number): string {
    if (this.state.current) {
      return this.state.isSelected(entityId) ? COLORS.darkPink : COLORS.black;
    }
    const color = this.payload?.color;
    if (!color) return COLORS.greyDark;
    const buckets = color.entity_buckets[entityId] ?? [];
    return blendColors(buckets.map(bucketColor));
  }

  render(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx || !this.payload) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, width, height);

    this.plusButton.visible = false;
    for (const zone of this.payload.zones) {
      if (zone.zone_id !== this.state.hoveredZone || zone.boundary.length < 3) continue;
      ctx.beginPath();
      zone.boundary.forEach(([x, y], i) => {
        const [sx, sy] = toScreen(this.transform, x, y);
        if (i === 0) ctx.moveTo(sx, sy);
        else ctx.lineTo(sx, sy);
      });
      ctx.closePath();
      ctx.fillStyle = COLORS.zoneFill;
      ctx.strokeStyle = COLORS.zoneStroke;
      ctx.lineWidth = 2;
      ctx.fill();
      ctx.stroke();
      // "+" affordance at the zone centroid
      const centroid = zone.boundary.reduce(
        (acc, [x, y]) => [acc[0] + x / zone.boundary.length, acc[1] + y / zone.boundary.length],
        [0, 0],
      );
      const [cx, cy] = toScreen(this.transform, centroid[0], centroid[1]);
      ctx.fillStyle = COLORS.darkPink;
      ctx.beginPath();
      ctx.arc(cx, cy, 10, 0, 2 * Math.PI);
      ctx.fill();
      ctx.fillStyle = '#fff';
      ctx.font = 'bold 14px sans-serif';
      ctx.textAlign = 'center';
      ctx.textBaseline = 'middle';
      ctx.fillText('+', cx, cy);
      Object.assign(this.plusButton, { x: cx, y: cy, visible: true, zoneId: zone.zone_id });
    }

    for (let i = 0; i < this.payload.coordinates.length; i++) {
      const [x, y] = this.payload.coordinates[i];
      const [sx, sy] = toScreen(this.transform, x, y);
      ctx.fillStyle = this.entityColor(i);
      ctx.beginPath();
      ctx.arc(sx, sy, POINT_RADIUS, 0, 2 * Math.PI);
      ctx.fill();
    }

    if (this.lassoPath.length >= 2) {
      ctx.beginPath();
      this.lassoPath.forEach(([x, y], i) => {
        const [sx, sy] = toScreen(this.transform, x, y);
        if (i === 0) ctx.moveTo(sx, sy);
        else ctx.lineTo(sx, sy);
      });
      ctx.strokeStyle = COLORS.darkPink;
      ctx.setLineDash([4, 3]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }
}
