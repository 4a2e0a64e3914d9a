/** View state and condition management.
 *
 * Every interactive affordance that creates a condition goes through the
 * add* methods here, so the emitted SelectionQuery is uniform no matter
 * where a condition came from (zone +, lasso, completeness bar, stacked
 * chart rectangle, OTHER aggregate). Conditions combine by conjunction;
 * the scope toggles between the whole set and the current selection.
 */

import type {
  Bucket,
  ComparisonFlag,
  Condition,
  Facet,
  InspectResponse,
  PathInfo,
  Scope,
  SelectionQuery,
  Zone,
} from './types.js';

export type Listener = () => void;

export interface CurrentSelection {
  entityIds: number[];
  labels: { uri: string; label: string }[];
  pseudocode: string;
  summaries: InspectResponse['summaries'];
  flags: ComparisonFlag[];
  removed: Set<number>;
}

export class ViewState {
  collectionId: string | null = null;
  paths: PathInfo[] = [];
  zones: Zone[] = [];
  hoveredZone: number | null = null;
  openPaths = new Set<number>();
  conditions: Condition[] = [];
  scope: Scope = 'whole_set';
  current: CurrentSelection | null = null;
  colorPath: number | null = null;
  labelsVisible = false;
  lassoMode = false;

  private listeners: Listener[] = [];

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** The checkbox count in the selection bar equals the pending
   * conditions, by construction. */
  get pendingCount(): number {
    return this.conditions.length;
  }

  // -- condition creators ----------------------------------------------------

  addZoneCondition(zoneId: number): void {
    this.conditions.push({ kind: 'zone', zone_id: zoneId, negated: false });
    this.emit();
  }

  addLassoCondition(polygon: [number, number][]): void {
    this.conditions.push({ kind: 'lasso', polygon, negated: false });
    this.emit();
  }

  /** Clicking a completeness bar adds a presence condition for the path. */
  addPathCondition(pathIndex: number, present = true): void {
    this.conditions.push({
      kind: 'path',
      path_index: pathIndex,
      present,
      negated: false,
    });
    this.emit();
  }

  /** Clicking a stacked-chart rectangle toggles its value condition:
   * present -> removed, absent -> added (dark pink marks the added state). */
  toggleValueCondition(pathIndex: number, facet: Facet, bucket: Bucket | 'other', other?: {
    keys: string[];
  }): void {
    const existing = this.findValueCondition(pathIndex, facet, bucket);
    if (existing >= 0) {
      this.conditions.splice(existing, 1);
      this.emit();
      return;
    }
    if (bucket === 'other') {
      this.conditions.push({
        kind: 'value',
        path_index: pathIndex,
        facet,
        is_other: true,
        member_keys: other?.keys ?? [],
        negated: false,
      });
    } else {
      this.conditions.push({
        kind: 'value',
        path_index: pathIndex,
        facet,
        bucket_key: bucket.key,
        member_keys: bucket.member_keys ?? undefined,
        negated: false,
      });
    }
    this.emit();
  }

  findValueCondition(pathIndex: number, facet: Facet, bucket: Bucket | 'other'): number {
    return this.conditions.findIndex(
      (c) =>
        c.kind === 'value' &&
        c.path_index === pathIndex &&
        c.facet === facet &&
        (bucket === 'other' ? c.is_other === true : !c.is_other && c.bucket_key === bucket.key),
    );
  }

  // -- condition editing -------------------------------------------------------

  toggleNegated(position: number): void {
    const condition = this.conditions[position];
    if (condition) {
      condition.negated = !condition.negated;
      this.emit();
    }
  }

  removeCondition(position: number): void {
    this.conditions.splice(position, 1);
    this.emit();
  }

  toggleScope(): void {
    this.scope = this.scope === 'whole_set' ? 'current_selection' : 'whole_set';
    this.emit();
  }

  clear(): void {
    this.conditions = [];
    this.scope = 'whole_set';
    this.current = null;
    this.emit();
  }

  // -- query assembly ------------------------------------------------------------

  buildQuery(): SelectionQuery {
    const query: SelectionQuery = {
      conditions: this.conditions.map((c) => ({ ...c })),
      scope: this.scope,
    };
    if (this.scope === 'current_selection') {
      query.current_ids = this.current ? this.visibleSelection() : [];
    }
    return query;
  }

  setInspectResult(result: InspectResponse): void {
    this.current = {
      entityIds: result.entity_ids,
      labels: result.labels,
      pseudocode: result.pseudocode,
      summaries: result.summaries,
      flags: result.flags,
      removed: new Set<number>(),
    };
    this.emit();
  }

  removeEntity(entityId: number): void {
    this.current?.removed.add(entityId);
    this.emit();
  }

  restoreEntity(entityId: number): void {
    this.current?.removed.delete(entityId);
    this.emit();
  }

  /** Selection minus manual removals. */
  visibleSelection(): number[] {
    if (!this.current) return [];
    return this.current.entityIds.filter((id) => !this.current!.removed.has(id));
  }

  isSelected(entityId: number): boolean {
    return this.current !== null && this.current.entityIds.includes(entityId)
      && !this.current.removed.has(entityId);
  }

  // -- view toggles -----------------------------------------------------------------

  setHoveredZone(zoneId: number | null): void {
    if (this.hoveredZone !== zoneId) {
      this.hoveredZone = zoneId;
      this.emit();
    }
  }

  /** Paths to highlight in yellow while a zone is hovered: the paths
   * missing for every member of that zone. */
  hoveredZoneMissingPaths(): Set<number> {
    if (this.hoveredZone === null) return new Set();
    const zone = this.zones.find((z) => z.zone_id === this.hoveredZone);
    return new Set(zone ? zone.missing_path_indices : []);
  }

  togglePathOpen(pathIndex: number): void {
    if (this.openPaths.has(pathIndex)) this.openPaths.delete(pathIndex);
    else this.openPaths.add(pathIndex);
    this.emit();
  }

  toggleLabels(): void {
    this.labelsVisible = !this.labelsVisible;
    this.emit();
  }

  toggleLassoMode(): void {
    this.lassoMode = !this.lassoMode;
    this.emit();
  }
}

/** Pseudo-code fragment for one condition, matching the engine grammar. */
export function conditionPseudocode(condition: Condition, paths: PathInfo[]): string {
  const label = (index: number | undefined) =>
    index !== undefined && paths[index] ? paths[index].label : String(index);
  let having: boolean;
  if (condition.kind === 'path') {
    having = (condition.present ?? true) !== condition.negated;
  } else {
    having = !condition.negated;
  }
  const word = having ? 'HAVING' : 'NOT HAVING';
  switch (condition.kind) {
    case 'path':
      return `${word} the path ${label(condition.path_index)}`;
    case 'value': {
      const value = condition.is_other ? 'other' : compactUri(condition.bucket_key ?? '');
      return `${word} the value ${value} at the end of the path ${label(condition.path_index)}`;
    }
    case 'zone':
      return `${word} the zone ${condition.zone_id}`;
    case 'lasso':
      return `${word} the zone lasso`;
  }
}

export function queryPseudocode(query: SelectionQuery, paths: PathInfo[]): string {
  const parts = query.conditions.map((c) => conditionPseudocode(c, paths));
  const scope = query.scope === 'whole_set' ? 'the whole set' : 'the current selection';
  return `SELECT entities ${parts.join(' AND ')} among ${scope}`;
}

const PREFIXES: [string, string][] = [
  ['http://www.wikidata.org/prop/direct/', 'wdt:'],
  ['http://www.wikidata.org/entity/', 'wd:'],
  ['http://www.w3.org/2000/01/rdf-schema#', 'rdfs:'],
  ['http://www.w3.org/2004/02/skos/core#', 'skos:'],
  ['http://schema.org/', 'schema:'],
  ['http://example.org/', 'ex:'],
];

export function compactUri(uri: string): string {
  for (const [ns, prefix] of PREFIXES) {
    if (uri.startsWith(ns) && uri.length > ns.length) {
      return prefix + uri.slice(ns.length);
    }
  }
  return uri;
}
