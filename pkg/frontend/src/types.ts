/** Wire types mirroring the HTTP API payloads. */

export type Facet = 'values' | 'datatypes' | 'languages';
export type ConditionKind = 'zone' | 'lasso' | 'path' | 'value';
export type Scope = 'whole_set' | 'current_selection';

export interface Condition {
  kind: ConditionKind;
  negated: boolean;
  path_index?: number;
  present?: boolean;
  facet?: Facet;
  bucket_key?: string;
  member_keys?: string[];
  is_other?: boolean;
  zone_id?: number;
  polygon?: [number, number][];
}

export interface SelectionQuery {
  conditions: Condition[];
  scope: Scope;
  current_ids?: number[];
}

export interface CollectionDescriptor {
  collection_id: string;
  class_uri: string;
  endpoint_url: string;
  status: string;
  reason: string | null;
  entity_count: number;
  path_count: number;
}

export interface PathInfo {
  index: number;
  predicates: string[];
  depth: number;
  covered_count: number;
  completeness: number;
  label: string;
}

export interface Bucket {
  key: string;
  count: number;
  member_keys: string[] | null;
}

export interface FacetSummary {
  buckets: Bucket[];
  other_count: number;
  other_keys: string[];
  total: number;
  unique_count: number;
}

export interface PathSummary {
  path_index: number;
  entity_count: number;
  completeness_in_set: number;
  unique_value_count: number;
  facets: Record<Facet, FacetSummary>;
}

export interface Zone {
  zone_id: number;
  member_ids: number[];
  boundary: [number, number][];
  missing_path_indices: number[];
}

export interface ColorInfo {
  path_index: number;
  buckets: { key: string; count: number; is_other: boolean }[];
  entity_buckets: number[][];
}

export interface MapPayload {
  coordinates: [number, number][];
  zones: Zone[];
  default_color_path: number | null;
  color: ColorInfo | null;
}

export interface KSEntry {
  facet: Facet;
  statistic: number;
  p_value: number;
}

export interface ComparisonFlag {
  path_index: number;
  missing_in_subset: boolean;
  significantly_different: boolean;
  ks: KSEntry[];
}

export interface InspectResponse {
  count: number;
  entity_ids: number[];
  labels: { uri: string; label: string }[];
  pseudocode: string;
  summaries: PathSummary[];
  flags: ComparisonFlag[];
}

export interface JobInfo {
  job_id: string;
  kind: string;
  collection_id: string;
  status: 'queued' | 'running' | 'done' | 'failed' | 'cancelled';
  progress: number;
  error: string | null;
}
