/** Typed client for the analysis API. All numbers shown in the UI come
 * from these responses; nothing is recomputed client-side. */

import type {
  CollectionDescriptor,
  InspectResponse,
  JobInfo,
  MapPayload,
  PathInfo,
  PathSummary,
  SelectionQuery,
} from './types.js';

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* keep statusText */
    }
    throw new ApiError(detail, response.status);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string = '',
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  listCollections(): Promise<CollectionDescriptor[]> {
    return this.fetchFn(this.url('/collections')).then((r) =>
      asJson<CollectionDescriptor[]>(r),
    );
  }

  getPaths(collection: string): Promise<PathInfo[]> {
    return this.fetchFn(this.url(`/collections/${collection}/paths`)).then((r) =>
      asJson<PathInfo[]>(r),
    );
  }

  getSummaries(collection: string): Promise<PathSummary[]> {
    return this.fetchFn(this.url(`/collections/${collection}/summaries`)).then((r) =>
      asJson<PathSummary[]>(r),
    );
  }

  getMap(collection: string): Promise<MapPayload> {
    return this.fetchFn(this.url(`/collections/${collection}/map`)).then((r) =>
      asJson<MapPayload>(r),
    );
  }

  inspect(
    collection: string,
    query: SelectionQuery,
    preferredLanguage = 'en',
  ): Promise<InspectResponse> {
    return this.fetchFn(this.url(`/collections/${collection}/selection/inspect`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ ...query, preferred_language: preferredLanguage }),
    }).then((r) => asJson<InspectResponse>(r));
  }

  requestProjection(
    collection: string,
    selectedPathIndices: number[] | null,
  ): Promise<{ job_id: string }> {
    return this.fetchFn(this.url(`/collections/${collection}/projection`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(
        selectedPathIndices ? { selected_path_indices: selectedPathIndices } : {},
      ),
    }).then(async (response) => {
      // 409 still carries the queued job id (superseding policy)
      if (!response.ok && response.status !== 409) {
        throw new ApiError(response.statusText, response.status);
      }
      return response.json() as Promise<{ job_id: string }>;
    });
  }

  getJob(jobId: string): Promise<JobInfo> {
    return this.fetchFn(this.url(`/jobs/${jobId}`)).then((r) => asJson<JobInfo>(r));
  }

  /** Download the three-file export for the given query; returns the
   * blob plus the filename announced by the server. */
  async exportSelection(
    collection: string,
    query: SelectionQuery,
    entityIds?: number[],
  ): Promise<{ blob: Blob; filename: string }> {
    const body: Record<string, unknown> = { query };
    if (entityIds) body.entity_ids = entityIds;
    const response = await this.fetchFn(this.url(`/collections/${collection}/export`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw new ApiError(response.statusText, response.status);
    const disposition = response.headers.get('Content-Disposition') ?? '';
    const match = /filename="([^"]+)"/.exec(disposition);
    return {
      blob: await response.blob(),
      filename: match ? match[1] : `export_${collection}.zip`,
    };
  }

  logAction(sessionId: string, action: string, payloadDigest = ''): Promise<void> {
    return this.fetchFn(this.url('/log'), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({
        session_id: sessionId,
        action,
        timestamp: new Date().toISOString(),
        payload_digest: payloadDigest,
      }),
    }).then(() => undefined);
  }
}

/** Trigger a browser download for an exported blob. */
export function saveBlob(blob: Blob, filename: string, doc: Document = document): void {
  const url = URL.createObjectURL(blob);
  const anchor = doc.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  doc.body.appendChild(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
