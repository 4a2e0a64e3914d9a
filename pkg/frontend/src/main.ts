/** Application wiring: load a collection, coordinate the three views,
 * poll projection jobs, and forward actions to the log endpoint. */

import { ApiClient, saveBlob } from './api.js';
import { EntityList } from './entityList.js';
import { HistogramPanel } from './histograms.js';
import { MapView } from './map.js';
import { SelectionBar } from './selectionBar.js';
import { ViewState } from './state.js';
import type { PathSummary } from './types.js';

const SESSION_ID = `web-${Math.random().toString(36).slice(2, 10)}`;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

export async function boot(): Promise<void> {
  const api = new ApiClient('');
  const state = new ViewState();
  let fullSummaries: PathSummary[] | null = null;

  const tooltip = el<HTMLDivElement>('tooltip');
  const showTooltip = (text: string | null, x: number, y: number) => {
    tooltip.hidden = text === null;
    if (text !== null) {
      tooltip.textContent = text;
      tooltip.style.left = `${x + 12}px`;
      tooltip.style.top = `${y + 12}px`;
    }
  };

  const mapView = new MapView(
    el<HTMLCanvasElement>('map-canvas'),
    state,
    (zoneId) => {
      state.addZoneCondition(zoneId);
      void api.logAction(SESSION_ID, 'add_condition', `zone:${zoneId}`);
    },
    (polygon, count) => {
      state.addLassoCondition(polygon);
      void api.logAction(SESSION_ID, 'add_condition', `lasso:${count}`);
    },
  );

  new HistogramPanel(el('histograms'), state, () => fullSummaries, showTooltip);

  const entityList = new EntityList(el('entity-panel'), state, () => {
    void inspect();
  });

  async function inspect(): Promise<void> {
    if (!state.collectionId || state.pendingCount === 0) return;
    const result = await api.inspect(state.collectionId, state.buildQuery());
    state.setInspectResult(result);
    void api.logAction(SESSION_ID, 'retrieve_subset', `count:${result.count}`);
  }

  async function doExport(): Promise<void> {
    if (!state.collectionId || !state.current) return;
    const { blob, filename } = await api.exportSelection(
      state.collectionId,
      state.buildQuery(),
      state.current.removed.size ? state.visibleSelection() : undefined,
    );
    saveBlob(blob, filename);
  }

  new SelectionBar(el('selection-bar'), state, {
    onInspect: () => void inspect(),
    onExport: () => void doExport(),
    onClear: () => {
      state.clear();
      void api.logAction(SESSION_ID, 'clear_selection');
    },
    onToggleEntities: () => entityList.toggle(),
  });

  el<HTMLButtonElement>('labels-toggle').addEventListener('click', () =>
    state.toggleLabels(),
  );

  el<HTMLButtonElement>('projection-button').addEventListener('click', async () => {
    if (!state.collectionId) return;
    const checked = [
      ...document.querySelectorAll<HTMLInputElement>('#path-picker input:checked'),
    ].map((input) => Number(input.value));
    const selection = checked.length >= 2 ? checked : null;
    const { job_id } = await api.requestProjection(state.collectionId, selection);
    void api.logAction(SESSION_ID, 'compute_projection', job_id);
    const status = el('job-status');
    const poll = window.setInterval(async () => {
      const job = await api.getJob(job_id);
      status.textContent = `projection: ${job.status} ${(job.progress * 100).toFixed(0)}%`;
      if (job.status === 'done' || job.status === 'failed' || job.status === 'cancelled') {
        window.clearInterval(poll);
        if (job.status === 'done' && state.collectionId) {
          mapView.setPayload(await api.getMap(state.collectionId));
          status.textContent = '';
        }
      }
    }, 500);
  });

  // -- initial load ------------------------------------------------------------

  const collections = await api.listCollections();
  const picker = el<HTMLSelectElement>('collection-picker');
  for (const descriptor of collections) {
    const option = document.createElement('option');
    option.value = descriptor.collection_id;
    option.textContent = `${descriptor.collection_id} (${descriptor.entity_count} entities, ${descriptor.status})`;
    picker.appendChild(option);
  }

  async function loadCollection(collectionId: string): Promise<void> {
    state.collectionId = collectionId;
    state.clear();
    state.paths = await api.getPaths(collectionId);
    fullSummaries = await api.getSummaries(collectionId);
    const mapPayload = await api.getMap(collectionId);
    state.zones = mapPayload.zones;
    state.colorPath = mapPayload.default_color_path;
    mapView.setPayload(mapPayload);
    const pathPicker = el('path-picker');
    pathPicker.textContent = '';
    for (const path of state.paths) {
      const label = document.createElement('label');
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.value = String(path.index);
      label.append(checkbox, document.createTextNode(` ${path.label}`));
      pathPicker.appendChild(label);
    }
    void api.logAction(SESSION_ID, 'load_collection', collectionId);
  }

  picker.addEventListener('change', () => void loadCollection(picker.value));
  const ready = collections.find((c) => c.status === 'ready');
  if (ready) {
    picker.value = ready.collection_id;
    await loadCollection(ready.collection_id);
  }
}

if (typeof document !== 'undefined' && document.getElementById('map-canvas')) {
  void boot();
}
