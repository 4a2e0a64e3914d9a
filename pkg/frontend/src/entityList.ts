/** List of selected entities: preferred-language labels, URIs opening in
 * a new window, per-entity removal, and an update button that recomputes
 * the summaries over the reduced set. */

import type { ViewState } from './state.js';

export class EntityList {
  constructor(
    private readonly root: HTMLElement,
    private readonly state: ViewState,
    private readonly onUpdateSelection: () => void,
  ) {
    state.subscribe(() => this.render());
  }

  render(): void {
    this.root.textContent = '';
    const current = this.state.current;
    if (!current) {
      this.root.hidden = true;
      return;
    }
    this.root.hidden = this.root.dataset.open !== 'true';
    const list = document.createElement('ul');
    list.className = 'entity-list';
    current.labels.forEach(({ uri, label }, position) => {
      const entityId = current.entityIds[position];
      if (current.removed.has(entityId)) return;
      const item = document.createElement('li');
      const link = document.createElement('a');
      link.href = uri;
      link.target = '_blank';
      link.rel = 'noopener';
      link.textContent = label;
      link.title = uri;
      const remove = document.createElement('button');
      remove.className = 'entity-remove';
      remove.textContent = '✕';
      remove.addEventListener('click', () => this.state.removeEntity(entityId));
      item.append(link, remove);
      list.appendChild(item);
    });
    const update = document.createElement('button');
    update.id = 'update-selection';
    update.textContent = 'Update selection';
    update.disabled = current.removed.size === 0;
    update.addEventListener('click', () => this.onUpdateSelection());
    this.root.append(list, update);
  }

  toggle(): void {
    this.root.dataset.open = this.root.dataset.open === 'true' ? 'false' : 'true';
    this.render();
  }
}
