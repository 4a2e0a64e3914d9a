/** Selection bar: (a) condition list toggle with pseudo-code and
 * having/not-having + scope toggles, (b) inspect, (c) entity list
 * toggle, (d) export, (e) clear. (a) and (b) turn pink as soon as a
 * condition is pending.
 */

import { conditionPseudocode } from './state.js';
import type { ViewState } from './state.js';

export interface SelectionBarHooks {
  onInspect: () => void;
  onExport: () => void;
  onClear: () => void;
  onToggleEntities: () => void;
}

export class SelectionBar {
  readonly conditionsButton: HTMLButtonElement;
  readonly inspectButton: HTMLButtonElement;
  readonly entitiesButton: HTMLButtonElement;
  readonly exportButton: HTMLButtonElement;
  readonly clearButton: HTMLButtonElement;
  readonly conditionList: HTMLElement;
  private listOpen = false;

  constructor(
    root: HTMLElement,
    private readonly state: ViewState,
    hooks: SelectionBarHooks,
  ) {
    this.conditionsButton = this.button('conditions', '☐ 0');
    this.inspectButton = this.button('inspect', '\u{1F50D} inspect');
    this.entitiesButton = this.button('entities', '0 entities');
    this.exportButton = this.button('export', '⤓ export');
    this.clearButton = this.button('clear', '✕ clear');
    this.conditionList = document.createElement('div');
    this.conditionList.className = 'condition-list';
    this.conditionList.hidden = true;
    root.append(
      this.conditionsButton,
      this.inspectButton,
      this.entitiesButton,
      this.exportButton,
      this.clearButton,
      this.conditionList,
    );

    this.conditionsButton.addEventListener('click', () => {
      this.listOpen = !this.listOpen;
      this.render();
    });
    this.inspectButton.addEventListener('click', () => hooks.onInspect());
    this.entitiesButton.addEventListener('click', () => hooks.onToggleEntities());
    this.exportButton.addEventListener('click', () => hooks.onExport());
    this.clearButton.addEventListener('click', () => hooks.onClear());
    state.subscribe(() => this.render());
    this.render();
  }

  private button(id: string, text: string): HTMLButtonElement {
    const element = document.createElement('button');
    element.id = `bar-${id}`;
    element.textContent = text;
    return element;
  }

  render(): void {
    const pending = this.state.pendingCount;
    // one checkbox glyph per pending condition
    this.conditionsButton.textContent = `${'☑'.repeat(pending) || '☐'} ${pending}`;
    this.conditionsButton.classList.toggle('pink', pending > 0);
    this.inspectButton.classList.toggle('pink', pending > 0);
    const visible = this.state.visibleSelection().length;
    this.entitiesButton.textContent = this.state.current
      ? `${visible} entities`
      : '0 entities';
    this.exportButton.disabled = this.state.current === null;

    this.conditionList.hidden = !this.listOpen || pending === 0;
    this.conditionList.textContent = '';
    if (this.conditionList.hidden) return;

    const intro = document.createElement('span');
    intro.className = 'pseudo';
    intro.textContent = 'SELECT entities ';
    this.conditionList.appendChild(intro);
    this.state.conditions.forEach((condition, position) => {
      if (position > 0) {
        const and = document.createElement('span');
        and.className = 'pseudo';
        and.textContent = ' AND ';
        this.conditionList.appendChild(and);
      }
      const fragment = document.createElement('span');
      fragment.className = 'condition';
      const toggle = document.createElement('a');
      toggle.className = 'toggle having-toggle';
      const text = conditionPseudocode(condition, this.state.paths);
      const having = text.startsWith('HAVING') ? 'HAVING' : 'NOT HAVING';
      toggle.textContent = having;
      toggle.addEventListener('click', () => this.state.toggleNegated(position));
      const rest = document.createElement('span');
      rest.textContent = ` ${text.slice(having.length + 1)}`;
      const remove = document.createElement('a');
      remove.className = 'remove-condition';
      remove.textContent = ' ✕';
      remove.addEventListener('click', () => this.state.removeCondition(position));
      fragment.append(toggle, rest, remove);
      this.conditionList.appendChild(fragment);
    });
    const among = document.createElement('span');
    among.className = 'pseudo';
    among.textContent = ' among ';
    const scopeToggle = document.createElement('a');
    scopeToggle.className = 'toggle scope-toggle';
    scopeToggle.textContent =
      this.state.scope === 'whole_set' ? 'the whole set' : 'the current selection';
    scopeToggle.addEventListener('click', () => this.state.toggleScope());
    this.conditionList.append(among, scopeToggle);
  }
}
