/** Mirrored completeness histograms with embedded stacked facet charts.
 *
 * One row per path in full-set order (completeness descending): the left
 * column shows the full collection, the right column the selected
 * subset. Both columns live in the same scrolling row list, so they
 * cannot drift out of alignment. Yellow fills mark paths missing in the
 * subset, pink marks significant distribution differences, and every
 * rectangle of an opened path's stacked charts (including the
 * dotted-texture OTHER aggregate) is a click target that toggles a
 * value condition.
 */

import { COLORS } from './colors.js';
import type { ViewState } from './state.js';
import type {
  Bucket,
  ComparisonFlag,
  Facet,
  FacetSummary,
  PathInfo,
  PathSummary,
} from './types.js';

export interface HistogramRow {
  path: PathInfo;
  fullCompleteness: number;
  subsetCompleteness: number | null;
  missingInSubset: boolean;
  significantlyDifferent: boolean;
  highlighted: boolean; // yellow name highlight from zone hover
}

/** Pure row model: one aligned entry per path, in full-set order. */
export function buildRows(
  paths: PathInfo[],
  subsetSummaries: PathSummary[] | null,
  flags: ComparisonFlag[] | null,
  highlightedPaths: Set<number>,
): HistogramRow[] {
  const ordered = [...paths].sort((a, b) => a.index - b.index);
  return ordered.map((path) => {
    const subset = subsetSummaries ? subsetSummaries[path.index] : null;
    const flag = flags ? flags[path.index] : null;
    return {
      path,
      fullCompleteness: path.completeness,
      subsetCompleteness: subset ? subset.completeness_in_set : null,
      missingInSubset: flag ? flag.missing_in_subset : false,
      significantlyDifferent: flag ? flag.significantly_different : false,
      highlighted: highlightedPaths.has(path.index),
    };
  });
}

const SVG_NS = 'http://www.w3.org/2000/svg';
const FACETS: Facet[] = ['values', 'datatypes', 'languages'];

export class HistogramPanel {
  constructor(
    private readonly root: HTMLElement,
    private readonly state: ViewState,
    private readonly fullSummaries: () => PathSummary[] | null,
    private readonly onTooltip: (text: string | null, x: number, y: number) => void,
  ) {
    state.subscribe(() => this.render());
  }

  render(): void {
    const paths = this.state.paths;
    const rows = buildRows(
      paths,
      this.state.current?.summaries ?? null,
      this.state.current?.flags ?? null,
      this.state.hoveredZoneMissingPaths(),
    );
    this.root.textContent = '';
    for (const row of rows) {
      this.root.appendChild(this.renderRow(row));
      if (this.state.openPaths.has(row.path.index)) {
        this.root.appendChild(this.renderOpenPath(row.path.index));
      }
    }
  }

  private renderRow(row: HistogramRow): HTMLElement {
    const element = document.createElement('div');
    element.className = 'hist-row';
    element.dataset.pathIndex = String(row.path.index);

    const label = document.createElement('span');
    label.className = 'hist-label';
    label.textContent = row.path.label;
    if (row.highlighted) label.classList.add('highlight-missing');
    if (!this.state.labelsVisible && !row.highlighted) label.classList.add('hover-only');

    const left = this.bar(row.fullCompleteness, COLORS.grey, null);
    left.classList.add('hist-left');
    const right = this.bar(
      row.subsetCompleteness ?? 0,
      COLORS.grey,
      row.missingInSubset ? COLORS.yellow : row.significantlyDifferent ? COLORS.darkPink : null,
    );
    right.classList.add('hist-right');
    if (this.state.current === null) right.classList.add('hist-empty');

    element.append(left, label, right);
    element.addEventListener('click', (event) => {
      if ((event.target as HTMLElement).closest('.hist-bar')) {
        this.state.addPathCondition(row.path.index, true);
      } else {
        this.state.togglePathOpen(row.path.index);
      }
    });
    label.addEventListener('click', (event) => {
      event.stopPropagation();
      this.state.togglePathOpen(row.path.index);
    });
    return element;
  }

  private bar(fraction: number, color: string, flagColor: string | null): HTMLElement {
    const wrap = document.createElement('div');
    wrap.className = 'hist-bar';
    const fill = document.createElement('div');
    fill.className = 'hist-fill';
    fill.style.width = `${Math.round(fraction * 100)}%`;
    fill.style.background = color;
    wrap.appendChild(fill);
    if (flagColor) {
      wrap.style.boxShadow = `inset 4px 0 0 ${flagColor}`;
      wrap.dataset.flag = flagColor === COLORS.yellow ? 'missing' : 'different';
    }
    return wrap;
  }

  /** Stacked charts for an opened path: full set left, subset right. */
  private renderOpenPath(pathIndex: number): HTMLElement {
    const container = document.createElement('div');
    container.className = 'path-detail';
    const full = this.fullSummaries()?.[pathIndex] ?? null;
    const subset = this.state.current?.summaries[pathIndex] ?? null;
    for (const facet of FACETS) {
      const fullFacet = full?.facets[facet];
      const subsetFacet = subset?.facets[facet];
      if (!fullFacet || fullFacet.total === 0) continue;
      const line = document.createElement('div');
      line.className = 'facet-line';
      const name = document.createElement('span');
      name.className = 'facet-name';
      name.textContent = facet;
      line.appendChild(this.stackedChart(pathIndex, facet, fullFacet));
      line.appendChild(name);
      line.appendChild(
        subsetFacet && subsetFacet.total > 0
          ? this.stackedChart(pathIndex, facet, subsetFacet)
          : this.emptyChart(),
      );
      container.appendChild(line);
    }
    return container;
  }

  private emptyChart(): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('class', 'stacked-chart empty');
    svg.setAttribute('viewBox', '0 0 100 14');
    return svg;
  }

  private stackedChart(pathIndex: number, facet: Facet, summary: FacetSummary): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('class', 'stacked-chart');
    svg.setAttribute('viewBox', '0 0 100 14');
    svg.setAttribute('preserveAspectRatio', 'none');
    const defs = document.createElementNS(SVG_NS, 'defs');
    const pattern = document.createElementNS(SVG_NS, 'pattern');
    const patternId = `dots-${pathIndex}-${facet}-${Math.random().toString(36).slice(2, 7)}`;
    pattern.setAttribute('id', patternId);
    pattern.setAttribute('width', '4');
    pattern.setAttribute('height', '4');
    pattern.setAttribute('patternUnits', 'userSpaceOnUse');
    const dot = document.createElementNS(SVG_NS, 'circle');
    dot.setAttribute('cx', '2');
    dot.setAttribute('cy', '2');
    dot.setAttribute('r', '0.8');
    dot.setAttribute('fill', COLORS.greyDark);
    pattern.appendChild(dot);
    defs.appendChild(pattern);
    svg.appendChild(defs);

    let x = 0;
    const segments: { bucket: Bucket | 'other'; width: number; label: string; count: number }[] =
      summary.buckets.map((bucket) => ({
        bucket,
        width: (bucket.count / summary.total) * 100,
        label: bucket.key,
        count: bucket.count,
      }));
    if (summary.other_count > 0) {
      segments.push({
        bucket: 'other',
        width: (summary.other_count / summary.total) * 100,
        label: `other (${summary.other_keys.length} values)`,
        count: summary.other_count,
      });
    }
    segments.forEach((segment, i) => {
      const rect = document.createElementNS(SVG_NS, 'rect');
      rect.setAttribute('x', x.toFixed(2));
      rect.setAttribute('y', '0');
      rect.setAttribute('width', Math.max(segment.width, 0.5).toFixed(2));
      rect.setAttribute('height', '14');
      const added =
        this.state.findValueCondition(pathIndex, facet, segment.bucket) >= 0;
      if (segment.bucket === 'other') {
        rect.setAttribute('fill', added ? COLORS.darkPink : `url(#${patternId})`);
        rect.setAttribute('stroke', COLORS.greyDark);
        rect.setAttribute('stroke-width', '0.3');
        rect.dataset.other = 'true';
      } else {
        rect.setAttribute('fill', added ? COLORS.darkPink : i % 2 ? COLORS.blue : COLORS.green);
      }
      rect.dataset.bucketKey = segment.bucket === 'other' ? 'other' : segment.bucket.key;
      rect.addEventListener('click', (event) => {
        event.stopPropagation();
        if (segment.bucket === 'other') {
          this.state.toggleValueCondition(pathIndex, facet, 'other', {
            keys: summary.other_keys,
          });
        } else {
          this.state.toggleValueCondition(pathIndex, facet, segment.bucket);
        }
      });
      rect.addEventListener('mousemove', (event) => {
        this.onTooltip(
          `${segment.label}: ${segment.count}`,
          (event as MouseEvent).clientX,
          (event as MouseEvent).clientY,
        );
      });
      rect.addEventListener('mouseleave', () => this.onTooltip(null, 0, 0));
      svg.appendChild(rect);
      x += segment.width;
    });
    return svg;
  }
}
