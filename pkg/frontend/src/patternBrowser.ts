import * as d3 from 'd3';
import type { PatternSummary } from './api';
import { DIMMED_TILE_FILL, HIGHLIGHT_COLOR, tileScale } from './colors';
import type { SelectionState } from './state';

const TILE_SIZE = 48;
const SVG_NS = 'http://www.w3.org/2000/svg';

export interface PatternBrowserParams {
  element: HTMLElement;
  patterns: PatternSummary[];
  onTileClick: (patternId: string) => void;
}

export interface PatternBrowserHandle {
  /** `shadedPatternIds === null` means no county is selected: shade all. */
  update(selection: SelectionState, shadedPatternIds: ReadonlySet<string> | null): void;
  destroy(): void;
}

/**
 * Wrapping tile grid ordered left-to-right, top-to-bottom by descending
 * mean target; rank order is the only thing that places a tile. With a
 * county selected, tiles for patterns the county does not belong to gray
 * out; the selected tile swaps its square for a circle with a highlighted
 * border.
 */
export function renderPatternBrowser(
  params: PatternBrowserParams,
): PatternBrowserHandle {
  const root = d3.select(params.element).append('div').attr('class', 'tile-grid');

  if (params.patterns.length === 0) {
    root.append('p').attr('class', 'placeholder').text('no patterns mined');
    return {
      update() {},
      destroy() {
        root.remove();
      },
    };
  }

  const ordered = [...params.patterns].sort((a, b) => a.rank - b.rank);
  const fillFor = tileScale(ordered.map((p) => p.mean_target));

  const tiles = root
    .selectAll('button')
    .data(ordered)
    .enter()
    .append('button')
    .attr('class', 'tile')
    .attr('type', 'button')
    .attr('data-pattern-id', (d) => d.pattern_id)
    .attr('data-rank', (d) => d.rank)
    .attr('title', (d) => `rank ${d.rank} - mean ${d.mean_target.toFixed(1)}`)
    .on('click', (_event, d) => params.onTileClick(d.pattern_id));

  tiles
    .append('svg')
    .attr('width', TILE_SIZE)
    .attr('height', TILE_SIZE)
    .attr('viewBox', `0 0 ${TILE_SIZE} ${TILE_SIZE}`);
  tiles.append('span').attr('class', 'tile-rank').text((d) => d.rank);

  const drawShape = (
    svg: SVGSVGElement,
    selected: boolean,
    fill: string,
  ): void => {
    svg.replaceChildren();
    const half = TILE_SIZE / 2;
    if (selected) {
      const circle = document.createElementNS(SVG_NS, 'circle');
      circle.setAttribute('cx', String(half));
      circle.setAttribute('cy', String(half));
      circle.setAttribute('r', String(half - 4));
      circle.setAttribute('fill', fill);
      circle.setAttribute('stroke', HIGHLIGHT_COLOR);
      circle.setAttribute('stroke-width', '3');
      svg.appendChild(circle);
    } else {
      const rect = document.createElementNS(SVG_NS, 'rect');
      rect.setAttribute('x', '2');
      rect.setAttribute('y', '2');
      rect.setAttribute('width', String(TILE_SIZE - 4));
      rect.setAttribute('height', String(TILE_SIZE - 4));
      rect.setAttribute('rx', '4');
      rect.setAttribute('fill', fill);
      svg.appendChild(rect);
    }
  };

  const update: PatternBrowserHandle['update'] = (selection, shadedPatternIds) => {
    tiles.each(function (d) {
      const shaded =
        shadedPatternIds === null || shadedPatternIds.has(d.pattern_id);
      const selected = d.pattern_id === selection.selectedPatternId;
      d3.select(this)
        .attr('data-shaded', shaded ? 'true' : 'false')
        .attr('data-selected', selected ? 'true' : null);
      const svg = this.querySelector('svg');
      if (svg) drawShape(svg, selected, shaded ? fillFor(d.mean_target) : DIMMED_TILE_FILL);
    });
  };

  return {
    update,
    destroy() {
      root.remove();
    },
  };
}
