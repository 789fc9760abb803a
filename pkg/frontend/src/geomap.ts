import * as d3 from 'd3';
import type { CountyGeometry, CountySummary } from './api';
import { HIGHLIGHT_COLOR, choroplethScale } from './colors';
import type { SelectionState, Viewport } from './state';

export interface GeomapParams {
  element: HTMLElement;
  counties: CountySummary[];
  geometry: CountyGeometry;
  onCountyClick: (fips: string) => void;
  onBackgroundClick: () => void;
  onViewportChange?: (viewport: Viewport) => void;
  width?: number;
  height?: number;
}

export interface GeomapHandle {
  update(selection: SelectionState, memberFips: ReadonlySet<string>): void;
  destroy(): void;
}

/**
 * Choropleth of the target value with pan/zoom (small counties are hard to
 * hit at national zoom). The selected county and, when a pattern is
 * selected, its member counties are outlined in the highlight color.
 */
export function renderGeomap(params: GeomapParams): GeomapHandle {
  const { element, geometry } = params;
  const width = params.width ?? (element.clientWidth || 640);
  const height = params.height ?? (element.clientHeight || 420);

  const targetByFips = new Map(
    params.counties.map((c) => [c.fips, c.target_value]),
  );
  const fill = choroplethScale(
    params.counties
      .map((c) => c.target_value)
      .filter((v): v is number => v != null),
  );

  const svg = d3
    .select(element)
    .append('svg')
    .attr('class', 'geomap')
    .attr('viewBox', `0 0 ${width} ${height}`)
    .attr('preserveAspectRatio', 'xMidYMid meet');

  // Catches clicks on the ocean / empty projection area.
  svg
    .append('rect')
    .attr('class', 'geomap-background')
    .attr('width', width)
    .attr('height', height)
    .attr('fill', '#f3f7fb')
    .on('click', () => params.onBackgroundClick());

  const projection = d3.geoMercator().fitSize([width, height], geometry);
  const path = d3.geoPath(projection);
  const g = svg.append('g');

  g.selectAll('path')
    .data(geometry.features)
    .enter()
    .append('path')
    .attr('class', 'county')
    .attr('d', (d) => path(d))
    .attr('data-fips', (d) => d.properties.GEOID)
    .attr('fill', (d) => fill(targetByFips.get(d.properties.GEOID) ?? null))
    .attr('stroke', '#999')
    .attr('stroke-width', 0.5)
    .on('click', (event, d) => {
      event.stopPropagation();
      params.onCountyClick(d.properties.GEOID);
    })
    .each(function (d) {
      if (targetByFips.get(d.properties.GEOID) == null) {
        d3.select(this).append('title').text('no data');
      }
    });

  const zoom = d3
    .zoom<SVGSVGElement, unknown>()
    .scaleExtent([1, 12])
    .on('zoom', (event) => {
      const t = event.transform as d3.ZoomTransform;
      g.attr('transform', t.toString());
      params.onViewportChange?.({
        center: [width / 2 - t.x, height / 2 - t.y],
        zoom: t.k,
      });
    });
  svg.call(zoom);

  return {
    update(selection, memberFips) {
      g.selectAll<SVGPathElement, CountyGeometry['features'][number]>('path').each(
        function (d) {
          const fips = d.properties.GEOID;
          const isSelected = fips === selection.selectedFips;
          const isMember =
            selection.selectedPatternId !== null && memberFips.has(fips);
          d3.select(this)
            .attr('data-selected', isSelected ? 'true' : null)
            .attr('data-member', isMember ? 'true' : null)
            .attr('stroke', isSelected || isMember ? HIGHLIGHT_COLOR : '#999')
            .attr('stroke-width', isSelected ? 3 : isMember ? 1.5 : 0.5);
        },
      );
      g.selectAll<SVGPathElement, unknown>('path[data-selected]').raise();
    },
    destroy() {
      svg.remove();
    },
  };
}
