import * as d3 from 'd3';
import type { CountyProfile, Meta, Timeseries } from './api';
import { BULLET_BAR_HEIGHT, BULLET_BAR_WIDTH, bulletOffset, bulletSegment } from './bullet';

const CHART_WIDTH = 600;
const CHART_HEIGHT = 160;
const CHART_MARGIN = { top: 10, right: 10, bottom: 20, left: 40 };
const US_RANGE_FILL = '#d0d0d0';
const STATE_RANGE_FILL = '#2171b5';

function formatValue(value: number): string {
  return d3.format('~g')(value);
}

function renderTimeChart(
  root: d3.Selection<HTMLDivElement, unknown, null, undefined>,
  series: Timeseries,
  meta: Meta,
): void {
  const width = CHART_WIDTH - CHART_MARGIN.left - CHART_MARGIN.right;
  const height = CHART_HEIGHT - CHART_MARGIN.top - CHART_MARGIN.bottom;

  const x = d3.scalePoint<string>().domain(series.dates).range([0, width]);
  const yMax = Math.max(d3.max(series.values) ?? 0, meta.global_target_mean);
  const y = d3.scaleLinear().domain([0, yMax]).range([height, 0]).nice();

  const svg = root
    .append('svg')
    .attr('class', 'time-chart')
    .attr('width', CHART_WIDTH)
    .attr('height', CHART_HEIGHT)
    .append('g')
    .attr('transform', `translate(${CHART_MARGIN.left},${CHART_MARGIN.top})`);

  const line = d3
    .line<number>()
    .x((_, i) => x(series.dates[i]) ?? 0)
    .y((v) => y(v));

  svg
    .append('path')
    .attr('class', 'target-series')
    .datum(series.values)
    .attr('d', line)
    .attr('fill', 'none')
    .attr('stroke', STATE_RANGE_FILL)
    .attr('stroke-width', 1.5);

  svg
    .append('line')
    .attr('class', 'us-reference')
    .attr('x1', 0)
    .attr('x2', width)
    .attr('y1', y(meta.global_target_mean))
    .attr('y2', y(meta.global_target_mean))
    .attr('stroke', '#555')
    .attr('stroke-dasharray', '4 3');

  svg
    .append('text')
    .attr('class', 'time-chart-caption')
    .attr('x', 0)
    .attr('y', height + 16)
    .text(`${series.dates[0]} to ${series.dates[series.dates.length - 1]}`);
}

/**
 * County panel: header, target-over-time line chart against a dashed
 * national-average reference, and a bullet chart per top risk factor —
 * gray US range, blue state range, a solid marker at the county's value
 * and a dotted marker at the US average.
 */
export function renderCountyInfo(
  element: HTMLElement,
  profile: CountyProfile | null,
  series: Timeseries | null,
  meta: Meta,
): void {
  const root = d3.select(element);
  root.selectAll('*').remove();

  if (profile === null) {
    root.append('p').attr('class', 'placeholder').text('select a county');
    return;
  }

  const header = root.append('div').attr('class', 'county-header');
  header.append('h3').text(`${profile.name}, ${profile.state} (${profile.fips})`);
  header
    .append('p')
    .text(
      profile.target_value == null
        ? `${meta.target_name}: no data`
        : `${meta.target_name}: ${formatValue(profile.target_value)} ` +
            `(US average ${formatValue(meta.global_target_mean)})`,
    );

  const chartBox = root.append('div').attr('class', 'time-chart-box');
  if (series === null) {
    chartBox
      .append('p')
      .attr('class', 'placeholder no-series')
      .text('no time series for this county');
  } else {
    renderTimeChart(chartBox, series, meta);
  }

  const factors = root.append('div').attr('class', 'factor-list');
  factors.append('h4').text('top risk factors');
  if (profile.top_risk_factors.length === 0) {
    factors.append('p').attr('class', 'placeholder').text('no risk patterns');
    return;
  }

  for (const factor of profile.top_risk_factors) {
    const row = factors
      .append('div')
      .attr('class', 'bullet-row')
      .attr('data-feature', factor.feature);
    row
      .append('div')
      .attr('class', 'bullet-label')
      .text(
        `${factor.feature}: ${formatValue(factor.county_value)}` +
          ` in state [${formatValue(factor.state_lo)}, ${formatValue(factor.state_hi)}]` +
          `, US [${formatValue(factor.us_lo)}, ${formatValue(factor.us_hi)}]` +
          ` (in ${factor.pattern_count} of the county's patterns)`,
      );

    const svg = row
      .append('svg')
      .attr('class', 'bullet')
      .attr('width', BULLET_BAR_WIDTH)
      .attr('height', BULLET_BAR_HEIGHT);
    svg
      .append('rect')
      .attr('class', 'bullet-us-range')
      .attr('x', 0)
      .attr('y', 0)
      .attr('width', BULLET_BAR_WIDTH)
      .attr('height', BULLET_BAR_HEIGHT)
      .attr('fill', US_RANGE_FILL);
    const segment = bulletSegment(
      factor.state_lo,
      factor.state_hi,
      factor.us_lo,
      factor.us_hi,
      BULLET_BAR_WIDTH,
    );
    svg
      .append('rect')
      .attr('class', 'bullet-state-range')
      .attr('x', segment.offset)
      .attr('y', 2)
      .attr('width', segment.width)
      .attr('height', BULLET_BAR_HEIGHT - 4)
      .attr('fill', STATE_RANGE_FILL);

    const countyX = bulletOffset(
      factor.county_value,
      factor.us_lo,
      factor.us_hi,
      BULLET_BAR_WIDTH,
    );
    svg
      .append('line')
      .attr('class', 'marker-county')
      .attr('x1', countyX)
      .attr('x2', countyX)
      .attr('y1', 0)
      .attr('y2', BULLET_BAR_HEIGHT)
      .attr('stroke', '#000')
      .attr('stroke-width', 2);

    const averageX = bulletOffset(
      factor.us_average,
      factor.us_lo,
      factor.us_hi,
      BULLET_BAR_WIDTH,
    );
    svg
      .append('line')
      .attr('class', 'marker-us-average')
      .attr('x1', averageX)
      .attr('x2', averageX)
      .attr('y1', 0)
      .attr('y2', BULLET_BAR_HEIGHT)
      .attr('stroke', '#000')
      .attr('stroke-width', 1)
      .attr('stroke-dasharray', '2 2');
  }
}
