import * as d3 from 'd3';
import type { Meta, PatternDetail } from './api';
import { BULLET_BAR_HEIGHT, BULLET_BAR_WIDTH, bulletSegment } from './bullet';

const US_RANGE_FILL = '#d0d0d0';
const INTERVAL_FILL = '#2171b5';

function formatValue(value: number): string {
  return d3.format('~g')(value);
}

/**
 * Pattern detail panel: rank, significance, membership, and one bullet
 * chart per constraint — a gray bar for the US-wide feature range with the
 * pattern's interval drawn as a blue segment proportionally inside it,
 * annotated with the constraint's contribution weight.
 */
export function renderPatternInfo(
  element: HTMLElement,
  detail: PatternDetail | null,
  meta: Meta,
): void {
  const root = d3.select(element);
  root.selectAll('*').remove();

  if (detail === null) {
    root.append('p').attr('class', 'placeholder').text('select a pattern tile');
    return;
  }

  const header = root.append('div').attr('class', 'pattern-header');
  header
    .append('h3')
    .text(`risk pattern ${detail.rank} of ${meta.pattern_count}`);
  header
    .append('p')
    .text(
      `mean ${meta.target_name}: ${formatValue(detail.mean_target)} ` +
        `(US average ${formatValue(meta.global_target_mean)}) - ` +
        `${detail.members.length} counties - adjusted p ${detail.p_adjusted}`,
    );

  const list = root.append('div').attr('class', 'bullet-list');
  for (const constraint of detail.constraints) {
    const row = list
      .append('div')
      .attr('class', 'bullet-row')
      .attr('data-feature', constraint.feature);
    row
      .append('div')
      .attr('class', 'bullet-label')
      .text(
        `${constraint.feature}: [${formatValue(constraint.lo)}, ${formatValue(constraint.hi)}]` +
          ` of US [${formatValue(constraint.us_lo)}, ${formatValue(constraint.us_hi)}]` +
          ` (weight ${constraint.contribution.toFixed(2)})`,
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
      constraint.lo,
      constraint.hi,
      constraint.us_lo,
      constraint.us_hi,
      BULLET_BAR_WIDTH,
    );
    svg
      .append('rect')
      .attr('class', 'bullet-interval')
      .attr('x', segment.offset)
      .attr('y', 0)
      .attr('width', segment.width)
      .attr('height', BULLET_BAR_HEIGHT)
      .attr('fill', INTERVAL_FILL);
  }
}
