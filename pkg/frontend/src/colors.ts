import * as d3 from 'd3';

/**
 * Single highlight color for every selection cue (county outline, member
 * outlines, selected tile border).
 */
export const HIGHLIGHT_COLOR = '#ff8c00';

/** Neutral fill for counties with no target value. */
export const MISSING_FILL = '#bdbdbd';

/** Fill for pattern tiles grayed out by a county selection. */
export const DIMMED_TILE_FILL = '#d9d9d9';

const CHOROPLETH_LOW = '#ffffff';
const CHOROPLETH_HIGH = '#08306b';
const TILE_LIGHT = '#c6dbef';
const TILE_DARK = '#08306b';

/**
 * Map fill: linear white (target 0) to dark blue, clamped at the 99th
 * percentile of observed target values so one outlier county cannot wash
 * out the contrast of the rest of the map.
 */
export function choroplethScale(
  targetValues: readonly number[],
): (value: number | null) => string {
  const sorted = targetValues.filter((v) => v != null).sort(d3.ascending);
  const clamp = sorted.length > 0 ? (d3.quantile(sorted, 0.99) ?? 0) : 0;
  const interpolate = d3.interpolateRgb(CHOROPLETH_LOW, CHOROPLETH_HIGH);
  return (value) => {
    if (value == null) return MISSING_FILL;
    if (clamp <= 0) return interpolate(value > 0 ? 1 : 0);
    return interpolate(Math.min(value, clamp) / clamp);
  };
}

/** Tile fill: higher mean target, darker blue; rank 1 is the darkest tile. */
export function tileScale(
  meanTargets: readonly number[],
): (mean: number) => string {
  const lo = d3.min(meanTargets) ?? 0;
  const hi = d3.max(meanTargets) ?? 0;
  const interpolate = d3.interpolateRgb(TILE_LIGHT, TILE_DARK);
  if (hi <= lo) return () => TILE_DARK;
  return (mean) => interpolate((mean - lo) / (hi - lo));
}

/** Relative luminance of a CSS rgb()/hex color; lower is darker. */
export function luminance(color: string): number {
  const { r, g, b } = d3.rgb(color);
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}
