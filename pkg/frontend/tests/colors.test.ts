import { describe, expect, it } from 'vitest';
import * as d3 from 'd3';
import {
  MISSING_FILL,
  choroplethScale,
  luminance,
  tileScale,
} from '../src/colors';

const TARGETS = [60, 70, 80, 90, 95, 100, 120, 135, 150, 160, 170, 180, 190, 200, 210];

describe('choroplethScale', () => {
  it('maps target 0 to white', () => {
    const fill = choroplethScale(TARGETS);
    expect(d3.rgb(fill(0)).formatHex()).toBe('#ffffff');
  });

  it('maps the maximum target to the darkest blue', () => {
    const fill = choroplethScale(TARGETS);
    expect(d3.rgb(fill(Math.max(...TARGETS))).formatHex()).toBe('#08306b');
  });

  it('fills missing targets with neutral gray', () => {
    const fill = choroplethScale(TARGETS);
    expect(fill(null)).toBe(MISSING_FILL);
  });

  it('is strictly darker for strictly higher targets below the clamp', () => {
    const fill = choroplethScale(TARGETS);
    const clamp = d3.quantile([...TARGETS].sort(d3.ascending), 0.99) ?? 0;
    const below = TARGETS.filter((v) => v < clamp).sort(d3.ascending);
    for (let i = 1; i < below.length; i += 1) {
      expect(luminance(fill(below[i]))).toBeLessThan(luminance(fill(below[i - 1])));
    }
  });

  it('clamps values above the 99th percentile to the same color', () => {
    const withOutlier = [...TARGETS, 10000];
    const fill = choroplethScale(withOutlier);
    const clamp = d3.quantile([...withOutlier].sort(d3.ascending), 0.99) ?? 0;
    expect(fill(10000)).toBe(fill(clamp));
    expect(fill(clamp * 0.5)).not.toBe(fill(clamp));
  });

  it('keeps zero white even when every county is zero', () => {
    const fill = choroplethScale([0, 0, 0]);
    expect(d3.rgb(fill(0)).formatHex()).toBe('#ffffff');
  });
});

describe('tileScale', () => {
  it('gives the highest mean the darkest tile', () => {
    const means = [190, 183, 168, 140];
    const fill = tileScale(means);
    const lums = means.map((m) => luminance(fill(m)));
    expect(Math.min(...lums)).toBe(lums[0]);
    for (let i = 1; i < lums.length; i += 1) {
      expect(lums[i]).toBeGreaterThan(lums[i - 1]);
    }
  });

  it('degenerates to the dark end when all means are equal', () => {
    const fill = tileScale([150, 150]);
    expect(d3.rgb(fill(150)).formatHex()).toBe('#08306b');
  });
});
