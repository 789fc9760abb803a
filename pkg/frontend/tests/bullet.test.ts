import { describe, expect, it } from 'vitest';
import { BULLET_BAR_WIDTH, bulletOffset, bulletSegment } from '../src/bullet';

describe('bulletSegment', () => {
  it('places [37.6, 99.2] inside US [0, 99.2] starting at 37.9% of the bar', () => {
    const segment = bulletSegment(37.6, 99.2, 0, 99.2, BULLET_BAR_WIDTH);
    expect(segment.offset / BULLET_BAR_WIDTH).toBeCloseTo(0.379, 3);
    expect(segment.offset + segment.width).toBeCloseTo(BULLET_BAR_WIDTH, 9);
  });

  it('matches the proportional formula exactly at 600 px', () => {
    const cases = [
      { lo: 37.6, hi: 99.2, usLo: 0, usHi: 99.2 },
      { lo: 2.4, hi: 3.7, usLo: 0, usHi: 4 },
      { lo: 21, hi: 34.7, usLo: 7.5, usHi: 34.7 },
      { lo: -5, hi: 5, usLo: -10, usHi: 10 },
    ];
    for (const { lo, hi, usLo, usHi } of cases) {
      const segment = bulletSegment(lo, hi, usLo, usHi, 600);
      expect(segment.offset).toBeCloseTo(((lo - usLo) / (usHi - usLo)) * 600, 9);
      expect(segment.width).toBeCloseTo(((hi - lo) / (usHi - usLo)) * 600, 9);
    }
  });

  it('falls back to the full bar when the US range has no span', () => {
    expect(bulletSegment(1, 1, 1, 1, 600)).toEqual({ offset: 0, width: 600 });
  });
});

describe('bulletOffset', () => {
  it('positions point markers proportionally', () => {
    expect(bulletOffset(2.9, 0, 4, 600)).toBeCloseTo(435, 9);
    expect(bulletOffset(0, 0, 4, 600)).toBe(0);
    expect(bulletOffset(4, 0, 4, 600)).toBe(600);
  });
});
