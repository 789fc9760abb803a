/**
 * Geometry for the horizontal bullet charts used by both info panels: a
 * gray bar spans the US range, and an inner segment (pattern interval or
 * state range) is placed proportionally inside it.
 */

export const BULLET_BAR_WIDTH = 600;
export const BULLET_BAR_HEIGHT = 14;

export interface BulletSegment {
  offset: number;
  width: number;
}

export function bulletSegment(
  lo: number,
  hi: number,
  usLo: number,
  usHi: number,
  barWidth: number = BULLET_BAR_WIDTH,
): BulletSegment {
  const span = usHi - usLo;
  if (span <= 0) return { offset: 0, width: barWidth };
  return {
    offset: ((lo - usLo) / span) * barWidth,
    width: ((hi - lo) / span) * barWidth,
  };
}

/** Horizontal position of a point marker (county value, US average). */
export function bulletOffset(
  value: number,
  usLo: number,
  usHi: number,
  barWidth: number = BULLET_BAR_WIDTH,
): number {
  const span = usHi - usLo;
  if (span <= 0) return 0;
  return ((value - usLo) / span) * barWidth;
}
