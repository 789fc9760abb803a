import { afterAll, beforeAll, describe, expect, inject, it } from 'vitest';
import * as d3 from 'd3';
import {
  DashboardApi,
  type ApiClient,
  type CountyProfile,
} from '../src/api';
import { createDashboard, type Dashboard } from '../src/app';
import { BULLET_BAR_WIDTH } from '../src/bullet';
import { HIGHLIGHT_COLOR, MISSING_FILL, luminance } from '../src/colors';

const DARKEST_BLUE = d3.rgb('#08306b').toString();

function click(el: Element): void {
  el.dispatchEvent(new MouseEvent('click', { bubbles: true }));
}

function shadedTileIds(root: HTMLElement): string[] {
  return [...root.querySelectorAll('.tile[data-shaded="true"]')].map(
    (el) => el.getAttribute('data-pattern-id') ?? '',
  );
}

function tileFor(root: HTMLElement, patternId: string): HTMLElement {
  const tile = root.querySelector(`.tile[data-pattern-id="${patternId}"]`);
  if (!tile) throw new Error(`no tile for ${patternId}`);
  return tile as HTMLElement;
}

function countyPath(root: HTMLElement, fips: string): SVGPathElement {
  const path = root.querySelector(`path.county[data-fips="${fips}"]`);
  if (!path) throw new Error(`no county path for ${fips}`);
  return path as SVGPathElement;
}

function memberFips(root: HTMLElement): string[] {
  return [...root.querySelectorAll('path.county[data-member="true"]')].map(
    (el) => el.getAttribute('data-fips') ?? '',
  );
}

describe('linked-panel walkthrough against the fixture service', () => {
  let api: DashboardApi;
  let root: HTMLElement;
  let dash: Dashboard;

  beforeAll(async () => {
    api = new DashboardApi(inject('baseUrl'));
    root = document.createElement('div');
    document.body.appendChild(root);
    dash = await createDashboard(root, api);
  });

  afterAll(() => {
    dash.destroy();
    root.remove();
  });

  it('starts with every tile shaded, in rank order, rank 1 darkest', async () => {
    const patterns = await api.patterns();
    const tiles = [...root.querySelectorAll('.tile')];
    expect(tiles.map((t) => t.getAttribute('data-pattern-id'))).toEqual(
      patterns.map((p) => p.pattern_id),
    );
    expect(shadedTileIds(root)).toHaveLength(patterns.length);
    const fills = tiles.map((t) =>
      t.querySelector('rect')?.getAttribute('fill') ?? '',
    );
    const lums = fills.map(luminance);
    expect(Math.min(...lums)).toBe(lums[0]);
  });

  it('paints the choropleth white-to-dark-blue with gray for missing data', async () => {
    const counties = await api.counties();
    const maxCounty = counties.reduce((a, b) =>
      (b.target_value ?? -Infinity) > (a.target_value ?? -Infinity) ? b : a,
    );
    expect(countyPath(root, maxCounty.fips).getAttribute('fill')).toBe(
      DARKEST_BLUE,
    );

    const missing = countyPath(root, '04013');
    expect(missing.getAttribute('fill')).toBe(MISSING_FILL);
    expect(missing.querySelector('title')?.textContent).toBe('no data');

    const present = counties
      .filter((c) => c.target_value != null)
      .sort((a, b) => (a.target_value ?? 0) - (b.target_value ?? 0));
    const clamp =
      d3.quantile(
        present.map((c) => c.target_value ?? 0).sort(d3.ascending),
        0.99,
      ) ?? 0;
    const below = present.filter((c) => (c.target_value ?? 0) < clamp);
    for (let i = 1; i < below.length; i += 1) {
      const darker = luminance(
        countyPath(root, below[i].fips).getAttribute('fill') ?? '',
      );
      const lighter = luminance(
        countyPath(root, below[i - 1].fips).getAttribute('fill') ?? '',
      );
      expect(darker).toBeLessThan(lighter);
    }
  });

  it('shades exactly the containing tiles when a county is selected', async () => {
    click(countyPath(root, '48061'));
    await dash.idle();

    const profile = await api.countyProfile('48061');
    expect(shadedTileIds(root).sort()).toEqual([...profile.pattern_ids].sort());
    expect(countyPath(root, '48061').getAttribute('data-selected')).toBe('true');
    expect(root.textContent).toContain('Cameron, TX');
  });

  it('outlines exactly the members when the rank-1 tile is clicked', async () => {
    const patterns = await api.patterns();
    const rankOne = patterns[0];
    click(tileFor(root, rankOne.pattern_id));
    await dash.idle();

    const detail = await api.patternDetail(rankOne.pattern_id);
    expect(memberFips(root).sort()).toEqual([...detail.members].sort());
    // Cameron belongs to the rank-1 pattern, so its selection survives.
    expect(countyPath(root, '48061').getAttribute('data-selected')).toBe('true');
    expect(dash.getState().selectedFips).toBe('48061');
  });

  it('renders the selected tile as a circle with the highlight border', async () => {
    const patterns = await api.patterns();
    const tile = tileFor(root, patterns[0].pattern_id);
    const circle = tile.querySelector('circle');
    expect(circle).not.toBeNull();
    expect(circle?.getAttribute('stroke')).toBe(HIGHLIGHT_COLOR);
    expect(tile.querySelector('rect')).toBeNull();
    expect(root.querySelectorAll('.tile circle')).toHaveLength(1);
  });

  it('places the rank-1 interval segments by the proportional formula', async () => {
    const patterns = await api.patterns();
    const detail = await api.patternDetail(patterns[0].pattern_id);
    for (const constraint of detail.constraints) {
      const row = root.querySelector(
        `[data-panel="pattern-info"] [data-feature="${constraint.feature}"]`,
      );
      const segment = row?.querySelector('.bullet-interval');
      const span = constraint.us_hi - constraint.us_lo;
      const wantX = ((constraint.lo - constraint.us_lo) / span) * BULLET_BAR_WIDTH;
      const wantW = ((constraint.hi - constraint.lo) / span) * BULLET_BAR_WIDTH;
      expect(Math.abs(Number(segment?.getAttribute('x')) - wantX)).toBeLessThan(1);
      expect(Math.abs(Number(segment?.getAttribute('width')) - wantW)).toBeLessThan(1);
    }
  });

  it('clears the pattern selection when a new county is clicked', async () => {
    click(countyPath(root, '09003'));
    await dash.idle();

    expect(dash.getState().selectedPatternId).toBeNull();
    expect(root.querySelectorAll('.tile circle')).toHaveLength(0);
    expect(memberFips(root)).toHaveLength(0);

    const profile = await api.countyProfile('09003');
    expect(shadedTileIds(root).sort()).toEqual([...profile.pattern_ids].sort());
  });

  it("has Hartford's first shaded tile at rank 3", () => {
    const firstShaded = [...root.querySelectorAll('.tile')].find(
      (t) => t.getAttribute('data-shaded') === 'true',
    );
    expect(firstShaded?.getAttribute('data-rank')).toBe('3');
  });

  it("draws Hartford's GPA factor with county and US-average markers", () => {
    const row = root.querySelector(
      '[data-panel="county-info"] [data-feature="avg. GPA"]',
    );
    expect(row).not.toBeNull();
    const county = row?.querySelector('.marker-county');
    expect(Number(county?.getAttribute('x1'))).toBeCloseTo(
      (2.9 / 4) * BULLET_BAR_WIDTH,
      6,
    );
    const stateRange = row?.querySelector('.bullet-state-range');
    expect(Number(stateRange?.getAttribute('x'))).toBeCloseTo(
      (2.4 / 4) * BULLET_BAR_WIDTH,
      6,
    );
    expect(Number(stateRange?.getAttribute('width'))).toBeCloseTo(
      ((3.7 - 2.4) / 4) * BULLET_BAR_WIDTH,
      6,
    );
    expect(
      root.querySelector('[data-panel="county-info"] .us-reference'),
    ).not.toBeNull();
  });

  it('deselects when the selected county is clicked again', async () => {
    click(countyPath(root, '09003'));
    await dash.idle();

    expect(dash.getState().selectedFips).toBeNull();
    expect(root.querySelector('path.county[data-selected]')).toBeNull();
    expect(shadedTileIds(root)).toHaveLength(12);
    expect(
      root.querySelector('[data-panel="county-info"] .placeholder')?.textContent,
    ).toContain('select a county');
  });

  it('treats ocean clicks as a no-op', () => {
    const before = dash.getState();
    const background = root.querySelector('.geomap-background');
    expect(background).not.toBeNull();
    click(background as Element);
    expect(dash.getState()).toEqual(before);
  });

  it('drops the county selection when it is not a member of the clicked tile', async () => {
    click(countyPath(root, '06073'));
    await dash.idle();
    expect(shadedTileIds(root)).toHaveLength(0);
    expect(root.textContent).toContain('no risk patterns');

    const patterns = await api.patterns();
    click(tileFor(root, patterns[0].pattern_id));
    await dash.idle();

    expect(dash.getState().selectedFips).toBeNull();
    expect(root.querySelector('path.county[data-selected]')).toBeNull();
    expect(shadedTileIds(root)).toHaveLength(12);
    expect(
      root.querySelector('[data-panel="county-info"] .placeholder')?.textContent,
    ).toContain('select a county');

    click(tileFor(root, patterns[0].pattern_id));
    await dash.idle();
  });

  it('keeps shaded tiles equal to the served pattern list for any county', async () => {
    for (const fips of ['48061', '09003', '35031', '12086', '34003', '04013']) {
      click(countyPath(root, fips));
      await dash.idle();
      const profile = await api.countyProfile(fips);
      expect(shadedTileIds(root).sort()).toEqual([...profile.pattern_ids].sort());
      click(countyPath(root, fips));
      await dash.idle();
    }
  });
});

describe('stale response handling', () => {
  it('discards a profile that arrives after a newer selection', async () => {
    const real = new DashboardApi(inject('baseUrl'));
    let releaseHartford: (() => void) | null = null;
    const gated: ApiClient = {
      meta: () => real.meta(),
      counties: () => real.counties(),
      patterns: () => real.patterns(),
      patternDetail: (id) => real.patternDetail(id),
      timeseries: (fips) => real.timeseries(fips),
      countyGeometry: () => real.countyGeometry(),
      countyProfile: (fips: string): Promise<CountyProfile> => {
        const result = real.countyProfile(fips);
        if (fips !== '09003') return result;
        return new Promise((resolve, reject) => {
          releaseHartford = () => result.then(resolve, reject);
        });
      },
    };

    const root = document.createElement('div');
    document.body.appendChild(root);
    const dash = await createDashboard(root, gated);

    const slow = dash.selectCounty('09003');
    await dash.selectCounty('12011');
    expect(releaseHartford).not.toBeNull();
    releaseHartford!();
    await slow;
    await dash.idle();

    expect(dash.getState().selectedFips).toBe('12011');
    expect(root.textContent).toContain('Broward, FL');
    expect(root.textContent).not.toContain('Hartford');
    const profile = await real.countyProfile('12011');
    expect(shadedTileIds(root).sort()).toEqual([...profile.pattern_ids].sort());

    dash.destroy();
    root.remove();
  });
});
