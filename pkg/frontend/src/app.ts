import * as d3 from 'd3';
import {
  ApiError,
  type ApiClient,
  type CountyProfile,
  type Meta,
  type PatternDetail,
  type Timeseries,
} from './api';
import { renderCountyInfo } from './countyInfo';
import { renderGeomap, type GeomapHandle } from './geomap';
import { renderPatternBrowser, type PatternBrowserHandle } from './patternBrowser';
import { renderPatternInfo } from './patternInfo';
import {
  INITIAL_SELECTION,
  applySelection,
  type SelectionState,
} from './state';

export interface Dashboard {
  getState(): SelectionState;
  selectCounty(fips: string): Promise<void>;
  selectTile(patternId: string): Promise<void>;
  clickBackground(): void;
  /** Resolves once every interaction started so far has settled. */
  idle(): Promise<void>;
  destroy(): void;
}

/**
 * Wires the four linked panels together. All data comes from the HTTP
 * service; every fetch is tagged with the selection token current at the
 * time of the interaction, and a response whose token has been superseded
 * by a newer interaction is discarded instead of applied.
 */
export async function createDashboard(
  root: HTMLElement,
  api: ApiClient,
): Promise<Dashboard> {
  const [meta, counties, patterns, geometry] = await Promise.all([
    api.meta(),
    api.counties(),
    api.patterns(),
    api.countyGeometry(),
  ]);

  const layout = d3.select(root).append('div').attr('class', 'dashboard');
  const panel = (name: string): HTMLElement =>
    layout
      .append('section')
      .attr('class', 'panel')
      .attr('data-panel', name)
      .node() as HTMLElement;
  const geomapEl = panel('geomap');
  const browserEl = panel('pattern-browser');
  const patternInfoEl = panel('pattern-info');
  const countyInfoEl = panel('county-info');

  let state: SelectionState = INITIAL_SELECTION;
  let token = 0;
  let shadedPatternIds: ReadonlySet<string> | null = null;
  let memberFips: ReadonlySet<string> = new Set();
  let pending: Promise<void> = Promise.resolve();

  const profileCache = new Map<string, Promise<CountyProfile>>();
  const seriesCache = new Map<string, Promise<Timeseries | null>>();
  const detailCache = new Map<string, Promise<PatternDetail>>();

  const profileFor = (fips: string): Promise<CountyProfile> => {
    let hit = profileCache.get(fips);
    if (!hit) {
      hit = api.countyProfile(fips);
      profileCache.set(fips, hit);
    }
    return hit;
  };
  const seriesFor = (fips: string): Promise<Timeseries | null> => {
    let hit = seriesCache.get(fips);
    if (!hit) {
      hit = api.timeseries(fips).catch((err: unknown) => {
        if (err instanceof ApiError && err.code === 'not_found') return null;
        throw err;
      });
      seriesCache.set(fips, hit);
    }
    return hit;
  };
  const detailFor = (patternId: string): Promise<PatternDetail> => {
    let hit = detailCache.get(patternId);
    if (!hit) {
      hit = api.patternDetail(patternId);
      detailCache.set(patternId, hit);
    }
    return hit;
  };

  async function selectCounty(fips: string): Promise<void> {
    const requestToken = ++token;
    state = applySelection(state, { kind: 'county-click', fips });
    memberFips = new Set();
    geomap.update(state, memberFips);
    renderPatternInfo(patternInfoEl, null, meta);
    if (state.selectedFips === null) {
      shadedPatternIds = null;
      browser.update(state, shadedPatternIds);
      renderCountyInfo(countyInfoEl, null, null, meta);
      return;
    }
    browser.update(state, shadedPatternIds);
    const [profile, series] = await Promise.all([
      profileFor(state.selectedFips),
      seriesFor(state.selectedFips),
    ]);
    if (requestToken !== token) return;
    shadedPatternIds = new Set(profile.pattern_ids);
    browser.update(state, shadedPatternIds);
    renderCountyInfo(countyInfoEl, profile, series, meta);
  }

  async function selectTile(patternId: string): Promise<void> {
    const requestToken = ++token;
    const detail = await detailFor(patternId);
    if (requestToken !== token) return;
    const previousFips = state.selectedFips;
    state = applySelection(state, {
      kind: 'tile-click',
      patternId,
      members: detail.members,
    });
    if (state.selectedPatternId === null) {
      memberFips = new Set();
      geomap.update(state, memberFips);
      renderPatternInfo(patternInfoEl, null, meta);
      browser.update(state, shadedPatternIds);
      return;
    }
    memberFips = new Set(detail.members);
    geomap.update(state, memberFips);
    renderPatternInfo(patternInfoEl, detail, meta);
    if (previousFips !== null && state.selectedFips === null) {
      shadedPatternIds = null;
      renderCountyInfo(countyInfoEl, null, null, meta);
    }
    browser.update(state, shadedPatternIds);
  }

  function clickBackground(): void {
    state = applySelection(state, { kind: 'background-click' });
  }

  const track = (work: Promise<void>): Promise<void> => {
    const settled = work.catch((err: unknown) => {
      console.error('dashboard interaction failed:', err);
    });
    pending = pending.then(() => settled);
    return work;
  };

  const geomap: GeomapHandle = renderGeomap({
    element: geomapEl,
    counties,
    geometry,
    onCountyClick: (fips) => void track(selectCounty(fips)),
    onBackgroundClick: () => clickBackground(),
    onViewportChange: (viewport) => {
      state = applySelection(state, { kind: 'viewport-change', viewport });
    },
  });
  const browser: PatternBrowserHandle = renderPatternBrowser({
    element: browserEl,
    patterns,
    onTileClick: (patternId) => void track(selectTile(patternId)),
  });

  geomap.update(state, memberFips);
  browser.update(state, shadedPatternIds);
  renderPatternInfo(patternInfoEl, null, meta);
  renderCountyInfo(countyInfoEl, null, null, meta);

  return {
    getState: () => state,
    selectCounty: (fips) => track(selectCounty(fips)),
    selectTile: (patternId) => track(selectTile(patternId)),
    clickBackground,
    idle: () => pending.then(() => undefined),
    destroy() {
      geomap.destroy();
      browser.destroy();
      layout.remove();
    },
  };
}
