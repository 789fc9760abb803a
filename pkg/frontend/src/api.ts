/** Typed client for the risk-pattern HTTP service. */

import type * as GeoJSON from 'geojson';

export interface Meta {
  target_name: string;
  global_target_mean: number;
  pattern_count: number;
  dataset_fingerprint: string;
  date_axis: string[];
}

export interface CountySummary {
  fips: string;
  name: string;
  state: string;
  target_value: number | null;
}

export interface RiskFactor {
  feature: string;
  county_value: number;
  state_lo: number;
  state_hi: number;
  us_lo: number;
  us_hi: number;
  us_average: number;
  pattern_count: number;
}

export interface CountyProfile {
  fips: string;
  name: string;
  state: string;
  target_value: number | null;
  pattern_ids: string[];
  top_risk_factors: RiskFactor[];
}

export interface PatternSummary {
  pattern_id: string;
  rank: number;
  mean_target: number;
  constraint_count: number;
}

export interface ConstraintDisplay {
  feature: string;
  lo: number;
  hi: number;
  us_lo: number;
  us_hi: number;
  contribution: number;
}

export interface PatternDetail {
  pattern_id: string;
  rank: number;
  direction: string;
  mean_target: number;
  p_value: number;
  p_adjusted: number;
  members: string[];
  constraints: ConstraintDisplay[];
}

export interface Timeseries {
  dates: string[];
  values: number[];
}

export interface CountyFeatureProperties {
  GEOID: string;
  name: string;
  state: string;
}

export type CountyGeometry = GeoJSON.FeatureCollection<
  GeoJSON.Geometry,
  CountyFeatureProperties
>;

type Envelope<T> =
  | { status: 'ok'; data: T }
  | { status: 'error'; error: { code: string; message: string } };

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

/** What the dashboard needs from the service; `DashboardApi` is the live implementation. */
export interface ApiClient {
  meta(): Promise<Meta>;
  counties(): Promise<CountySummary[]>;
  countyProfile(fips: string): Promise<CountyProfile>;
  patterns(): Promise<PatternSummary[]>;
  patternDetail(patternId: string): Promise<PatternDetail>;
  timeseries(fips: string): Promise<Timeseries>;
  countyGeometry(): Promise<CountyGeometry>;
}

export class DashboardApi implements ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    const body = (await response.json()) as Envelope<T>;
    if (body.status === 'error') {
      throw new ApiError(body.error.code, body.error.message);
    }
    return body.data;
  }

  meta(): Promise<Meta> {
    return this.get<Meta>('/api/meta');
  }

  counties(): Promise<CountySummary[]> {
    return this.get<CountySummary[]>('/api/counties');
  }

  countyProfile(fips: string): Promise<CountyProfile> {
    return this.get<CountyProfile>(`/api/counties/${fips}`);
  }

  patterns(): Promise<PatternSummary[]> {
    return this.get<PatternSummary[]>('/api/patterns');
  }

  patternDetail(patternId: string): Promise<PatternDetail> {
    return this.get<PatternDetail>(`/api/patterns/${patternId}`);
  }

  timeseries(fips: string): Promise<Timeseries> {
    return this.get<Timeseries>(`/api/timeseries/${fips}`);
  }

  async countyGeometry(): Promise<CountyGeometry> {
    const response = await fetch(this.baseUrl + '/geo/counties.geojson');
    if (!response.ok) {
      throw new ApiError('not_found', 'county geometry unavailable');
    }
    return (await response.json()) as CountyGeometry;
  }
}
