/** Shared types: scenarios on the client side, envelopes on the wire. */

export type EndpointKind = "cont" | "bin" | "surv";
export type Arms = 1 | 2;
export type SuccCrit = "trial" | "clinical";

/**
 * A scenario is the whole form state.  Field values stay as entered (raw
 * strings keyed by the service's dotted parameter names); parsing happens
 * when a request is built, so a half-typed number never corrupts state.
 */
export interface Scenario {
  /** "normal" covers the six endpoint/arm cells; "betabinom" is the exact
      binary mode. */
  mode: "normal" | "betabinom";
  type: EndpointKind;
  nsamples: Arms;
  succCrit: SuccCrit;
  fields: Record<string, string>;
  sweep: { lo: string; hi: string; points: string };
}

/** Success envelope returned by every service endpoint. */
export interface Envelope {
  v: number;
  kind: string;
  result: Record<string, unknown>;
  echo: Record<string, number | string | null>;
  warnings: string[];
}

export interface ServiceError {
  v: number;
  error: { code: string; message: string };
}

export interface CurvesResult {
  measures: {
    estimate: number[];
    cp_trend: number[];
    ppos_no_prior: number[];
    ppos_with_prior?: number[];
  };
  density: { x: number[]; no_prior: number[]; with_prior?: number[] };
  reference: {
    observed: number;
    power: number;
    crossing: number | null;
    gamma: number;
  };
}
