/** Chart models built from a curves reply.
 *
 * Everything here is pure geometry: the service supplies every number and
 * this module only scales them into SVG paths.  The DOM layer draws the
 * paths and wires the drag interaction.
 */

import type { CurvesResult } from "./types.js";

export interface Frame {
  w: number;
  h: number;
  pad: number;
}

export const DEFAULT_FRAME: Frame = { w: 560, h: 320, pad: 42 };

export interface Series {
  name: string;
  path: string;
}

export interface MeasuresChart {
  series: Series[];
  /** vertical line at the observed interim estimate */
  observed: { x: number; px: number };
  /** horizontal reference at the 50% level */
  power: { y: number; py: number };
  /** grid row where conditional and predictive power meet the 50% line */
  crossing: { x: number; cp: number; ppos: number } | null;
  notice: string | null;
  xDomain: [number, number];
  frame: Frame;
}

export interface DensityChart {
  series: Series[];
  observed: { x: number; px: number };
  notice: string | null;
  xDomain: [number, number];
  frame: Frame;
  /** inverse x scale, for dragging the observed line */
  xFromPixel: (px: number) => number;
}

function linScale(d0: number, d1: number, r0: number, r1: number) {
  const span = d1 - d0;
  if (span === 0) {
    const mid = (r0 + r1) / 2;
    return (_x: number) => mid;
  }
  const k = (r1 - r0) / span;
  return (x: number) => r0 + (x - d0) * k;
}

function pathOf(
  xs: readonly number[],
  ys: readonly number[],
  sx: (x: number) => number,
  sy: (y: number) => number,
): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i]!;
    const y = ys[i]!;
    parts.push(`${i === 0 ? "M" : "L"}${sx(x).toFixed(2)},${sy(y).toFixed(2)}`);
  }
  return parts.join(" ");
}

const span = (xs: readonly number[]): [number, number] => {
  let lo = Infinity;
  let hi = -Infinity;
  for (const x of xs) {
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  return [lo, hi];
};

const singlePoint = (xs: readonly number[]): boolean =>
  xs.length > 0 && xs.every((x) => x === xs[0]);

const flat = (ys: readonly number[]): boolean => {
  const [lo, hi] = span(ys);
  return hi - lo < 1e-9;
};

export const SINGLE_POINT_NOTICE =
  "the sweep window has zero width, so only a single grid point was evaluated";
export const FLAT_NOTICE =
  "the measures barely move across this window; widen the sweep range";

/**
 * Row of the emitted grid where both conditional power and the no-prior
 * predictive probability sit on the 50% reference.  The service splices
 * the exact crossing into the grid, so on a healthy reply this row exists.
 */
export function crossingRow(
  result: CurvesResult,
): { x: number; cp: number; ppos: number } | null {
  const { estimate, cp_trend, ppos_no_prior } = result.measures;
  for (let i = 0; i < estimate.length; i++) {
    const cp = cp_trend[i]!;
    const ppos = ppos_no_prior[i]!;
    if (Math.abs(cp - 0.5) < 1e-9 && Math.abs(ppos - 0.5) < 1e-9) {
      return { x: estimate[i]!, cp, ppos };
    }
  }
  return null;
}

export function measuresChart(
  result: CurvesResult,
  frame: Frame = DEFAULT_FRAME,
): MeasuresChart {
  const m = result.measures;
  const xs = m.estimate;
  let [lo, hi] = span(xs);
  lo = Math.min(lo, result.reference.observed);
  hi = Math.max(hi, result.reference.observed);
  const sx = linScale(lo, hi, frame.pad, frame.w - frame.pad);
  const sy = linScale(0, 1, frame.h - frame.pad, frame.pad);

  const series: Series[] = [
    { name: "conditional power", path: pathOf(xs, m.cp_trend, sx, sy) },
    { name: "predictive, no prior",
      path: pathOf(xs, m.ppos_no_prior, sx, sy) },
  ];
  const wp = m.ppos_with_prior;
  if (wp !== undefined && wp !== null) {
    series.push({ name: "predictive, with prior",
      path: pathOf(xs, wp, sx, sy) });
  }

  let notice: string | null = null;
  if (singlePoint(xs)) {
    notice = SINGLE_POINT_NOTICE;
  } else if (flat(m.cp_trend) && flat(m.ppos_no_prior)) {
    notice = FLAT_NOTICE;
  }

  return {
    series,
    observed: { x: result.reference.observed,
      px: sx(result.reference.observed) },
    power: { y: result.reference.power, py: sy(result.reference.power) },
    crossing: crossingRow(result),
    notice,
    xDomain: [lo, hi],
    frame,
  };
}

export function densityChart(
  result: CurvesResult,
  frame: Frame = DEFAULT_FRAME,
): DensityChart {
  const d = result.density;
  let [lo, hi] = span(d.x);
  lo = Math.min(lo, result.reference.observed);
  hi = Math.max(hi, result.reference.observed);
  let top = span(d.no_prior)[1];
  const wp = d.with_prior;
  if (wp !== undefined && wp !== null) top = Math.max(top, span(wp)[1]);
  if (top <= 0) top = 1;

  const sx = linScale(lo, hi, frame.pad, frame.w - frame.pad);
  const sy = linScale(0, top, frame.h - frame.pad, frame.pad);

  const series: Series[] = [
    { name: "no prior", path: pathOf(d.x, d.no_prior, sx, sy) },
  ];
  if (wp !== undefined && wp !== null) {
    series.push({ name: "with prior", path: pathOf(d.x, wp, sx, sy) });
  }

  const pixelSpan = hi - lo;
  const xFromPixel = (px: number): number =>
    pixelSpan === 0
      ? lo
      : lo + ((px - frame.pad) / (frame.w - 2 * frame.pad)) * pixelSpan;

  return {
    series,
    observed: { x: result.reference.observed,
      px: sx(result.reference.observed) },
    notice: singlePoint(d.x) ? SINGLE_POINT_NOTICE : null,
    xDomain: [lo, hi],
    frame,
    xFromPixel,
  };
}

/** evenly spaced axis labels */
export function ticks(domain: [number, number], count: number): number[] {
  const [lo, hi] = domain;
  const out: number[] = [];
  for (let i = 0; i <= count; i++) {
    out.push(lo + ((hi - lo) * i) / count);
  }
  return out;
}
