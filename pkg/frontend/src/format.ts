/** Number formatting for the dashboard. */

/** Fixed three decimals, the display precision for every probability row. */
export function fmt3(x: number): string {
  const text = x.toFixed(3);
  // a tiny negative rounds to "-0.000"; show the signless form
  return text === "-0.000" ? "0.000" : text;
}

/** mean (sd) pair, used for posterior and predictive summaries */
export function fmtMeanSd(pair: { mean: number; sd: number }): string {
  return `${fmt3(pair.mean)} (sd ${fmt3(pair.sd)})`;
}
