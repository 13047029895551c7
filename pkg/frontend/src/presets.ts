/** Built-in scenarios reproducing the published worked examples.
 *
 * Inputs are carried at full precision (the derived standard errors are
 * written out to the last digit) so the service reproduces the published
 * values; where a published table itself was rounded before reuse, the
 * engine's third decimal can differ by one, and the tests pin exactly
 * which digits are reproduced.
 */

import type { Scenario } from "./types.js";

export interface Preset {
  id: string;
  title: string;
  scenario: Scenario;
}

const scenario = (s: Scenario): Scenario => s;

export const PRESETS: Preset[] = [
  {
    id: "ex1",
    title: "Example 1: continuous, interim at half information",
    scenario: scenario({
      mode: "normal", type: "cont", nsamples: 2, succCrit: "trial",
      fields: {
        "null.value": "-0.05", alternative: "greater", a: "1",
        N: "1552", n: "776",
        "meandiff.ia": "-0.025", "sd.ia": "0.16",
        "meandiff.exp": "-0.03",
        "meandiff.prior": "0", "sd.prior": "0.02",
        "se.exp": "0.006092076990801714",
        "Z.crit.final": "1.97",
      },
      sweep: { lo: "-0.08", hi: "0.03", points: "111" },
    }),
  },
  {
    id: "ex2-trial",
    title: "Example 2: binary, trial success",
    scenario: scenario({
      mode: "normal", type: "bin", nsamples: 2, succCrit: "trial",
      fields: {
        "null.value": "0", alternative: "greater", a: "2",
        N: "210", n: "158",
        "propdiff.ia": "0.157",
        "stderr.ia": "0.07416405287296855",
        "propdiff.exp": "0.2",
        "propdiff.prior": "0.2", "sd.prior": "0.2449489742783178",
        "prop.trt.exp": "0.3", "prop.con.exp": "0.1",
        "Z.crit.final": "2.012",
      },
      sweep: { lo: "", hi: "", points: "" },
    }),
  },
  {
    id: "ex2-clinical",
    title: "Example 2: binary, clinical success",
    scenario: scenario({
      mode: "normal", type: "bin", nsamples: 2, succCrit: "clinical",
      fields: {
        "null.value": "0", alternative: "greater", a: "2",
        N: "210", n: "158",
        "propdiff.ia": "0.157",
        "stderr.ia": "0.07416405287296855",
        "propdiff.exp": "0.2",
        "propdiff.prior": "0.2", "sd.prior": "0.2449489742783178",
        "prop.trt.exp": "0.3", "prop.con.exp": "0.1",
        "clin.succ.threshold": "0.15",
      },
      sweep: { lo: "", hi: "", points: "" },
    }),
  },
  {
    id: "ex3-design",
    title: "Example 3: survival, design-stage PoS",
    scenario: scenario({
      mode: "normal", type: "surv", nsamples: 2, succCrit: "trial",
      fields: {
        "null.value": "1", alternative: "less",
        D: "441",
        "hr.prior": "0.71", "D.prior": "133",
        "Z.crit.final": "1.96",
      },
      sweep: { lo: "", hi: "", points: "" },
    }),
  },
  {
    id: "ex3-trial",
    title: "Example 3: survival interim, trial success",
    scenario: scenario({
      mode: "normal", type: "surv", nsamples: 2, succCrit: "trial",
      fields: {
        "null.value": "1", alternative: "less", a: "1",
        D: "441", d: "346",
        "hr.ia": "0.82", "hr.exp": "0.75",
        "hr.prior": "0.71", "D.prior": "133",
        "Z.crit.final": "2.012",
      },
      sweep: { lo: "0.65", hi: "1", points: "101" },
    }),
  },
  {
    id: "ex3-clinical",
    title: "Example 3: survival interim, clinical success",
    scenario: scenario({
      mode: "normal", type: "surv", nsamples: 2, succCrit: "clinical",
      fields: {
        "null.value": "1", alternative: "less", a: "1",
        D: "441", d: "346",
        "hr.ia": "0.82", "hr.exp": "0.75",
        "hr.prior": "0.71", "D.prior": "133",
        "clin.succ.threshold": "0.8",
      },
      sweep: { lo: "", hi: "", points: "" },
    }),
  },
  {
    id: "ex4",
    title: "Example 4: binary, exact beta-binomial",
    scenario: scenario({
      mode: "betabinom", type: "bin", nsamples: 2, succCrit: "trial",
      fields: {
        "N.trt": "325", "n.trt": "155", "x.trt": "13",
        "N.con": "323", "n.con": "152", "x.con": "21",
        "a.trt": "1", "b.trt": "1", "a.con": "1", "b.con": "1",
        alternative: "less", test: "z",
        "Z.crit.final": "1.96",
      },
      sweep: { lo: "", hi: "", points: "" },
    }),
  },
];

export function presetById(id: string): Preset {
  const hit = PRESETS.find((p) => p.id === id);
  if (!hit) throw new Error(`no preset named ${id}`);
  return hit;
}

export function blankScenario(): Scenario {
  return {
    mode: "normal", type: "cont", nsamples: 2, succCrit: "trial",
    fields: { alternative: "greater", a: "1" },
    sweep: { lo: "", hi: "", points: "" },
  };
}
