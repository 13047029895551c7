/** Field inventory and client-side validation for every scenario cell.
 *
 * Keys are the service's dotted parameter names, so the form state, the
 * request body, and a saved scenario file all share one vocabulary.  The
 * numeric constraints mirror the service's domain checks; the service
 * remains the authority, this layer just catches problems before a
 * request is wasted on them.
 */

import type { Scenario } from "./types.js";

export type FieldKind = "int" | "float" | "choice";
export type Group = "design" | "interim" | "expected" | "prior" | "success";

export interface FieldSpec {
  key: string;
  label: string;
  kind: FieldKind;
  group: Group;
  choices?: readonly string[];
  /** value must be strictly greater than this */
  gt?: number;
  /** value must be at least this */
  ge?: number;
  /** value must be strictly less than this */
  lt?: number;
  required?: boolean;
}

const f = (spec: FieldSpec): FieldSpec => spec;

const ALTERNATIVE = f({
  key: "alternative", label: "alternative", kind: "choice",
  group: "success", choices: ["greater", "less"], required: true,
});
const NULL_VALUE = (label: string) => f({
  key: "null.value", label, kind: "float", group: "design", required: true,
});
const ALLOC = f({
  key: "a", label: "allocation ratio a:1", kind: "float",
  group: "design", gt: 0,
});
const SD_PRIOR = f({
  key: "sd.prior", label: "prior sd", kind: "float", group: "prior", ge: 0,
});
const D_PRIOR = f({
  key: "D.prior", label: "prior events", kind: "int", group: "prior", gt: 0,
});

/** interim/expected/prior triple named after the effect scale */
function effect(stem: string, labels: [string, string, string]): FieldSpec[] {
  return [
    f({ key: `${stem}.ia`, label: labels[0], kind: "float",
        group: "interim", required: true }),
    f({ key: `${stem}.exp`, label: labels[1], kind: "float",
        group: "expected" }),
    f({ key: `${stem}.prior`, label: labels[2], kind: "float",
        group: "prior" }),
  ];
}

const COUNTS_SUBJECTS: FieldSpec[] = [
  f({ key: "N", label: "planned subjects N", kind: "int", group: "design",
      gt: 0, required: true }),
  f({ key: "n", label: "interim subjects n", kind: "int", group: "interim",
      gt: 0, required: true }),
];
const COUNTS_EVENTS: FieldSpec[] = [
  f({ key: "D", label: "planned events D", kind: "int", group: "design",
      gt: 0, required: true }),
  f({ key: "d", label: "interim events d", kind: "int", group: "interim",
      gt: 0, required: true }),
];

const NORMAL_CELLS: Record<string, FieldSpec[]> = {
  "cont/1": [
    NULL_VALUE("null mean"), ALTERNATIVE, ...COUNTS_SUBJECTS,
    ...effect("mean", ["interim mean", "expected mean", "prior mean"]),
    f({ key: "sd.ia", label: "interim sd", kind: "float", group: "interim",
        gt: 0, required: true }),
    SD_PRIOR,
  ],
  "cont/2": [
    NULL_VALUE("null mean difference"), ALTERNATIVE, ALLOC,
    ...COUNTS_SUBJECTS,
    ...effect("meandiff", ["interim mean difference",
      "expected mean difference", "prior mean difference"]),
    f({ key: "sd.ia", label: "interim sd", kind: "float", group: "interim",
        gt: 0, required: true }),
    SD_PRIOR,
    f({ key: "se.exp", label: "design-stage SE", kind: "float",
        group: "design", gt: 0 }),
  ],
  "bin/1": [
    NULL_VALUE("null proportion"), ALTERNATIVE, ...COUNTS_SUBJECTS,
    ...effect("prop", ["interim proportion", "expected proportion",
      "prior proportion"]),
    SD_PRIOR,
  ],
  "bin/2": [
    NULL_VALUE("null difference"), ALTERNATIVE, ALLOC,
    f({ key: "N", label: "planned subjects N", kind: "int", group: "design",
        gt: 0, required: true }),
    // either the difference with its SE, or per-arm counts
    f({ key: "n", label: "interim subjects n", kind: "int",
        group: "interim", gt: 0 }),
    f({ key: "propdiff.ia", label: "interim difference", kind: "float",
        group: "interim" }),
    f({ key: "stderr.ia", label: "interim SE", kind: "float",
        group: "interim", gt: 0 }),
    f({ key: "p.trt", label: "treatment rate", kind: "float",
        group: "interim", ge: 0 }),
    f({ key: "n.trt", label: "treatment n", kind: "int", group: "interim",
        gt: 0 }),
    f({ key: "p.con", label: "control rate", kind: "float",
        group: "interim", ge: 0 }),
    f({ key: "n.con", label: "control n", kind: "int", group: "interim",
        gt: 0 }),
    f({ key: "propdiff.exp", label: "expected difference", kind: "float",
        group: "expected" }),
    f({ key: "propdiff.prior", label: "prior difference", kind: "float",
        group: "prior" }),
    SD_PRIOR,
    f({ key: "prop.trt.exp", label: "design treatment rate", kind: "float",
        group: "design", gt: 0, lt: 1 }),
    f({ key: "prop.con.exp", label: "design control rate", kind: "float",
        group: "design", gt: 0, lt: 1 }),
  ],
  "surv/1": [
    NULL_VALUE("null median"), ALTERNATIVE, ...COUNTS_EVENTS,
    ...effect("median", ["interim median", "expected median",
      "prior median"]),
    f({ key: "xi", label: "variance inflation xi", kind: "float",
        group: "design", gt: 0 }),
    D_PRIOR,
  ],
  "surv/2": [
    NULL_VALUE("null hazard ratio"), ALTERNATIVE, ALLOC, ...COUNTS_EVENTS,
    ...effect("hr", ["interim hazard ratio", "expected hazard ratio",
      "prior hazard ratio"]),
    D_PRIOR,
  ],
};

const BETABINOM_FIELDS: FieldSpec[] = [
  f({ key: "N.trt", label: "treatment planned N", kind: "int",
      group: "design", gt: 0, required: true }),
  f({ key: "n.trt", label: "treatment interim n", kind: "int",
      group: "interim", gt: 0, required: true }),
  f({ key: "x.trt", label: "treatment responders x", kind: "int",
      group: "interim", ge: 0, required: true }),
  f({ key: "N.con", label: "control planned N", kind: "int",
      group: "design", gt: 0 }),
  f({ key: "n.con", label: "control interim n", kind: "int",
      group: "interim", gt: 0 }),
  f({ key: "x.con", label: "control responders x", kind: "int",
      group: "interim", ge: 0 }),
  f({ key: "a.trt", label: "treatment prior alpha", kind: "float",
      group: "prior", gt: 0 }),
  f({ key: "b.trt", label: "treatment prior beta", kind: "float",
      group: "prior", gt: 0 }),
  f({ key: "a.con", label: "control prior alpha", kind: "float",
      group: "prior", gt: 0 }),
  f({ key: "b.con", label: "control prior beta", kind: "float",
      group: "prior", gt: 0 }),
  ALTERNATIVE,
  f({ key: "test", label: "final test", kind: "choice", group: "success",
      choices: ["z", "fisher", "exact", "threshold"] }),
  f({ key: "p0", label: "null proportion p0", kind: "float",
      group: "success", gt: 0, lt: 1 }),
  f({ key: "pi.min", label: "target rate", kind: "float", group: "success",
      gt: 0, lt: 1 }),
  f({ key: "delta.min", label: "target margin", kind: "float",
      group: "success" }),
];

const SUCCESS_TRIAL = f({
  key: "Z.crit.final", label: "final critical value c1", kind: "float",
  group: "success", required: true,
});
const SUCCESS_CLINICAL = f({
  key: "clin.succ.threshold", label: "clinical threshold",
  kind: "float", group: "success", required: true,
});

/**
 * The visible field list for a scenario.  Switching the success criterion
 * swaps the critical-value input for the clinical-threshold input; the
 * beta-binomial mode replaces the whole normal-theory pane.
 */
export function fieldsFor(s: Scenario): FieldSpec[] {
  const success =
    s.mode === "betabinom" || s.succCrit === "trial"
      ? SUCCESS_TRIAL
      : SUCCESS_CLINICAL;
  if (s.mode === "betabinom") {
    return [...BETABINOM_FIELDS, success];
  }
  const cell = NORMAL_CELLS[`${s.type}/${s.nsamples}`];
  if (!cell) throw new Error(`no such cell: ${s.type}/${s.nsamples}`);
  return [...cell, success];
}

export interface Validation {
  /** inline messages keyed by field */
  errors: Record<string, string>;
  /** required fields still empty (disables compute, not an error state) */
  missing: string[];
  /** true when a request may be sent */
  ready: boolean;
}

export function parseField(spec: FieldSpec, raw: string): number | string | null {
  const text = raw.trim();
  if (text === "") return null;
  if (spec.kind === "choice") {
    return spec.choices!.includes(text) ? text : null;
  }
  const value = Number(text);
  if (!Number.isFinite(value)) return null;
  if (spec.kind === "int" && !Number.isInteger(value)) return null;
  return value;
}

function checkRange(spec: FieldSpec, value: number): string | null {
  if (spec.gt !== undefined && !(value > spec.gt))
    return `must be greater than ${spec.gt}`;
  if (spec.ge !== undefined && !(value >= spec.ge))
    return `must be at least ${spec.ge}`;
  if (spec.lt !== undefined && !(value < spec.lt))
    return `must be less than ${spec.lt}`;
  return null;
}

const num = (s: Scenario, key: string): number | null => {
  const raw = s.fields[key];
  if (raw === undefined || raw.trim() === "") return null;
  const v = Number(raw);
  return Number.isFinite(v) ? v : null;
};

export function validate(s: Scenario): Validation {
  const errors: Record<string, string> = {};
  const missing: string[] = [];

  for (const spec of fieldsFor(s)) {
    const raw = s.fields[spec.key] ?? "";
    if (raw.trim() === "") {
      if (spec.required) missing.push(spec.key);
      continue;
    }
    const value = parseField(spec, raw);
    if (value === null) {
      errors[spec.key] =
        spec.kind === "choice"
          ? `must be one of ${spec.choices!.join(", ")}`
          : spec.kind === "int"
            ? "must be a whole number"
            : "must be a number";
      continue;
    }
    if (typeof value === "number") {
      const rangeError = checkRange(spec, value);
      if (rangeError) errors[spec.key] = rangeError;
    }
  }

  // cross-field order constraints the service would reject with 422
  const pairs: Array<[string, string, string]> = [
    ["n", "N", "interim subjects must stay below the planned total"],
    ["d", "D", "interim events must stay below the planned total"],
    ["n.trt", "N.trt", "interim n must stay below the planned N"],
    ["n.con", "N.con", "interim n must stay below the planned N"],
    ["x.trt", "n.trt", "responders cannot exceed the interim n"],
    ["x.con", "n.con", "responders cannot exceed the interim n"],
  ];
  for (const [lowKey, highKey, message] of pairs) {
    const low = num(s, lowKey);
    const high = num(s, highKey);
    if (low === null || high === null) continue;
    const strict = !lowKey.startsWith("x.");
    if (strict ? low >= high : low > high) {
      if (!errors[lowKey]) errors[lowKey] = message;
    }
  }

  // binary two-arm accepts either the difference+SE or per-arm counts
  if (s.mode === "normal" && s.type === "bin" && s.nsamples === 2) {
    const diffMode = num(s, "propdiff.ia") !== null &&
      num(s, "stderr.ia") !== null && num(s, "n") !== null;
    const countMode = ["p.trt", "n.trt", "p.con", "n.con"]
      .every((k) => num(s, k) !== null);
    if (!diffMode && !countMode) missing.push("propdiff.ia");
  }

  // sweep window (zero width is handled as a chart notice, not an error)
  const lo = Number(s.sweep.lo);
  const hi = Number(s.sweep.hi);
  const points = Number(s.sweep.points);
  if (s.sweep.lo.trim() && s.sweep.hi.trim() &&
      Number.isFinite(lo) && Number.isFinite(hi) && hi < lo) {
    errors["sweep.hi"] = "sweep end must not precede its start";
  }
  if (s.sweep.points.trim() &&
      (!Number.isInteger(points) || points < 2)) {
    errors["sweep.points"] = "needs at least 2 grid points";
  }

  const ready = Object.keys(errors).length === 0 && missing.length === 0;
  return { errors, missing, ready };
}
