/** Turn a scenario into the service calls it supports.
 *
 * Each panel (interim measures, design PoS, exact beta-binomial, curves)
 * corresponds to one endpoint.  A call is offered only when the fields it
 * needs are filled and nothing is invalid; incomplete calls surface their
 * missing fields so the panel can render a disabled state instead of an
 * error.
 */

import { fieldsFor, parseField, validate } from "./fields.js";
import type { FieldSpec } from "./fields.js";
import type { Scenario } from "./types.js";

export type CallName = "succ-ia" | "pos" | "betabinom" | "curves";

export interface ServiceCall {
  name: CallName;
  route: string;
  body: Record<string, unknown>;
  ready: boolean;
  missing: string[];
}

/** design-stage keys the succ-ia endpoint does not know */
const POS_ONLY = new Set(["se.exp", "sd.exp", "prop.trt.exp", "prop.con.exp"]);

const STEM: Record<string, string> = {
  "cont/1": "mean", "cont/2": "meandiff",
  "bin/1": "prop", "bin/2": "propdiff",
  "surv/1": "median", "surv/2": "hr",
};

const COUNT_KEYS = ["p.trt", "n.trt", "p.con", "n.con"] as const;

function filled(s: Scenario, key: string): boolean {
  return (s.fields[key] ?? "").trim() !== "";
}

function successKey(s: Scenario): string {
  return s.mode === "betabinom" || s.succCrit === "trial"
    ? "Z.crit.final"
    : "clin.succ.threshold";
}

/** binary two-arm interim comes as a difference+SE or as per-arm counts */
function binTwoArmInput(s: Scenario): "diff" | "counts" | null {
  if (["propdiff.ia", "stderr.ia", "n"].every((k) => filled(s, k)))
    return "diff";
  if (COUNT_KEYS.every((k) => filled(s, k))) return "counts";
  return null;
}

function specsByKey(s: Scenario): Map<string, FieldSpec> {
  return new Map(fieldsFor(s).map((spec) => [spec.key, spec]));
}

function body(
  s: Scenario,
  keep: (spec: FieldSpec) => boolean,
): Record<string, unknown> {
  const out: Record<string, unknown> = {
    type: s.type,
    nsamples: s.nsamples,
  };
  for (const spec of fieldsFor(s)) {
    if (!keep(spec) || !filled(s, spec.key)) continue;
    const value = parseField(spec, s.fields[spec.key]!);
    if (value !== null) out[spec.key] = value;
  }
  out["succ.crit"] = s.succCrit;
  return out;
}

function missingOf(s: Scenario, required: string[]): string[] {
  return required.filter((k) => !filled(s, k));
}

function succIaCall(s: Scenario): ServiceCall {
  const cell = `${s.type}/${s.nsamples}`;
  const stem = STEM[cell]!;
  let required: string[];
  let drop = new Set<string>();
  if (s.type === "surv") {
    required = ["D", "d", `${stem}.ia`];
  } else if (cell === "bin/2") {
    const input = binTwoArmInput(s);
    required = input ? ["N"] : ["N", "propdiff.ia", "stderr.ia", "n"];
    drop = input === "counts"
      ? new Set(["propdiff.ia", "stderr.ia", "n"])
      : new Set(COUNT_KEYS);
  } else {
    required = ["N", "n", `${stem}.ia`];
    if (s.type === "cont") required.push("sd.ia");
  }
  required.push(successKey(s));
  const missing = missingOf(s, required);
  return {
    name: "succ-ia",
    route: "/api/v1/succ-ia",
    body: body(s, (spec) => !POS_ONLY.has(spec.key) && !drop.has(spec.key)),
    ready: missing.length === 0,
    missing,
  };
}

function posCall(s: Scenario): ServiceCall {
  const cell = `${s.type}/${s.nsamples}`;
  const stem = STEM[cell]!;
  let required: string[];
  if (s.type === "surv") {
    required = ["D", `${stem}.prior`, "D.prior"];
  } else {
    required = ["N", `${stem}.prior`, "sd.prior"];
    if (s.type === "cont") {
      if (!filled(s, "se.exp") && !filled(s, "sd.exp"))
        required.push("se.exp");
    } else if (cell === "bin/2") {
      if (!filled(s, "se.exp"))
        required.push("prop.trt.exp", "prop.con.exp");
    } else {
      required.push("prop.exp");
    }
  }
  required.push(successKey(s));
  const missing = missingOf(s, required);
  return {
    name: "pos",
    route: "/api/v1/pos",
    body: body(s, (spec) => spec.group === "design" ||
      spec.group === "prior" || spec.group === "success" ||
      spec.key === "null.value" || spec.key === "alternative"),
    ready: missing.length === 0,
    missing,
  };
}

/**
 * True when both sweep ends are given and coincide.  The service wants a
 * real window (or none, to pick its own), so the request drops the keys
 * and the chart shows a single-point notice instead.
 */
export function zeroWidthSweep(s: Scenario): boolean {
  const lo = Number(s.sweep.lo);
  const hi = Number(s.sweep.hi);
  return s.sweep.lo.trim() !== "" && s.sweep.hi.trim() !== "" &&
    Number.isFinite(lo) && Number.isFinite(hi) && lo === hi;
}

function curvesCall(s: Scenario, base: ServiceCall): ServiceCall {
  const out = { ...base.body };
  const sweep: Array<[string, string]> = zeroWidthSweep(s) ? [] : [
    ["lo", s.sweep.lo], ["hi", s.sweep.hi], ["points", s.sweep.points],
  ];
  for (const [key, raw] of sweep) {
    const text = raw.trim();
    if (text === "") continue;
    const value = Number(text);
    if (Number.isFinite(value)) out[key] = value;
  }
  return {
    name: "curves",
    route: "/api/v1/curves",
    body: out,
    ready: base.ready,
    missing: base.missing,
  };
}

function betabinomCall(s: Scenario): ServiceCall {
  const twoArm = ["N.con", "n.con", "x.con"].some((k) => filled(s, k));
  const required = ["N.trt", "n.trt", "x.trt", "Z.crit.final"];
  if (twoArm) required.push("N.con", "n.con", "x.con");
  const test = (s.fields["test"] ?? "z").trim() || "z";
  if (test === "exact") required.push("p0");
  if (test === "threshold" && !filled(s, "pi.min") &&
      !filled(s, "delta.min"))
    required.push("pi.min");
  const missing = missingOf(s, required);
  const out: Record<string, unknown> = {};
  for (const spec of fieldsFor(s)) {
    if (!twoArm && spec.key.endsWith(".con")) continue;
    if (!filled(s, spec.key)) continue;
    const value = parseField(spec, s.fields[spec.key]!);
    if (value !== null) out[spec.key] = value;
  }
  return {
    name: "betabinom",
    route: "/api/v1/betabinom",
    body: out,
    ready: missing.length === 0,
    missing,
  };
}

/**
 * The calls this scenario can make right now.  Validation errors gate
 * everything: nothing is ready while any visible field is invalid.
 */
export function calls(s: Scenario): ServiceCall[] {
  const invalid = Object.keys(validate(s).errors).length > 0;
  const gate = (call: ServiceCall): ServiceCall =>
    invalid ? { ...call, ready: false } : call;
  if (s.mode === "betabinom") {
    return [gate(betabinomCall(s))];
  }
  const succIa = succIaCall(s);
  return [
    gate(succIa),
    gate(posCall(s)),
    gate(curvesCall(s, succIa)),
  ];
}
