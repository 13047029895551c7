/** Saving and loading scenarios.
 *
 * A saved file is exactly one service request body plus a schema version
 * and the subcommand it belongs to, so the same file drives the command
 * line via --config without edits.  Serialization is canonical (sorted
 * keys, two-space indent, trailing newline), which makes save/load/save
 * byte-stable.
 *
 * One body cannot carry every form field: the design-stage SE overrides
 * (se.exp and friends) belong to the pos schema only, while the interim
 * block belongs to succ-ia/curves.  Saving prefers the interim subcommand
 * when it is complete, so a scenario that fills both drops the pos-only
 * overrides on reload.
 */

import type { Scenario, EndpointKind, SuccCrit } from "./types.js";
import { fieldsFor } from "./fields.js";
import { calls } from "./request.js";

export function canonicalJson(value: unknown): string {
  return render(value, "") + "\n";
}

function render(value: unknown, indent: string): string {
  if (value === null || typeof value === "number" ||
      typeof value === "boolean" || typeof value === "string") {
    return JSON.stringify(value);
  }
  const inner = indent + "  ";
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const items = value.map((v) => inner + render(v, inner));
    return "[\n" + items.join(",\n") + "\n" + indent + "]";
  }
  const obj = value as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  if (keys.length === 0) return "{}";
  const items = keys.map(
    (k) => `${inner}${JSON.stringify(k)}: ${render(obj[k], inner)}`,
  );
  return "{\n" + items.join(",\n") + "\n" + indent + "}";
}

const sweepComplete = (s: Scenario): boolean =>
  s.sweep.lo.trim() !== "" && s.sweep.hi.trim() !== "" &&
  s.sweep.points.trim() !== "";

/** Serialize the scenario; throws when no request is complete enough to save. */
export function saveScenario(s: Scenario): string {
  const ready = new Map(
    calls(s).filter((c) => c.ready).map((c) => [c.name, c]),
  );
  const chosen =
    s.mode === "betabinom"
      ? ready.get("betabinom")
      : (sweepComplete(s) ? ready.get("curves") : undefined) ??
        ready.get("succ-ia") ?? ready.get("pos");
  if (!chosen) {
    throw new Error("the scenario is incomplete; nothing to save yet");
  }
  return canonicalJson({ v: 1, subcommand: chosen.name, ...chosen.body });
}

const SUBCOMMANDS = ["succ-ia", "pos", "curves", "betabinom"] as const;

function fieldText(key: string, value: unknown): string {
  if (typeof value === "number") return String(value);
  if (typeof value === "string") return value;
  throw new Error(`key "${key}" has an unsupported value`);
}

/** Parse a saved scenario; throws an Error whose message suits a banner. */
export function loadScenario(text: string): Scenario {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    throw new Error("the file is not valid JSON");
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error("the file does not hold a scenario object");
  }
  const obj = { ...(parsed as Record<string, unknown>) };

  const version = obj["v"];
  delete obj["v"];
  if (version !== 1) {
    throw new Error(
      `scenario version ${JSON.stringify(version)} is not supported; ` +
      "this dashboard reads version 1",
    );
  }
  const sub = obj["subcommand"];
  delete obj["subcommand"];
  if (typeof sub !== "string" ||
      !(SUBCOMMANDS as readonly string[]).includes(sub)) {
    throw new Error(`unknown subcommand ${JSON.stringify(sub)}`);
  }

  const scenario: Scenario =
    sub === "betabinom"
      ? { mode: "betabinom", type: "bin", nsamples: 2, succCrit: "trial",
          fields: {}, sweep: { lo: "", hi: "", points: "" } }
      : normalSkeleton(obj);

  if (sub === "curves") {
    for (const key of ["lo", "hi", "points"] as const) {
      if (key in obj) {
        scenario.sweep[key] = fieldText(key, obj[key]);
        delete obj[key];
      }
    }
  }

  const known = new Set(fieldsFor(scenario).map((f) => f.key));
  for (const [key, value] of Object.entries(obj)) {
    if (!known.has(key)) throw new Error(`unknown key "${key}"`);
    scenario.fields[key] = fieldText(key, value);
  }
  return scenario;
}

function normalSkeleton(obj: Record<string, unknown>): Scenario {
  const type = obj["type"];
  delete obj["type"];
  if (type !== "cont" && type !== "bin" && type !== "surv") {
    throw new Error(`unknown endpoint type ${JSON.stringify(type)}`);
  }
  const nsamples = obj["nsamples"];
  delete obj["nsamples"];
  if (nsamples !== 1 && nsamples !== 2) {
    throw new Error("nsamples must be 1 or 2");
  }
  const crit = obj["succ.crit"] ?? "trial";
  delete obj["succ.crit"];
  if (crit !== "trial" && crit !== "clinical") {
    throw new Error(`unknown success criterion ${JSON.stringify(crit)}`);
  }
  return {
    mode: "normal",
    type: type as EndpointKind,
    nsamples,
    succCrit: crit as SuccCrit,
    fields: {},
    sweep: { lo: "", hi: "", points: "" },
  };
}
