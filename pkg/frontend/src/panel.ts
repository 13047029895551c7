/** Live recomputation: debounce, request lifecycle, and error routing.
 *
 * Every edit lands here; after a quiet period the panel fires one request
 * per result channel.  A newer edit aborts whatever is still in flight on
 * that channel, and a reply is applied only when it is the latest one
 * asked for, so a slow early answer can never overwrite a fast late one.
 */

import type { Scenario, Envelope } from "./types.js";
import type { CallName, ServiceCall } from "./request.js";
import type { Sender } from "./api.js";
import { calls } from "./request.js";
import { fieldsFor } from "./fields.js";

export const DEBOUNCE_MS = 150;

export type ChannelState =
  | { phase: "waiting" }
  | { phase: "disabled"; missing: string[] }
  | { phase: "loading" }
  | { phase: "ok"; body: Envelope }
  | { phase: "error"; status: number; code: string; message: string;
      field: string | null };

/** Which input a domain rejection most likely points at, by error code. */
const FIELD_HINTS: Record<string, string[]> = {
  count_order: ["d", "n", "n.trt", "n.con"],
  count_mismatch: ["n", "d", "n.trt", "n.con"],
  count_not_integer: ["n", "d", "N", "D", "n.trt", "n.con", "x.trt", "x.con"],
  bad_count: ["n", "d", "N", "D", "n.trt", "n.con", "x.trt", "x.con"],
  missing_n: ["N", "n"],
  missing_events: ["D", "d"],
  sd_nonpositive: ["sd.ia", "sd.prior"],
  sd_negative: ["sd.ia", "sd.prior"],
  sigma0_negative: ["sd.prior"],
  stderr_nonpositive: ["stderr.ia", "se.exp"],
  hr_nonpositive: ["hr.ia", "hr.prior", "null.value"],
  median_nonpositive: ["median.ia", "median.prior", "null.value"],
  bad_allocation: ["a"],
  bad_xi: ["xi"],
  bad_prior_events: ["D.prior"],
  incomplete_prior: ["sd.prior", "D.prior", "meandiff.prior", "mean.prior",
    "propdiff.prior", "prop.prior", "hr.prior", "median.prior"],
  incomplete_interim: ["propdiff.ia", "p.trt", "meandiff.ia", "mean.ia",
    "prop.ia", "hr.ia", "median.ia", "n", "d"],
  ambiguous_interim: ["propdiff.ia", "p.trt"],
  missing_expected: ["meandiff.exp", "mean.exp", "propdiff.exp", "prop.exp",
    "hr.exp", "median.exp", "se.exp", "sd.exp", "prop.trt.exp"],
  missing_c1: ["Z.crit.final"],
  missing_theta_min: ["clin.succ.threshold", "pi.min", "delta.min"],
  threshold_out_of_range: ["clin.succ.threshold", "pi.min", "delta.min"],
  threshold_ambiguous: ["pi.min", "delta.min"],
  level_out_of_range: ["Z.crit.final"],
  missing_p0: ["p0"],
  p0_out_of_range: ["p0"],
  p_out_of_range: ["p.trt", "p.con", "prop.ia", "prop.prior", "p0"],
  degenerate_proportion: ["p.trt", "p.con", "x.trt", "x.con", "prop.ia"],
  beta_prior_nonpositive: ["a.trt", "b.trt", "a.con", "b.con"],
  beta_args_nonpositive: ["a.trt", "b.trt", "a.con", "b.con"],
  bad_grid: ["sweep.points", "sweep.lo", "sweep.hi"],
};

export function errorField(code: string, s: Scenario): string | null {
  const visible = new Set(fieldsFor(s).map((spec) => spec.key));
  for (const key of FIELD_HINTS[code] ?? []) {
    if (visible.has(key) || key.startsWith("sweep.")) return key;
  }
  return null;
}

export class LivePanel {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private scenario: Scenario | null = null;
  private seq = new Map<CallName, number>();
  private inflight = new Map<CallName, AbortController>();

  constructor(
    private readonly send: Sender,
    private readonly onChange: (name: CallName, state: ChannelState) => void,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Feed the edited scenario; requests go out after the quiet period. */
  update(s: Scenario): void {
    this.scenario = s;
    if (this.timer !== null) clearTimeout(this.timer);
    for (const call of calls(s)) this.onChange(call.name, { phase: "waiting" });
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
  }

  private fire(): void {
    const s = this.scenario;
    if (s === null) return;
    for (const call of calls(s)) this.launch(s, call);
  }

  private launch(s: Scenario, call: ServiceCall): void {
    const prev = this.inflight.get(call.name);
    if (prev !== undefined) {
      prev.abort();
      this.inflight.delete(call.name);
    }
    const mine = (this.seq.get(call.name) ?? 0) + 1;
    this.seq.set(call.name, mine);
    if (!call.ready) {
      this.onChange(call.name, { phase: "disabled", missing: call.missing });
      return;
    }
    const ctrl = new AbortController();
    this.inflight.set(call.name, ctrl);
    this.onChange(call.name, { phase: "loading" });
    void this.send(call, ctrl.signal).then((outcome) => {
      if (this.seq.get(call.name) !== mine) return;
      this.inflight.delete(call.name);
      if (outcome.kind === "aborted") return;
      if (outcome.kind === "ok") {
        this.onChange(call.name, { phase: "ok", body: outcome.body });
        return;
      }
      this.onChange(call.name, {
        phase: "error",
        status: outcome.status,
        code: outcome.code,
        message: outcome.message,
        field: outcome.status === 422 ? errorField(outcome.code, s) : null,
      });
    });
  }
}
