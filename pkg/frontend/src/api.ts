/** Thin JSON client for the computation service.
 *
 * The transport is injected so tests can drive the panel logic with canned
 * responses; the browser entry point passes window.fetch.
 */

import type { Envelope } from "./types.js";
import type { ServiceCall } from "./request.js";

export type CallOutcome =
  | { kind: "ok"; body: Envelope }
  | { kind: "error"; status: number; code: string; message: string }
  | { kind: "aborted" };

export type Sender = (
  call: ServiceCall,
  signal: AbortSignal,
) => Promise<CallOutcome>;

interface MinimalResponse {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init: {
    method: string;
    headers: Record<string, string>;
    body: string;
    signal: AbortSignal;
  },
) => Promise<MinimalResponse>;

function isEnvelope(value: unknown): value is Envelope {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return v["v"] === 1 && typeof v["kind"] === "string" && "result" in v;
}

export function makeSender(fetchFn: FetchLike, base = ""): Sender {
  return async (call, signal) => {
    let response: MinimalResponse;
    try {
      response = await fetchFn(base + call.route, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(call.body),
        signal,
      });
    } catch (err) {
      if ((err as { name?: string }).name === "AbortError") {
        return { kind: "aborted" };
      }
      return {
        kind: "error", status: 0, code: "unreachable",
        message: "the computation service did not answer",
      };
    }
    let parsed: unknown = null;
    try {
      parsed = await response.json();
    } catch {
      // fall through: a body-less reply is reported by status alone
    }
    if (response.status >= 200 && response.status < 300) {
      if (isEnvelope(parsed)) return { kind: "ok", body: parsed };
      return {
        kind: "error", status: response.status, code: "bad_envelope",
        message: "the service reply was not in the expected envelope",
      };
    }
    const errObj = (parsed as { error?: { code?: string; message?: string } } | null)
      ?.error;
    return {
      kind: "error",
      status: response.status,
      code: errObj?.code ?? `http_${response.status}`,
      message: errObj?.message ?? `service returned status ${response.status}`,
    };
  };
}
