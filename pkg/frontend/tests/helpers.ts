import { readFileSync } from "node:fs";
import type { Scenario } from "../src/types.js";

export function fixture<T = Record<string, unknown>>(name: string): T {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export function fixtureText(name: string): string {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return readFileSync(url, "utf8");
}

export const clone = (s: Scenario): Scenario => ({
  ...s,
  fields: { ...s.fields },
  sweep: { ...s.sweep },
});
