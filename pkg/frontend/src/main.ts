/** Browser entry point: form, live result panels, charts, save/load.
 *
 * All numbers on screen come from service replies; this file only lays
 * out inputs, routes channel states into panels, and draws the models
 * produced by charts.ts.  Point the page at a service with
 * ?service=http://host:port when it is not served from the same origin.
 */

import type { Scenario, Envelope, CurvesResult } from "./types.js";
import { PRESETS } from "./presets.js";
import { fieldsFor, validate } from "./fields.js";
import { zeroWidthSweep, type CallName } from "./request.js";
import { makeSender, type FetchLike } from "./api.js";
import { LivePanel, type ChannelState } from "./panel.js";
import {
  measuresChart, densityChart, ticks, SINGLE_POINT_NOTICE,
  type DensityChart,
} from "./charts.js";
import { saveScenario, loadScenario } from "./io.js";
import { fmt3, fmtMeanSd } from "./format.js";

type Attrs = Record<string, string>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Attrs = {}, ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl(tag: string, attrs: Attrs = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

const clone = (s: Scenario): Scenario => ({
  ...s,
  fields: { ...s.fields },
  sweep: { ...s.sweep },
});

// --- state -------------------------------------------------------------------

let scenario: Scenario = clone(PRESETS[0]!.scenario);
const channel = new Map<CallName, ChannelState>();

const base =
  new URLSearchParams(window.location.search).get("service") ?? "";
const panel = new LivePanel(
  makeSender(window.fetch.bind(window) as FetchLike, base),
  (name, state) => {
    channel.set(name, state);
    renderChannel(name, state);
  },
);

// --- layout ------------------------------------------------------------------

const banner = el("div", { id: "banner", hidden: "" });
const presetBar = el("div", { class: "presets" });
const modeBar = el("div", { class: "modebar" });
const form = el("form", { class: "fields", autocomplete: "off" });
const succIaCard = el("section", { class: "card", id: "card-succ-ia" });
const posCard = el("section", { class: "card", id: "card-pos" });
const betabinomCard = el("section", { class: "card", id: "card-betabinom" });
const chartsCard = el("section", { class: "card wide", id: "card-curves" });

function buildPage(): void {
  const app = document.getElementById("app")!;
  const ioBar = el("div", { class: "iobar" });
  const saveBtn = el("button", { type: "button" }, "save scenario");
  saveBtn.addEventListener("click", onSave);
  const loadInput = el("input", {
    type: "file", accept: "application/json,.json", hidden: "",
  });
  loadInput.addEventListener("change", () => {
    const file = loadInput.files?.[0];
    if (file) void onLoad(file);
    loadInput.value = "";
  });
  const loadBtn = el("button", { type: "button" }, "load scenario");
  loadBtn.addEventListener("click", () => loadInput.click());
  ioBar.append(saveBtn, loadBtn, loadInput);

  app.append(
    el("header", {},
      el("h1", {}, "trial success probabilities"),
      presetBar, modeBar, ioBar, banner),
    el("div", { class: "columns" },
      el("div", { class: "left" }, form),
      el("div", { class: "right" },
        succIaCard, posCard, betabinomCard, chartsCard)),
  );

  for (const preset of PRESETS) {
    const b = el("button", { type: "button", class: "preset" }, preset.title);
    b.addEventListener("click", () => {
      scenario = clone(preset.scenario);
      refresh();
    });
    presetBar.append(b);
  }
  form.addEventListener("submit", (ev) => ev.preventDefault());
}

// --- mode and cell selectors ---------------------------------------------------

function choice(
  name: string, value: string, options: Array<[string, string]>,
  apply: (v: string) => void,
): HTMLElement {
  const select = el("select", { "data-name": name });
  for (const [v, label] of options) {
    const opt = el("option", { value: v }, label);
    if (v === value) opt.setAttribute("selected", "");
    select.append(opt);
  }
  select.addEventListener("change", () => {
    apply(select.value);
    refresh();
  });
  return el("label", { class: "choice" }, name, select);
}

function renderModeBar(): void {
  modeBar.replaceChildren(
    choice("mode", scenario.mode, [
      ["normal", "normal approximation"],
      ["betabinom", "exact beta-binomial"],
    ], (v) => {
      scenario.mode = v as Scenario["mode"];
      if (v === "betabinom") scenario.type = "bin";
    }),
  );
  if (scenario.mode === "normal") {
    modeBar.append(
      choice("endpoint", scenario.type, [
        ["cont", "continuous"], ["bin", "binary"], ["surv", "time to event"],
      ], (v) => { scenario.type = v as Scenario["type"]; }),
      choice("arms", String(scenario.nsamples), [["1", "one arm"], ["2", "two arms"]],
        (v) => { scenario.nsamples = Number(v) as Scenario["nsamples"]; }),
      choice("success", scenario.succCrit, [
        ["trial", "trial success (critical value)"],
        ["clinical", "clinical success (threshold)"],
      ], (v) => { scenario.succCrit = v as Scenario["succCrit"]; }),
    );
  }
}

// --- form --------------------------------------------------------------------

const GROUP_TITLES: Record<string, string> = {
  design: "design",
  interim: "interim data",
  expected: "expected effect",
  prior: "prior",
  success: "success criterion",
};

function renderForm(): void {
  form.replaceChildren();
  const groups = new Map<string, HTMLElement>();
  for (const spec of fieldsFor(scenario)) {
    let box = groups.get(spec.group);
    if (!box) {
      box = el("fieldset", {},
        el("legend", {}, GROUP_TITLES[spec.group] ?? spec.group));
      groups.set(spec.group, box);
      form.append(box);
    }
    const err = el("span", { class: "err", "data-err": spec.key });
    let input: HTMLElement;
    if (spec.kind === "choice") {
      const select = el("select", { "data-field": spec.key });
      select.append(el("option", { value: "" }, ""));
      for (const c of spec.choices!) {
        const opt = el("option", { value: c }, c);
        if ((scenario.fields[spec.key] ?? "") === c) {
          opt.setAttribute("selected", "");
        }
        select.append(opt);
      }
      select.addEventListener("change", () => onEdit(spec.key, select.value));
      input = select;
    } else {
      const text = el("input", {
        "data-field": spec.key,
        inputmode: "decimal",
        value: scenario.fields[spec.key] ?? "",
      });
      text.addEventListener("input", () =>
        onEdit(spec.key, (text as HTMLInputElement).value));
      input = text;
    }
    box.append(el("label", {}, `${spec.label} (${spec.key})`, input, err));
  }

  if (scenario.mode === "normal") {
    const box = el("fieldset", {}, el("legend", {}, "sweep window"));
    for (const key of ["lo", "hi", "points"] as const) {
      const input = el("input", {
        "data-field": `sweep.${key}`,
        inputmode: "decimal",
        value: scenario.sweep[key],
      });
      input.addEventListener("input", () => {
        scenario.sweep[key] = (input as HTMLInputElement).value;
        afterEdit();
      });
      box.append(el("label", {}, key, input,
        el("span", { class: "err", "data-err": `sweep.${key}` })));
    }
    form.append(box);
  }
  markValidation();
}

function onEdit(key: string, value: string): void {
  scenario.fields[key] = value;
  afterEdit();
}

function afterEdit(): void {
  clearBanner();
  markValidation();
  panel.update(scenario);
}

function markValidation(): void {
  const { errors } = validate(scenario);
  form.querySelectorAll<HTMLElement>("[data-err]").forEach((node) => {
    const key = node.getAttribute("data-err")!;
    node.textContent = errors[key] ?? "";
  });
}

function markServiceError(field: string | null, message: string): void {
  if (field === null) return;
  const node = form.querySelector<HTMLElement>(`[data-err="${field}"]`);
  if (node && node.textContent === "") node.textContent = message;
}

// --- result panels -------------------------------------------------------------

function row(label: string, value: string): HTMLElement {
  return el("div", { class: "row" },
    el("span", { class: "lbl" }, label),
    el("span", { class: "val" }, value));
}

type Num = number | null | undefined;
type Pair = { mean: number; sd: number } | null | undefined;

function stateShell(
  card: HTMLElement, title: string, state: ChannelState | undefined,
): HTMLElement | null {
  card.replaceChildren(el("h2", {}, title));
  if (!state || state.phase === "waiting" || state.phase === "loading") {
    card.append(el("p", { class: "dim" }, "computing…"));
    return null;
  }
  if (state.phase === "disabled") {
    const labels = new Map(fieldsFor(scenario).map((f) => [f.key, f.label]));
    const names = state.missing.map((k) => labels.get(k) ?? k).join(", ");
    card.append(el("p", { class: "dim" }, `fill in: ${names}`));
    return null;
  }
  if (state.phase === "error") {
    card.append(el("p", { class: "bad" }, state.message));
    markServiceError(state.field, state.message);
    return null;
  }
  const body = el("div", { class: "rows" });
  card.append(body);
  return body;
}

function appendEcho(card: HTMLElement, echo: Record<string, unknown>): void {
  const dl = el("div", { class: "echo" });
  for (const key of ["theta_hat", "k", "t", "z", "b", "gamma", "psi"]) {
    const v = echo[key];
    if (typeof v !== "number") continue;
    dl.append(el("span", {}, `${key} = ${fmt3(v)}`));
  }
  if (dl.childNodes.length > 0) card.append(dl);
}

function appendWarnings(card: HTMLElement, body: Envelope): void {
  for (const w of body.warnings) {
    card.append(el("p", { class: "warn" }, w));
  }
}

function renderSuccIa(state: ChannelState | undefined): void {
  const rows = stateShell(succIaCard, "interim success measures", state);
  if (!rows || state?.phase !== "ok") return;
  const r = state.body.result as {
    cp_trend: number; cp_specified: number;
    ppos_no_prior: number; ppos_with_prior: Num;
    posterior: Pair; predictive_no_prior: Pair; predictive_with_prior: Pair;
    gamma_clinical?: Num;
  };
  rows.append(
    row("conditional power, current trend", fmt3(r.cp_trend)),
    row("conditional power, expected effect", fmt3(r.cp_specified)),
    row("predictive probability, no prior", fmt3(r.ppos_no_prior)),
  );
  if (r.ppos_with_prior != null) {
    rows.append(row("predictive probability, with prior",
      fmt3(r.ppos_with_prior)));
  }
  if (r.posterior != null) {
    rows.append(row("posterior effect", fmtMeanSd(r.posterior)));
  }
  if (r.predictive_no_prior != null) {
    rows.append(row("predictive final estimate", fmtMeanSd(r.predictive_no_prior)));
  }
  if (r.predictive_with_prior != null) {
    rows.append(row("predictive final estimate, with prior",
      fmtMeanSd(r.predictive_with_prior)));
  }
  if (r.gamma_clinical != null) {
    rows.append(row("clinical threshold, z scale", fmt3(r.gamma_clinical)));
  }
  appendEcho(succIaCard, state.body.echo);
  appendWarnings(succIaCard, state.body);
}

function renderPos(state: ChannelState | undefined): void {
  const rows = stateShell(posCard, "design-stage probability of success", state);
  if (!rows || state?.phase !== "ok") return;
  const r = state.body.result as {
    pos: number; k_tilde: number; gamma: number;
  };
  rows.append(
    row("probability of success", fmt3(r.pos)),
    row("anticipated final SE", fmt3(r.k_tilde)),
    row("success threshold", fmt3(r.gamma)),
  );
  appendWarnings(posCard, state.body);
}

function renderBetabinom(state: ChannelState | undefined): void {
  const rows = stateShell(betabinomCard, "exact beta-binomial PPoS", state);
  if (!rows || state?.phase !== "ok") return;
  const r = state.body.result as { ppos: number };
  const echo = state.body.echo as { cells?: number; zero_variance_cells?: number };
  rows.append(row("predictive probability", fmt3(r.ppos)));
  if (typeof echo.cells === "number") {
    rows.append(row("future outcome cells", String(echo.cells)));
  }
  if (typeof echo.zero_variance_cells === "number" &&
      echo.zero_variance_cells > 0) {
    rows.append(row("zero-variance cells", String(echo.zero_variance_cells)));
  }
  appendWarnings(betabinomCard, state.body);
}

// --- charts --------------------------------------------------------------------

const SERIES_CLASS = ["s0", "s1", "s2"];

function drawSeries(
  svg: SVGElement, paths: Array<{ name: string; path: string }>,
): void {
  paths.forEach((s, i) => {
    svg.append(svgEl("path", {
      d: s.path, class: `line ${SERIES_CLASS[i % 3]}`, fill: "none",
    }));
  });
}

function legend(paths: Array<{ name: string }>): HTMLElement {
  const box = el("div", { class: "legend" });
  paths.forEach((s, i) => {
    box.append(el("span", { class: `key ${SERIES_CLASS[i % 3]}` }, s.name));
  });
  return box;
}

function axisLabels(
  svg: SVGElement, domain: [number, number], frame: { w: number; h: number; pad: number },
): void {
  for (const x of ticks(domain, 4)) {
    const px = frame.pad +
      ((x - domain[0]) / (domain[1] - domain[0] || 1)) *
      (frame.w - 2 * frame.pad);
    svg.append(svgEl("line", {
      x1: String(px), x2: String(px),
      y1: String(frame.h - frame.pad), y2: String(frame.h - frame.pad + 4),
      class: "axis",
    }));
    const label = svgEl("text", {
      x: String(px), y: String(frame.h - frame.pad + 16),
      "text-anchor": "middle", class: "tick",
    });
    label.textContent = fmt3(x);
    svg.append(label);
  }
}

function interimKey(): string {
  const stem: Record<string, string> = {
    "cont/1": "mean", "cont/2": "meandiff",
    "bin/1": "prop", "bin/2": "propdiff",
    "surv/1": "median", "surv/2": "hr",
  };
  return `${stem[`${scenario.type}/${scenario.nsamples}`]}.ia`;
}

function wireDrag(svg: SVGElement, model: DensityChart): void {
  let dragging = false;
  svg.addEventListener("pointerdown", (ev) => {
    dragging = true;
    svg.setPointerCapture(ev.pointerId);
  });
  svg.addEventListener("pointermove", (ev) => {
    if (!dragging) return;
    const rect = (svg as unknown as { getBoundingClientRect(): DOMRect })
      .getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * model.frame.w;
    const x = model.xFromPixel(px);
    const value = String(Number(x.toPrecision(4)));
    const key = interimKey();
    scenario.fields[key] = value;
    const input = form.querySelector<HTMLInputElement>(
      `[data-field="${key}"]`);
    if (input) input.value = value;
    afterEdit();
  });
  svg.addEventListener("pointerup", () => { dragging = false; });
}

function renderCurves(state: ChannelState | undefined): void {
  if (zeroWidthSweep(scenario)) {
    chartsCard.replaceChildren(el("h2", {}, "what-if curves"),
      el("p", { class: "warn" }, SINGLE_POINT_NOTICE));
    return;
  }
  const rows = stateShell(chartsCard, "what-if curves", state);
  if (!rows || state?.phase !== "ok") return;
  rows.remove();
  const result = state.body.result as unknown as CurvesResult;

  const dens = densityChart(result);
  const meas = measuresChart(result);
  const wrap = el("div", { class: "chartpair" });

  for (const [title, model] of [
    ["predictive density of the final estimate", dens],
    ["success measures vs hypothetical estimate", meas],
  ] as const) {
    const fig = el("figure", {}, el("figcaption", {}, title));
    const svg = svgEl("svg", {
      viewBox: `0 0 ${model.frame.w} ${model.frame.h}`,
      class: "chart",
    });
    if ("power" in model) {
      svg.append(svgEl("line", {
        x1: String(model.frame.pad), x2: String(model.frame.w - model.frame.pad),
        y1: String(model.power.py), y2: String(model.power.py),
        class: "ref",
      }));
    }
    svg.append(svgEl("line", {
      x1: String(model.observed.px), x2: String(model.observed.px),
      y1: String(model.frame.pad), y2: String(model.frame.h - model.frame.pad),
      class: "observed",
    }));
    drawSeries(svg, model.series);
    if ("crossing" in model && model.crossing) {
      const px = model.frame.pad +
        ((model.crossing.x - model.xDomain[0]) /
          (model.xDomain[1] - model.xDomain[0] || 1)) *
        (model.frame.w - 2 * model.frame.pad);
      const py = model.frame.h / 2;
      svg.append(svgEl("circle", {
        cx: String(px), cy: String(py), r: "4", class: "cross",
      }));
    }
    axisLabels(svg, model.xDomain, model.frame);
    if (model === dens) wireDrag(svg, dens);
    fig.append(svg, legend(model.series));
    if (model.notice) fig.append(el("p", { class: "warn" }, model.notice));
    wrap.append(fig);
  }
  chartsCard.append(wrap,
    el("p", { class: "dim" },
      "drag inside the left chart to move the observed estimate"));
}

// --- io ------------------------------------------------------------------------

function onSave(): void {
  let text: string;
  try {
    text = saveScenario(scenario);
  } catch (err) {
    showBanner((err as Error).message);
    return;
  }
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = el("a", { href: url, download: "scenario.json" });
  document.body.append(a);
  a.click();
  a.remove();
  URL.revokeObjectURL(url);
}

async function onLoad(file: File): Promise<void> {
  let text: string;
  try {
    text = await file.text();
  } catch {
    showBanner("the file could not be read");
    return;
  }
  try {
    scenario = loadScenario(text);
  } catch (err) {
    showBanner((err as Error).message);
    return;
  }
  clearBanner();
  refresh();
}

function showBanner(message: string): void {
  banner.textContent = message;
  banner.removeAttribute("hidden");
}

function clearBanner(): void {
  banner.textContent = "";
  banner.setAttribute("hidden", "");
}

// --- top-level wiring ------------------------------------------------------------

function renderChannel(name: CallName, state: ChannelState): void {
  if (name === "succ-ia") renderSuccIa(state);
  else if (name === "pos") renderPos(state);
  else if (name === "betabinom") renderBetabinom(state);
  else renderCurves(state);
}

function refresh(): void {
  renderModeBar();
  renderForm();
  const normal = scenario.mode === "normal";
  succIaCard.hidden = !normal;
  posCard.hidden = !normal;
  chartsCard.hidden = !normal;
  betabinomCard.hidden = normal;
  panel.update(scenario);
}

buildPage();
refresh();
