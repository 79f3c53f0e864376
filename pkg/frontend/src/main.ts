/** DOM wiring. Everything interesting lives in state.ts and views.ts;
 * this file only builds controls and pipes events into the Workbench. */

import { ApiClient } from "./api.js";
import { WEIGHT_MAX, WEIGHT_MIN, WEIGHT_STEP, Workbench } from "./state.js";
import type { ClaimsJson, RecordJson, WeightTableJson } from "./types.js";
import {
  renderAuditView,
  renderBadge,
  renderErrorNote,
  renderFrontierPanel,
} from "./views.js";
import { badgeFrom } from "./badge.js";

const WEIGHT_KEYS: Array<[keyof WeightTableJson, string]> = [
  ["w11", "accepted, claim holds (w11)"],
  ["w10", "accepted, claim fails (w10)"],
  ["w01", "rejected, claim holds (w01)"],
  ["w00", "rejected, claim fails (w00)"],
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function parseGrid(text: string): number[] {
  const t = text.trim();
  if (t.includes(":")) {
    const [start, stop, count] = t.split(":").map(Number);
    const n = Math.max(1, Math.floor(count));
    if (n === 1) return [start];
    return Array.from({ length: n }, (_, i) => start + (i * (stop - start)) / (n - 1));
  }
  return t.split(",").map((s) => Number(s.trim()));
}

function main(): void {
  const root = document.getElementById("app");
  if (root === null) return;

  const params = new URLSearchParams(window.location.search);
  const base = params.get("service") ?? "http://127.0.0.1:8000";
  const client = new ApiClient(base);
  const wb = new Workbench(client);

  // layout
  const controls = el("div", { class: "controls" });
  const output = el("div", { class: "output" });
  root.append(controls, output);

  const dataPanel = el("fieldset");
  dataPanel.append(el("legend", {}, "data"));
  const csvBox = el("textarea", { rows: "5", placeholder: "id,a,y,d\n1,a,1,0\n..." });
  const uploadBtn = el("button", { type: "button" }, "upload csv");
  const demoBtn = el("button", { type: "button" }, "load demo data");
  const dataNote = el("div", { class: "note" });
  dataPanel.append(csvBox, el("div", {}), uploadBtn, demoBtn, dataNote);
  controls.append(dataPanel);

  uploadBtn.addEventListener("click", () => {
    void client
      .uploadDataset({ csv: csvBox.value })
      .then((created) => {
        dataNote.textContent = `dataset ${created.dataset_id.slice(0, 12)}: ${created.n_records} records`;
        wb.setDatasetId(created.dataset_id);
      })
      .catch((err) => {
        dataNote.innerHTML = renderErrorNote({ code: "upload", message: String(err.message ?? err) });
      });
  });
  demoBtn.addEventListener("click", () => {
    // base rates far apart so the leveling-down tension is visible
    const records: RecordJson[] = [];
    for (const [a, rate] of [
      ["0", 0.2],
      ["1", 0.8],
    ] as const) {
      for (let i = 0; i < 50; i++) {
        records.push({ id: `${a}-${i}`, a, y: i < rate * 50 ? 1 : 0, d: 0 });
      }
    }
    dataNote.textContent = `demo: ${records.length} inline records, groups 0, 1`;
    wb.setRecords(records);
  });

  const weightPanel = el("fieldset");
  weightPanel.append(el("legend", {}, "utility weights"));
  const badgeSlot = el("div", { class: "badge-slot" });
  const classifyErrSlot = el("div");
  weightPanel.append(badgeSlot, classifyErrSlot);
  for (const [key, label] of WEIGHT_KEYS) {
    const row = el("label", { class: "slider-row" });
    const slider = el("input", {
      type: "range",
      min: String(WEIGHT_MIN),
      max: String(WEIGHT_MAX),
      step: String(WEIGHT_STEP),
      value: key === "w11" ? "1" : "0",
    });
    const value = el("span", { class: "slider-value" }, slider.value);
    slider.addEventListener("input", () => {
      value.textContent = slider.value;
      wb.setWeight(key, Number(slider.value));
    });
    row.append(el("span", {}, label), slider, value);
    weightPanel.append(row);
  }
  controls.append(weightPanel);

  const claimsPanel = el("fieldset");
  claimsPanel.append(el("legend", {}, "claims differentiator"));
  const kindSel = el("select");
  for (const k of ["none", "outcome", "decision", "legitimate"]) {
    kindSel.append(el("option", { value: k }, k));
  }
  const valuesIn = el("input", { type: "text", placeholder: "values, e.g. 1 or 0,1" });
  const attrIn = el("input", { type: "text", placeholder: "legitimate attribute" });
  const claimsErrSlot = el("div");
  claimsPanel.append(kindSel, valuesIn, attrIn, claimsErrSlot);
  controls.append(claimsPanel);

  const pushClaims = (): void => {
    const kind = kindSel.value;
    const claims: ClaimsJson = { kind };
    if (kind !== "none") {
      claims.values = valuesIn.value
        .split(",")
        .map((s) => s.trim())
        .filter((s) => s !== "")
        .map((s) => (kind === "legitimate" ? s : Number(s)));
      if (kind === "legitimate") claims.attr = attrIn.value.trim();
    }
    wb.setClaims(claims);
  };
  kindSel.addEventListener("change", pushClaims);
  valuesIn.addEventListener("change", pushClaims);
  attrIn.addEventListener("change", pushClaims);

  const patternPanel = el("fieldset");
  patternPanel.append(el("legend", {}, "pattern"));
  const patternSel = el("select");
  for (const k of ["egalitarian", "maximin", "prioritarian", "sufficientarian"]) {
    patternSel.append(el("option", { value: k }, k));
  }
  const kIn = el("input", { type: "number", step: "0.5", value: "2", title: "priority weight k" });
  const tIn = el("input", { type: "number", step: "0.1", value: "0", title: "sufficiency threshold t" });
  patternPanel.append(patternSel, kIn, tIn);
  controls.append(patternPanel);
  const pushPattern = (): void =>
    wb.setPattern(patternSel.value, { k: Number(kIn.value), t: Number(tIn.value) });
  patternSel.addEventListener("change", pushPattern);
  kIn.addEventListener("change", pushPattern);
  tIn.addEventListener("change", pushPattern);

  const rulePanel = el("fieldset");
  rulePanel.append(el("legend", {}, "rule space"));
  const ruleKindSel = el("select");
  for (const k of ["group_rates", "thresholds"]) ruleKindSel.append(el("option", { value: k }, k));
  const gridIn = el("input", { type: "text", placeholder: "grid: 0:1:11 or 0,0.5,1" });
  const exploreBtn = el("button", { type: "button" }, "map frontier");
  const optimizeErrSlot = el("div");
  rulePanel.append(ruleKindSel, gridIn, exploreBtn, optimizeErrSlot);
  controls.append(rulePanel);

  exploreBtn.addEventListener("click", () => {
    const text = gridIn.value.trim();
    if (text === "") {
      wb.setRulespace(null);
      return;
    }
    wb.setRulespace({ kind: ruleKindSel.value, grid: parseGrid(text) });
    void wb.runFrontier();
  });

  const auditSlot = el("div", { class: "audit-slot" });
  const auditErrSlot = el("div");
  const frontierSlot = el("div", { class: "frontier-slot" });
  output.append(auditErrSlot, auditSlot, frontierSlot);

  // one delegated listener survives innerHTML swaps
  frontierSlot.addEventListener("click", (ev) => {
    const target = (ev.target as Element).closest("circle.pt");
    if (target === null) return;
    const index = Number(target.getAttribute("data-index"));
    void wb.selectFrontierPoint(index);
  });
  auditSlot.addEventListener("click", (ev) => {
    if ((ev.target as Element).closest(".whatif") !== null) wb.clearWhatIf();
  });

  wb.onChange(() => {
    const s = wb.state;
    badgeSlot.innerHTML = s.lastClassify
      ? renderBadge(badgeFrom(s.lastClassify))
      : `<span class="badge none">adjust weights to classify them</span>`;
    classifyErrSlot.innerHTML = renderErrorNote(s.classifyError);
    claimsErrSlot.innerHTML = "";
    auditErrSlot.innerHTML = renderErrorNote(s.auditError);
    auditSlot.innerHTML = s.lastAudit
      ? renderAuditView(s.lastAudit, s.whatIf)
      : `<div class="hint">upload a dataset (or load the demo) to audit it.</div>`;
    optimizeErrSlot.innerHTML = renderErrorNote(s.optimizeError);
    frontierSlot.innerHTML = renderFrontierPanel(
      s.frontier,
      s.rulespace !== null,
      s.whatIf?.index ?? null,
    );
  });

  wb.refreshSoon();
}

main();
