/** HTML/SVG renderers for the workbench panels.
 *
 * Every function here is a pure string builder over report JSON, which
 * keeps the render path trivially testable. Numbers shown to the user
 * are shortened for display, but each bar and point also carries the
 * exact reported value in a data attribute.
 */

import { badgeFrom, fmtNum, type Badge } from "./badge.js";
import type { FrontierState, WhatIfState } from "./state.js";
import type {
  AuditReport,
  EquivalenceJson,
  FrontierPointJson,
  GapBlockJson,
  PatternBlockJson,
  ProfileRowJson,
  ProvenanceJson,
  VerificationJson,
} from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const BAR_W = 360;
const LABEL_W = 140;
const ROW_H = 24;

/** Horizontal utility bars, one per relevant group that has records.
 * Declared-but-empty relevant groups get a warning panel instead of a
 * fake zero-height bar. */
export function renderProfileBars(profile: ProfileRowJson[], emptyGroups: string[]): string {
  const parts: string[] = [];
  if (emptyGroups.length > 0) {
    const items = emptyGroups.map((g) => escapeHtml(g)).join("; ");
    parts.push(
      `<div class="warn">no records for declared relevant group(s): ${items}.` +
        ` Their bars are omitted and gap-based patterns are undefined.</div>`,
    );
  }
  if (profile.length === 0) {
    parts.push(`<div class="hint">no populated relevant groups to chart</div>`);
    return parts.join("\n");
  }
  const maxAbs = Math.max(...profile.map((r) => Math.abs(r.expected_utility)), 1e-12);
  const hasNeg = profile.some((r) => r.expected_utility < 0);
  const x0 = LABEL_W + (hasNeg ? BAR_W / 2 : 0);
  const unit = (hasNeg ? BAR_W / 2 : BAR_W) / maxAbs;
  const height = profile.length * ROW_H + 8;
  const rows = profile.map((r, i) => {
    const y = 4 + i * ROW_H;
    const w = Math.abs(r.expected_utility) * unit;
    const x = r.expected_utility < 0 ? x0 - w : x0;
    const label = r.stratum === "all" ? `a=${r.group}` : `a=${r.group}, ${r.stratum}`;
    const cls = r.expected_utility < 0 ? "bar neg" : "bar";
    return (
      `<text x="${LABEL_W - 6}" y="${y + 15}" text-anchor="end" class="bar-label">` +
      `${escapeHtml(label)} (n=${fmtNum(r.n)})</text>` +
      `<rect class="${cls}" x="${x.toFixed(2)}" y="${y}" width="${w.toFixed(2)}" height="${ROW_H - 8}"` +
      ` data-group="${escapeHtml(r.group)}" data-stratum="${escapeHtml(r.stratum)}"` +
      ` data-eu="${String(r.expected_utility)}"></rect>` +
      `<text x="${(x + w + 4).toFixed(2)}" y="${y + 15}" class="bar-value">` +
      `${fmtNum(r.expected_utility)}</text>`
    );
  });
  const axis = `<line x1="${x0}" y1="0" x2="${x0}" y2="${height}" class="axis"></line>`;
  parts.push(
    `<svg class="profile-bars" viewBox="0 0 ${LABEL_W + BAR_W + 60} ${height}"` +
      ` width="100%" role="img">${axis}${rows.join("")}</svg>`,
  );
  return parts.join("\n");
}

const DIRECTION_TEXT: Record<string, string> = {
  lower_better: "lower is better",
  higher_better: "higher is better",
};

export function renderPatternBlock(p: PatternBlockJson): string {
  const name = escapeHtml(p.kind);
  if (p.undefined !== undefined) {
    return `<div class="pattern undef" data-kind="${name}">${name}: ${escapeHtml(p.undefined)}</div>`;
  }
  const params: string[] = [];
  if (p.k !== undefined) params.push(`k=${fmtNum(p.k)}`);
  if (p.t !== undefined) params.push(`t=${fmtNum(p.t)}`);
  const head = params.length > 0 ? `${name} (${params.join(", ")})` : name;
  const dir = p.direction ? DIRECTION_TEXT[p.direction] ?? p.direction : "";
  const sat =
    p.satisfied === null || p.satisfied === undefined
      ? ""
      : ` <span class="sat">${p.satisfied ? "satisfied" : "not satisfied"}</span>`;
  const strata = Object.entries(p.per_stratum ?? {})
    .map(([s, v]) => `<span class="chip">${escapeHtml(s)}: ${fmtNum(v)}</span>`)
    .join(" ");
  return (
    `<div class="pattern" data-kind="${name}" data-value="${String(p.value)}">` +
    `<strong>${head}</strong> F = ${fmtNum(p.value ?? NaN)} <span class="dir">(${dir})</span>` +
    `${sat}${strata ? `<div class="strata">${strata}</div>` : ""}</div>`
  );
}

export function renderClassicalTable(blocks: GapBlockJson[]): string {
  const rows = blocks.map((b) => {
    const name = escapeHtml(b.criterion);
    if (b.undefined !== undefined) {
      return `<tr class="undef"><td>${name}</td><td colspan="2">${escapeHtml(b.undefined)}</td></tr>`;
    }
    const sat = b.satisfied ? "yes" : "no";
    return (
      `<tr data-criterion="${name}"><td>${name}</td>` +
      `<td class="num" data-gap="${String(b.overall)}">${fmtNum(b.overall ?? NaN)}</td>` +
      `<td>${sat}</td></tr>`
    );
  });
  return (
    `<table class="classical"><thead><tr><th>criterion</th><th>max gap</th>` +
    `<th>within tol</th></tr></thead><tbody>${rows.join("")}</tbody></table>`
  );
}

export function renderBadge(badge: Badge | null): string {
  if (badge === null) {
    return `<span class="badge none">no classical equivalent</span>`;
  }
  return (
    `<span class="badge" data-criterion="${escapeHtml(badge.criterion)}">` +
    `${escapeHtml(badge.label)}<small>${escapeHtml(badge.detail)}</small></span>`
  );
}

function renderVerification(v: VerificationJson | null): string {
  if (v === null) return "";
  if (v.undefined !== undefined) {
    return `<div class="verify undef">check undefined: ${escapeHtml(v.undefined)}</div>`;
  }
  const verdict = v.verdict ? "ok" : "FAILED";
  return (
    `<div class="verify ${v.verdict ? "ok" : "bad"}">identity check: ` +
    `F_egal = ${fmtNum(v.f_egal ?? NaN)}, gap x multiplier = ` +
    `${fmtNum((v.classical_gap ?? NaN) * (v.multiplier ?? NaN))}, ` +
    `residual ${v.residual?.toExponential(3) ?? "?"} ${verdict}</div>`
  );
}

export function renderEquivalencePanel(eq: EquivalenceJson): string {
  const badge = renderBadge(badgeFrom(eq));
  const conditions = eq.conditions
    .map(
      ([cond, holds]) =>
        `<li class="${holds ? "holds" : "fails"}">${holds ? "+" : "-"} ${escapeHtml(cond)}</li>`,
    )
    .join("");
  return (
    `<div class="equivalence">${badge}<ul class="conditions">${conditions}</ul>` +
    `${renderVerification(eq.verification)}</div>`
  );
}

export function renderProvenance(p: ProvenanceJson): string {
  const cfg = p.config_hash ? ` | config ${escapeHtml(p.config_hash)}` : "";
  const seed = p.seed === null || p.seed === undefined ? "" : ` | seed ${p.seed}`;
  return `<footer class="provenance">data ${escapeHtml(p.dataset_hash)}${cfg}${seed}</footer>`;
}

/** 4xx messages are shown verbatim next to the control that caused them. */
export function renderErrorNote(err: { code: string; message: string } | null): string {
  if (err === null) return "";
  return `<div class="error" data-code="${escapeHtml(err.code)}">${escapeHtml(err.message)}</div>`;
}

export function egalOptimalIndex(frontier: FrontierPointJson[]): number {
  let best = 0;
  for (let i = 1; i < frontier.length; i++) {
    if (frontier[i].egalitarian_gap < frontier[best].egalitarian_gap) best = i;
  }
  return best;
}

/** Index of the frontier point whose rule equals `params`, or null. */
export function matchRuleIndex(
  frontier: FrontierPointJson[],
  params: Record<string, number>,
): number | null {
  const keys = Object.keys(params);
  for (let i = 0; i < frontier.length; i++) {
    const rule = frontier[i].rule;
    if (Object.keys(rule).length === keys.length && keys.every((a) => rule[a] === params[a])) {
      return i;
    }
  }
  return null;
}

const SC_W = 440;
const SC_H = 280;
const SC_PAD = 36;

function scale(v: number, min: number, max: number, lo: number, hi: number): number {
  if (max === min) return (lo + hi) / 2;
  return lo + ((v - min) / (max - min)) * (hi - lo);
}

/** Gap-versus-total scatter of the rule frontier. Disabled with a hint
 * until a rule space is configured and explored. */
export function renderFrontierPanel(
  frontier: FrontierState | null,
  rulespaceConfigured: boolean,
  selectedIndex: number | null,
): string {
  if (!rulespaceConfigured) {
    return (
      `<div class="frontier disabled"><div class="hint">what-if explorer disabled: ` +
      `configure a rule space (an acceptance-rate or threshold grid) to compare ` +
      `alternative decision rules.</div></div>`
    );
  }
  if (frontier === null) {
    return (
      `<div class="frontier empty"><div class="hint">rule space configured; ` +
      `run the explorer to map the frontier.</div></div>`
    );
  }
  const points = frontier.egal.frontier ?? [];
  if (points.length === 0) {
    return `<div class="frontier empty"><div class="hint">frontier came back empty.</div></div>`;
  }
  const totals = points.map((p) => p.total_utility);
  const gaps = points.map((p) => p.egalitarian_gap);
  const [tMin, tMax] = [Math.min(...totals), Math.max(...totals)];
  const [gMin, gMax] = [Math.min(...gaps), Math.max(...gaps)];
  const egalIdx = egalOptimalIndex(points);
  const maximinIdx = matchRuleIndex(points, frontier.maximinRule);
  const prioIdx = frontier.prioritarianRule
    ? matchRuleIndex(points, frontier.prioritarianRule)
    : null;
  const circles = points.map((p, i) => {
    const cx = scale(p.total_utility, tMin, tMax, SC_PAD, SC_W - SC_PAD);
    const cy = scale(p.egalitarian_gap, gMin, gMax, SC_H - SC_PAD, SC_PAD);
    const cls = [
      "pt",
      i === egalIdx ? "egal-best" : "",
      i === maximinIdx ? "maximin-best" : "",
      i === prioIdx ? "prio-best" : "",
      i === selectedIndex ? "selected" : "",
    ]
      .filter(Boolean)
      .join(" ");
    const rule = Object.entries(p.rule)
      .map(([a, v]) => `${a}:${fmtNum(v)}`)
      .join(" ");
    return (
      `<circle class="${cls}" cx="${cx.toFixed(1)}" cy="${cy.toFixed(1)}" r="6"` +
      ` data-index="${i}" data-total="${String(p.total_utility)}"` +
      ` data-gap="${String(p.egalitarian_gap)}"><title>rule ${escapeHtml(rule)} | ` +
      `total ${fmtNum(p.total_utility)} | gap ${fmtNum(p.egalitarian_gap)}</title></circle>`
    );
  });
  const legend =
    `<div class="legend"><span class="key egal-best">egalitarian optimum</span>` +
    `<span class="key maximin-best">maximin optimum</span>` +
    (prioIdx !== null ? `<span class="key prio-best">prioritarian optimum</span>` : "") +
    `</div>`;
  return (
    `<div class="frontier">` +
    `<svg class="frontier-plot" viewBox="0 0 ${SC_W} ${SC_H}" width="100%" role="img">` +
    `<text x="${SC_W / 2}" y="${SC_H - 6}" text-anchor="middle" class="axis-label">total utility</text>` +
    `<text x="12" y="${SC_H / 2}" text-anchor="middle" class="axis-label" transform="rotate(-90 12 ${SC_H / 2})">egalitarian gap</text>` +
    circles.join("") +
    `</svg>${legend}</div>`
  );
}

export function renderWhatIf(whatIf: WhatIfState | null): string {
  if (whatIf === null) return "";
  const rep = whatIf.report;
  const rule = Object.entries(rep.best_rule.params)
    .map(([a, v]) => `${escapeHtml(a)}: ${fmtNum(v)}`)
    .join(", ");
  return (
    `<div class="whatif" data-index="${whatIf.index}">` +
    `<h3>under rule {${rule}}</h3>` +
    renderProfileBars(rep.profile_at_best, []) +
    `<div class="pattern" data-kind="${escapeHtml(rep.objective.kind)}"` +
    ` data-value="${String(rep.best_value)}"><strong>${escapeHtml(rep.objective.kind)}</strong>` +
    ` F = ${fmtNum(rep.best_value)}</div></div>`
  );
}

/** Full audit panel: bars, patterns, classical gaps, equivalence badge,
 * provenance footer. What-if content, when present, replaces the bars
 * with the profile under the selected rule. */
export function renderAuditView(report: AuditReport, whatIf: WhatIfState | null = null): string {
  const sections = [
    `<section class="dataset-line">dataset: ${report.dataset.n_records} records, ` +
      `groups ${report.dataset.groups.map(escapeHtml).join(", ")}` +
      (report.dataset.excluded_records > 0
        ? ` (${report.dataset.excluded_records} excluded by claims)`
        : "") +
      `</section>`,
    whatIf !== null
      ? renderWhatIf(whatIf)
      : renderProfileBars(report.profile, report.dataset.empty_relevant_groups),
    `<section class="patterns">${report.patterns.map(renderPatternBlock).join("")}</section>`,
    `<section class="classical-panel">${renderClassicalTable(report.classical)}</section>`,
    renderEquivalencePanel(report.equivalence),
    renderProvenance(report.provenance),
  ];
  return sections.join("\n");
}
