import { describe, expect, it } from "vitest";

import type { AuditReport } from "../src/types.js";
import {
  renderAuditView,
  renderClassicalTable,
  renderEquivalencePanel,
  renderErrorNote,
  renderFrontierPanel,
  renderPatternBlock,
  renderProfileBars,
  renderProvenance,
} from "../src/views.js";
import auditT1File from "./fixtures/audit_t1.json";
import auditT1SpFile from "./fixtures/audit_t1_sp.json";
import auditEmptyFile from "./fixtures/audit_empty_group.json";
import errorFile from "./fixtures/error_bad_claims.json";

const t1 = (auditT1File as any).response.body as AuditReport;
const t1Sp = (auditT1SpFile as any).response.body as AuditReport;
const empty = (auditEmptyFile as any).response.body as AuditReport;
const errBody = (errorFile as any).response.body.error as { code: string; message: string };

function dataEu(html: string): string[] {
  return [...html.matchAll(/data-eu="([^"]+)"/g)].map((m) => m[1]);
}

describe("profile bars", () => {
  it("draws one bar per populated relevant group, carrying exact utilities", () => {
    const html = renderProfileBars(t1.profile, []);
    expect(dataEu(html)).toEqual(["0.5", "1.5"]);
    expect(html).toContain('data-group="0"');
    expect(html).toContain('data-group="1"');
    expect(html).not.toContain('class="warn"');
  });

  it("omits bars for declared-but-empty relevant groups and warns instead", () => {
    const html = renderProfileBars(empty.profile, empty.dataset.empty_relevant_groups);
    expect((html.match(/<rect class="bar/g) ?? []).length).toBe(3);
    expect(html).toContain("a=b, y=0");
    expect(html).toContain('class="warn"');
    // no fake zero bar for the missing group/stratum cell
    expect(html).not.toContain('data-group="b" data-stratum="y=0"');
  });

  it("draws negative utilities on the other side of a zero axis", () => {
    const rows = [
      { group: "0", stratum: "all", expected_utility: -1, n: 3 },
      { group: "1", stratum: "all", expected_utility: 2, n: 3 },
    ];
    const html = renderProfileBars(rows, []);
    expect(html).toContain('class="bar neg"');
    expect(dataEu(html)).toEqual(["-1", "2"]);
  });
});

describe("pattern blocks", () => {
  it("shows the metric value with its direction and verdict", () => {
    const egal = t1.patterns.find((p) => p.kind === "egalitarian")!;
    const html = renderPatternBlock(egal);
    expect(html).toContain('data-value="1"');
    expect(html).toContain("lower is better");
    expect(html).toContain("not satisfied");
  });

  it("renders undefined patterns as the service message, not a zero", () => {
    const egal = empty.patterns.find((p) => p.kind === "egalitarian")!;
    const html = renderPatternBlock(egal);
    expect(egal.undefined).toBeTruthy();
    expect(html).toContain(egal.undefined!);
    expect(html).not.toContain("F =");
  });
});

describe("classical table", () => {
  it("has one row per reported criterion with the exact gap", () => {
    const html = renderClassicalTable(t1.classical);
    expect((html.match(/<tr data-criterion=/g) ?? []).length).toBe(t1.classical.length);
    const sp = t1.classical.find((c) => c.criterion === "statistical_parity")!;
    expect(html).toContain(`data-gap="${String(sp.overall)}"`);
  });
});

describe("equivalence panel", () => {
  it("badges the matched criterion and reports the identity check", () => {
    const html = renderEquivalencePanel(t1Sp.equivalence);
    expect(html).toContain('data-criterion="statistical_parity"');
    expect(html).toContain("Statistical parity");
    expect(html).toContain("identity check");
    expect(html).toContain("ok");
  });

  it("tags unmatched weights explicitly", () => {
    const html = renderEquivalencePanel(t1.equivalence);
    expect(t1.equivalence.matched).toBeNull();
    expect(html).toContain("no classical equivalent");
  });
});

describe("chrome", () => {
  it("footer carries both provenance hashes", () => {
    const html = renderProvenance(t1.provenance);
    expect(html).toContain(t1.provenance.dataset_hash);
    expect(html).toContain(t1.provenance.config_hash!);
  });

  it("service errors surface verbatim", () => {
    const html = renderErrorNote(errBody);
    expect(html).toContain(errBody.message);
    expect(html).toContain('data-code="invalid_spec"');
    expect(renderErrorNote(null)).toBe("");
  });

  it("what-if explorer is disabled with a hint until a rule space exists", () => {
    const html = renderFrontierPanel(null, false, null);
    expect(html).toContain("disabled");
    expect(html).toContain("configure a rule space");
    expect(html).not.toContain("<svg");
  });

  it("full audit view composes every section", () => {
    const html = renderAuditView(t1);
    expect(html).toContain("dataset: 8 records");
    expect(html).toContain("profile-bars");
    expect(html).toContain("classical");
    expect(html).toContain(t1.provenance.config_hash!);
  });
});
