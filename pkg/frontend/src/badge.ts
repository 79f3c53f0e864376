/** Criterion badge derived from a weight-classification finding. */

import type { FindingJson } from "./types.js";

export interface Badge {
  /** Raw criterion label exactly as the service reported it. */
  criterion: string;
  /** Human heading, e.g. "Conditional statistical parity (region)". */
  label: string;
  /** Gap multiplier line; stratum-by-stratum when no scalar exists. */
  detail: string;
}

const TITLES: Record<string, string> = {
  statistical_parity: "Statistical parity",
  conditional_statistical_parity: "Conditional statistical parity",
  equality_of_opportunity: "Equality of opportunity",
  false_positive_rate_parity: "False positive rate parity",
  equalized_odds: "Equalized odds",
  predictive_parity: "Predictive parity",
  false_omission_rate_parity: "False omission rate parity",
  sufficiency: "Sufficiency",
};

export function fmtNum(x: number): string {
  if (Number.isInteger(x)) return String(x);
  const fixed = x.toPrecision(6);
  return String(Number(fixed));
}

/** Null when the weights encode no classical criterion under the current
 * claims; the view renders that as an explicit "no equivalent" tag
 * rather than hiding the badge. */
export function badgeFrom(finding: FindingJson): Badge | null {
  if (finding.matched === null) return null;
  // conditional parity carries its legitimate attribute as a suffix,
  // e.g. "conditional_statistical_parity[region]"
  const m = /^(.*?)(?:\[(.+)\])?$/.exec(finding.matched);
  const base = m?.[1] ?? finding.matched;
  const attr = m?.[2];
  let label = TITLES[base] ?? base;
  if (attr) label += ` (${attr})`;
  let detail: string;
  if (finding.multiplier !== null) {
    detail = `gap multiplier ${fmtNum(finding.multiplier)}`;
  } else if (finding.stratum_multipliers) {
    detail = Object.entries(finding.stratum_multipliers)
      .map(([s, v]) => `${s}: ${fmtNum(v)}`)
      .join(", ");
  } else {
    detail = "multiplier undefined";
  }
  return { criterion: finding.matched, label, detail };
}
