/** Wire shapes for the audit service.
 *
 * Field names mirror the JSON payloads exactly, snake_case included.
 * The workbench never computes a metric from raw records; everything it
 * shows comes out of one of these report shapes.
 */

export interface WeightTableJson {
  w11: number;
  w10: number;
  w01: number;
  w00: number;
}

export interface WeightsJson extends WeightTableJson {
  per_group?: Record<string, WeightTableJson> | null;
}

export interface ClaimsJson {
  kind: string;
  attr?: string | null;
  values?: Array<number | string> | null;
}

export interface PatternSpecJson {
  kind: string;
  k?: number | null;
  t?: number | null;
}

export interface RecordJson {
  id?: string | null;
  a: string | number;
  y: number;
  d: number;
  score?: number | null;
  legit?: Record<string, string | number> | null;
}

export interface ProvenanceJson {
  dataset_hash: string;
  config_hash?: string;
  seed: number | null;
}

export interface ProfileRowJson {
  group: string;
  stratum: string;
  expected_utility: number;
  n: number;
}

/** Pattern blocks carry either a value or an `undefined` message, never both. */
export interface PatternBlockJson {
  kind: string;
  k?: number;
  t?: number;
  value?: number;
  direction?: "lower_better" | "higher_better";
  satisfied?: boolean | null;
  per_stratum?: Record<string, number>;
  undefined?: string;
}

export interface GapBlockJson {
  criterion: string;
  gaps?: Record<string, number>;
  overall?: number;
  satisfied?: boolean;
  undefined?: string;
}

export interface StratumCheckJson {
  stratum: string;
  f_egal: number;
  classical_gap: number;
  multiplier: number;
  residual: number;
}

export interface VerificationJson {
  f_egal?: number;
  classical_gap?: number;
  multiplier?: number;
  residual?: number;
  verdict?: boolean;
  per_stratum?: StratumCheckJson[];
  undefined?: string;
}

export interface FindingJson {
  matched: string | null;
  required_claims: ClaimsJson;
  conditions: Array<[string, boolean]>;
  multiplier: number | null;
  stratum_multipliers?: Record<string, number>;
}

export interface EquivalenceJson extends FindingJson {
  verification: VerificationJson | null;
}

export interface AuditReport {
  report: "audit";
  version: string;
  provenance: ProvenanceJson;
  dataset: {
    n_records: number;
    groups: string[];
    excluded_records: number;
    empty_relevant_groups: string[];
  };
  claims: ClaimsJson;
  weights: WeightsJson;
  tolerance: number;
  profile: ProfileRowJson[];
  patterns: PatternBlockJson[];
  classical: GapBlockJson[];
  equivalence: EquivalenceJson;
}

export interface RuleJson {
  kind: string;
  params: Record<string, number>;
}

export interface FrontierPointJson {
  rule: Record<string, number>;
  total_utility: number;
  egalitarian_gap: number;
}

export interface OptimizeReport {
  report: "optimize";
  version: string;
  provenance: ProvenanceJson;
  claims: ClaimsJson;
  weights: WeightsJson;
  objective: PatternSpecJson;
  candidates: number;
  skipped: number;
  best_rule: RuleJson;
  best_value: number;
  profile_at_best: ProfileRowJson[];
  frontier?: FrontierPointJson[];
}

export interface ClassifyReport extends FindingJson {
  report: "classify_weights";
  version: string;
  weights: WeightsJson;
}

export interface DatasetCreated {
  dataset_id: string;
  n_records: number;
  groups: string[];
}

export interface DatasetSummary {
  dataset_id: string;
  seed: number | null;
  n_records: number;
  groups: string[];
  base_rates: Record<string, number>;
  acceptance_rates: Record<string, number>;
  legit_schema: Record<string, string[]> | null;
}

export interface ErrorBody {
  error: {
    code: string;
    message: string;
    fields?: Array<{ loc: Array<string | number>; msg: string }>;
  };
}

// Request bodies.

export interface SyntheticSpec {
  groups: Record<
    string,
    { n: number; base_rate: number; accept_pos?: number; accept_neg?: number }
  >;
  score_noise?: number;
  legit?: Record<string, string[]> | null;
  seed?: number;
}

export interface DatasetUploadRequest {
  csv?: string;
  synthetic?: SyntheticSpec;
}

export interface DatasetRef {
  dataset_id?: string;
  records?: RecordJson[];
  groups?: string[];
  legit_schema?: Record<string, string[]> | null;
}

export interface AuditRequest extends DatasetRef {
  weights: WeightsJson;
  claims?: ClaimsJson;
  patterns?: PatternSpecJson[];
  tol?: number;
}

export interface RuleSpaceJson {
  kind: string;
  grid: number[] | Record<string, number[]>;
}

export interface OptimizeRequest extends DatasetRef {
  weights: WeightsJson;
  claims?: ClaimsJson;
  objective: PatternSpecJson;
  rulespace: RuleSpaceJson;
  include_frontier?: boolean;
  tol?: number;
}

export interface ClassifyRequest {
  weights: WeightsJson;
  claims?: ClaimsJson;
}
