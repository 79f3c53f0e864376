/** Session state and request sequencing for the workbench.
 *
 * Controls fire requests as they change, responses arrive in whatever
 * order the network likes, and the view must always show the newest
 * request's result. LatestGate enforces that: anything that resolves
 * after a newer request has been issued is discarded, errors included.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  AuditReport,
  AuditRequest,
  ClaimsJson,
  ClassifyReport,
  OptimizeReport,
  OptimizeRequest,
  PatternSpecJson,
  RecordJson,
  RuleSpaceJson,
  WeightTableJson,
  WeightsJson,
} from "./types.js";

export type GateOutcome = "delivered" | "stale" | "failed";

export class LatestGate<T> {
  private seq = 0;

  /** Run one request; deliver its result only if no newer request has
   * been issued through this gate in the meantime. */
  async issue(
    run: () => Promise<T>,
    deliver: (value: T) => void,
    onError?: (err: unknown) => void,
  ): Promise<GateOutcome> {
    const token = ++this.seq;
    try {
      const value = await run();
      if (token !== this.seq) return "stale";
      deliver(value);
      return "delivered";
    } catch (err) {
      if (token !== this.seq) return "stale";
      onError?.(err);
      return "failed";
    }
  }
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, ms);
  };
}

export interface FrontierState {
  egal: OptimizeReport;
  maximinRule: Record<string, number>;
  prioritarianRule: Record<string, number> | null;
}

export interface WhatIfState {
  index: number;
  report: OptimizeReport;
}

export interface SessionState {
  datasetId: string | null;
  records: RecordJson[] | null;
  weights: WeightsJson;
  perGroupEnabled: boolean;
  claims: ClaimsJson;
  pattern: PatternSpecJson;
  rulespace: RuleSpaceJson | null;
  tol: number;
  lastAudit: AuditReport | null;
  lastClassify: ClassifyReport | null;
  frontier: FrontierState | null;
  whatIf: WhatIfState | null;
  auditError: ApiError | null;
  classifyError: ApiError | null;
  optimizeError: ApiError | null;
}

const NEUTRAL: WeightTableJson = { w11: 1, w10: 0, w01: 0, w00: 0 };

export function initialState(): SessionState {
  return {
    datasetId: null,
    records: null,
    weights: { ...NEUTRAL },
    perGroupEnabled: false,
    claims: { kind: "none" },
    pattern: { kind: "egalitarian" },
    rulespace: null,
    tol: 1e-9,
    lastAudit: null,
    lastClassify: null,
    frontier: null,
    whatIf: null,
    auditError: null,
    classifyError: null,
    optimizeError: null,
  };
}

// slider range; values outside it are clamped, not rejected
export const WEIGHT_MIN = -5;
export const WEIGHT_MAX = 5;
export const WEIGHT_STEP = 0.1;

function clampWeight(v: number): number {
  if (Number.isNaN(v)) return 0;
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, v));
}

function asApiError(err: unknown): ApiError {
  if (err instanceof ApiError) return err;
  return new ApiError(0, { error: { code: "network", message: String(err) } });
}

export class Workbench {
  readonly state: SessionState;
  readonly refreshSoon: () => void;

  private readonly auditGate = new LatestGate<AuditReport>();
  private readonly classifyGate = new LatestGate<ClassifyReport>();
  private readonly frontierGate = new LatestGate<FrontierState>();
  private readonly whatIfGate = new LatestGate<OptimizeReport>();
  private listeners: Array<() => void> = [];
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly client: ApiClient,
    debounceMs = 150,
  ) {
    this.state = initialState();
    this.refreshSoon = debounce(() => {
      this.pending = this.refresh();
    }, debounceMs);
  }

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  /** Wait for whatever refresh the debouncer last kicked off. */
  settle(): Promise<void> {
    return this.pending;
  }

  // Control handlers. Each one invalidates any rule exploration built on
  // the old configuration, then schedules a single superseding refresh.

  setWeight(key: keyof WeightTableJson, value: number, group?: string): void {
    const v = clampWeight(value);
    if (group === undefined) {
      this.state.weights[key] = v;
    } else {
      const per = (this.state.weights.per_group ??= {});
      per[group] = { ...(per[group] ?? this.sharedTable()), [key]: v };
    }
    this.configChanged();
  }

  setPerGroupEnabled(on: boolean, groups: string[] = []): void {
    this.state.perGroupEnabled = on;
    if (on) {
      const per = (this.state.weights.per_group ??= {});
      for (const a of groups) per[a] ??= this.sharedTable();
    } else {
      delete this.state.weights.per_group;
    }
    this.configChanged();
  }

  setClaims(claims: ClaimsJson): void {
    this.state.claims = claims;
    this.configChanged();
  }

  setPattern(kind: string, opts: { k?: number; t?: number } = {}): void {
    const spec: PatternSpecJson = { kind };
    if (kind === "prioritarian") spec.k = opts.k ?? 2;
    if (kind === "sufficientarian") spec.t = opts.t ?? 0;
    this.state.pattern = spec;
    this.configChanged();
  }

  setRulespace(space: RuleSpaceJson | null): void {
    this.state.rulespace = space;
    this.state.frontier = null;
    this.state.whatIf = null;
    this.emit();
  }

  setDatasetId(id: string | null): void {
    this.state.datasetId = id;
    this.state.records = null;
    this.configChanged();
  }

  setRecords(records: RecordJson[]): void {
    this.state.records = records;
    this.state.datasetId = null;
    this.configChanged();
  }

  private configChanged(): void {
    this.state.frontier = null;
    this.state.whatIf = null;
    this.emit();
    this.refreshSoon();
  }

  private sharedTable(): WeightTableJson {
    const { w11, w10, w01, w00 } = this.state.weights;
    return { w11, w10, w01, w00 };
  }

  private requestWeights(): WeightsJson {
    const w: WeightsJson = this.sharedTable();
    if (this.state.perGroupEnabled && this.state.weights.per_group) {
      w.per_group = this.state.weights.per_group;
    }
    return w;
  }

  private dataRef(): Pick<AuditRequest, "dataset_id" | "records"> | null {
    if (this.state.datasetId !== null) return { dataset_id: this.state.datasetId };
    if (this.state.records !== null) return { records: this.state.records };
    return null;
  }

  auditRequest(): AuditRequest | null {
    const ref = this.dataRef();
    if (ref === null) return null;
    return {
      ...ref,
      weights: this.requestWeights(),
      claims: this.state.claims,
      patterns: [this.state.pattern],
      tol: this.state.tol,
    };
  }

  private optimizeRequest(
    objective: PatternSpecJson,
    rulespace: RuleSpaceJson,
    includeFrontier: boolean,
  ): OptimizeRequest | null {
    const ref = this.dataRef();
    if (ref === null) return null;
    return {
      ...ref,
      weights: this.requestWeights(),
      claims: this.state.claims,
      objective,
      rulespace,
      include_frontier: includeFrontier,
      tol: this.state.tol,
    };
  }

  async refresh(): Promise<void> {
    await Promise.all([this.refreshClassify(), this.refreshAudit()]);
  }

  async refreshAudit(): Promise<GateOutcome | "skipped"> {
    const req = this.auditRequest();
    if (req === null) return "skipped";
    return this.auditGate.issue(
      () => this.client.audit(req),
      (report) => {
        this.state.lastAudit = report;
        this.state.auditError = null;
        this.emit();
      },
      (err) => {
        this.state.auditError = asApiError(err);
        this.emit();
      },
    );
  }

  async refreshClassify(): Promise<GateOutcome> {
    const req = { weights: this.requestWeights(), claims: this.state.claims };
    return this.classifyGate.issue(
      () => this.client.classifyWeights(req),
      (report) => {
        this.state.lastClassify = report;
        this.state.classifyError = null;
        this.emit();
      },
      (err) => {
        this.state.classifyError = asApiError(err);
        this.emit();
      },
    );
  }

  /** Populate the what-if explorer: the frontier itself plus the rules
   * the markers point at. Requires a configured rule space. */
  async runFrontier(): Promise<GateOutcome | "skipped"> {
    const space = this.state.rulespace;
    if (space === null) return "skipped";
    const egalReq = this.optimizeRequest({ kind: "egalitarian" }, space, true);
    if (egalReq === null) return "skipped";
    const maximinReq = this.optimizeRequest({ kind: "maximin" }, space, false)!;
    const prioReq =
      this.state.pattern.kind === "prioritarian"
        ? this.optimizeRequest(this.state.pattern, space, false)!
        : null;
    return this.frontierGate.issue(
      async () => {
        const [egal, maximin, prio] = await Promise.all([
          this.client.optimize(egalReq),
          this.client.optimize(maximinReq),
          prioReq ? this.client.optimize(prioReq) : Promise.resolve(null),
        ]);
        return {
          egal,
          maximinRule: maximin.best_rule.params,
          prioritarianRule: prio ? prio.best_rule.params : null,
        };
      },
      (frontier) => {
        this.state.frontier = frontier;
        this.state.optimizeError = null;
        this.emit();
      },
      (err) => {
        this.state.optimizeError = asApiError(err);
        this.emit();
      },
    );
  }

  /** Re-render the audit panel under one frontier rule. The service has
   * no audit-under-rule endpoint, so the rule is pinned as a
   * single-candidate space and the optimizer report supplies the
   * profile; with one candidate, selection is the identity. */
  async selectFrontierPoint(index: number): Promise<GateOutcome | "skipped"> {
    const frontier = this.state.frontier?.egal.frontier;
    const space = this.state.rulespace;
    if (!frontier || !space || index < 0 || index >= frontier.length) return "skipped";
    const params = frontier[index].rule;
    const pinned: RuleSpaceJson = {
      kind: space.kind,
      grid: Object.fromEntries(Object.entries(params).map(([a, p]) => [a, [p]])),
    };
    const req = this.optimizeRequest({ kind: "egalitarian" }, pinned, false);
    if (req === null) return "skipped";
    return this.whatIfGate.issue(
      () => this.client.optimize(req),
      (report) => {
        this.state.whatIf = { index, report };
        this.state.optimizeError = null;
        this.emit();
      },
      (err) => {
        this.state.optimizeError = asApiError(err);
        this.emit();
      },
    );
  }

  clearWhatIf(): void {
    this.state.whatIf = null;
    this.emit();
  }
}
