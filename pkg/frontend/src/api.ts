/** Thin typed client for the audit service. All computation stays on the
 * server; this module only moves JSON. */

import type {
  AuditReport,
  AuditRequest,
  ClassifyReport,
  ClassifyRequest,
  DatasetCreated,
  DatasetSummary,
  DatasetUploadRequest,
  ErrorBody,
  OptimizeReport,
  OptimizeRequest,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response, carrying the service's error body. The message is
 * shown verbatim next to whichever control produced the bad request. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly fields: ErrorBody["error"]["fields"];

  constructor(status: number, body: unknown) {
    const err = (body as ErrorBody | null)?.error;
    super(err?.message ?? `unexpected response (HTTP ${status})`);
    this.name = "ApiError";
    this.status = status;
    this.code = err?.code ?? "unknown";
    this.fields = err?.fields;
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchImpl(this.baseUrl + path, init);
    let parsed: unknown = null;
    const text = await res.text();
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = null;
      }
    }
    if (!res.ok) throw new ApiError(res.status, parsed);
    return parsed as T;
  }

  uploadDataset(req: DatasetUploadRequest): Promise<DatasetCreated> {
    return this.send("POST", "/datasets", req);
  }

  datasetSummary(datasetId: string): Promise<DatasetSummary> {
    return this.send("GET", `/datasets/${encodeURIComponent(datasetId)}/summary`);
  }

  audit(req: AuditRequest): Promise<AuditReport> {
    return this.send("POST", "/audit", req);
  }

  optimize(req: OptimizeRequest): Promise<OptimizeReport> {
    return this.send("POST", "/optimize", req);
  }

  classifyWeights(req: ClassifyRequest): Promise<ClassifyReport> {
    return this.send("POST", "/classify-weights", req);
  }
}
