/** fetch stand-ins built on captured fixtures. No real sockets; the
 * response bodies are byte-for-byte what the service returned when the
 * fixtures were captured (see capture_fixtures.py). */

import type { FetchLike } from "../src/api.js";

export interface RecordedCall {
  url: string;
  method: string;
  body: any;
}

export interface FixtureRoute {
  path: string;
  method?: string;
  status?: number;
  body: unknown;
  /** Optional request-body predicate; first matching route wins. */
  match?: (body: any) => boolean;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function fixtureFetch(routes: FixtureRoute[]): FetchLike & { calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ url, method, body });
    const route = routes.find(
      (r) =>
        url.endsWith(r.path) &&
        (r.method ?? "POST") === method &&
        (r.match === undefined || r.match(body)),
    );
    if (route === undefined) {
      throw new Error(`no fixture route for ${method} ${url}`);
    }
    return jsonResponse(route.status ?? 200, route.body);
  };
  return Object.assign(impl, { calls });
}

export interface PendingCall extends RecordedCall {
  respond: (status: number, body: unknown) => void;
  fail: (err: unknown) => void;
}

/** fetch whose responses the test releases by hand, in any order. */
export function manualFetch(): { fetch: FetchLike; pending: PendingCall[] } {
  const pending: PendingCall[] = [];
  const impl: FetchLike = (url, init) =>
    new Promise<Response>((resolve, reject) => {
      pending.push({
        url,
        method: init?.method ?? "GET",
        body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
        respond: (status, body) => resolve(jsonResponse(status, body)),
        fail: reject,
      });
    });
  return { fetch: impl, pending };
}

export function deferred<T>(): {
  promise: Promise<T>;
  resolve: (v: T) => void;
  reject: (e: unknown) => void;
} {
  let resolve!: (v: T) => void;
  let reject!: (e: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}
