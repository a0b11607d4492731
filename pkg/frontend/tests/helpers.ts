import { ApiClient, FetchLike, RecommendationCase } from "../src/api.js";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/** fetch stub driven by a route table; records every call it serves. */
export function makeFetch(
  routes: Record<string, (call: RecordedCall) => Response | Promise<Response>>,
): { fetchFn: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const call: RecordedCall = {
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : null,
    };
    calls.push(call);
    const key = `${call.method} ${url}`;
    const handler = routes[key];
    if (!handler) {
      throw new Error(`unrouted request: ${key}`);
    }
    return handler(call);
  };
  return { fetchFn, calls };
}

export function makeCase(id: string, overrides: Partial<RecommendationCase> = {}): RecommendationCase {
  return {
    id,
    patient_id: `patient-of-${id}`,
    candidates: [
      { activity_id: "jog", provenance: "HIGH_ADH", support_count: 4 },
      { activity_id: "walk_brisk", provenance: "KNN", support_count: 2 },
    ],
    status: "PENDING",
    created_at: 1,
    cold_start: false,
    ...overrides,
  };
}

export function client(fetchFn: FetchLike): ApiClient {
  return new ApiClient("", fetchFn);
}
