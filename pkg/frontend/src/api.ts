import {
  ApiError,
  AskResponse,
  HealthResponse,
  RiskProfileWire,
  RiskResult,
  SectionsResponse,
} from "./types.js";

/** The four backend endpoints the UI is allowed to talk to. */
export interface ApiClient {
  ask(question: string): Promise<AskResponse>;
  risk(profile: RiskProfileWire): Promise<RiskResult>;
  sections(): Promise<SectionsResponse>;
  health(): Promise<HealthResponse>;
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `HTTP ${resp.status}`;
  let fieldErrors = [];
  try {
    const body = await resp.json();
    if (typeof body.error === "string") message = body.error;
    if (Array.isArray(body.errors)) fieldErrors = body.errors;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, message, fieldErrors);
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl.replace(/\/$/, "") + path, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  ask(question: string): Promise<AskResponse> {
    return this.request("/ask", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ question }),
    });
  }

  risk(profile: RiskProfileWire): Promise<RiskResult> {
    return this.request("/risk", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(profile),
    });
  }

  sections(): Promise<SectionsResponse> {
    return this.request("/sections");
  }

  health(): Promise<HealthResponse> {
    return this.request("/health");
  }
}

/** Base URL: ?api= query param, then window.API_BASE, then same-origin :8080. */
export function resolveBaseUrl(win: Window): string {
  const param = new URLSearchParams(win.location.search).get("api");
  if (param) return param;
  const injected = (win as unknown as { API_BASE?: string }).API_BASE;
  if (injected) return injected;
  return `${win.location.protocol}//${win.location.hostname}:8080`;
}
