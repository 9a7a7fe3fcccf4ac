import { afterEach, describe, expect, it, vi } from "vitest";

import { HttpApiClient, resolveBaseUrl } from "../src/api.js";
import { ApiError } from "../src/types.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("HttpApiClient", () => {
  it("posts /ask with the question body", async () => {
    const fetchMock = vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse({ status: "refused" }),
    );
    await new HttpApiClient("http://api.example:8080/").ask("hello");
    expect(fetchMock).toHaveBeenCalledWith(
      "http://api.example:8080/ask",
      expect.objectContaining({ method: "POST", body: JSON.stringify({ question: "hello" }) }),
    );
  });

  it("turns 400 risk replies into ApiError with field errors", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse(
        { error: "invalid risk profile", errors: [{ field: "weight", message: "too low" }] },
        400,
      ),
    );
    const client = new HttpApiClient("http://api.example");
    await expect(
      client.risk({
        age_years: 45, sex: "male", gestational_history: false, family_history: false,
        high_blood_pressure: false, physically_active: true,
        height: { cm: 170 }, weight: { kg: 10 },
      }),
    ).rejects.toSatisfy((error: unknown) => {
      expect(error).toBeInstanceOf(ApiError);
      const apiError = error as ApiError;
      expect(apiError.status).toBe(400);
      expect(apiError.fieldErrors).toEqual([{ field: "weight", message: "too low" }]);
      return true;
    });
  });

  it("gets /sections and /health", async () => {
    const fetchMock = vi
      .spyOn(globalThis, "fetch")
      .mockImplementation(() => Promise.resolve(jsonResponse({})));
    const client = new HttpApiClient("http://api.example");
    await client.sections();
    await client.health();
    expect(fetchMock).toHaveBeenNthCalledWith(1, "http://api.example/sections", undefined);
    expect(fetchMock).toHaveBeenNthCalledWith(2, "http://api.example/health", undefined);
  });
});

describe("resolveBaseUrl", () => {
  function fakeWindow(search: string, injected?: string): Window {
    return {
      location: { search, protocol: "http:", hostname: "ui.example" },
      ...(injected ? { API_BASE: injected } : {}),
    } as unknown as Window;
  }

  it("prefers the ?api= query parameter", () => {
    expect(resolveBaseUrl(fakeWindow("?api=http://override:9"))).toBe("http://override:9");
  });

  it("falls back to the injected global, then same-host :8080", () => {
    expect(resolveBaseUrl(fakeWindow("", "http://injected:7"))).toBe("http://injected:7");
    expect(resolveBaseUrl(fakeWindow(""))).toBe("http://ui.example:8080");
  });
});
