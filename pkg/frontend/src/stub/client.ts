/** In-memory ApiClient for demo mode and contract tests. */

import { ApiClient } from "../api.js";
import {
  ApiError,
  AskResponse,
  HealthResponse,
  RiskProfileWire,
  RiskResult,
  SectionsResponse,
} from "../types.js";
import { ANSWERED, REFUSED, RISK_SEVEN, SECTIONS } from "./fixtures.js";

export class StubApiClient implements ApiClient {
  askCalls: string[] = [];
  riskCalls: RiskProfileWire[] = [];

  async ask(question: string): Promise<AskResponse> {
    this.askCalls.push(question);
    if (question.toLowerCase().includes("archived appendix")) return structuredClone(REFUSED);
    return structuredClone(ANSWERED);
  }

  async risk(profile: RiskProfileWire): Promise<RiskResult> {
    this.riskCalls.push(profile);
    const weight = profile.weight as { kg?: number; lb?: number };
    if ((weight.kg !== undefined && weight.kg < 30) || (weight.lb !== undefined && weight.lb < 66)) {
      throw new ApiError(400, "invalid risk profile", [
        { field: "weight", message: "weight: must be within 30-350 kg" },
      ]);
    }
    return structuredClone(RISK_SEVEN);
  }

  async sections(): Promise<SectionsResponse> {
    return structuredClone(SECTIONS);
  }

  async health(): Promise<HealthResponse> {
    return { status: "ok", kb_loaded: true, unit_count: 6 };
  }
}
