/** Wire types mirroring the backend API exactly (see docs/api.md). */

export interface Citation {
  display: string;
  unit_id: string;
  row_index: number | null;
}

export interface ValidationEntry {
  claim_text: string;
  supporting_unit_ids: string[];
  matched_tokens: string[];
}

export interface SupportingEvidence {
  citations: Citation[];
  clinical_recommendations: string[];
  evidence_details: string[];
  related_questions: string[];
  validation: ValidationEntry[];
}

export interface RouteInfo {
  section_id: string;
  section_title: string;
  backend: string;
}

export interface AskResponse {
  status: "answered" | "refused";
  concise_answer: string;
  supporting_evidence: SupportingEvidence;
  route: RouteInfo;
  timing_ms: number;
}

export type HeightWire = { cm: number } | { feet: number; inches: number };
export type WeightWire = { kg: number } | { lb: number };

export interface RiskProfileWire {
  age_years: number;
  sex: "male" | "female";
  gestational_history: boolean;
  family_history: boolean;
  high_blood_pressure: boolean;
  physically_active: boolean;
  height: HeightWire;
  weight: WeightWire;
}

export interface BreakdownItem {
  item_name: string;
  input_echo: string;
  points: number;
}

export interface RiskResult {
  total_score: number;
  category_label: string;
  display: string;
  interpretation: string;
  recommendations: string[];
  breakdown: BreakdownItem[];
}

export interface SectionInfo {
  section_id: string;
  title: string;
  subsections: { id: string; title: string }[];
  keywords: string[];
}

export interface SectionsResponse {
  default_section_id: string | null;
  sections: SectionInfo[];
}

export interface HealthResponse {
  status: "ok" | "degraded";
  kb_loaded: boolean;
  unit_count: number;
}

export interface FieldError {
  field: string;
  message: string;
}

/** Non-2xx reply; field errors populated for 400 validation failures. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly fieldErrors: FieldError[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}
