/**
 * Canned backend replies for development and contract tests.
 *
 * This module plays the SERVER: the text below is a capture of what the
 * backend returns for its packaged fixture knowledge base. UI modules must
 * never hardcode clinical text themselves — the literal-scan test enforces
 * that by scanning every source file outside this directory.
 */

import { AskResponse, RiskResult, SectionsResponse } from "../types.js";

export const ANSWERED: AskResponse = {
  status: "answered",
  concise_answer:
    "FPG 100–125 mg/dL defines impaired fasting glucose (IFG), indicating prediabetes. " +
    "Confirm against the IFG (fasting plasma glucose) criterion of FPG 100–125 mg/dL.",
  supporting_evidence: {
    citations: [
      { display: "Rec 2.1a (A)", unit_id: "Rec 2.1a", row_index: null },
      { display: "Table 2.2, row 1", unit_id: "Table 2.2", row_index: 1 },
      { display: "Table 2.2, row 2", unit_id: "Table 2.2", row_index: 2 },
      { display: "Table 2.2, row 3", unit_id: "Table 2.2", row_index: 3 },
      { display: "Narr 2-01", unit_id: "Narr 2-01", row_index: null },
    ],
    clinical_recommendations: [
      "FPG 100–125 mg/dL defines impaired fasting glucose (IFG), indicating prediabetes. " +
        "Confirm the finding with a repeat measure or an additional test such as A1C or a 2-hour OGTT.",
    ],
    evidence_details: [
      "IFG (fasting plasma glucose): FPG 100–125 mg/dL",
      "A1C: A1C 5.7–6.4%",
      "2-hour plasma glucose during OGTT: 2-h PG 140–199 mg/dL",
    ],
    related_questions: ["What does the guideline say about risk factors for prediabetes?"],
    validation: [
      {
        claim_text:
          "FPG 100–125 mg/dL defines impaired fasting glucose (IFG), indicating prediabetes.",
        supporting_unit_ids: ["Rec 2.1a", "Table 2.2", "Narr 2-01"],
        matched_tokens: ["100-125 mg/dL"],
      },
    ],
  },
  route: { section_id: "2", section_title: "Diagnosis and Classification of Diabetes", backend: "keyword" },
  timing_ms: 1,
};

export const REFUSED: AskResponse = {
  status: "refused",
  concise_answer: "Insufficient guideline evidence for this question",
  supporting_evidence: {
    citations: [],
    clinical_recommendations: [],
    evidence_details: [],
    related_questions: [],
    validation: [],
  },
  route: { section_id: "99", section_title: "Archived Appendix", backend: "keyword" },
  timing_ms: 0,
};

export const RISK_SEVEN: RiskResult = {
  total_score: 7,
  category_label: "Increased Risk",
  display: "Score: 7 (Increased Risk)",
  interpretation:
    "The cumulative score indicates an increased risk of prediabetes or type 2 diabetes; " +
    "modifiable factors are the first target.",
  recommendations: [
    "Counsel on lifestyle modification: increased physical activity and weight reduction.",
    "Agree on a screening timeline with the patient and arrange glucose-based testing.",
  ],
  breakdown: [
    { item_name: "age", input_echo: "45 years", points: 1 },
    { item_name: "sex", input_echo: "male", points: 1 },
    { item_name: "gestational_history", input_echo: "no", points: 0 },
    { item_name: "family_history", input_echo: "yes", points: 1 },
    { item_name: "high_blood_pressure", input_echo: "yes", points: 1 },
    { item_name: "physical_activity", input_echo: "not active", points: 1 },
    { item_name: "bmi", input_echo: "30.4 kg/m²", points: 2 },
  ],
};

export const SECTIONS: SectionsResponse = {
  default_section_id: "2",
  sections: [
    {
      section_id: "2",
      title: "Diagnosis and Classification of Diabetes",
      subsections: [{ id: "2.1", title: "Screening and Diagnostic Tests" }],
      keywords: ["fasting glucose", "fpg", "a1c", "diagnosis", "prediabetes"],
    },
    {
      section_id: "99",
      title: "Archived Appendix",
      subsections: [],
      keywords: ["archived appendix"],
    },
  ],
};
