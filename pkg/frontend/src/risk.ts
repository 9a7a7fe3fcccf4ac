/**
 * Risk tab: seven-item questionnaire with metric/imperial toggle and the
 * four-part result (headline, interpretation, recommendations, breakdown).
 * All result text is server-provided; client-side checks only gate submission.
 */

import { ApiClient } from "./api.js";
import { el, list } from "./dom.js";
import { ApiError, RiskProfileWire, RiskResult } from "./types.js";

export type Units = "metric" | "imperial";

export interface RiskFormState {
  age: string;
  sex: "" | "male" | "female";
  gestational: boolean;
  family: boolean;
  bloodPressure: boolean;
  active: boolean;
  units: Units;
  heightCm: string;
  feet: string;
  inches: string;
  weightKg: string;
  pounds: string;
}

export function emptyForm(): RiskFormState {
  return {
    age: "",
    sex: "",
    gestational: false,
    family: false,
    bloodPressure: false,
    active: true,
    units: "metric",
    heightCm: "",
    feet: "",
    inches: "",
    weightKg: "",
    pounds: "",
  };
}

const CM_PER_INCH = 2.54;
const KG_PER_POUND = 0.45359237;

function asNumber(raw: string): number | null {
  if (!raw.trim()) return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}

export interface FieldValidity {
  age: boolean;
  sex: boolean;
  height: boolean;
  weight: boolean;
}

/** Client-side validity; the server remains the authority on ranges. */
export function validateForm(state: RiskFormState): FieldValidity {
  const age = asNumber(state.age);
  const height =
    state.units === "metric"
      ? asNumber(state.heightCm)
      : asNumber(state.feet) !== null
        ? (asNumber(state.feet) ?? 0) * 12 + (asNumber(state.inches) ?? 0)
        : null;
  const weight = state.units === "metric" ? asNumber(state.weightKg) : asNumber(state.pounds);
  return {
    age: age !== null && Number.isInteger(age) && age >= 18 && age <= 120,
    sex: state.sex === "male" || state.sex === "female",
    height: height !== null && height > 0,
    weight: weight !== null && weight > 0,
  };
}

export function formIsValid(state: RiskFormState): boolean {
  const fields = validateForm(state);
  return fields.age && fields.sex && fields.height && fields.weight;
}

/** Convert filled values across unit systems so toggling loses nothing. */
export function toggleUnits(state: RiskFormState): RiskFormState {
  const next = { ...state };
  if (state.units === "metric") {
    next.units = "imperial";
    const cm = asNumber(state.heightCm);
    if (cm !== null) {
      const totalInches = cm / CM_PER_INCH;
      next.feet = String(Math.floor(totalInches / 12));
      next.inches = String(Math.round((totalInches % 12) * 10) / 10);
    }
    const kg = asNumber(state.weightKg);
    if (kg !== null) next.pounds = String(Math.round((kg / KG_PER_POUND) * 10) / 10);
  } else {
    next.units = "metric";
    const feet = asNumber(state.feet);
    if (feet !== null) {
      const cm = (feet * 12 + (asNumber(state.inches) ?? 0)) * CM_PER_INCH;
      next.heightCm = String(Math.round(cm * 10) / 10);
    }
    const pounds = asNumber(state.pounds);
    if (pounds !== null) next.weightKg = String(Math.round(pounds * KG_PER_POUND * 10) / 10);
  }
  return next;
}

export function profileFromState(state: RiskFormState): RiskProfileWire {
  return {
    age_years: Number(state.age),
    sex: state.sex as "male" | "female",
    gestational_history: state.gestational,
    family_history: state.family,
    high_blood_pressure: state.bloodPressure,
    physically_active: state.active,
    height:
      state.units === "metric"
        ? { cm: Number(state.heightCm) }
        : { feet: Number(state.feet), inches: Number(state.inches || "0") },
    weight: state.units === "metric" ? { kg: Number(state.weightKg) } : { lb: Number(state.pounds) },
  };
}

/** Four-part result: headline, interpretation, recommendations, breakdown. */
export function renderRiskResult(result: RiskResult): HTMLElement {
  const root = el("section", { className: "risk-result" });
  root.appendChild(el("p", { className: "risk-headline", text: result.display }));
  root.appendChild(el("p", { className: "risk-interpretation", text: result.interpretation }));
  root.appendChild(el("h3", { text: "Recommendations" }));
  root.appendChild(list(result.recommendations, "risk-recommendations"));
  root.appendChild(el("h3", { text: "Score breakdown" }));
  const table = el("table", { className: "risk-breakdown" });
  for (const item of result.breakdown) {
    const row = el("tr", {}, [
      el("td", { className: "item-name", text: item.item_name }),
      el("td", { className: "input-echo", text: item.input_echo }),
      el("td", { className: "points", text: `+${item.points}` }),
    ]);
    table.appendChild(row);
  }
  root.appendChild(table);
  return root;
}

export class RiskView {
  readonly root: HTMLElement;
  state: RiskFormState = emptyForm();
  private readonly form: HTMLElement;
  private readonly resultHost: HTMLElement;

  constructor(private readonly client: ApiClient) {
    this.root = el("section", { className: "risk-view" });
    this.form = el("form", { className: "risk-form" });
    this.resultHost = el("div", { className: "risk-result-host" });
    this.root.appendChild(this.form);
    this.root.appendChild(this.resultHost);
    this.renderForm();
  }

  private field(name: string, label: string, input: HTMLElement): HTMLElement {
    const wrap = el("div", { className: `field field-${name}` });
    const caption = el("label", { text: label });
    caption.appendChild(input);
    wrap.appendChild(caption);
    wrap.appendChild(el("span", { className: "field-error", text: "" }));
    return wrap;
  }

  private textInput(name: keyof RiskFormState, className: string): HTMLInputElement {
    const input = document.createElement("input");
    input.type = "text";
    input.className = className;
    input.value = String(this.state[name] ?? "");
    input.addEventListener("input", () => {
      (this.state as unknown as Record<string, string>)[name] = input.value;
      this.refreshValidity();
    });
    return input;
  }

  private checkbox(name: keyof RiskFormState, className: string): HTMLInputElement {
    const input = document.createElement("input");
    input.type = "checkbox";
    input.className = className;
    input.checked = Boolean(this.state[name]);
    input.addEventListener("change", () => {
      (this.state as unknown as Record<string, boolean>)[name] = input.checked;
    });
    return input;
  }

  renderForm(): void {
    this.form.textContent = "";

    this.form.appendChild(this.field("age", "Age (years)", this.textInput("age", "input-age")));

    const sex = document.createElement("select");
    sex.className = "input-sex";
    for (const [value, label] of [["", "Choose…"], ["male", "Male"], ["female", "Female"]]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      sex.appendChild(option);
    }
    sex.value = this.state.sex;
    sex.addEventListener("change", () => {
      this.state.sex = sex.value as RiskFormState["sex"];
      this.refreshValidity();
    });
    this.form.appendChild(this.field("sex", "Biological sex", sex));

    this.form.appendChild(
      this.field("gestational", "History of gestational diabetes", this.checkbox("gestational", "input-gestational")),
    );
    this.form.appendChild(
      this.field("family", "Family history of diabetes", this.checkbox("family", "input-family")),
    );
    this.form.appendChild(
      this.field("blood-pressure", "High blood pressure", this.checkbox("bloodPressure", "input-blood-pressure")),
    );
    this.form.appendChild(
      this.field("active", "Physically active", this.checkbox("active", "input-active")),
    );

    const toggle = el("button", {
      className: "unit-toggle",
      text: this.state.units === "metric" ? "Switch to ft/lb" : "Switch to cm/kg",
      type: "button",
    });
    toggle.addEventListener("click", () => {
      this.state = toggleUnits(this.state);
      this.renderForm();
    });
    this.form.appendChild(toggle);

    if (this.state.units === "metric") {
      this.form.appendChild(this.field("height", "Height (cm)", this.textInput("heightCm", "input-height-cm")));
      this.form.appendChild(this.field("weight", "Weight (kg)", this.textInput("weightKg", "input-weight-kg")));
    } else {
      const height = el("span", {}, []);
      height.appendChild(this.textInput("feet", "input-feet"));
      height.appendChild(this.textInput("inches", "input-inches"));
      this.form.appendChild(this.field("height", "Height (ft, in)", height));
      this.form.appendChild(this.field("weight", "Weight (lb)", this.textInput("pounds", "input-pounds")));
    }

    const submit = el("button", { className: "risk-submit", text: "Calculate score", type: "button" });
    submit.addEventListener("click", () => void this.submit());
    this.form.appendChild(submit);
    this.refreshValidity();
  }

  refreshValidity(): void {
    const fields = validateForm(this.state);
    const submit = this.form.querySelector<HTMLButtonElement>(".risk-submit");
    if (submit) submit.disabled = !formIsValid(this.state);
    for (const [name, ok] of Object.entries(fields)) {
      this.form.querySelector(`.field-${name}`)?.classList.toggle("invalid", !ok);
    }
  }

  private clearFieldErrors(): void {
    for (const span of this.form.querySelectorAll(".field-error")) span.textContent = "";
  }

  async submit(): Promise<void> {
    if (!formIsValid(this.state)) return;
    this.clearFieldErrors();
    this.resultHost.textContent = "";
    try {
      const result = await this.client.risk(profileFromState(this.state));
      this.resultHost.appendChild(renderRiskResult(result));
    } catch (error) {
      if (error instanceof ApiError && error.fieldErrors.length) {
        for (const fieldError of error.fieldErrors) {
          const slot = this.form.querySelector(`.field-${fieldError.field} .field-error`);
          if (slot) slot.textContent = fieldError.message;
        }
        return;
      }
      const message = error instanceof Error ? error.message : "request failed";
      const row = el("div", { className: "error" });
      row.appendChild(el("span", { className: "error-message", text: `Request failed: ${message}` }));
      const retry = el("button", { className: "retry", text: "Retry", type: "button" });
      retry.addEventListener("click", () => {
        row.remove();
        void this.submit();
      });
      row.appendChild(retry);
      this.resultHost.appendChild(row);
    }
  }
}
