/**
 * Chat tab: question box, turn list, and the two-part answer rendering.
 *
 * Every visible clinical string comes from the server response; this module
 * contributes only UI chrome (labels, buttons). At most one /ask is in
 * flight; further questions queue in submission order.
 */

import { ApiClient } from "./api.js";
import { el, list } from "./dom.js";
import { AskResponse } from "./types.js";

export interface ChatTurn {
  question: string;
  response: AskResponse;
  expanded: boolean;
}

/** Render one answered/refused turn; related-question clicks call onRelated. */
export function renderAnswer(turn: ChatTurn, onRelated: (question: string) => void): HTMLElement {
  const root = el("article", { className: "turn" });
  root.appendChild(el("p", { className: "question-echo", text: turn.question }));

  if (turn.response.status === "refused") {
    // Verbatim server refusal, distinct style, deliberately no evidence panel.
    root.appendChild(el("p", { className: "answer-band refusal", text: turn.response.concise_answer }));
    return root;
  }

  root.appendChild(el("p", { className: "answer-band answered", text: turn.response.concise_answer }));

  const evidence = turn.response.supporting_evidence;
  const panel = el("section", { className: "evidence-panel" });
  panel.hidden = !turn.expanded;

  const toggle = el("button", {
    className: "evidence-toggle",
    text: turn.expanded ? "Hide supporting evidence" : "Show supporting evidence",
    type: "button",
  });
  toggle.addEventListener("click", () => {
    turn.expanded = !turn.expanded;
    panel.hidden = !turn.expanded;
    toggle.textContent = turn.expanded ? "Hide supporting evidence" : "Show supporting evidence";
  });

  const citations = el("div", { className: "citations" });
  for (const citation of evidence.citations) {
    citations.appendChild(el("span", { className: "citation-chip", text: citation.display }));
  }
  panel.appendChild(el("h3", { text: "Citations" }));
  panel.appendChild(citations);

  panel.appendChild(el("h3", { text: "Clinical recommendations" }));
  panel.appendChild(list(evidence.clinical_recommendations, "clinical-recommendations"));

  panel.appendChild(el("h3", { text: "Evidence details" }));
  panel.appendChild(list(evidence.evidence_details, "evidence-details"));

  panel.appendChild(el("h3", { text: "Related questions" }));
  const related = el("div", { className: "related-questions" });
  for (const question of evidence.related_questions) {
    const button = el("button", { className: "related-question", text: question, type: "button" });
    button.addEventListener("click", () => onRelated(question));
    related.appendChild(button);
  }
  panel.appendChild(related);

  panel.appendChild(el("h3", { text: "Validation report" }));
  const report = el("ul", { className: "validation-report" });
  for (const entry of evidence.validation) {
    report.appendChild(
      el("li", {}, [
        el("span", { className: "validation-claim", text: entry.claim_text }),
        el("span", {
          className: "validation-support",
          text: ` — supported by ${entry.supporting_unit_ids.join(", ")}`,
        }),
      ]),
    );
  }
  panel.appendChild(report);

  const routeNote = el("p", {
    className: "route-note",
    text: `Routed to section ${turn.response.route.section_id} (${turn.response.route.section_title}) via ${turn.response.route.backend} backend`,
  });
  panel.appendChild(routeNote);

  root.appendChild(toggle);
  root.appendChild(panel);
  return root;
}

export class ChatView {
  readonly root: HTMLElement;
  private readonly turns: HTMLElement;
  private readonly input: HTMLTextAreaElement;
  private readonly send: HTMLButtonElement;
  private busy = false;
  private readonly queue: string[] = [];

  constructor(private readonly client: ApiClient) {
    this.root = el("section", { className: "chat-view" });
    this.turns = el("div", { className: "turns" });
    this.input = document.createElement("textarea");
    this.input.className = "question-input";
    this.input.placeholder = "Describe the patient scenario or ask a guideline question";
    this.send = el("button", { className: "send", text: "Ask", type: "button" });
    this.send.addEventListener("click", () => this.submit(this.input.value));

    const controls = el("div", { className: "chat-controls" });
    controls.appendChild(this.input);
    controls.appendChild(this.send);
    this.root.appendChild(this.turns);
    this.root.appendChild(controls);
  }

  /** Queue the question; only one request is in flight at a time. */
  submit(question: string): void {
    const trimmed = question.trim();
    if (!trimmed) return;
    this.queue.push(trimmed);
    this.input.value = "";
    void this.drain();
  }

  private async drain(): Promise<void> {
    if (this.busy) return;
    const question = this.queue.shift();
    if (question === undefined) return;
    this.busy = true;
    try {
      const response = await this.client.ask(question);
      const turn: ChatTurn = { question, response, expanded: false };
      this.turns.appendChild(renderAnswer(turn, (next) => this.submit(next)));
    } catch (error) {
      this.turns.appendChild(this.renderError(question, error));
    } finally {
      this.busy = false;
      void this.drain();
    }
  }

  /** Inline failure row with a retry affordance; never a blank pane. */
  private renderError(question: string, error: unknown): HTMLElement {
    const row = el("div", { className: "error" });
    const message = error instanceof Error ? error.message : "request failed";
    row.appendChild(el("span", { className: "error-message", text: `Request failed: ${message}` }));
    const retry = el("button", { className: "retry", text: "Retry", type: "button" });
    retry.addEventListener("click", () => {
      row.remove();
      this.submit(question);
    });
    row.appendChild(retry);
    return row;
  }
}
