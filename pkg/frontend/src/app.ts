/** Two-tab single-page layout: Chat and Risk. */

import { ApiClient } from "./api.js";
import { ChatView } from "./chat.js";
import { el } from "./dom.js";
import { RiskView } from "./risk.js";

export class App {
  readonly root: HTMLElement;
  readonly chat: ChatView;
  readonly risk: RiskView;

  constructor(client: ApiClient) {
    this.chat = new ChatView(client);
    this.risk = new RiskView(client);

    const chatTab = el("button", { className: "tab tab-chat active", text: "Chat", type: "button" });
    const riskTab = el("button", { className: "tab tab-risk", text: "Risk assessment", type: "button" });
    const tabs = el("nav", { className: "tabs" }, [chatTab, riskTab]);

    this.risk.root.hidden = true;
    const activate = (which: "chat" | "risk") => {
      this.chat.root.hidden = which !== "chat";
      this.risk.root.hidden = which !== "risk";
      chatTab.classList.toggle("active", which === "chat");
      riskTab.classList.toggle("active", which === "risk");
    };
    chatTab.addEventListener("click", () => activate("chat"));
    riskTab.addEventListener("click", () => activate("risk"));

    this.root = el("main", { className: "app" }, [tabs, this.chat.root, this.risk.root]);
  }
}
