import { HttpApiClient, resolveBaseUrl } from "./api.js";
import { App } from "./app.js";
import { StubApiClient } from "./stub/client.js";

const params = new URLSearchParams(window.location.search);
const client = params.get("stub") !== null ? new StubApiClient() : new HttpApiClient(resolveBaseUrl(window));

const app = new App(client);
document.body.appendChild(app.root);
