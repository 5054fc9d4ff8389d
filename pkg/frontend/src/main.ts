import { ApiClient } from "./api";
import { GateWizard } from "./wizard";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? window.location.origin;
const token = params.get("token") ?? undefined;
const session = params.get("session");

const api = new ApiClient(base, token);
const root = document.getElementById("app");
if (!root) throw new Error("missing #app root");
const wizard = new GateWizard(root, api);

if (session) {
  void wizard.resume(session);
} else {
  void wizard.createSession();
}
