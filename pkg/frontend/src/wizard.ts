import { ApiClient, ApiError } from "./api";
import { WorkingCopy, buildSubmission } from "./edits";
import { renderGate } from "./gates";
import { pollJob } from "./poll";
import { Store, type UiState, initialUiState } from "./store";
import type { GateResponse, LogEvent, ProposalVersion } from "./types";

export interface WizardOptions {
  confirm?: (message: string) => boolean;
  pollIntervalMs?: number;
}

/** One-screen-per-gate wizard. All durable state is server-side: every
 * render starts from a fresh fetch, so a reload lands on the exact pending
 * gate. Submission is disabled while an agent job is in flight, and a stale
 * gate id from the server triggers an auto-refresh with a visible message. */
export class GateWizard {
  readonly store = new Store<UiState>({ ...initialUiState });
  private copy: WorkingCopy | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private options: WizardOptions = {},
  ) {}

  private confirmFn(): (message: string) => boolean {
    return this.options.confirm ?? ((message) => window.confirm(message));
  }

  async createSession(sessionId?: string): Promise<string> {
    const created = await this.api.createSession(sessionId);
    this.store.set({ sessionId: created.session_id, state: created.state, message: null });
    this.renderProposalForm();
    return created.session_id;
  }

  async resume(sessionId: string): Promise<void> {
    this.store.set({ sessionId, message: null });
    await this.refresh();
  }

  async submitProposal(title: string, abstract: string, kPapers?: number): Promise<void> {
    const { sessionId } = this.store.get();
    if (!sessionId) throw new Error("no session");
    await this.runJob(() => this.api.submitProposal(sessionId, title, abstract, kPapers));
  }

  async startMethodSynthesis(): Promise<void> {
    const { sessionId } = this.store.get();
    if (!sessionId) throw new Error("no session");
    await this.runJob(() => this.api.startMethodSynthesis(sessionId));
  }

  /** Submit the current gate's visible state. */
  async submitGate(): Promise<void> {
    const { sessionId } = this.store.get();
    if (!sessionId || !this.copy) throw new Error("no gate to submit");
    const copy = this.copy;
    try {
      await this.runJob(() =>
        this.api.submitGateEdits(sessionId, copy.envelope.gate_id, buildSubmission(copy)),
      );
    } catch (error) {
      if (error instanceof ApiError && error.isStaleGate) {
        this.store.set({
          message: `This gate is no longer pending (${error.detail}); reloaded the current one.`,
        });
        await this.refresh();
        return;
      }
      throw error;
    }
  }

  private async runJob(submit: () => Promise<{ job_id: string }>): Promise<void> {
    this.store.set({ busy: true });
    this.renderBusy();
    try {
      const { job_id } = await submit();
      await pollJob(this.api, job_id, this.options.pollIntervalMs ?? 400);
    } finally {
      this.store.set({ busy: false });
    }
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const { sessionId } = this.store.get();
    if (!sessionId) return;
    const gate: GateResponse = await this.api.getGate(sessionId);
    this.store.set({ state: gate.state });
    if (gate.pending_gate) {
      this.copy = new WorkingCopy(gate.pending_gate);
      this.renderPendingGate();
    } else {
      this.copy = null;
      await this.renderTerminal(gate);
    }
  }

  // ------------------------------------------------------------------
  // rendering
  // ------------------------------------------------------------------

  private clear(): HTMLElement {
    this.root.innerHTML = "";
    const shell = document.createElement("div");
    shell.className = "wizard";
    const { sessionId, state, message } = this.store.get();
    const head = document.createElement("header");
    head.innerHTML = "";
    const title = document.createElement("h1");
    title.textContent = "ideagate";
    head.appendChild(title);
    const status = document.createElement("div");
    status.className = "status";
    status.textContent = sessionId ? `${sessionId} · ${state ?? "new"}` : "no session";
    head.appendChild(status);
    shell.appendChild(head);
    if (message) {
      const note = document.createElement("p");
      note.className = "message";
      note.setAttribute("data-role", "message");
      note.textContent = message;
      shell.appendChild(note);
    }
    this.root.appendChild(shell);
    return shell;
  }

  private renderProposalForm(): void {
    const shell = this.clear();
    const form = document.createElement("div");
    form.className = "proposal-form";
    const title = document.createElement("input");
    title.placeholder = "proposal title";
    title.setAttribute("data-role", "title");
    const abstract = document.createElement("textarea");
    abstract.placeholder = "proposal abstract: motivation plus a high-level problem description";
    abstract.setAttribute("data-role", "abstract");
    const submit = document.createElement("button");
    submit.textContent = "Validate motivation";
    submit.setAttribute("data-role", "submit-proposal");
    submit.addEventListener("click", () => {
      void this.submitProposal(title.value, abstract.value);
    });
    for (const node of [title, abstract, submit]) form.appendChild(node);
    shell.appendChild(form);
  }

  private renderBusy(): void {
    const shell = this.clear();
    const busy = document.createElement("p");
    busy.className = "busy";
    busy.setAttribute("data-role", "busy");
    busy.textContent = "Agents are working; the next gate opens when they finish.";
    shell.appendChild(busy);
  }

  private renderPendingGate(): void {
    const shell = this.clear();
    if (!this.copy) return;
    const handlers = {
      confirm: this.confirmFn(),
      onChange: () => this.renderPendingGate(),
    };
    shell.appendChild(renderGate(this.copy, handlers));
    const submit = document.createElement("button");
    submit.className = "btn-submit";
    submit.setAttribute("data-role", "submit-gate");
    submit.textContent = "Submit and continue";
    submit.disabled = this.store.get().busy;
    submit.addEventListener("click", () => {
      void this.submitGate();
    });
    shell.appendChild(submit);
    shell.appendChild(this.debugToggle());
  }

  private async renderTerminal(gate: GateResponse): Promise<void> {
    const { sessionId } = this.store.get();
    const shell = this.clear();
    const state = gate.state;
    if (state === "MV-Validated") {
      const notice = document.createElement("h2");
      notice.setAttribute("data-role", "terminal");
      notice.textContent = String(gate.flags["validation_notice"] ?? "motivation validated");
      shell.appendChild(notice);
      const next = document.createElement("button");
      next.setAttribute("data-role", "start-method-synthesis");
      next.textContent = "Synthesize methods for this proposal";
      next.addEventListener("click", () => {
        void this.startMethodSynthesis();
      });
      shell.appendChild(next);
    } else if (state === "Done") {
      const notice = document.createElement("h2");
      notice.setAttribute("data-role", "terminal");
      notice.textContent = "Session complete";
      shell.appendChild(notice);
      if (sessionId) {
        const artifacts = await this.api.getArtifacts(sessionId);
        const proposals = artifacts["proposals"] as ProposalVersion[];
        const final = proposals[proposals.length - 1];
        const box = document.createElement("div");
        box.className = "final-proposal";
        box.setAttribute("data-role", "final-proposal");
        const t = document.createElement("h3");
        t.textContent = `${final.title} (v${final.version}, ${final.provenance})`;
        const a = document.createElement("p");
        a.textContent = final.abstract;
        box.appendChild(t);
        box.appendChild(a);
        shell.appendChild(box);
      }
    } else {
      const busy = document.createElement("p");
      busy.setAttribute("data-role", "busy");
      busy.textContent = `Working (${state}); refresh shortly.`;
      shell.appendChild(busy);
    }
    shell.appendChild(this.debugToggle());
  }

  /** No/Unanswerable verdicts stay out of gate payloads by design; the log
   * view exposes the full record on demand. */
  private debugToggle(): HTMLElement {
    const wrap = document.createElement("details");
    wrap.className = "debug";
    const summary = document.createElement("summary");
    summary.textContent = "session log (all verdicts, all events)";
    wrap.appendChild(summary);
    wrap.addEventListener("toggle", () => {
      if (!(wrap as HTMLDetailsElement).open) return;
      void this.fillDebug(wrap);
    });
    return wrap;
  }

  private async fillDebug(wrap: HTMLElement): Promise<void> {
    const { sessionId } = this.store.get();
    if (!sessionId) return;
    const events: LogEvent[] = await this.api.getEvents(sessionId);
    const pre = document.createElement("pre");
    pre.setAttribute("data-role", "debug-log");
    pre.textContent = events
      .map((e) => `${e.event_id} ${e.actor} ${e.kind} ${JSON.stringify(e.payload).slice(0, 160)}`)
      .join("\n");
    const old = wrap.querySelector("pre");
    if (old) old.remove();
    wrap.appendChild(pre);
  }
}
