import type { GateResponse, GateSubmission, Job, LogEvent } from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isStaleGate(): boolean {
    return this.status === 409;
  }
}

/** Thin typed client over the service endpoints. The UI keeps no durable
 * state of its own: every view is rebuilt from these calls. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private token?: string,
  ) {}

  private headers(): Record<string, string> {
    const h: Record<string, string> = { "content-type": "application/json" };
    if (this.token) h["authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    if (!resp.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, String(detail));
    }
    return text ? (JSON.parse(text) as T) : (undefined as T);
  }

  health(): Promise<{ status: string; corpus_size: number }> {
    return this.request("GET", "/health");
  }

  createSession(sessionId?: string): Promise<{ session_id: string; state: string }> {
    return this.request("POST", "/sessions", sessionId ? { session_id: sessionId } : {});
  }

  submitProposal(
    sessionId: string,
    title: string,
    abstract: string,
    kPapers?: number,
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/sessions/${sessionId}/proposal`, {
      title,
      abstract,
      k_papers: kPapers ?? null,
    });
  }

  getGate(sessionId: string): Promise<GateResponse> {
    return this.request("GET", `/sessions/${sessionId}/gate`);
  }

  submitGateEdits(
    sessionId: string,
    gateId: string,
    submission: GateSubmission,
  ): Promise<{ job_id: string }> {
    return this.request("POST", `/sessions/${sessionId}/gate/${gateId}/edits`, submission);
  }

  startMethodSynthesis(sessionId: string): Promise<{ job_id: string }> {
    return this.request("POST", `/sessions/${sessionId}/method-synthesis`);
  }

  getJob(jobId: string): Promise<Job> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  getState(sessionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }

  getArtifacts(sessionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${sessionId}/artifacts`);
  }

  getEvents(sessionId: string): Promise<LogEvent[]> {
    return this.request("GET", `/sessions/${sessionId}/events`);
  }
}
