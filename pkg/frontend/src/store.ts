/** Minimal observable store for transient UI state. Durable state lives
 * server-side only; a page reload rebuilds everything from the API. */
export class Store<T> {
  private listeners = new Set<(value: T) => void>();

  constructor(private value: T) {}

  get(): T {
    return this.value;
  }

  set(patch: Partial<T>): void {
    this.value = { ...this.value, ...patch };
    for (const listener of this.listeners) listener(this.value);
  }

  subscribe(listener: (value: T) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}

export interface UiState {
  sessionId: string | null;
  state: string | null;
  busy: boolean;
  message: string | null;
  debugLog: boolean;
}

export const initialUiState: UiState = {
  sessionId: null,
  state: null,
  busy: false,
  message: null,
  debugLog: false,
};
