/** Meal-session view model. Pure state transitions driven by service
 * responses: the client never computes predictions, only displays what
 * the service returned. The upcoming prediction is shown for the next
 * position only; past positions show the predictions the service
 * recorded before each choice was made. */

import type { ChoiceReply, HistoryEntry, SessionState } from "./api.js";

export interface SessionApi {
  createSession(scenarioId: string): Promise<SessionState>;
  getSession(id: string): Promise<SessionState>;
  postChoice(id: string, item: string): Promise<ChoiceReply>;
}

export interface ItemButton {
  item: string;
  remaining: number;
  disabled: boolean;
}

export interface SessionSummary {
  accuracy: number;
  totalBites: number;
  matches: number;
}

export class SessionViewModel {
  state: SessionState | null = null;
  busy = false;

  constructor(private readonly api: SessionApi) {}

  get started(): boolean {
    return this.state !== null;
  }

  get complete(): boolean {
    return this.state?.status === "Complete";
  }

  /** Prediction for the upcoming position; null once the meal is done. */
  get predictionNext(): string | null {
    return this.state?.prediction_next ?? null;
  }

  get accuracy(): number {
    return this.state?.accuracy_so_far ?? 0;
  }

  get history(): HistoryEntry[] {
    return this.state?.history ?? [];
  }

  get mealLength(): number {
    if (!this.state) return 0;
    return this.state.items.length * this.state.bites_per_item;
  }

  itemButtons(): ItemButton[] {
    if (!this.state) return [];
    return this.state.items.map((item) => {
      const remaining = this.state!.remaining[item] ?? 0;
      return { item, remaining, disabled: remaining < 1 || this.complete || this.busy };
    });
  }

  async start(scenarioId: string): Promise<void> {
    this.state = await this.api.createSession(scenarioId);
  }

  async refresh(): Promise<void> {
    if (!this.state) return;
    this.state = await this.api.getSession(this.state.session_id);
  }

  /** Record one bite; mutations are sequential awaited requests. */
  async choose(item: string): Promise<void> {
    if (!this.state || this.busy) return;
    if ((this.state.remaining[item] ?? 0) < 1) return;
    this.busy = true;
    try {
      await this.api.postChoice(this.state.session_id, item);
      // the session document is the single source of truth
      this.state = await this.api.getSession(this.state.session_id);
    } finally {
      this.busy = false;
    }
  }

  summary(): SessionSummary | null {
    if (!this.state || !this.complete) return null;
    const matches = this.state.history.filter((h) => h.prediction === h.choice).length;
    return {
      accuracy: this.state.accuracy_so_far,
      totalBites: this.state.history.length,
      matches,
    };
  }
}
