/** Typed client for the /v1 JSON API. All model math stays server-side;
 * this module only moves documents and session state. */

export interface DocMeta {
  id: string;
  version: number;
}

export interface Diagnostic {
  rule: string;
  node_id: string;
  message: string;
}

export interface HistoryEntry {
  position: number;
  prediction: string;
  choice: string;
}

export interface SessionState {
  session_id: string;
  scenario_id: string;
  items: string[];
  bites_per_item: number;
  status: "Open" | "Complete";
  remaining: Record<string, number>;
  history: HistoryEntry[];
  prediction_next: string | null;
  accuracy_so_far: number;
}

export interface ChoiceReply {
  prediction_next: string | null;
  accuracy_so_far: number;
  status: "Open" | "Complete";
  remaining: Record<string, number>;
}

export interface WorkflowNodeDoc {
  id: string;
  name: string;
  level: string;
  pre?: string;
  post?: string;
  concurrent?: boolean;
  children?: WorkflowNodeDoc[];
  handler_ref?: string;
}

export interface WorkflowDoc {
  target: "human" | "robot";
  root: WorkflowNodeDoc;
}

export interface ScenarioDoc {
  scenario_id: string;
  blocks: unknown;
  workflows: Partial<Record<"human" | "robot", WorkflowDoc>>;
  config: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly diagnostics: Diagnostic[] = [],
  ) {
    super(message);
  }
}

export interface Versioned<T> {
  body: T;
  version: number;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let message = `${response.status}`;
  let diagnostics: Diagnostic[] = [];
  try {
    const body = (await response.json()) as { error?: string; diagnostics?: Diagnostic[] };
    if (body.error) message = body.error;
    if (body.diagnostics) diagnostics = body.diagnostics;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, message, diagnostics);
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async listDocuments(collection: string): Promise<DocMeta[]> {
    const r = await this.fetchImpl(this.url(`/v1/${collection}`));
    if (!r.ok) await fail(r);
    return (await r.json()) as DocMeta[];
  }

  async getDocument<T>(collection: string, id: string): Promise<Versioned<T>> {
    const r = await this.fetchImpl(this.url(`/v1/${collection}/${id}`));
    if (!r.ok) await fail(r);
    return { body: (await r.json()) as T, version: Number(r.headers.get("etag") ?? "0") };
  }

  /** Create (version omitted) or update (version given). Returns the new version. */
  async putDocument(
    collection: string,
    id: string,
    body: unknown,
    version?: number,
  ): Promise<number> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (version !== undefined) headers["if-match"] = String(version);
    const r = await this.fetchImpl(this.url(`/v1/${collection}/${id}`), {
      method: "PUT",
      headers,
      body: JSON.stringify(body),
    });
    if (!r.ok) await fail(r);
    return Number(r.headers.get("etag") ?? "0");
  }

  async createSession(scenarioId: string): Promise<SessionState> {
    const r = await this.fetchImpl(this.url(`/v1/sessions`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scenario_id: scenarioId }),
    });
    if (!r.ok) await fail(r);
    return (await r.json()) as SessionState;
  }

  async getSession(id: string): Promise<SessionState> {
    const r = await this.fetchImpl(this.url(`/v1/sessions/${id}`));
    if (!r.ok) await fail(r);
    return (await r.json()) as SessionState;
  }

  async postChoice(id: string, item: string): Promise<ChoiceReply> {
    const r = await this.fetchImpl(this.url(`/v1/sessions/${id}/choice`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ item }),
    });
    if (!r.ok) await fail(r);
    return (await r.json()) as ChoiceReply;
  }
}
