/** DOM wiring for the two screens: the scenario/workflow browser and the
 * live meal session. State lives in the service; this file renders it. */

import { ApiError, Client } from "./api.js";
import type { ScenarioDoc, WorkflowDoc } from "./api.js";
import { CollapseState, visibleRows } from "./tree.js";
import { SessionViewModel } from "./session.js";

const client = new Client("");
const sessionVm = new SessionViewModel(client);

const el = <T extends HTMLElement>(id: string): T => {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
};

let currentScenario: { id: string; version: number; doc: ScenarioDoc } | null = null;
let currentTarget: "human" | "robot" = "robot";
const collapse = new CollapseState();

function currentWorkflow(): WorkflowDoc | null {
  return currentScenario?.doc.workflows[currentTarget] ?? null;
}

function renderScenarioList(ids: { id: string; version: number }[]): void {
  const list = el<HTMLUListElement>("scenario-list");
  list.replaceChildren(
    ...ids.map(({ id, version }) => {
      const li = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = `${id} (v${version})`;
      button.addEventListener("click", () => void selectScenario(id));
      li.append(button);
      return li;
    }),
  );
}

function renderTree(): void {
  const container = el<HTMLDivElement>("workflow-tree");
  const wf = currentWorkflow();
  if (!wf) {
    container.textContent = "no workflow for this target";
    return;
  }
  container.replaceChildren(
    ...visibleRows(wf.root, collapse).map((row) => {
      const line = document.createElement("div");
      line.className = "tree-row";
      line.style.paddingLeft = `${row.depth * 18}px`;

      const toggle = document.createElement("button");
      toggle.className = "toggle";
      toggle.textContent = row.hasChildren ? (row.collapsed ? "+" : "-") : "·";
      toggle.disabled = !row.hasChildren;
      toggle.addEventListener("click", () => {
        collapse.toggle(row.path);
        renderTree();
      });

      const badge = document.createElement("span");
      badge.className = `badge level-${row.level}`;
      badge.textContent = row.level;

      const name = document.createElement("span");
      name.className = "node-name";
      name.textContent = row.name + (row.concurrent ? " ∥" : "");

      const conditions = document.createElement("span");
      conditions.className = "conditions";
      const parts: string[] = [];
      if (row.pre !== "true") parts.push(`pre: ${row.pre}`);
      if (row.post !== "true") parts.push(`post: ${row.post}`);
      if (row.handlerRef) parts.push(`handler: ${row.handlerRef}`);
      conditions.textContent = parts.join("   ");

      line.append(toggle, badge, name, conditions);
      return line;
    }),
  );
}

function setBanner(message: string, isError: boolean): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.className = message ? (isError ? "error" : "ok") : "";
}

function renderDiagnostics(diags: { rule: string; node_id: string; message: string }[]): void {
  const box = el<HTMLUListElement>("diagnostics");
  box.replaceChildren(
    ...diags.map((d) => {
      const li = document.createElement("li");
      li.textContent = `${d.rule}${d.node_id ? ` at ${d.node_id}` : ""}: ${d.message}`;
      return li;
    }),
  );
}

async function selectScenario(id: string): Promise<void> {
  try {
    const { body, version } = await client.getDocument<ScenarioDoc>("scenarios", id);
    currentScenario = { id, version, doc: body };
    currentTarget = body.workflows.robot ? "robot" : "human";
    collapse.expandAll();
    el<HTMLSpanElement>("scenario-title").textContent = `${id} (version ${version})`;
    el<HTMLTextAreaElement>("json-editor").value = JSON.stringify(
      currentWorkflow(), null, 2,
    );
    renderDiagnostics([]);
    setBanner("", false);
    renderTree();
  } catch (err) {
    setBanner(err instanceof Error ? err.message : String(err), true);
  }
}

async function saveWorkflowEdit(): Promise<void> {
  if (!currentScenario) return;
  let edited: WorkflowDoc;
  try {
    edited = JSON.parse(el<HTMLTextAreaElement>("json-editor").value) as WorkflowDoc;
  } catch (err) {
    setBanner(`not valid JSON: ${err}`, true);
    return;
  }
  const doc = structuredClone(currentScenario.doc);
  doc.workflows[currentTarget] = edited;
  try {
    const version = await client.putDocument(
      "scenarios", currentScenario.id, doc, currentScenario.version,
    );
    setBanner(`saved version ${version}`, false);
    renderDiagnostics([]);
    await selectScenario(currentScenario.id);
  } catch (err) {
    if (err instanceof ApiError) {
      setBanner(`rejected (${err.status}): ${err.message}`, true);
      renderDiagnostics(err.diagnostics);
    } else {
      setBanner(String(err), true);
    }
  }
}

function renderSession(): void {
  const buttons = el<HTMLDivElement>("item-buttons");
  buttons.replaceChildren(
    ...sessionVm.itemButtons().map(({ item, remaining, disabled }) => {
      const button = document.createElement("button");
      button.textContent = `${item} (${remaining})`;
      button.disabled = disabled;
      button.addEventListener("click", () => {
        void sessionVm.choose(item).then(renderSession);
      });
      return button;
    }),
  );
  el<HTMLSpanElement>("prediction").textContent = sessionVm.complete
    ? "meal complete"
    : sessionVm.predictionNext ?? "start a session";
  el<HTMLSpanElement>("accuracy").textContent = sessionVm.started
    ? `${(sessionVm.accuracy * 100).toFixed(0)}%`
    : "-";

  const history = el<HTMLOListElement>("history");
  history.replaceChildren(
    ...sessionVm.history.map((entry) => {
      const li = document.createElement("li");
      const hit = entry.prediction === entry.choice ? "✓" : "✗";
      li.textContent = `${hit} predicted ${entry.prediction}, ate ${entry.choice}`;
      return li;
    }),
  );

  const summaryBox = el<HTMLDivElement>("summary");
  const summary = sessionVm.summary();
  summaryBox.textContent = summary
    ? `finished: ${summary.matches}/${summary.totalBites} predictions matched ` +
      `(accuracy ${(summary.accuracy * 100).toFixed(0)}%)`
    : "";
}

async function startSession(): Promise<void> {
  if (!currentScenario) {
    setBanner("select a scenario first", true);
    return;
  }
  try {
    await sessionVm.start(currentScenario.id);
    setBanner("", false);
    renderSession();
  } catch (err) {
    setBanner(err instanceof Error ? err.message : String(err), true);
  }
}

async function init(): Promise<void> {
  el<HTMLButtonElement>("save-workflow").addEventListener("click", () => void saveWorkflowEdit());
  el<HTMLButtonElement>("start-session").addEventListener("click", () => void startSession());
  el<HTMLButtonElement>("collapse-all").addEventListener("click", () => {
    const wf = currentWorkflow();
    if (wf) collapse.collapseAll(wf.root);
    renderTree();
  });
  el<HTMLButtonElement>("expand-all").addEventListener("click", () => {
    collapse.expandAll();
    renderTree();
  });
  el<HTMLSelectElement>("target-select").addEventListener("change", (ev) => {
    currentTarget = (ev.target as HTMLSelectElement).value as "human" | "robot";
    el<HTMLTextAreaElement>("json-editor").value = JSON.stringify(currentWorkflow(), null, 2);
    collapse.expandAll();
    renderTree();
  });
  try {
    renderScenarioList(await client.listDocuments("scenarios"));
  } catch (err) {
    setBanner(`cannot reach the service: ${err}`, true);
  }
  renderSession();
}

void init();
