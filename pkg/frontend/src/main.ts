/** Wires the form, the API client, the session, and the map together.
 *
 * One query in flight at a time: the run button is disabled while waiting
 * and the sequence-number guard drops any response that was superseded.
 * All displayed numbers come verbatim from the service responses.
 */

import { ApiClient, ApiHttpError } from "./api.js";
import { buildGraphModel } from "./graphmodel.js";
import { Session } from "./session.js";
import { MapView } from "./render.js";
import type { QueryRequest } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const seedsInput = el<HTMLInputElement>("seeds");
const methodSelect = el<HTMLSelectElement>("method");
const countInput = el<HTMLInputElement>("count");
const thresholdInput = el<HTMLInputElement>("threshold");
const thresholdLabel = el<HTMLSpanElement>("threshold-label");
const runButton = el<HTMLButtonElement>("run");
const promoteButton = el<HTMLButtonElement>("promote");
const backButton = el<HTMLButtonElement>("back");
const statusLine = el<HTMLDivElement>("status");
const emptyPanel = el<HTMLDivElement>("empty-state");
const resultsList = el<HTMLUListElement>("results");
const legendList = el<HTMLUListElement>("legend");
const canvas = el<HTMLCanvasElement>("map");

const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const client = new ApiClient(apiBase);
const session = new Session();
const view = new MapView(canvas, { onNodeClick: (id) => toggleSelect(id) });

let inFlight = false;

function parseSeeds(text: string): number[] {
  return text
    .split(/[\s,]+/)
    .filter((tok) => tok.length > 0)
    .map((tok) => Number.parseInt(tok, 10))
    .filter((n) => Number.isFinite(n));
}

function requestFromForm(): QueryRequest | null {
  const seeds = parseSeeds(seedsInput.value);
  if (seeds.length === 0) {
    statusLine.textContent = "enter at least one numeric seed id";
    return null;
  }
  return {
    seeds,
    method: methodSelect.value === "ac" ? "ac" : "ms",
    stop: { kind: "fixed_count", value: Number.parseInt(countInput.value, 10) || 100 },
    community_detection: true,
    edge_threshold: 0.01,
  };
}

async function runQuery(request: QueryRequest): Promise<void> {
  if (inFlight) return; // one query at a time per tab
  inFlight = true;
  runButton.disabled = true;
  statusLine.textContent = "querying…";
  try {
    const outcome = await client.query(request);
    if (outcome.stale) return; // superseded while in flight
    session.apply(request, outcome.response);
    seedsInput.value = request.seeds.join(", ");
    renderCurrent();
    const t = outcome.response.timings;
    const skipped = outcome.response.warnings.unindexed_seeds;
    statusLine.textContent =
      `ranked ${outcome.response.ranked.length} accounts ` +
      `(lsh ${t.lsh_ms.toFixed(0)}ms, rank ${t.rank_ms.toFixed(0)}ms, ` +
      `communities ${t.community_ms.toFixed(0)}ms)` +
      (skipped.length ? ` — skipped unknown seeds: ${skipped.join(", ")}` : "");
  } catch (err) {
    statusLine.textContent =
      err instanceof ApiHttpError ? `error ${err.status}: ${err.message}` : `request failed: ${err}`;
  } finally {
    inFlight = false;
    runButton.disabled = false;
  }
}

function renderCurrent(): void {
  const response = session.currentResponse;
  const seeds = session.currentSeeds;
  if (!response) return;
  const threshold = Number.parseFloat(thresholdInput.value);
  const model = buildGraphModel(response, seeds, threshold);

  emptyPanel.style.display = model.empty ? "block" : "none";
  canvas.style.display = model.empty ? "none" : "block";
  if (model.empty) {
    emptyPanel.textContent =
      "No community map in this response. Re-run the query with community detection, " +
      "or check that the seeds resolve to indexed accounts.";
  } else {
    view.setModel(model);
    view.setSelection(session.selectedIds);
  }

  legendList.replaceChildren(
    ...model.communities.map((label) => {
      const item = document.createElement("li");
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = model.nodes.find((n) => n.community === label)?.color ?? "#999";
      const members = model.nodes.filter((n) => n.community === label).length;
      item.append(swatch, ` community ${label} (${members})`);
      return item;
    }),
  );

  resultsList.replaceChildren(
    ...response.ranked.map((entry) => {
      const item = document.createElement("li");
      item.textContent = `${entry.id}  d=${entry.distance.toFixed(3)}`;
      item.dataset.id = String(entry.id);
      if (session.selectedIds.includes(entry.id)) item.classList.add("selected");
      item.addEventListener("click", () => toggleSelect(entry.id));
      return item;
    }),
  );
  updateButtons();
}

function toggleSelect(id: number): void {
  if (session.toggleSelection(id)) {
    view.setSelection(session.selectedIds);
    renderCurrent();
  }
}

function updateButtons(): void {
  promoteButton.disabled = session.selectedIds.length === 0;
  backButton.disabled = !session.canGoBack;
}

runButton.addEventListener("click", () => {
  const request = requestFromForm();
  if (request) void runQuery(request);
});

promoteButton.addEventListener("click", () => {
  const request = session.promoteSelectionToSeeds();
  if (request) {
    session.clearSelection();
    void runQuery(request);
  }
});

backButton.addEventListener("click", () => {
  const entry = session.back();
  if (entry) {
    seedsInput.value = entry.request.seeds.join(", ");
    renderCurrent();
    statusLine.textContent = "restored previous query";
  }
});

thresholdInput.addEventListener("input", () => {
  thresholdLabel.textContent = Number.parseFloat(thresholdInput.value).toFixed(2);
  renderCurrent();
});

void client.health().then((ok) => {
  if (!ok) {
    statusLine.textContent =
      "service unreachable — start it with: graphsketch serve --store <store.gsm> " +
      "(append ?api=http://host:port to this page's URL if it runs elsewhere)";
  }
});
updateButtons();
