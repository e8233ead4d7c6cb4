// Single-page shell: explore (sessions), charts, and review panels wired
// to the service API. State-changing actions round-trip through the API
// and the panels re-render from the responses.

import { ApiClient, ApiError } from "./api.js";
import {
  renderPeriodTable,
  renderPresenceHeatmap,
  renderRateComparison,
  renderTimeseries,
  type RateMode,
} from "./charts.js";
import { ReviewQueue, renderRecordPair } from "./review.js";
import { ExploreSession } from "./session.js";
import type { KwicHit, RateSeriesPayload } from "./types.js";

const api = new ApiClient("");

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function flash(message: string, isError = false): void {
  const banner = el("flash");
  banner.textContent = message;
  banner.className = isError ? "flash error" : "flash";
  banner.hidden = !message;
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    flash("");
    return await work();
  } catch (err) {
    if (err instanceof ApiError) {
      flash(`${err.code}: ${err.message}`, true);
    } else {
      flash(String(err), true);
    }
    return undefined;
  }
}

// -- explore panel -------------------------------------------------------------

const explore = new ExploreSession(api);

function renderHits(hits: KwicHit[]): void {
  const list = el("hit-list");
  list.innerHTML = "";
  for (const hit of hits) {
    const row = document.createElement("div");
    row.className = "hit";
    const text = document.createElement("span");
    text.innerHTML = `<span class="ctx">${hit.left}</span><mark>${hit.surface}</mark><span class="ctx">${hit.right}</span>`;
    row.appendChild(text);
    for (const label of ["relevant", "irrelevant", "answer"] as const) {
      const button = document.createElement("button");
      button.textContent = label;
      button.disabled = explore.readOnly;
      button.onclick = () =>
        guard(async () => {
          let answer: string | undefined;
          if (label === "answer") {
            answer = window.prompt("answer surface (e.g. the name found)") ?? undefined;
            if (!answer) return;
          }
          await explore.mark(hit, label, answer);
          await refreshSuggestions();
          renderSessionState();
        });
      row.appendChild(button);
    }
    list.appendChild(row);
  }
}

function renderSessionState(): void {
  const view = explore.view;
  el("session-banner").hidden = !explore.readOnly;
  if (!view) return;
  const info = el("session-info");
  const keywords = Object.entries(view.session.keyword_lists)
    .map(
      ([name, entries]) =>
        `<b>${name}</b>: ` +
        entries.map((e) => `<span class="kw ${e.provenance}">${e.surface}</span>`).join(" "),
    )
    .join("<br>");
  info.innerHTML =
    `session <code>${view.session.session_id}</code> on <b>${view.corpus}</b> ` +
    `(generation <code>${view.session.generation}</code>)<br>${keywords}<br>` +
    `${view.session.marks.length} marks, ${view.session.audit.length} audit entries`;
}

async function refreshSuggestions(): Promise<void> {
  const result = await explore.refreshSuggestions();
  const list = el("suggestion-list");
  list.innerHTML = "";
  if (result.status !== "ok") {
    list.textContent = result.status;
    return;
  }
  for (const suggestion of result.items) {
    const chip = document.createElement("button");
    chip.className = "chip";
    chip.textContent = `${suggestion.surface} (${suggestion.neighborhood_freq})`;
    chip.disabled = explore.readOnly;
    chip.onclick = () =>
      guard(async () => {
        await explore.acceptSuggestion(suggestion.surface);
        renderSessionState();
      });
    list.appendChild(chip);
  }
}

function wireExplore(): void {
  el("session-create").onclick = () =>
    guard(async () => {
      const corpus = (el("session-corpus") as HTMLInputElement).value.trim();
      await explore.create(corpus);
      renderSessionState();
    });
  el("session-load").onclick = () =>
    guard(async () => {
      const sid = (el("session-id") as HTMLInputElement).value.trim();
      await explore.load(sid);
      renderSessionState();
      await refreshSuggestions();
    });
  el("seed-add").onclick = () =>
    guard(async () => {
      const surfaces = (el("seed-input") as HTMLInputElement).value
        .split(/[,，\s]+/)
        .filter(Boolean);
      await explore.addSeeds(surfaces);
      renderSessionState();
    });
  el("search-run").onclick = () =>
    guard(async () => {
      const raw = (el("search-input") as HTMLInputElement).value.trim();
      const surfaces = raw ? raw.split(/[,，\s]+/).filter(Boolean) : undefined;
      const hits = await explore.search(surfaces);
      el("hit-count").textContent = `${explore.hitTotal} hits`;
      renderHits(hits);
      renderSessionState();
    });
}

// -- charts panel ---------------------------------------------------------------

let rateData: Record<string, RateSeriesPayload> = {};
let rateMode: RateMode = "raw";

function drawRates(): void {
  el("rate-chart").innerHTML = renderRateComparison(rateData, rateMode);
  el("rate-mode-label").textContent = rateMode;
}

function wireCharts(): void {
  el("ts-run").onclick = () =>
    guard(async () => {
      const corpus = (el("chart-corpus") as HTMLInputElement).value.trim();
      const surfaces = (el("ts-surfaces") as HTMLInputElement).value
        .split(/[,，\s]+/)
        .filter(Boolean);
      const kind = (el("ts-bucket") as HTMLSelectElement).value;
      const result = await api.timeseries(corpus, surfaces, { kind });
      el("ts-chart").innerHTML = renderTimeseries(result.series, surfaces.join("/"));
    });
  el("rate-run").onclick = () =>
    guard(async () => {
      const corpus = (el("chart-corpus") as HTMLInputElement).value.trim();
      const subjects = (el("rate-subjects") as HTMLInputElement).value
        .split(/[,，\s]+/)
        .filter(Boolean);
      const event = (el("rate-event") as HTMLInputElement).value.trim();
      rateData = {};
      for (const subject of subjects) {
        const result = await api.rates(corpus, [subject], [event]);
        rateData[subject] = result.series;
      }
      drawRates();
    });
  el("rate-toggle").onclick = () => {
    rateMode = rateMode === "raw" ? "normalized" : "raw";
    drawRates();
  };
  el("presence-run").onclick = () =>
    guard(async () => {
      const corpus = (el("chart-corpus") as HTMLInputElement).value.trim();
      const docId = (el("presence-doc") as HTMLInputElement).value.trim();
      const entities = (el("presence-entities") as HTMLInputElement).value
        .split(/[,，\s]+/)
        .filter(Boolean)
        .map((s) => ({ surfaces: s.split("|") }));
      const result = await api.presence(corpus, docId, entities);
      el("presence-chart").innerHTML = renderPresenceHeatmap(result.matrix);
    });
  el("period-run").onclick = () =>
    guard(async () => {
      const corpus = (el("chart-corpus") as HTMLInputElement).value.trim();
      const anchor = (el("period-anchor") as HTMLInputElement).value.trim();
      const periods = (el("period-spec") as HTMLInputElement).value
        .split(",")
        .map((p) => p.trim().split("-").map(Number) as [number, number]);
      const result = await api.periodTable(corpus, [anchor], periods);
      el("period-chart").innerHTML = renderPeriodTable(result.table);
    });
}

// -- review panel ------------------------------------------------------------------

let queue: ReviewQueue | null = null;

function renderQueue(): void {
  if (!queue) return;
  el("queue-stats").textContent =
    `${queue.total} pending, ${queue.judged} judged (most ambiguous first)`;
  const list = el("queue-list");
  list.innerHTML = "";
  for (const item of queue.items) {
    const card = document.createElement("div");
    card.className = "card";
    card.innerHTML = renderRecordPair(item);
    const controls = document.createElement("div");
    controls.className = "controls";
    const note = document.createElement("input");
    note.placeholder = "note";
    controls.appendChild(note);
    for (const verdict of ["same", "different", "unsure"] as const) {
      const button = document.createElement("button");
      button.textContent = verdict;
      button.onclick = () =>
        guard(async () => {
          await queue!.judge(item.pair_id, verdict, note.value);
          renderQueue();
        });
      controls.appendChild(button);
    }
    card.appendChild(controls);
    list.appendChild(card);
  }
}

function wireReview(): void {
  el("disambig-run").onclick = () =>
    guard(async () => {
      const records = (el("records-name") as HTMLInputElement).value.trim();
      const gazetteer = (el("gazetteer-name") as HTMLInputElement).value.trim();
      const run = await api.disambigRun({
        records,
        gazetteer: gazetteer || undefined,
      });
      queue = new ReviewQueue(api, run.run_id);
      el("run-summary").textContent =
        `run ${run.run_id}: ${run.pairs} pairs, ` +
        Object.entries(run.verdicts)
          .map(([k, v]) => `${k} ${v}`)
          .join(", ");
      await queue.load();
      renderQueue();
    });
  el("judgments-export").onclick = () =>
    guard(async () => {
      if (!queue) return;
      const items = await queue.export();
      el("export-output").textContent = items
        .map((j) => JSON.stringify(j))
        .join("\n");
    });
}

// -- shell ---------------------------------------------------------------------------

function showPanel(): void {
  const route = (location.hash || "#explore").slice(1);
  for (const name of ["explore", "charts", "review"]) {
    el(`panel-${name}`).hidden = name !== route;
    el(`nav-${name}`).classList.toggle("active", name === route);
  }
}

async function start(): Promise<void> {
  wireExplore();
  wireCharts();
  wireReview();
  window.addEventListener("hashchange", showPanel);
  showPanel();
  await guard(async () => {
    const corpora = await api.corpora();
    el("corpus-list").textContent = corpora.items
      .map((c) => `${c.name} (${c.documents} docs, ${c.cjk_characters} CJK chars)`)
      .join(" · ");
  });
}

start();
