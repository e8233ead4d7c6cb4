// Review-queue adjudication: fetch the most ambiguous pairs, submit
// same/different/unsure judgments (idempotent per pair), and export the
// judged state. The queue order comes from the service untouched.

import { ApiClient } from "./api.js";
import type { JudgmentItem, ReviewQueueItem } from "./types.js";

export class ReviewQueue {
  items: ReviewQueueItem[] = [];
  total = 0;
  judged = 0;

  constructor(
    private api: ApiClient,
    public runId: string,
  ) {}

  async load(page = 1, pageSize = 20): Promise<ReviewQueueItem[]> {
    const result = await this.api.reviewQueue(this.runId, {
      page,
      page_size: pageSize,
    });
    this.items = result.items;
    this.total = result.total;
    this.judged = result.judged;
    return this.items;
  }

  async judge(
    pairId: string,
    verdict: "same" | "different" | "unsure",
    note = "",
  ): Promise<void> {
    await this.api.submitJudgment(this.runId, pairId, verdict, note);
    await this.load();
  }

  async export(): Promise<JudgmentItem[]> {
    const result = await this.api.exportJudgments(this.runId);
    return result.items;
  }
}

export function renderRecordPair(item: ReviewQueueItem): string {
  const [a, b] = item.records;
  const esc = (v: string | number | null) =>
    v === null || v === ""
      ? '<span class="missing">–</span>'
      : String(v)
          .replace(/&/g, "&amp;")
          .replace(/</g, "&lt;")
          .replace(/>/g, "&gt;");
  const period = (r: typeof a) =>
    r.service_period ? `${r.service_period[0]}–${r.service_period[1]}` : null;
  const rows: [string, string | number | null, string | number | null][] = [
    ["record", a.record_id, b.record_id],
    ["birth place", a.birth_place, b.birth_place],
    ["entry into office", a.entry_into_office, b.entry_into_office],
    ["office posting", a.office_posting, b.office_posting],
    ["alternate names", a.alternate_names.join("、") || null, b.alternate_names.join("、") || null],
    ["service location", a.service_location, b.service_location],
    ["service period", period(a), period(b)],
    ["source book", a.source.book_id || null, b.source.book_id || null],
  ];
  const factoids = item.factoids
    .filter((f) => f.score !== null)
    .map(
      (f) =>
        `<li data-factoid="${f.factoid}" data-score="${f.score}">${f.factoid}: ${f.score} <span class="evidence">(${esc(f.evidence)})</span></li>`,
    )
    .join("");
  return `
    <div class="pair" data-pair-id="${esc(item.pair_id)}">
      <h3>${esc(item.name)} <span class="total">total ${item.total ?? "n/a"}</span></h3>
      <table class="side-by-side">
        ${rows
          .map(
            ([label, va, vb]) =>
              `<tr><th>${label}</th><td>${esc(va)}</td><td>${esc(vb)}</td></tr>`,
          )
          .join("")}
      </table>
      <ul class="factoids">${factoids}</ul>
    </div>`;
}
