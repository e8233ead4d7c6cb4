// Contract: chart renderers emit recorded endpoint payloads verbatim.
// Every on-screen value must appear as a data attribute equal to the
// payload value, and undefined rates must become gaps, never zeros.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  renderPeriodTable,
  renderPresenceHeatmap,
  renderRateComparison,
  renderTimeseries,
} from "../src/charts.js";
import type {
  PeriodTablePayload,
  PresenceMatrixPayload,
  RateSeriesPayload,
  TimeseriesPayload,
} from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(join(__dirname, "fixtures", name), "utf-8"),
  ) as T;
}

function attrs(markup: string, tag: string): Record<string, string>[] {
  const out: Record<string, string>[] = [];
  const tagPattern = new RegExp(`<${tag}\\b([^>]*)>`, "g");
  const attrPattern = /([a-zA-Z-]+)="([^"]*)"/g;
  for (const match of markup.matchAll(tagPattern)) {
    const found: Record<string, string> = {};
    for (const attr of match[1].matchAll(attrPattern)) {
      found[attr[1]] = attr[2];
    }
    out.push(found);
  }
  return out;
}

describe("timeseries rendering", () => {
  const payload = fixture<TimeseriesPayload>("timeseries.json");

  it("renders every payload point verbatim", () => {
    const svg = renderTimeseries(payload, "kw");
    const points = attrs(svg, "circle");
    expect(points.length).toBe(payload.points.length);
    const rendered = new Map(points.map((p) => [p["data-bucket"], p["data-value"]]));
    for (const point of payload.points) {
      expect(rendered.get(point.bucket)).toBe(String(point.count));
    }
  });

  it("adds nothing the payload does not contain", () => {
    const svg = renderTimeseries(payload, "kw");
    const buckets = new Set(payload.points.map((p) => p.bucket));
    for (const point of attrs(svg, "circle")) {
      expect(buckets.has(point["data-bucket"])).toBe(true);
    }
  });
});

describe("rate chart rendering", () => {
  const gaps = fixture<Record<string, RateSeriesPayload>>("rates_gaps.json");
  const drc = fixture<Record<string, RateSeriesPayload>>("rates_drc.json");

  it("raw mode plots numerators exactly", () => {
    const svg = renderRateComparison(gaps, "raw");
    for (const [label, series] of Object.entries(gaps)) {
      const points = attrs(svg, "circle").filter((p) => p["data-series"] === label);
      expect(points.length).toBe(series.points.length);
      for (const point of series.points) {
        const cell = points.find((p) => p["data-bucket"] === point.bucket);
        expect(cell?.["data-value"]).toBe(String(point.numerator));
      }
    }
  });

  it("normalized mode renders undefined rates as gaps, never zero", () => {
    const svg = renderRateComparison(gaps, "normalized");
    const totalNulls = Object.values(gaps)
      .flatMap((s) => s.points)
      .filter((p) => p.rate === null).length;
    expect(totalNulls).toBeGreaterThan(0); // the recorded fixture has real gaps
    for (const [label, series] of Object.entries(gaps)) {
      const points = attrs(svg, "circle").filter((p) => p["data-series"] === label);
      for (const missing of series.points.filter((p) => p.rate === null)) {
        expect(points.find((p) => p["data-bucket"] === missing.bucket)).toBeUndefined();
      }
      for (const present of series.points.filter((p) => p.rate !== null)) {
        const cell = points.find((p) => p["data-bucket"] === present.bucket);
        expect(cell?.["data-value"]).toBe(String(present.rate));
      }
    }
  });

  it("a gap splits the connecting line into separate segments", () => {
    const only = { "寶玉": gaps["寶玉"] };
    const nulls = only["寶玉"].points.filter((p) => p.rate === null).length;
    expect(nulls).toBe(1);
    const svg = renderRateComparison(only, "normalized");
    const lines = attrs(svg, "polyline").filter((p) => p["data-series"] === "寶玉");
    expect(lines.length).toBe(2); // one break around the undefined bucket
  });

  it("raw and normalized modes disagree when the payloads do", () => {
    const rawTop: string[] = [];
    const rateTop: string[] = [];
    const labels = Object.keys(drc);
    const buckets = drc[labels[0]].points.length;
    for (let i = 0; i < buckets; i++) {
      const raw = labels.map((l) => drc[l].points[i].numerator);
      const rates = labels.map((l) => drc[l].points[i].rate);
      if (rates.some((r) => r === null)) continue;
      rawTop.push(labels[raw.indexOf(Math.max(...raw))]);
      rateTop.push(labels[(rates as number[]).indexOf(Math.max(...(rates as number[])))]);
    }
    expect(rawTop).not.toEqual(rateTop);
  });
});

describe("presence heatmap rendering", () => {
  const payload = fixture<PresenceMatrixPayload>("presence.json");

  it("labels columns with the d001 scheme from the payload", () => {
    const html = renderPresenceHeatmap(payload);
    expect(payload.chapters[0]).toBe("d001");
    for (const chapter of payload.chapters) {
      expect(html).toContain(`>${chapter}</th>`);
    }
  });

  it("copies every cell count verbatim", () => {
    const html = renderPresenceHeatmap(payload);
    const cells = attrs(html, "td");
    expect(cells.length).toBe(payload.rows.length * payload.chapters.length);
    for (const row of payload.rows) {
      row.counts.forEach((count, i) => {
        const cell = cells.find(
          (c) => c["data-entity"] === row.entity && c["data-chapter"] === payload.chapters[i],
        );
        expect(cell?.["data-count"]).toBe(String(count));
        expect(cell?.class?.includes(count > 0 ? "present" : "absent")).toBe(true);
      });
    }
  });
});

describe("period table rendering", () => {
  const payload = fixture<PeriodTablePayload>("period_table.json");

  it("renders rows and counts exactly as delivered", () => {
    const html = renderPeriodTable(payload);
    const cells = attrs(html, "td");
    expect(cells.length).toBe(payload.rows.length * payload.periods.length);
    for (const row of payload.rows) {
      row.counts.forEach((count, i) => {
        const cell = cells.find(
          (c) =>
            c["data-collocate"] === row.collocate &&
            c["data-period"] === payload.periods[i],
        );
        expect(cell?.["data-value"]).toBe(String(count));
      });
    }
  });

  it("preserves the service row order (no client re-ranking)", () => {
    const html = renderPeriodTable(payload);
    const order = [...html.matchAll(/data-collocate="([^"]+)"/g)].map((m) => m[1]);
    const expected = payload.rows.flatMap((r) => r.counts.map(() => r.collocate));
    expect(order).toEqual(expected);
  });
});
