// Pure view functions: service payload in, markup string out.
//
// Every rendered number is copied verbatim from the payload into a
// data-value attribute, so contract tests can assert that nothing was
// recomputed client-side. Undefined rates (null) become gaps: no point is
// drawn and the connecting path breaks.

import type {
  PeriodTablePayload,
  PresenceMatrixPayload,
  RateSeriesPayload,
  TimeseriesPayload,
} from "./types.js";

export const CHART_WIDTH = 720;
export const CHART_HEIGHT = 220;
const PAD = { left: 42, right: 12, top: 12, bottom: 28 };

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function xAt(index: number, count: number): number {
  if (count <= 1) return PAD.left;
  const span = CHART_WIDTH - PAD.left - PAD.right;
  return PAD.left + (span * index) / (count - 1);
}

function yAt(value: number, maxValue: number): number {
  const span = CHART_HEIGHT - PAD.top - PAD.bottom;
  if (maxValue <= 0) return CHART_HEIGHT - PAD.bottom;
  return CHART_HEIGHT - PAD.bottom - (span * value) / maxValue;
}

interface LineSeries {
  label: string;
  // null values are gaps: the polyline breaks and no marker is drawn.
  values: (number | null)[];
}

const PALETTE = ["#b3412c", "#2c6e91", "#6a7b3c", "#7d5ba6", "#b08830"];

function renderLines(
  buckets: string[],
  series: LineSeries[],
  kindAttr: string,
): string {
  const max = Math.max(
    0,
    ...series.flatMap((s) => s.values.filter((v): v is number => v !== null)),
  );
  const parts: string[] = [];
  parts.push(
    `<svg class="chart" viewBox="0 0 ${CHART_WIDTH} ${CHART_HEIGHT}" data-kind="${escapeHtml(kindAttr)}" role="img">`,
  );
  parts.push(
    `<line class="axis" x1="${PAD.left}" y1="${CHART_HEIGHT - PAD.bottom}" x2="${CHART_WIDTH - PAD.right}" y2="${CHART_HEIGHT - PAD.bottom}"/>`,
  );
  const labelStep = Math.max(1, Math.ceil(buckets.length / 12));
  buckets.forEach((bucket, i) => {
    if (i % labelStep !== 0 && i !== buckets.length - 1) return;
    parts.push(
      `<text class="tick" x="${xAt(i, buckets.length).toFixed(1)}" y="${CHART_HEIGHT - 8}" text-anchor="middle">${escapeHtml(bucket)}</text>`,
    );
  });
  series.forEach((line, si) => {
    const color = PALETTE[si % PALETTE.length];
    let segment: string[] = [];
    const segments: string[][] = [];
    line.values.forEach((value, i) => {
      if (value === null) {
        if (segment.length) segments.push(segment);
        segment = [];
        return;
      }
      segment.push(`${xAt(i, buckets.length).toFixed(1)},${yAt(value, max).toFixed(1)}`);
    });
    if (segment.length) segments.push(segment);
    for (const points of segments) {
      parts.push(
        `<polyline class="series-line" fill="none" stroke="${color}" data-series="${escapeHtml(line.label)}" points="${points.join(" ")}"/>`,
      );
    }
    line.values.forEach((value, i) => {
      if (value === null) return;
      parts.push(
        `<circle class="pt" r="2.5" fill="${color}" cx="${xAt(i, buckets.length).toFixed(1)}" cy="${yAt(value, max).toFixed(1)}" ` +
          `data-series="${escapeHtml(line.label)}" data-bucket="${escapeHtml(buckets[i])}" data-value="${value}"/>`,
      );
    });
  });
  parts.push("</svg>");
  return parts.join("");
}

export function renderTimeseries(series: TimeseriesPayload, label = "count"): string {
  return renderLines(
    series.points.map((p) => p.bucket),
    [{ label, values: series.points.map((p) => p.count) }],
    "timeseries",
  );
}

export type RateMode = "raw" | "normalized";

/** One line per subject; raw mode plots numerators, normalized mode plots
 * the rate and leaves gaps where the rate is undefined. */
export function renderRateComparison(
  byLabel: Record<string, RateSeriesPayload>,
  mode: RateMode,
): string {
  const labels = Object.keys(byLabel);
  if (labels.length === 0) return '<svg class="chart" data-kind="rates"></svg>';
  const buckets = byLabel[labels[0]].points.map((p) => p.bucket);
  const series = labels.map((label) => ({
    label,
    values: byLabel[label].points.map((p) =>
      mode === "raw" ? p.numerator : p.rate,
    ),
  }));
  return renderLines(buckets, series, `rates-${mode}`);
}

export function renderPresenceHeatmap(matrix: PresenceMatrixPayload): string {
  const parts: string[] = [];
  parts.push('<table class="heatmap" data-kind="presence"><thead><tr><th></th>');
  for (const chapter of matrix.chapters) {
    parts.push(`<th class="chapter-label">${escapeHtml(chapter)}</th>`);
  }
  parts.push("</tr></thead><tbody>");
  for (const row of matrix.rows) {
    parts.push(`<tr><th class="entity">${escapeHtml(row.entity)}</th>`);
    row.counts.forEach((count, i) => {
      const cls = count > 0 ? "present" : "absent";
      parts.push(
        `<td class="cell ${cls}" data-entity="${escapeHtml(row.entity)}" data-chapter="${escapeHtml(matrix.chapters[i])}" data-count="${count}" title="${count}"></td>`,
      );
    });
    parts.push("</tr>");
  }
  parts.push("</tbody></table>");
  return parts.join("");
}

export function renderPeriodTable(table: PeriodTablePayload): string {
  const parts: string[] = [];
  parts.push(
    `<table class="period-table" data-kind="period-table" data-anchor="${escapeHtml(table.anchor)}"><thead><tr><th>collocate</th>`,
  );
  for (const period of table.periods) {
    parts.push(`<th>${escapeHtml(period)}</th>`);
  }
  parts.push("</tr></thead><tbody>");
  for (const row of table.rows) {
    parts.push(`<tr><th class="collocate">${escapeHtml(row.collocate)}</th>`);
    row.counts.forEach((count, i) => {
      parts.push(
        `<td data-collocate="${escapeHtml(row.collocate)}" data-period="${escapeHtml(table.periods[i])}" data-value="${count}">${count}</td>`,
      );
    });
    parts.push("</tr>");
  }
  parts.push("</tbody></table>");
  return parts.join("");
}
