// Thin typed client for the analytics service. Every UI number originates
// from one of these calls.

import type {
  CorpusSummary,
  JudgmentItem,
  KwicHit,
  Paginated,
  PeriodTablePayload,
  PresenceMatrixPayload,
  RankedCandidate,
  RateSeriesPayload,
  ReportResponse,
  ReviewQueueItem,
  SessionHealth,
  SessionView,
  SuggestionResponse,
  TimeseriesPayload,
  TranslitRunResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body === "object" && body.detail) {
      code = body.detail.error ?? code;
      message = body.detail.message ?? JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(public base: string = "") {}

  private async get<T>(path: string, params?: Record<string, unknown>): Promise<T> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value === undefined) continue;
      if (Array.isArray(value)) {
        for (const v of value) query.append(key, String(v));
      } else {
        query.set(key, String(value));
      }
    }
    const qs = query.toString();
    const response = await fetch(this.base + path + (qs ? `?${qs}` : ""));
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  corpora(): Promise<Paginated<CorpusSummary>> {
    return this.get("/corpora");
  }

  kwic(
    corpus: string,
    surfaces: string[],
    opts: { width?: number; page?: number; page_size?: number } = {},
  ): Promise<Paginated<KwicHit> & { generation: string }> {
    return this.get(`/corpora/${corpus}/kwic`, { q: surfaces, ...opts });
  }

  timeseries(
    corpus: string,
    surfaces: string[],
    bucketing: { kind: string; periods?: [number, number][] },
  ): Promise<{ generation: string; series: TimeseriesPayload }> {
    return this.post(`/corpora/${corpus}/timeseries`, {
      keywords: { surfaces },
      bucketing,
    });
  }

  collocations(
    corpus: string,
    members: string[][],
    bucketing: { kind: string; periods?: [number, number][] },
    window: string | number = "sentence",
  ): Promise<{ generation: string; series: TimeseriesPayload }> {
    return this.post(`/corpora/${corpus}/collocations`, {
      members: members.map((surfaces) => ({ surfaces })),
      window,
      bucketing,
    });
  }

  periodTable(
    corpus: string,
    anchor: string[],
    periods: [number, number][],
    topK = 20,
  ): Promise<{ generation: string; table: PeriodTablePayload }> {
    return this.post(`/corpora/${corpus}/period-table`, {
      anchor: { surfaces: anchor },
      periods,
      top_k: topK,
    });
  }

  rates(
    corpus: string,
    subject: string[],
    events: string[],
    opts: { kind?: string; gap?: number } = {},
  ): Promise<{ generation: string; series: RateSeriesPayload }> {
    return this.post(`/corpora/${corpus}/rates`, {
      subject: { surfaces: subject },
      events: { surfaces: events },
      bucketing: { kind: opts.kind ?? "chapter" },
      gap: opts.gap ?? 0,
    });
  }

  presence(
    corpus: string,
    docId: string,
    entities: { label?: string; surfaces: string[] }[],
  ): Promise<{ generation: string; matrix: PresenceMatrixPayload }> {
    return this.post(`/corpora/${corpus}/presence`, { doc_id: docId, entities });
  }

  // -- sessions -------------------------------------------------------------

  createSession(corpus: string, sessionId?: string): Promise<SessionView> {
    return this.post("/sessions", { corpus, session_id: sessionId });
  }

  session(sessionId: string): Promise<SessionView> {
    return this.get(`/sessions/${sessionId}`);
  }

  addKeywords(
    sessionId: string,
    surfaces: string[],
    provenance: "seed" | "suggested" | "manual",
    listName = "seeds",
  ): Promise<{ added: string[] }> {
    return this.post(`/sessions/${sessionId}/keywords`, {
      list_name: listName,
      surfaces,
      provenance,
    });
  }

  sessionSearch(
    sessionId: string,
    surfaces: string[],
    opts: { page?: number; page_size?: number } = {},
  ): Promise<Paginated<KwicHit> & { generation: string }> {
    return this.post(`/sessions/${sessionId}/search`, {
      surfaces,
      page: opts.page ?? 1,
      page_size: opts.page_size ?? 50,
    });
  }

  mark(
    sessionId: string,
    hit: Pick<KwicHit, "doc_id" | "start" | "end" | "surface">,
    label: "relevant" | "irrelevant" | "answer",
    opts: { note?: string; answer_surface?: string } = {},
  ): Promise<{ marks: number }> {
    return this.post(`/sessions/${sessionId}/marks`, {
      ...hit,
      label,
      note: opts.note ?? "",
      answer_surface: opts.answer_surface ?? null,
    });
  }

  suggestions(sessionId: string, topK = 20): Promise<SuggestionResponse> {
    return this.get(`/sessions/${sessionId}/suggestions`, { top_k: topK });
  }

  report(sessionId: string, gold?: string[]): Promise<ReportResponse> {
    return this.post(`/sessions/${sessionId}/report`, { gold: gold ?? null });
  }

  sessionHealth(sessionId: string): Promise<SessionHealth> {
    return this.get(`/sessions/${sessionId}/health`);
  }

  // -- transliteration --------------------------------------------------------

  translitRun(body: {
    corpus: string;
    contrast?: string;
    gold?: string;
    config?: Record<string, unknown>;
  }): Promise<TranslitRunResponse> {
    return this.post("/translit/runs", body);
  }

  translitRanked(
    runId: string,
    opts: { page?: number; page_size?: number } = {},
  ): Promise<Paginated<RankedCandidate>> {
    return this.get(`/translit/runs/${runId}/ranked`, opts);
  }

  // -- disambiguation -----------------------------------------------------------

  disambigRun(body: {
    records: string;
    gazetteer?: string;
    config?: Record<string, unknown>;
  }): Promise<{
    run_id: string;
    pairs: number;
    verdicts: Record<string, number>;
    review_queue_size: number;
  }> {
    return this.post("/disambig/runs", body);
  }

  reviewQueue(
    runId: string,
    opts: { page?: number; page_size?: number } = {},
  ): Promise<Paginated<ReviewQueueItem> & { judged: number }> {
    return this.get(`/disambig/runs/${runId}/review-queue`, opts);
  }

  submitJudgment(
    runId: string,
    pairId: string,
    verdict: "same" | "different" | "unsure",
    note = "",
  ): Promise<{ judged: number }> {
    return this.post(`/disambig/runs/${runId}/judgments`, {
      pair_id: pairId,
      verdict,
      note,
    });
  }

  exportJudgments(runId: string): Promise<{ items: JudgmentItem[]; total: number }> {
    return this.get(`/disambig/runs/${runId}/judgments`);
  }
}
