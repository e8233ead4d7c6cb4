// The iterative exploration loop: search, inspect hits, mark statements,
// harvest suggested keywords, accept them, search again. Every step is a
// service call; the controller only holds the latest responses.

import { ApiClient } from "./api.js";
import type {
  KwicHit,
  SessionHealth,
  SessionView,
  Suggestion,
  SuggestionResponse,
} from "./types.js";

export class ExploreSession {
  view: SessionView | null = null;
  hits: KwicHit[] = [];
  hitTotal = 0;
  suggestions: Suggestion[] = [];
  suggestionStatus = "";

  constructor(
    private api: ApiClient,
    public sessionId: string | null = null,
  ) {}

  get readOnly(): boolean {
    return this.view !== null && !this.view.live;
  }

  async create(corpus: string): Promise<SessionView> {
    this.view = await this.api.createSession(corpus);
    this.sessionId = this.view.session.session_id;
    return this.view;
  }

  async load(sessionId: string): Promise<SessionView> {
    this.sessionId = sessionId;
    this.view = await this.api.session(sessionId);
    return this.view;
  }

  private id(): string {
    if (!this.sessionId) throw new Error("no session bound");
    return this.sessionId;
  }

  async refresh(): Promise<SessionView> {
    this.view = await this.api.session(this.id());
    return this.view;
  }

  keywordSurfaces(): string[] {
    if (!this.view) return [];
    const out: string[] = [];
    for (const entries of Object.values(this.view.session.keyword_lists)) {
      for (const entry of entries) out.push(entry.surface);
    }
    return out;
  }

  async addSeeds(surfaces: string[]): Promise<void> {
    await this.api.addKeywords(this.id(), surfaces, "seed");
    await this.refresh();
  }

  /** Accepting a suggestion records it with "suggested" provenance. */
  async acceptSuggestion(surface: string): Promise<void> {
    await this.api.addKeywords(this.id(), [surface], "suggested");
    await this.refresh();
  }

  async search(surfaces?: string[], pageSize = 50): Promise<KwicHit[]> {
    const query = surfaces ?? this.keywordSurfaces();
    const result = await this.api.sessionSearch(this.id(), query, {
      page_size: pageSize,
    });
    this.hits = result.items;
    this.hitTotal = result.total;
    await this.refresh();
    return this.hits;
  }

  async mark(
    hit: KwicHit,
    label: "relevant" | "irrelevant" | "answer",
    answerSurface?: string,
  ): Promise<void> {
    await this.api.mark(this.id(), hit, label, { answer_surface: answerSurface });
    await this.refresh();
  }

  async refreshSuggestions(topK = 20): Promise<SuggestionResponse> {
    const result = await this.api.suggestions(this.id(), topK);
    this.suggestions = result.items;
    this.suggestionStatus = result.status;
    return result;
  }

  async health(): Promise<SessionHealth> {
    return this.api.sessionHealth(this.id());
  }

  async report(gold?: string[]) {
    return this.api.report(this.id(), gold);
  }
}
