// Payload shapes returned by the analytics service. The UI renders these
// verbatim; it never derives numbers of its own.

export interface Paginated<T> {
  items: T[];
  total: number;
  page: number;
  page_size: number;
}

export interface CorpusSummary {
  name: string;
  generation: string;
  documents: number;
  characters: number;
  cjk_characters: number;
}

export interface SeriesPoint {
  bucket: string;
  count: number;
}

export interface TimeseriesPayload {
  bucketing: string;
  points: SeriesPoint[];
  total: number;
  skipped_undated: number;
  meta: Record<string, unknown>;
}

export interface RatePoint {
  bucket: string;
  numerator: number;
  denominator: number;
  rate: number | null;
}

export interface RateSeriesPayload {
  bucketing: string;
  points: RatePoint[];
}

export interface PeriodTablePayload {
  anchor: string;
  periods: string[];
  rows: { collocate: string; counts: number[] }[];
}

export interface PresenceMatrixPayload {
  doc_id: string;
  chapters: string[];
  rows: { entity: string; counts: number[] }[];
}

export interface KwicHit {
  doc_id: string;
  start: number;
  end: number;
  surface: string;
  left: string;
  right: string;
  sentence_index: number;
}

export interface KeywordEntry {
  surface: string;
  provenance: "seed" | "suggested" | "manual";
}

export interface SessionData {
  schema: number;
  session_id: string;
  generation: string;
  keyword_lists: Record<string, KeywordEntry[]>;
  marks: MarkData[];
  audit: AuditEntry[];
}

export interface MarkData {
  doc_id: string;
  start: number;
  end: number;
  surface: string;
  label: "relevant" | "irrelevant" | "answer";
  note: string;
  answer_surface: string | null;
}

export interface AuditEntry {
  seq: number;
  action: string;
  [key: string]: unknown;
}

export interface SessionView {
  session: SessionData;
  corpus: string;
  live: boolean;
}

export interface Suggestion {
  surface: string;
  score: number;
  neighborhood_freq: number;
}

export interface SuggestionResponse {
  generation: string;
  status: string;
  items: Suggestion[];
}

export interface SessionHealth {
  generation: string;
  keywords_without_hits: string[];
  keyword_hits: Record<string, number>;
  unmarked_chapters: Record<string, number[]>;
}

export interface ReportResponse {
  answers: string[];
  precision: number | null;
  recall: number | null;
  gold_size: number | null;
}

export interface FactoidScore {
  factoid: string;
  score: number | null;
  evidence: string;
}

export interface RecordPayload {
  record_id: string;
  name: string;
  birth_place: string | null;
  entry_into_office: string | null;
  office_posting: string | null;
  alternate_names: string[];
  service_location: string | null;
  service_period: [number, number] | null;
  source: { book_id: string; pub_place: string; book_year: number | null };
}

export interface ReviewQueueItem {
  pair_id: string;
  a: string;
  b: string;
  name: string;
  factoids: FactoidScore[];
  total: number | null;
  veto: string | null;
  verdict: string;
  records: [RecordPayload, RecordPayload];
}

export interface JudgmentItem {
  pair_id: string;
  verdict: "same" | "different" | "unsure";
  note: string;
}

export interface TranslitRunResponse {
  run_id: string;
  generation: string;
  stages: Record<string, number>;
  report: {
    survivors: number;
    recall: number;
    precision_at: Record<string, number>;
    truncated_ks: number[];
  } | null;
}

export interface RankedCandidate {
  rank: number;
  surface: string;
  total_freq: number;
  score: number | null;
}
