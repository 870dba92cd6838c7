/** Types mirroring the triage service JSON API. */

export type Tag = "Wrong" | "Modify" | "Ambiguous" | "False";

export type Level = "A1" | "A2" | "B1" | "B2" | "C1" | "C2";

export const TAGS: Tag[] = ["Wrong", "Modify", "Ambiguous", "False"];

export const LEVELS: Level[] = ["A1", "A2", "B1", "B2", "C1", "C2"];

export interface Vote {
  model: string;
  label: string;
}

export interface TriageItem {
  sentence_id: string;
  text: string;
  gold: string;
  gold_scheme_label: string;
  consensus: string;
  votes: Vote[];
  status: "pending" | "decided";
}

export interface TriagePage {
  items: TriageItem[];
  total: number;
  page: number;
  page_size: number;
}

export interface Stats {
  total: number;
  pending: number;
  decided: number;
  tags: Record<string, number>;
}

export interface DecisionBody {
  tag: Tag;
  new_label?: Level;
  annotator?: string;
}

export type ApiResult<T> =
  | { ok: true; status: number; data: T }
  | { ok: false; status: number; detail: string };
