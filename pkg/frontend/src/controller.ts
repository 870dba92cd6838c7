/** Queue state machine: everything the UI shows lives in this state, and
 * every count shown comes verbatim from the server (/api/triage totals and
 * /api/stats), never from local arithmetic. */

import { ApiClient, buildDecisionBody } from "./api.js";
import type { Level, Stats, Tag, TriageItem } from "./types.js";

export interface FormState {
  tag: Tag | null;
  newLabel: Level | null;
  annotator: string;
}

export interface QueueState {
  items: TriageItem[];
  totalPending: number;
  page: number;
  pageSize: number;
  selected: number;
  form: FormState;
  stats: Stats | null;
  /** connectivity problem banner; null when the server is reachable */
  banner: string | null;
  /** transient notice, e.g. "already decided" after a 409 */
  notice: string | null;
  /** field-level message from a 422 */
  fieldError: string | null;
  busy: boolean;
}

const EMPTY_FORM: FormState = { tag: null, newLabel: null, annotator: "" };

export class QueueController {
  readonly state: QueueState;
  private listeners: Array<() => void> = [];

  constructor(private readonly client: ApiClient, pageSize = 20) {
    this.state = {
      items: [],
      totalPending: 0,
      page: 1,
      pageSize,
      selected: 0,
      form: { ...EMPTY_FORM },
      stats: null,
      banner: null,
      notice: null,
      fieldError: null,
      busy: false,
    };
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  get selectedItem(): TriageItem | null {
    return this.state.items[this.state.selected] ?? null;
  }

  get pageCount(): number {
    return Math.max(1, Math.ceil(this.state.totalPending / this.state.pageSize));
  }

  get allTriaged(): boolean {
    return this.state.totalPending === 0 && this.state.banner === null;
  }

  async refresh(): Promise<void> {
    await this.loadQueue(this.state.page);
    await this.refreshStats();
  }

  async loadQueue(page: number): Promise<void> {
    const result = await this.safe(() =>
      this.client.listTriage("pending", page, this.state.pageSize),
    );
    if (!result) return;
    if (result.ok) {
      this.state.banner = null;
      this.state.items = result.data.items;
      this.state.totalPending = result.data.total;
      this.state.page = result.data.page;
      if (this.state.selected >= this.state.items.length) {
        this.state.selected = Math.max(0, this.state.items.length - 1);
      }
    } else {
      this.state.banner = `server error: ${result.detail}`;
    }
    this.emit();
  }

  async refreshStats(): Promise<void> {
    const result = await this.safe(() => this.client.stats());
    if (!result) return;
    if (result.ok) {
      this.state.banner = null;
      this.state.stats = result.data;
    } else {
      this.state.banner = `server error: ${result.detail}`;
    }
    this.emit();
  }

  select(index: number): void {
    if (index >= 0 && index < this.state.items.length) {
      this.state.selected = index;
      this.resetForm();
      this.emit();
    }
  }

  selectNext(): void {
    this.select(Math.min(this.state.selected + 1, this.state.items.length - 1));
  }

  selectPrevious(): void {
    this.select(Math.max(this.state.selected - 1, 0));
  }

  async nextPage(): Promise<void> {
    if (this.state.page < this.pageCount) {
      await this.loadQueue(this.state.page + 1);
    }
  }

  async previousPage(): Promise<void> {
    if (this.state.page > 1) {
      await this.loadQueue(this.state.page - 1);
    }
  }

  chooseTag(tag: Tag): void {
    this.state.form.tag = tag;
    if (tag !== "Modify") {
      this.state.form.newLabel = null;
    }
    this.state.fieldError = null;
    this.emit();
  }

  chooseLevel(level: Level): void {
    this.state.form.newLabel = level;
    this.state.fieldError = null;
    this.emit();
  }

  setAnnotator(name: string): void {
    this.state.form.annotator = name;
  }

  /** Submit is enabled only with a tag chosen; Modify also needs a level. */
  canSubmit(): boolean {
    const { tag, newLabel } = this.state.form;
    if (tag === null || this.state.busy || this.selectedItem === null) {
      return false;
    }
    return tag !== "Modify" || newLabel !== null;
  }

  dismissNotice(): void {
    this.state.notice = null;
    this.emit();
  }

  private resetForm(): void {
    this.state.form = { ...EMPTY_FORM, annotator: this.state.form.annotator };
    this.state.fieldError = null;
  }

  /**
   * Optimistically removes the item from the pending list, then POSTs.
   * Non-2xx rolls the removal back, except 409 (the server already has a
   * decision, so the item really is gone from pending).
   */
  async submit(): Promise<void> {
    if (!this.canSubmit()) return;
    const item = this.selectedItem!;
    const { tag, newLabel, annotator } = this.state.form;
    const body = buildDecisionBody(tag!, newLabel, annotator);

    const snapshotItems = [...this.state.items];
    const snapshotSelected = this.state.selected;
    const snapshotTotal = this.state.totalPending;

    // optimistic update: drop the item, keep the cursor on the next pending
    this.state.items = this.state.items.filter((it) => it !== item);
    this.state.totalPending = Math.max(0, this.state.totalPending - 1);
    if (this.state.selected >= this.state.items.length) {
      this.state.selected = Math.max(0, this.state.items.length - 1);
    }
    this.state.busy = true;
    this.emit();

    const rollback = () => {
      this.state.items = snapshotItems;
      this.state.selected = snapshotSelected;
      this.state.totalPending = snapshotTotal;
    };

    let result;
    try {
      result = await this.client.submitDecision(item.sentence_id, body);
    } catch (err) {
      rollback();
      this.state.busy = false;
      this.state.banner = `cannot reach server: ${String(err)}`;
      this.emit();
      return;
    }

    this.state.busy = false;
    if (result.ok) {
      this.resetForm();
      if (this.state.items.length === 0) {
        await this.loadQueue(Math.min(this.state.page, this.pageCount));
      }
      await this.refreshStats();
    } else if (result.status === 409) {
      // already decided elsewhere: keep it out of the queue, say so, resync
      this.resetForm();
      this.state.notice = `«${item.sentence_id}» already decided`;
      await this.loadQueue(this.state.page);
      await this.refreshStats();
    } else if (result.status === 422) {
      rollback();
      this.state.fieldError = result.detail;
      this.emit();
    } else {
      rollback();
      this.state.banner = `server error: ${result.detail}`;
      this.emit();
    }
  }

  private async safe<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      return await call();
    } catch (err) {
      this.state.banner = `cannot reach server: ${String(err)}`;
      this.emit();
      return null;
    }
  }
}
