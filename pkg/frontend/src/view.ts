/** DOM rendering. Arabic sentence text always renders inside a dir="rtl"
 * element with the original string untouched (diacritics included). */

import type { QueueController } from "./controller.js";
import { LEVELS, TAGS } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tagName: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tagName);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function render(root: HTMLElement, controller: QueueController): void {
  const state = controller.state;
  root.replaceChildren();

  if (state.banner) {
    const banner = el("div", "banner", state.banner);
    banner.setAttribute("role", "alert");
    root.appendChild(banner);
  }
  if (state.notice) {
    const notice = el("div", "notice", state.notice);
    const dismiss = el("button", "dismiss", "x");
    dismiss.addEventListener("click", () => controller.dismissNotice());
    notice.appendChild(dismiss);
    root.appendChild(notice);
  }

  root.appendChild(renderStats(controller));

  if (controller.allTriaged) {
    root.appendChild(el("div", "empty-state", "all triaged — nothing pending"));
    return;
  }

  const layout = el("div", "layout");
  layout.appendChild(renderQueue(controller));
  layout.appendChild(renderDetail(controller));
  root.appendChild(layout);
}

function renderStats(controller: QueueController): HTMLElement {
  const stats = controller.state.stats;
  const bar = el("div", "stats");
  if (!stats) {
    bar.appendChild(el("span", "stat", "stats: loading"));
    return bar;
  }
  bar.appendChild(el("span", "stat", `pending ${stats.pending}`));
  bar.appendChild(el("span", "stat", `decided ${stats.decided}`));
  for (const tag of TAGS) {
    bar.appendChild(el("span", "stat", `${tag} ${stats.tags[tag] ?? 0}`));
  }
  return bar;
}

function renderQueue(controller: QueueController): HTMLElement {
  const state = controller.state;
  const pane = el("section", "queue");
  const list = el("ul", "queue-list");
  state.items.forEach((item, index) => {
    const row = el("li", index === state.selected ? "row selected" : "row");
    row.dataset.sentenceId = item.sentence_id;
    const head = el("div", "row-head");
    head.appendChild(el("span", "sid", item.sentence_id));
    head.appendChild(el("span", "gold", `gold ${item.gold}`));
    head.appendChild(el("span", "consensus", `votes → ${item.consensus}`));
    row.appendChild(head);
    const text = el("div", "sentence", item.text);
    text.dir = "rtl";
    text.lang = "ar";
    row.appendChild(text);
    row.addEventListener("click", () => controller.select(index));
    list.appendChild(row);
  });
  pane.appendChild(list);

  const pager = el("div", "pager");
  const prev = el("button", "page-prev", "‹ prev");
  prev.disabled = state.page <= 1;
  prev.addEventListener("click", () => void controller.previousPage());
  const next = el("button", "page-next", "next ›");
  next.disabled = state.page >= controller.pageCount;
  next.addEventListener("click", () => void controller.nextPage());
  pager.appendChild(prev);
  pager.appendChild(el("span", "page-info", `page ${state.page} / ${controller.pageCount}`));
  pager.appendChild(next);
  pane.appendChild(pager);
  return pane;
}

function renderDetail(controller: QueueController): HTMLElement {
  const pane = el("section", "detail");
  const item = controller.selectedItem;
  if (!item) {
    pane.appendChild(el("div", "empty-state", "select an item"));
    return pane;
  }

  const sentence = el("p", "sentence-large", item.text);
  sentence.dir = "rtl";
  sentence.lang = "ar";
  pane.appendChild(sentence);
  pane.appendChild(el("p", "gold-line",
    `gold label ${item.gold} (${item.gold_scheme_label})`));

  const votes = el("table", "votes");
  for (const vote of item.votes) {
    const tr = el("tr");
    tr.appendChild(el("td", "model", vote.model));
    tr.appendChild(el("td", "label", vote.label));
    votes.appendChild(tr);
  }
  pane.appendChild(votes);

  pane.appendChild(renderForm(controller));
  return pane;
}

function renderForm(controller: QueueController): HTMLElement {
  const state = controller.state;
  const form = el("div", "decision-form");

  const tagRow = el("div", "tag-row");
  for (const tag of TAGS) {
    const button = el("button",
      state.form.tag === tag ? "tag active" : "tag", tag);
    button.dataset.tag = tag;
    button.addEventListener("click", () => controller.chooseTag(tag));
    tagRow.appendChild(button);
  }
  form.appendChild(tagRow);

  if (state.form.tag === "Modify") {
    const levelRow = el("div", "level-row");
    for (const level of LEVELS) {
      const button = el("button",
        state.form.newLabel === level ? "level active" : "level", level);
      button.dataset.level = level;
      button.addEventListener("click", () => controller.chooseLevel(level));
      levelRow.appendChild(button);
    }
    form.appendChild(levelRow);
  }

  if (state.fieldError) {
    form.appendChild(el("div", "field-error", state.fieldError));
  }

  const submit = el("button", "submit", "submit decision");
  submit.disabled = !controller.canSubmit();
  submit.addEventListener("click", () => void controller.submit());
  form.appendChild(submit);
  return form;
}
