"""Ensemble-disagreement detection and human-triage-driven relabeling.

An instance is flagged when at least ``threshold`` of the five out-of-fold
predictions agree with each other AND that consensus differs from the gold
label.  A human then tags each flagged item Wrong / Modify / Ambiguous /
False; applying the decisions relabels (Modify) or drops (False) sentences.

The decision log is JSON-lines, append-only and flushed per append, so a
crash between appends loses at most the unwritten decision.
"""

from __future__ import annotations

import json
import os
import threading
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corpus import AnnotatedSentence, Dataset
from .errors import (DuplicateDecision, MissingNewLabel, ShapeMismatch,
                     UnknownSentence)
from .labels import CefrLabel

TAGS = ("Wrong", "Modify", "Ambiguous", "False")


@dataclass
class TriageItem:
    sentence_id: str
    text: str
    gold: CefrLabel
    gold_scheme_label: str
    consensus: str
    votes: list[tuple[str, str]]  # (model name, predicted label)
    status: str = "pending"

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "text": self.text,
            "gold": self.gold.value,
            "gold_scheme_label": self.gold_scheme_label,
            "consensus": self.consensus,
            "votes": [{"model": m, "label": lab} for m, lab in self.votes],
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TriageItem":
        return cls(
            sentence_id=d["sentence_id"],
            text=d["text"],
            gold=CefrLabel.parse(d["gold"]),
            gold_scheme_label=d["gold_scheme_label"],
            consensus=d["consensus"],
            votes=[(v["model"], v["label"]) for v in d["votes"]],
            status=d.get("status", "pending"),
        )


@dataclass
class TriageDecision:
    sentence_id: str
    tag: str
    new_label: CefrLabel | None = None
    annotator: str = ""
    timestamp: str = ""
    amends: bool = False

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown triage tag {self.tag!r}")
        if self.tag == "Modify" and self.new_label is None:
            raise MissingNewLabel(f"Modify decision for {self.sentence_id!r} needs a new label")

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "tag": self.tag,
            "new_label": self.new_label.value if self.new_label else None,
            "annotator": self.annotator,
            "timestamp": self.timestamp,
            "amends": self.amends,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TriageDecision":
        new_label = d.get("new_label")
        return cls(
            sentence_id=d["sentence_id"],
            tag=d["tag"],
            new_label=CefrLabel.parse(new_label) if new_label else None,
            annotator=d.get("annotator", ""),
            timestamp=d.get("timestamp", ""),
            amends=d.get("amends", False),
        )


def consensus_label(votes: list[str], threshold: int) -> str | None:
    """The label carried by >= threshold of the votes, if any."""
    label, count = Counter(votes).most_common(1)[0]
    return label if count >= threshold else None


def flag_disagreements(dataset: Dataset, preds, model_names: list[str],
                       threshold: int = 5) -> list[TriageItem]:
    """Flag labelled sentences whose ensemble consensus contradicts gold.

    ``preds`` rows align with ``dataset.labelled_indices()`` and hold the
    scheme-projected out-of-fold predictions of the five classifiers.
    """
    if not 3 <= threshold <= 5:
        raise ValueError(f"threshold must be in [3, 5], got {threshold}")
    labelled = dataset.labelled_indices()
    preds = [list(row) for row in preds]
    if len(preds) != len(labelled):
        raise ShapeMismatch(
            f"{len(preds)} prediction rows for {len(labelled)} labelled sentences")
    if any(len(row) != len(model_names) for row in preds):
        raise ShapeMismatch("prediction row width does not match model_names")

    items = []
    for row, sent_idx in zip(preds, labelled):
        sent = dataset.sentences[sent_idx]
        votes = [str(v) for v in row]
        consensus = consensus_label(votes, threshold)
        gold_label = dataset.scheme_label(sent)
        if consensus is None or consensus == gold_label:
            continue
        items.append(TriageItem(
            sentence_id=sent.id,
            text=sent.text,
            gold=sent.gold,
            gold_scheme_label=gold_label,
            consensus=consensus,
            votes=list(zip(model_names, votes)),
        ))
    items.sort(key=lambda it: it.sentence_id)
    return items


@dataclass
class ChangeLog:
    relabelled: list[dict] = field(default_factory=list)
    excluded: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"relabelled": self.relabelled, "excluded": self.excluded}


def apply_decisions(dataset: Dataset,
                    decisions: list[TriageDecision]) -> tuple[Dataset, ChangeLog]:
    """Relabel (Modify) and drop (False) sentences per the decisions.

    Wrong/Ambiguous leave the dataset untouched.  Raises UnknownSentence
    when a decision references an id absent from the dataset.
    """
    by_id: dict[str, TriageDecision] = {}
    for d in decisions:
        by_id[d.sentence_id] = d  # later decisions (amendments) win

    known = {s.id for s in dataset.sentences}
    for sid in by_id:
        if sid not in known:
            raise UnknownSentence(sid)

    log = ChangeLog()
    out: list[AnnotatedSentence] = []
    for s in dataset.sentences:
        decision = by_id.get(s.id)
        if decision is None or decision.tag in ("Wrong", "Ambiguous"):
            out.append(s)
            continue
        if decision.tag == "False":
            log.excluded.append({"sentence_id": s.id,
                                 "gold": s.gold.value if s.gold else None})
            continue
        # Modify
        before = s.gold.value if s.gold else None
        if before != decision.new_label.value:
            log.relabelled.append({"sentence_id": s.id, "before": before,
                                   "after": decision.new_label.value})
        out.append(replace(s, gold=decision.new_label))
    return Dataset(out, label_scheme=dataset.label_scheme), log


class TriageStore:
    """Flagged items plus an append-only JSONL decision log.

    Every append is flushed and fsync'd before returning; re-deciding an
    item raises DuplicateDecision unless the decision is an explicit amend.
    """

    def __init__(self, items: list[TriageItem], decisions_path: str | Path):
        self.decisions_path = Path(decisions_path)
        self._write_lock = threading.Lock()
        self._items: dict[str, TriageItem] = {}
        for it in items:
            self._items[it.sentence_id] = it
        self._order = sorted(self._items)
        self._decisions: dict[str, TriageDecision] = {}
        if self.decisions_path.exists():
            for line in self.decisions_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._register(TriageDecision.from_dict(json.loads(line)))

    @classmethod
    def open(cls, items_path: str | Path, decisions_path: str | Path) -> "TriageStore":
        raw = json.loads(Path(items_path).read_text(encoding="utf-8"))
        items = [TriageItem.from_dict(d) for d in raw]
        return cls(items, decisions_path)

    def _register(self, d: TriageDecision) -> None:
        self._decisions[d.sentence_id] = d
        item = self._items.get(d.sentence_id)
        if item is not None:
            item.status = "decided"

    def get_item(self, sentence_id: str) -> TriageItem | None:
        return self._items.get(sentence_id)

    def append(self, decision: TriageDecision) -> None:
        with self._write_lock:
            if decision.sentence_id not in self._items:
                raise UnknownSentence(decision.sentence_id)
            if decision.sentence_id in self._decisions and not decision.amends:
                raise DuplicateDecision(decision.sentence_id)
            item = self._items[decision.sentence_id]
            if (decision.tag == "Modify"
                    and decision.new_label is not None
                    and decision.new_label == item.gold):
                raise ValueError(
                    f"Modify for {decision.sentence_id!r} must change the gold label")
            with open(self.decisions_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(decision.to_dict(), sort_keys=True) + "\n")
                f.flush()
                os.fsync(f.fileno())
            self._register(decision)

    def list_items(self, status: str | None = None) -> list[TriageItem]:
        items = [self._items[sid] for sid in self._order]
        if status is not None:
            items = [it for it in items if it.status == status]
        return items

    def decisions(self) -> list[TriageDecision]:
        return [self._decisions[sid] for sid in sorted(self._decisions)]

    def stats(self) -> dict:
        tags = Counter(d.tag for d in self._decisions.values())
        return {
            "total": len(self._items),
            "pending": sum(1 for it in self._items.values() if it.status == "pending"),
            "decided": sum(1 for it in self._items.values() if it.status == "decided"),
            "tags": {tag: tags.get(tag, 0) for tag in TAGS},
        }

    def export_decisions(self) -> str:
        lines = [json.dumps(d.to_dict(), sort_keys=True) for d in self.decisions()]
        return "\n".join(lines) + ("\n" if lines else "")


def load_decisions(text: str) -> list[TriageDecision]:
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append(TriageDecision.from_dict(json.loads(line)))
    return out


def dump_items(items: list[TriageItem]) -> str:
    return json.dumps([it.to_dict() for it in items], ensure_ascii=False,
                      sort_keys=True, indent=2) + "\n"
