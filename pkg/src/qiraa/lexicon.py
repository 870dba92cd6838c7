"""CEFR-labelled lexicon and the simple/complex discourse-connector lists.

Lemma normalization (applied on load and on lookup): strip the Arabic
diacritics U+064B..U+0652, fold the alef variants أ/إ/آ to bare ا, keep
ta-marbuta distinct from ha.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import EmptyLemma
from .labels import CefrLabel

_DIACRITICS = {chr(cp) for cp in range(0x064B, 0x0653)}
_ALEF_VARIANTS = {"آ": "ا", "أ": "ا", "إ": "ا"}


def normalize_lemma(lemma: str) -> str:
    out = []
    for ch in lemma.strip():
        if ch in _DIACRITICS:
            continue
        out.append(_ALEF_VARIANTS.get(ch, ch))
    return "".join(out)


class Connector(enum.Enum):
    SIMPLE = "Simple"
    COMPLEX = "Complex"


@dataclass
class CefrLexicon:
    """Map of normalized lemma -> CEFR level, with per-lemma source provenance."""

    entries: dict[str, CefrLabel] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, lemma: str) -> CefrLabel | None:
        """Level of a lemma, or None when the lemma is not listed."""
        return self.entries.get(normalize_lemma(lemma))


@dataclass
class ConnectorLists:
    """Discourse-connector lemma sets; simple and complex never overlap."""

    simple: frozenset[str]
    complex: frozenset[str]

    def __post_init__(self):
        overlap = self.simple & self.complex
        if overlap:
            raise ValueError(f"connectors in both lists: {sorted(overlap)}")

    @classmethod
    def from_lemmas(cls, simple, complex) -> "ConnectorLists":
        return cls(
            frozenset(normalize_lemma(x) for x in simple),
            frozenset(normalize_lemma(x) for x in complex),
        )

    def classify(self, lemma: str) -> Connector | None:
        key = normalize_lemma(lemma)
        if key in self.simple:
            return Connector.SIMPLE
        if key in self.complex:
            return Connector.COMPLEX
        return None


def merge_lexicons(lists: list[tuple[str, dict[str, CefrLabel]]]) -> CefrLexicon:
    """Merge ordered source lists; the earliest list mentioning a lemma wins.

    Keys are normalized before merging, so variants that collapse to the
    same normal form count as one lemma.  Raises EmptyLemma on blank keys.
    """
    if not lists:
        raise ValueError("need at least one source list")
    lex = CefrLexicon()
    for source_id, entries in lists:
        for raw, label in entries.items():
            key = normalize_lemma(raw)
            if not key:
                raise EmptyLemma(f"blank lemma in list {source_id!r}: {raw!r}")
            if key in lex.entries:
                continue
            lex.entries[key] = label
            lex.provenance[key] = source_id
    return lex


# ---------------------------------------------------------------------------
# file formats: TSV lexicon (lemma<TAB>level<TAB>source), one-lemma-per-line
# connector lists

def load_lexicon(text: str, default_source: str = "file") -> CefrLexicon:
    lex = CefrLexicon()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"lexicon line {line_no}: need lemma<TAB>level")
        key = normalize_lemma(parts[0])
        if not key:
            raise EmptyLemma(f"lexicon line {line_no}: blank lemma")
        label = CefrLabel.parse(parts[1])
        source = parts[2] if len(parts) > 2 else default_source
        if key not in lex.entries:
            lex.entries[key] = label
            lex.provenance[key] = source
    return lex


def dump_lexicon(lex: CefrLexicon) -> str:
    lines = [
        f"{lemma}\t{label.value}\t{lex.provenance.get(lemma, '')}"
        for lemma, label in lex.entries.items()
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def load_connector_list(text: str) -> frozenset[str]:
    lemmas = set()
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lemmas.add(normalize_lemma(line))
    return frozenset(lemmas)


def load_connectors(simple_text: str, complex_text: str) -> ConnectorLists:
    return ConnectorLists(load_connector_list(simple_text), load_connector_list(complex_text))
