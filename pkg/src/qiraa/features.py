"""The 34 per-sentence linguistic features and their assembly into matrices.

Denominator conventions (the published feature names do not fix them, so
they are pinned here and mirrored in the tests):

* f1-f3 (type/token ratios, segments per word) run over non-punctuation
  tokens only;
* f4-f10 and f12-f21 are rates over ALL tokens;
* f11 (third-person verb share) divides by the verb count;
* f24 (modifier incidence) divides by the root count;
* f26 is the absolute count of internal nodes, f27 the mean token depth;
* f28-f33 are per-level lookup rates over ALL tokens;
* f34 is the natural-log Shannon entropy of the level distribution over
  matched tokens only (0 when fewer than two tokens match).

Empty denominators yield 0 everywhere, never NaN.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import AnnotatedSentence, Dataset, Token
from .lexicon import CefrLexicon, Connector, ConnectorLists


@dataclass(frozen=True)
class TagInventory:
    """POS tag sets that define the word-category features.

    Defaults follow the MADAMIRA-style tag names; swap the sets to adapt
    any other tagger's inventory.
    """

    noun: frozenset[str] = frozenset({"noun", "noun_num", "noun_quant", "noun_prop"})
    verb: frozenset[str] = frozenset({"verb"})
    adj: frozenset[str] = frozenset({"adj", "adj_comp", "adj_num"})
    pseudo_verb: frozenset[str] = frozenset({"verb_pseudo"})
    conjunction: frozenset[str] = frozenset({"conj"})
    subordinating_conjunction: frozenset[str] = frozenset({"conj_sub"})
    proper_noun: frozenset[str] = frozenset({"noun_prop"})
    pronoun: frozenset[str] = frozenset(
        {"pron", "pron_dem", "pron_exclam", "pron_interrog", "pron_rel"})
    numeric_adj: frozenset[str] = frozenset({"adj_num"})
    comparative_adj: frozenset[str] = frozenset({"adj_comp"})
    punctuation: frozenset[str] = frozenset({"punc"})

    def is_punct(self, tok: Token) -> bool:
        return tok.pos in self.punctuation


@dataclass(frozen=True)
class RelationMap:
    """Dependency-relation sets for the syntactic features.

    Defaults match CATiB-style labels (SBJ/OBJ/MOD/IDF).  Coordination is
    structural: a token participates when its head is a conjunction-tagged
    token.
    """

    subject: frozenset[str] = frozenset({"SBJ"})
    object: frozenset[str] = frozenset({"OBJ"})
    modifier: frozenset[str] = frozenset({"MOD", "IDF"})
    coordination_head_pos: frozenset[str] = frozenset({"conj"})


DEFAULT_INVENTORY = TagInventory()
DEFAULT_RELMAP = RelationMap()

CEFR_LEVEL_ORDER = ("A1", "A2", "B1", "B2", "C1", "C2")

# (name, kind) in published order; kind drives the range invariants:
# rate in [0,1], average >= 0, count >= 0, entropy in [0, ln 6]
FEATURE_SPECS: tuple[tuple[str, str], ...] = (
    ("ttr_forms", "rate"),                 # 1
    ("morphemes_per_word", "average"),     # 2
    ("ttr_lemmas", "rate"),                # 3
    ("noun_rate", "rate"),                 # 4
    ("verb_rate", "rate"),                 # 5
    ("adj_rate", "rate"),                  # 6
    ("pseudo_verb_rate", "rate"),          # 7
    ("passive_verb_rate", "rate"),         # 8
    ("perfective_verb_rate", "rate"),      # 9
    ("imperfective_verb_rate", "rate"),    # 10
    ("third_person_verb_share", "rate"),   # 11
    ("numeric_adj_rate", "rate"),          # 12
    ("comparative_adj_rate", "rate"),      # 13
    ("conjunction_rate", "rate"),          # 14
    ("subordinating_conj_rate", "rate"),   # 15
    ("proper_noun_rate", "rate"),          # 16
    ("pronoun_rate", "rate"),              # 17
    ("punctuation_rate", "rate"),          # 18
    ("simple_connector_rate", "rate"),     # 19
    ("complex_connector_rate", "rate"),    # 20
    ("connector_rate", "rate"),            # 21
    ("subject_rate", "rate"),              # 22
    ("object_rate", "rate"),               # 23
    ("modifier_per_root", "average"),      # 24
    ("coordination_rate", "rate"),         # 25
    ("phrase_count", "count"),             # 26
    ("mean_token_depth", "average"),       # 27
    ("cefr_a1_rate", "rate"),              # 28
    ("cefr_a2_rate", "rate"),              # 29
    ("cefr_b1_rate", "rate"),              # 30
    ("cefr_b2_rate", "rate"),              # 31
    ("cefr_c1_rate", "rate"),              # 32
    ("cefr_c2_rate", "rate"),              # 33
    ("cefr_entropy", "entropy"),           # 34
)

FEATURE_NAMES: tuple[str, ...] = tuple(name for name, _ in FEATURE_SPECS)

FEATURE_GROUPS: dict[str, tuple[int, ...]] = {
    "POS": tuple(range(1, 22)),
    "Syntactic": tuple(range(22, 28)),
    "CEFR": tuple(range(28, 35)),
    "Embedding": (35,),
}


def feature_names() -> list[str]:
    """Stable ordered list of the 34 linguistic feature names."""
    return list(FEATURE_NAMES)


def _rate(count: int, total: int) -> float:
    return count / total if total else 0.0


def extract_pos(s: AnnotatedSentence, cl: ConnectorLists,
                inv: TagInventory = DEFAULT_INVENTORY) -> list[float]:
    """Features 1-21: word-category and connector rates."""
    toks = s.tokens
    n = len(toks)
    non_punct = [t for t in toks if not inv.is_punct(t)]
    np_count = len(non_punct)

    distinct_forms = len({t.form for t in non_punct})
    distinct_lemmas = len({t.lemma for t in non_punct})
    mean_seg = sum(t.seg_count for t in non_punct) / np_count if np_count else 0.0

    verbs = [t for t in toks if t.pos in inv.verb]
    n_verbs = len(verbs)

    def count(pred) -> int:
        return sum(1 for t in toks if pred(t))

    n_passive = sum(1 for t in verbs if t.feats.voice == "passive")
    n_perf = sum(1 for t in verbs if t.feats.aspect == "perfective")
    n_imperf = sum(1 for t in verbs if t.feats.aspect == "imperfective")
    n_third = sum(1 for t in verbs if t.feats.person == "3")

    n_num_adj = count(lambda t: t.pos in inv.numeric_adj
                      or (t.pos in inv.adj and t.feats.numeric))
    n_comp_adj = count(lambda t: t.pos in inv.comparative_adj
                       or (t.pos in inv.adj and t.feats.comparative))
    n_proper = count(lambda t: t.pos in inv.proper_noun or t.feats.proper)

    connector_kinds = [cl.classify(t.lemma) for t in toks]
    n_simple = sum(1 for k in connector_kinds if k is Connector.SIMPLE)
    n_complex = sum(1 for k in connector_kinds if k is Connector.COMPLEX)

    simple_rate = _rate(n_simple, n)
    complex_rate = _rate(n_complex, n)

    return [
        _rate(distinct_forms, np_count),
        mean_seg,
        _rate(distinct_lemmas, np_count),
        _rate(count(lambda t: t.pos in inv.noun), n),
        _rate(n_verbs, n),
        _rate(count(lambda t: t.pos in inv.adj), n),
        _rate(count(lambda t: t.pos in inv.pseudo_verb), n),
        _rate(n_passive, n),
        _rate(n_perf, n),
        _rate(n_imperf, n),
        _rate(n_third, n_verbs),
        _rate(n_num_adj, n),
        _rate(n_comp_adj, n),
        _rate(count(lambda t: t.pos in inv.conjunction), n),
        _rate(count(lambda t: t.pos in inv.subordinating_conjunction), n),
        _rate(n_proper, n),
        _rate(count(lambda t: t.pos in inv.pronoun), n),
        _rate(count(lambda t: t.pos in inv.punctuation), n),
        simple_rate,
        complex_rate,
        simple_rate + complex_rate,
    ]


def extract_syntactic(s: AnnotatedSentence,
                      relmap: RelationMap = DEFAULT_RELMAP) -> list[float]:
    """Features 22-27: dependency-structure measures."""
    toks = s.tokens
    n = len(toks)
    n_subject = sum(1 for t in toks if t.deprel in relmap.subject)
    n_object = sum(1 for t in toks if t.deprel in relmap.object)
    n_modifier = sum(1 for t in toks if t.deprel in relmap.modifier)
    n_roots = sum(1 for t in toks if t.head == 0)

    n_coord = sum(
        1 for t in toks
        if t.head != 0 and toks[t.head - 1].pos in relmap.coordination_head_pos
    )

    has_dependent = set()
    for t in toks:
        if t.head != 0:
            has_dependent.add(t.head)
    n_internal = len(has_dependent)

    depths = s.depths()
    mean_depth = sum(depths) / n if n else 0.0

    return [
        _rate(n_subject, n),
        _rate(n_object, n),
        _rate(n_modifier, n_roots),
        _rate(n_coord, n),
        float(n_internal),
        mean_depth,
    ]


def extract_cefr(s: AnnotatedSentence, lex: CefrLexicon) -> list[float]:
    """Features 28-34: per-level lookup rates and the level entropy."""
    toks = s.tokens
    n = len(toks)
    matched = [lex.lookup(t.lemma) for t in toks]
    matched = [m for m in matched if m is not None]
    counts = Counter(m.value for m in matched)

    rates = [_rate(counts.get(level, 0), n) for level in CEFR_LEVEL_ORDER]

    m = len(matched)
    if m <= 1:
        entropy = 0.0
    else:
        entropy = 0.0
        for c in counts.values():
            p = c / m
            entropy -= p * math.log(p)
    return rates + [entropy]


def extract_linguistic(s: AnnotatedSentence, lex: CefrLexicon, cl: ConnectorLists,
                       inv: TagInventory = DEFAULT_INVENTORY,
                       relmap: RelationMap = DEFAULT_RELMAP) -> np.ndarray:
    """All 34 features of one sentence, in published order."""
    values = (extract_pos(s, cl, inv)
              + extract_syntactic(s, relmap)
              + extract_cefr(s, lex))
    return np.asarray(values, dtype=np.float64)


@dataclass
class FeatureMatrix:
    """Row-per-sentence feature values with their column names.

    The first 34 columns are always the linguistic features; an optional
    embedding block follows, its columns named ``emb_0..emb_{d-1}``.
    """

    values: np.ndarray
    names: list[str]
    sentence_ids: list[str] = field(default_factory=list)
    embedding_dim: int = 0

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError("values shape does not match names")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def group_columns(self, group: str) -> list[int]:
        """Column indices belonging to a feature group (POS/Syntactic/CEFR/Embedding)."""
        if group == "Embedding":
            return list(range(34, self.values.shape[1]))
        return [i - 1 for i in FEATURE_GROUPS[group]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sent_id"] + self.names)
        for i in range(self.n_rows):
            sid = self.sentence_ids[i] if self.sentence_ids else str(i)
            writer.writerow([sid] + [repr(v) for v in self.values[i].tolist()])
        return buf.getvalue()


class EmbeddingProvider:
    """Interface: maps a sentence to its embedding vector."""

    dim: int

    def vector(self, s: AnnotatedSentence) -> np.ndarray:
        raise NotImplementedError


@dataclass
class FeaturePipeline:
    """Featurization configuration bundle; apply identically at train and eval time."""

    lexicon: CefrLexicon
    connectors: ConnectorLists
    inventory: TagInventory = DEFAULT_INVENTORY
    relmap: RelationMap = DEFAULT_RELMAP
    embedder: EmbeddingProvider | None = None

    def featurize_sentence(self, s: AnnotatedSentence) -> np.ndarray:
        row = extract_linguistic(s, self.lexicon, self.connectors,
                                 self.inventory, self.relmap)
        if self.embedder is not None:
            row = np.concatenate([row, self.embedder.vector(s)])
        return row

    def featurize(self, dataset: Dataset) -> FeatureMatrix:
        return featurize(dataset, self.lexicon, self.connectors,
                         self.inventory, self.relmap, self.embedder)

    @property
    def names(self) -> list[str]:
        names = feature_names()
        if self.embedder is not None:
            names += [f"emb_{i}" for i in range(self.embedder.dim)]
        return names


def featurize(dataset: Dataset, lex: CefrLexicon, cl: ConnectorLists,
              inv: TagInventory = DEFAULT_INVENTORY,
              relmap: RelationMap = DEFAULT_RELMAP,
              emb: EmbeddingProvider | None = None) -> FeatureMatrix:
    """Feature matrix for a whole dataset, rows in dataset order."""
    names = feature_names()
    dim = emb.dim if emb is not None else 0
    if emb is not None:
        names += [f"emb_{i}" for i in range(dim)]

    rows = np.empty((len(dataset.sentences), 34 + dim), dtype=np.float64)
    for i, s in enumerate(dataset.sentences):
        rows[i, :34] = extract_linguistic(s, lex, cl, inv, relmap)
        if emb is not None:
            vec = np.asarray(emb.vector(s), dtype=np.float64)
            if vec.shape != (dim,):
                from .errors import DimMismatch
                raise DimMismatch(s.id)
            rows[i, 34:] = vec
    return FeatureMatrix(rows, names, [s.id for s in dataset.sentences], embedding_dim=dim)
