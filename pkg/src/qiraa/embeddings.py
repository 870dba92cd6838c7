"""Sentence vectors: tf-idf-weighted composition of word vectors, or
precomputed vectors loaded from file.

Composition over a sentence of n tokens w_1..w_n:

    vec(s) = (1/n) * sum_i tf(w_i, s) * idf(w_i) * wordvec(w_i)

with the smoothed idf(t) = ln((1+N)/(1+df(t))) + 1 fitted over the training
sentences (one sentence = one document).  Tokens without a word vector
contribute zero but still count in n.  The lookup key is the surface form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log

import numpy as np

from .corpus import AnnotatedSentence, Dataset
from .errors import BadHeader, DimMismatch, DuplicateId, MissingVector
from .features import EmbeddingProvider


@dataclass
class WordVectorTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_word_vectors(data: bytes | str) -> WordVectorTable:
    """Parse fastText-style ``.vec`` text: header ``<count> <dim>``, then
    one ``word v1 .. v_dim`` line per word.  Duplicate words keep the first
    occurrence.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines:
        raise BadHeader("empty vector file")
    header = lines[0].split()
    if len(header) != 2:
        raise BadHeader(f"expected '<count> <dim>' header, got {lines[0]!r}")
    try:
        _count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise BadHeader(f"non-numeric header {lines[0]!r}") from None
    if dim < 1:
        raise BadHeader(f"dimension must be positive, got {dim}")

    table = WordVectorTable(dim=dim)
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        if len(parts) != dim + 1:
            raise DimMismatch(line_no)
        word = parts[0]
        if word in table.vectors:
            continue
        try:
            vec = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError:
            raise DimMismatch(line_no) from None
        table.vectors[word] = vec
    return table


@dataclass
class TfidfWeights:
    idf: dict[str, float]
    doc_count: int

    def idf_of(self, term: str) -> float:
        """Smoothed idf; unseen terms get the df=0 limit ln(1+N)+1."""
        val = self.idf.get(term)
        if val is None:
            return log(1.0 + self.doc_count) + 1.0
        return val


def fit_tfidf(dataset: Dataset) -> TfidfWeights:
    """Document frequencies over the dataset's sentences (forms as terms)."""
    if not dataset.sentences:
        raise ValueError("cannot fit tf-idf on an empty dataset")
    n_docs = len(dataset.sentences)
    df: dict[str, int] = {}
    for s in dataset.sentences:
        for form in {t.form for t in s.tokens}:
            df[form] = df.get(form, 0) + 1
    idf = {term: log((1.0 + n_docs) / (1.0 + d)) + 1.0 for term, d in df.items()}
    return TfidfWeights(idf=idf, doc_count=n_docs)


def compose_sentence(s: AnnotatedSentence, wv: WordVectorTable,
                     tw: TfidfWeights, unit_norm: bool = False) -> np.ndarray:
    """tf-idf-weighted mean of the word vectors of a sentence's tokens.

    ``unit_norm`` additionally rescales the result to unit L2 norm
    (off by default).
    """
    n = len(s.tokens)
    counts: dict[str, int] = {}
    for t in s.tokens:
        counts[t.form] = counts.get(t.form, 0) + 1

    acc = np.zeros(wv.dim, dtype=np.float64)
    for t in s.tokens:
        vec = wv.vectors.get(t.form)
        if vec is None:
            continue
        acc += (counts[t.form] * tw.idf_of(t.form)) * vec
    acc /= n
    if unit_norm:
        norm = float(np.linalg.norm(acc))
        if norm > 0.0:
            acc = acc / norm
    return acc


@dataclass
class SentenceVectorStore:
    dim: int
    by_id: dict[str, np.ndarray] = field(default_factory=dict)


def load_sentence_vectors(data: bytes | str) -> SentenceVectorStore:
    """Parse precomputed sentence vectors: TSV ``sent_id<TAB>v1,v2,...``.

    The first row fixes the dimension; later rows must match.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    store: SentenceVectorStore | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sent_id, _, values = line.partition("\t")
        if not values:
            raise DimMismatch(sent_id)
        vec = np.asarray([float(x) for x in values.split(",")], dtype=np.float64)
        if store is None:
            store = SentenceVectorStore(dim=len(vec))
        elif len(vec) != store.dim:
            raise DimMismatch(sent_id)
        if sent_id in store.by_id:
            raise DuplicateId(sent_id)
        store.by_id[sent_id] = vec
    if store is None:
        store = SentenceVectorStore(dim=0)
    return store


class ComposedEmbedding(EmbeddingProvider):
    """Embedding provider backed by word vectors + fitted tf-idf weights."""

    def __init__(self, wv: WordVectorTable, tw: TfidfWeights, unit_norm: bool = False):
        self.wv = wv
        self.tw = tw
        self.unit_norm = unit_norm
        self.dim = wv.dim

    def vector(self, s: AnnotatedSentence) -> np.ndarray:
        return compose_sentence(s, self.wv, self.tw, self.unit_norm)


class StoredEmbedding(EmbeddingProvider):
    """Embedding provider backed by a precomputed sentence-vector store."""

    def __init__(self, store: SentenceVectorStore):
        self.store = store
        self.dim = store.dim

    def vector(self, s: AnnotatedSentence) -> np.ndarray:
        vec = self.store.by_id.get(s.id)
        if vec is None:
            raise MissingVector(s.id)
        return vec
