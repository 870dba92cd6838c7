"""Sentence/token domain types and ingestion of annotated corpora.

The on-disk format is CoNLL-U extended: the standard ten tab-separated
columns, with morph attributes carried in FEATS (``asp=``, ``vox=``,
``per=``, ``prop=``, ``num=``, ``comp=``) and the segment count in MISC
(``seg=<n>``).  Per-sentence metadata lives in comment lines with the
case-sensitive keys ``sent_id``, ``cefr``, ``source`` and ``genre``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import CyclicTree, MalformedLine, TooFewInstances, UnknownLabel
from .labels import CefrLabel

ASPECTS = ("perfective", "imperfective", "command", "none")
VOICES = ("active", "passive", "none")
PERSONS = ("1", "2", "3", "none")

# short codes used in the FEATS column
_ASPECT_CODES = {"perf": "perfective", "imperf": "imperfective", "cmd": "command",
                 "p": "perfective", "i": "imperfective", "c": "command"}
_VOICE_CODES = {"act": "active", "pass": "passive", "a": "active", "p": "passive"}
_ASPECT_OUT = {"perfective": "perf", "imperfective": "imperf", "command": "cmd"}
_VOICE_OUT = {"active": "act", "passive": "pass"}

LABEL_SCHEMES = ("five_way", "three_way", "binary")


@dataclass(frozen=True)
class MorphFeats:
    """Morphological attributes of a token; absent annotations default to none/False."""

    aspect: str = "none"
    voice: str = "none"
    person: str = "none"
    proper: bool = False
    numeric: bool = False
    comparative: bool = False


@dataclass(frozen=True)
class Token:
    """A single annotated token.

    ``head`` follows CoNLL-U numbering: 0 means the token is a root,
    any other value is the 1-based index of the head token.
    """

    index: int
    form: str
    lemma: str
    pos: str
    feats: MorphFeats = MorphFeats()
    seg_count: int = 1
    head: int = 0
    deprel: str = "---"

    def __post_init__(self):
        # cycles (incl. self-heads) are a sentence-level concern: see
        # AnnotatedSentence.validate_tree, which raises CyclicTree
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.seg_count < 1:
            raise ValueError(f"seg_count must be >= 1, got {self.seg_count}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")


@dataclass(frozen=True)
class AnnotatedSentence:
    id: str
    tokens: tuple[Token, ...]
    gold: CefrLabel | None = None
    source: str = ""
    genre: str | None = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"sentence {self.id!r} has no tokens")
        for i, tok in enumerate(self.tokens, start=1):
            if tok.index != i:
                raise ValueError(f"sentence {self.id!r}: token indices not contiguous at {i}")

    @property
    def text(self) -> str:
        return " ".join(t.form for t in self.tokens)

    def depths(self) -> list[int]:
        """Distance of every token from its nearest root (root depth = 0).

        Raises CyclicTree if any head chain never reaches a root.
        """
        n = len(self.tokens)
        depth = [-1] * n
        for start in range(n):
            if depth[start] >= 0:
                continue
            chain = []
            cur = start
            while True:
                if cur in chain:
                    raise CyclicTree(self.id)
                chain.append(cur)
                head = self.tokens[cur].head
                if head == 0:
                    base = 0
                    break
                nxt = head - 1
                if not (0 <= nxt < n):
                    raise ValueError(f"sentence {self.id!r}: head {head} out of range")
                if depth[nxt] >= 0:
                    base = depth[nxt] + 1
                    break
                cur = nxt
            for node in reversed(chain):
                depth[node] = base
                base += 1
        return depth

    def validate_tree(self) -> None:
        """Check head ranges and acyclicity; raises on violation."""
        n = len(self.tokens)
        for tok in self.tokens:
            if tok.head == tok.index:
                raise CyclicTree(self.id)
            if not (0 <= tok.head <= n):
                raise ValueError(f"sentence {self.id!r}: head {tok.head} out of range")
        self.depths()


@dataclass
class Dataset:
    """An ordered collection of sentences plus the label scheme in force."""

    sentences: list[AnnotatedSentence]
    label_scheme: str = "three_way"

    def __post_init__(self):
        if self.label_scheme not in LABEL_SCHEMES:
            raise ValueError(f"unknown label scheme {self.label_scheme!r}")
        for s in self.sentences:
            if s.gold is not None and not _valid_under(s.gold, self.label_scheme):
                raise UnknownLabel(s.id, s.gold.value)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def labelled_indices(self) -> list[int]:
        return [i for i, s in enumerate(self.sentences) if s.gold is not None]

    def scheme_label(self, sentence: AnnotatedSentence) -> str:
        """Project the sentence's gold label onto this dataset's scheme."""
        assert sentence.gold is not None
        return project_label(sentence.gold, self.label_scheme)

    def labels(self) -> list[str]:
        """Scheme-projected labels of the labelled sentences, in dataset order."""
        return [self.scheme_label(s) for s in self.sentences if s.gold is not None]

    def histogram(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for s in self.sentences:
            if s.gold is not None:
                key = self.scheme_label(s)
                counts[key] = counts.get(key, 0) + 1
        return counts


def project_label(label: CefrLabel, scheme: str) -> str:
    if scheme == "five_way":
        return label.value
    if scheme == "three_way":
        return label.coarse()
    if scheme == "binary":
        return label.binary()
    raise ValueError(f"unknown label scheme {scheme!r}")


def _valid_under(label: CefrLabel, scheme: str) -> bool:
    # five_way covers the five attested sub-levels (no C2 granularity in the data)
    if scheme == "five_way":
        return label is not CefrLabel.C2
    return True


# ---------------------------------------------------------------------------
# parsing / serialization

_COMMENT_KEYS = ("sent_id", "cefr", "source", "genre")


def parse_annotated(data: bytes | str, fmt: str = "conllu_ext") -> Dataset:
    """Parse a CoNLL-U-extended byte stream into a Dataset.

    Sentence blocks are separated by blank lines; each token line has ten
    tab-separated columns.  Raises MalformedLine, CyclicTree or UnknownLabel
    on the corresponding defects.
    """
    if fmt != "conllu_ext":
        raise ValueError(f"unknown corpus format {fmt!r}")
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data

    sentences: list[AnnotatedSentence] = []
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    auto_id = 0

    def flush():
        nonlocal auto_id, meta, rows
        if not rows and not meta:
            return
        auto_id += 1
        sent_id = meta.get("sent_id", f"s{auto_id}")
        gold = None
        if "cefr" in meta:
            try:
                gold = CefrLabel.parse(meta["cefr"])
            except ValueError:
                raise UnknownLabel(sent_id, meta["cefr"]) from None
        tokens = []
        for line_no, cols in rows:
            tokens.append(_parse_token(line_no, cols))
        if not tokens:
            meta, rows = {}, []
            return  # comment-only block carries no sentence
        for (line_no, _), tok in zip(rows, tokens):
            if not (0 <= tok.head <= len(tokens)):
                raise MalformedLine(line_no, f"head {tok.head} out of range 0..{len(tokens)}")
            if tok.head == tok.index:
                raise CyclicTree(sent_id)
        sent = AnnotatedSentence(
            id=sent_id,
            tokens=tuple(tokens),
            gold=gold,
            source=meta.get("source", ""),
            genre=meta.get("genre"),
        )
        sent.validate_tree()
        sentences.append(sent)
        meta, rows = {}, []

    for line_no, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\n")
        if line == "":
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                key = key.strip()
                if key in _COMMENT_KEYS:
                    meta[key] = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise MalformedLine(line_no, f"expected 10 columns, got {len(cols)}")
        rows.append((line_no, cols))
    flush()

    return Dataset(sentences, label_scheme="three_way")


def _parse_token(line_no: int, cols: list[str]) -> Token:
    try:
        index = int(cols[0])
    except ValueError:
        raise MalformedLine(line_no, f"bad token index {cols[0]!r}") from None
    if index < 1:
        raise MalformedLine(line_no, f"token index must be >= 1, got {index}")
    try:
        head = int(cols[6])
    except ValueError:
        raise MalformedLine(line_no, f"bad head {cols[6]!r}") from None
    if head < 0:
        raise MalformedLine(line_no, f"head must be >= 0, got {head}")
    feats = _parse_feats(cols[5])
    seg = 1
    for item in _split_kv(cols[9]):
        if item[0] == "seg":
            try:
                seg = int(item[1])
            except ValueError:
                raise MalformedLine(line_no, f"bad seg count {item[1]!r}") from None
    if seg < 1:
        raise MalformedLine(line_no, f"seg count must be >= 1, got {seg}")
    return Token(
        index=index,
        form=cols[1],
        lemma=cols[2],
        pos=cols[3],
        feats=feats,
        seg_count=seg,
        head=head,
        deprel=cols[7],
    )


def _split_kv(column: str):
    if column == "_":
        return
    for pair in column.split("|"):
        if "=" in pair:
            key, value = pair.split("=", 1)
            yield key.strip(), value.strip()


def _parse_feats(column: str) -> MorphFeats:
    aspect = voice = person = "none"
    proper = numeric = comparative = False
    for key, value in _split_kv(column):
        low = value.lower()
        if key == "asp":
            aspect = _ASPECT_CODES.get(low, low if low in ASPECTS else "none")
        elif key == "vox":
            voice = _VOICE_CODES.get(low, low if low in VOICES else "none")
        elif key == "per":
            person = low if low in PERSONS else "none"
        elif key == "prop":
            proper = low in ("yes", "true", "1")
        elif key == "num":
            numeric = low in ("yes", "true", "1")
        elif key == "comp":
            comparative = low in ("yes", "true", "1")
    return MorphFeats(aspect, voice, person, proper, numeric, comparative)


def _feats_column(f: MorphFeats) -> str:
    parts = []
    if f.aspect != "none":
        parts.append(f"asp={_ASPECT_OUT[f.aspect]}")
    if f.voice != "none":
        parts.append(f"vox={_VOICE_OUT[f.voice]}")
    if f.person != "none":
        parts.append(f"per={f.person}")
    if f.proper:
        parts.append("prop=yes")
    if f.numeric:
        parts.append("num=yes")
    if f.comparative:
        parts.append("comp=yes")
    return "|".join(parts) if parts else "_"


def serialize(dataset: Dataset) -> str:
    """Render a Dataset back to CoNLL-U-extended text (LF line endings)."""
    out: list[str] = []
    for s in dataset.sentences:
        out.append(f"# sent_id = {s.id}")
        if s.gold is not None:
            out.append(f"# cefr = {s.gold.value}")
        if s.source:
            out.append(f"# source = {s.source}")
        if s.genre is not None:
            out.append(f"# genre = {s.genre}")
        for t in s.tokens:
            misc = f"seg={t.seg_count}"
            out.append("\t".join([
                str(t.index), t.form, t.lemma, t.pos, "_",
                _feats_column(t.feats), str(t.head), t.deprel, "_", misc,
            ]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# fold splitting

def stratified_fold_indices(labels: list[str], k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold partitions over positions 0..len(labels)-1.

    Test sets are disjoint and cover every position exactly once; per-fold
    class counts are within one instance of an even split.  Deterministic
    for a fixed seed.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = len(labels)
    by_class: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    for cls, idx in by_class.items():
        if len(idx) < k:
            raise TooFewInstances(cls, len(idx), k)

    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    offset = 0
    for cls in sorted(by_class):
        idx = np.asarray(by_class[cls])
        rng.shuffle(idx)
        # deal the shuffled class members round-robin across folds, rotating
        # the starting fold per class so remainders spread evenly
        for pos, i in enumerate(idx):
            fold_of[i] = (offset + pos) % k
        offset += len(idx)

    partitions = []
    all_idx = np.arange(n)
    for f in range(k):
        test = all_idx[fold_of == f]
        train = all_idx[fold_of != f]
        partitions.append((train, test))
    return partitions


def plain_fold_indices(n: int, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Unstratified shuffled k-fold over 0..n-1; k = n gives leave-one-out."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds {n} instances")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    for pos, i in enumerate(perm):
        fold_of[i] = pos % k
    all_idx = np.arange(n)
    return [(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]


def stratified_folds(dataset: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified folds over a Dataset's labelled sentences.

    Returned indices point into ``dataset.sentences``.
    """
    labelled = dataset.labelled_indices()
    labels = [dataset.scheme_label(dataset.sentences[i]) for i in labelled]
    base = np.asarray(labelled)
    return [(base[tr], base[te]) for tr, te in stratified_fold_indices(labels, k, seed)]
