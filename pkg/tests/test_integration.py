"""Whole-pipeline flows: dataset -> features (+ embedding block) -> models
-> selection, mirroring the published experiment shapes on synthetic data."""

import dataclasses

import numpy as np
import pytest

from qiraa.corpus import Dataset
from qiraa.embeddings import StoredEmbedding, SentenceVectorStore
from qiraa.evaluation import cross_validate
from qiraa.features import FeaturePipeline
from qiraa.labels import CefrLabel
from qiraa.models import ModelSpec
from qiraa.selection import ablate, rfe


@pytest.fixture(scope="module")
def embedding_corpus(golden_dataset):
    """One sentence signature replicated under all three labels, so the
    linguistic features carry no class signal; the stored sentence vectors
    carry all of it."""
    rng = np.random.default_rng(77)
    template = next(s for s in golden_dataset if s.id == "g1")
    levels = [CefrLabel.A1, CefrLabel.B1, CefrLabel.C1]
    centers = {0: (6.0, 0.0, 0.0), 1: (0.0, 6.0, 0.0), 2: (0.0, 0.0, 6.0)}
    sents, vectors = [], {}
    for i in range(90):
        cls = i % 3
        sid = f"e{i:03d}"
        sents.append(dataclasses.replace(template, id=sid, gold=levels[cls]))
        vectors[sid] = rng.normal(loc=centers[cls], scale=0.5, size=3)
    store = SentenceVectorStore(dim=3, by_id=vectors)
    return Dataset(sents), store


def _featurize(embedding_corpus, golden_lexicon, golden_connectors):
    d, store = embedding_corpus
    pipeline = FeaturePipeline(lexicon=golden_lexicon, connectors=golden_connectors,
                               embedder=StoredEmbedding(store))
    return d, pipeline.featurize(d)


def test_embedding_block_carries_the_signal(embedding_corpus, golden_lexicon,
                                            golden_connectors):
    d, fm = _featurize(embedding_corpus, golden_lexicon, golden_connectors)
    assert fm.values.shape == (90, 37)
    # the 34 linguistic columns are constant across the corpus by design
    assert np.ptp(fm.values[:, :34], axis=0).max() == 0.0

    spec = ModelSpec("softmax", hyperparams={"mode": "batch", "epochs": 60}, seed=1)
    report = cross_validate(spec, fm, d.labels(), k=5, seed=1)
    assert report.f1 >= 0.95  # solvable through the embedding block alone


def test_ablation_mirrors_embedding_dominance(embedding_corpus, golden_lexicon,
                                              golden_connectors):
    d, fm = _featurize(embedding_corpus, golden_lexicon, golden_connectors)
    spec = ModelSpec("softmax", hyperparams={"mode": "batch", "epochs": 60}, seed=2)
    result = ablate(spec, fm, d.labels(),
                    ["POS", "Syntactic", "CEFR", "Embedding"], k=5, seed=2)
    rows = {r["label"]: r for r in result.rows}
    only_emb = rows["only Embedding"]["f1"]
    # the embedding-only run dominates every exclusion row, and removing
    # the embedding block collapses to the chance band
    for label, row in rows.items():
        if label.startswith("exclude"):
            assert only_emb >= row["f1"] - 1e-9, label
    assert rows["exclude Embedding"]["f1"] <= 0.5
    assert only_emb >= 0.95


def test_rfe_puts_embedding_first(embedding_corpus, golden_lexicon,
                                  golden_connectors):
    d, fm = _featurize(embedding_corpus, golden_lexicon, golden_connectors)
    spec = ModelSpec("svm_linear", hyperparams={"epochs": 10}, seed=3)
    result = rfe(spec, fm, d.labels(), step=5, target_count=5, seed=3)
    assert result.ranking[0] == "embedding"
