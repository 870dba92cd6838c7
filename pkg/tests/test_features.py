import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from oracles import entropy_from_counts, oracle_features
from qiraa.corpus import AnnotatedSentence, Dataset, MorphFeats, Token
from qiraa.features import (FEATURE_GROUPS, FEATURE_NAMES, FEATURE_SPECS,
                            FeaturePipeline, extract_cefr, extract_linguistic,
                            extract_pos, extract_syntactic, feature_names,
                            featurize)
from qiraa.lexicon import CefrLexicon, ConnectorLists


def _to_float(fraction_str):
    return float(Fraction(fraction_str))


def test_feature_name_list_stable():
    names = feature_names()
    assert len(names) == 34
    assert names == list(FEATURE_NAMES)
    assert names[0] == "ttr_forms"
    assert names[33] == "cefr_entropy"


def test_groups_partition_1_to_35():
    seen = sorted(i for idx in FEATURE_GROUPS.values() for i in idx)
    assert seen == list(range(1, 36))


class TestGoldenSuite:
    """The five hand-annotated sentences must reproduce the hand-computed
    fractions exactly; the fractions themselves are cross-checked against
    an independent Fraction-arithmetic oracle."""

    def test_fixture_matches_independent_oracle(self, golden_dataset, golden_expected,
                                                lexicon_rows, connector_lemmas):
        simple, cplx = connector_lemmas
        for sent in golden_dataset:
            expected = golden_expected[sent.id]
            oracle_vals, oracle_counts = oracle_features(sent, lexicon_rows, simple, cplx)
            for i, (got, want) in enumerate(zip(oracle_vals[:33], expected["values"][:33])):
                assert got == Fraction(want), f"{sent.id} f{i+1}: oracle {got} != fixture {want}"
            assert oracle_counts == expected["matched_level_counts"]

    def test_implementation_matches_fixture_exactly(self, golden_dataset, golden_lexicon,
                                                    golden_connectors, golden_expected):
        for sent in golden_dataset:
            expected = golden_expected[sent.id]
            got = extract_linguistic(sent, golden_lexicon, golden_connectors)
            for i in range(33):
                want = float(Fraction(expected["values"][i]))
                assert got[i] == want, f"{sent.id} f{i+1}: {got[i]!r} != {want!r}"
            want_entropy = entropy_from_counts(expected["matched_level_counts"])
            assert got[33] == pytest.approx(want_entropy, abs=1e-12)

    def test_entropy_special_cases(self, golden_dataset, golden_lexicon, golden_connectors):
        by_id = {s.id: s for s in golden_dataset}
        # all matched lemmas share one level -> zero entropy
        assert extract_cefr(by_id["g4"], golden_lexicon)[6] == 0.0
        # two levels, one match each -> ln 2
        assert extract_cefr(by_id["g3"], golden_lexicon)[6] == pytest.approx(math.log(2), abs=1e-12)


def _sentence(tokens):
    return AnnotatedSentence(id="t", tokens=tuple(tokens))


def _tok(i, form, lemma, pos, head=0, deprel="---", **feats):
    seg = feats.pop("seg", 1)
    return Token(index=i, form=form, lemma=lemma, pos=pos,
                 feats=MorphFeats(**feats), seg_count=seg, head=head, deprel=deprel)


@pytest.fixture
def empty_lexicon():
    return CefrLexicon()


@pytest.fixture
def empty_connectors():
    return ConnectorLists(frozenset(), frozenset())


def test_ttr_with_repeated_form_and_punct(empty_connectors):
    s = _sentence([
        _tok(1, "a", "a", "noun"),
        _tok(2, "b", "b", "noun", head=1, deprel="MOD"),
        _tok(3, "a", "a", "noun", head=1, deprel="MOD"),
        _tok(4, ".", ".", "punc", head=1, deprel="PNX"),
    ])
    vals = extract_pos(s, empty_connectors)
    assert vals[0] == 2 / 3


def test_all_nouns(empty_connectors):
    s = _sentence([_tok(i, f"w{i}", f"w{i}", "noun", head=0 if i == 1 else 1,
                        deprel="---" if i == 1 else "MOD")
                   for i in range(1, 6)])
    vals = extract_pos(s, empty_connectors)
    assert vals[3] == 1.0  # noun rate
    assert vals[4] == 0.0  # verb rate


def test_verb_aspect_rates_hand_counted(empty_connectors):
    # verbs tagged perfective, imperfective, perfective among 6 tokens
    s = _sentence([
        _tok(1, "v1", "v1", "verb", aspect="perfective", person="3"),
        _tok(2, "v2", "v2", "verb", head=1, deprel="MOD", aspect="imperfective", person="1"),
        _tok(3, "v3", "v3", "verb", head=1, deprel="MOD", aspect="perfective", person="3"),
        _tok(4, "n1", "n1", "noun", head=1, deprel="SBJ"),
        _tok(5, "n2", "n2", "noun", head=1, deprel="OBJ"),
        _tok(6, "n3", "n3", "noun", head=1, deprel="MOD"),
    ])
    vals = extract_pos(s, empty_connectors)
    assert vals[8] == 2 / 6   # perfective rate
    assert vals[9] == 1 / 6   # imperfective rate
    assert vals[10] == 2 / 3  # third-person share over the 3 verbs


def test_star_tree_syntactic():
    s = _sentence([
        _tok(1, "r", "r", "verb"),
        _tok(2, "a", "a", "noun", head=1, deprel="SBJ"),
        _tok(3, "b", "b", "noun", head=1, deprel="OBJ"),
    ])
    vals = extract_syntactic(s)
    assert vals[4] == 1.0                 # one internal node
    assert vals[5] == pytest.approx((0 + 1 + 1) / 3)


def test_chain_tree_depths():
    # chain a <- b <- c with c the root
    s = _sentence([
        _tok(1, "a", "a", "noun", head=2, deprel="MOD"),
        _tok(2, "b", "b", "noun", head=3, deprel="MOD"),
        _tok(3, "c", "c", "verb", head=0),
    ])
    vals = extract_syntactic(s)
    assert vals[5] == pytest.approx(1.0)  # (2 + 1 + 0) / 3
    assert vals[4] == 2.0


def test_subject_rate():
    toks = [_tok(1, "r", "r", "verb")]
    toks += [_tok(i, f"w{i}", f"w{i}", "noun", head=1,
                  deprel="SBJ" if i in (2, 3) else "MOD")
             for i in range(2, 11)]
    vals = extract_syntactic(_sentence(toks))
    assert vals[0] == 0.2


def test_cefr_rates_with_partial_matches(empty_connectors):
    lex = CefrLexicon()
    from qiraa.labels import CefrLabel
    lex.entries["w1"] = CefrLabel.A2
    lex.entries["w2"] = CefrLabel.A2
    lex.entries["w3"] = CefrLabel.A2
    toks = [_tok(1, "r", "r", "verb")]
    toks += [_tok(i, f"w{i-1}", f"w{i-1}", "noun", head=1, deprel="MOD")
             for i in range(2, 11)]
    vals = extract_cefr(_sentence(toks), lex)
    assert vals[1] == 0.3  # 3 matches of A2 among 10 tokens
    assert vals[6] == 0.0  # single matched level


def test_empty_denominators_give_zero(empty_lexicon, empty_connectors):
    s = _sentence([_tok(1, ".", ".", "punc")])
    row = extract_linguistic(s, empty_lexicon, empty_connectors)
    assert np.isfinite(row).all()
    assert row[0] == 0.0 and row[10] == 0.0


def test_rate_bounds_and_identities(golden_dataset, golden_lexicon, golden_connectors):
    for sent in golden_dataset:
        row = extract_linguistic(sent, golden_lexicon, golden_connectors)
        for (name, kind), value in zip(FEATURE_SPECS, row):
            if kind == "rate":
                assert 0.0 <= value <= 1.0, (sent.id, name, value)
            else:
                assert value >= 0.0, (sent.id, name, value)
        assert row[20] == row[18] + row[19]          # f21 = f19 + f20
        assert row[27:33].sum() <= 1.0 + 1e-12       # level rates leave room for unmatched
        assert row[33] <= math.log(6) + 1e-12        # entropy bound


def test_disjoint_inventory_tag_rates_sum_below_one(golden_dataset, golden_connectors):
    # with mutually exclusive tag sets, the category rates partition the
    # tokens, so their sum cannot exceed 1
    from qiraa.features import TagInventory

    disjoint = TagInventory(
        noun=frozenset({"noun"}),
        verb=frozenset({"verb"}),
        adj=frozenset({"adj"}),
        pseudo_verb=frozenset({"verb_pseudo"}),
        conjunction=frozenset({"conj"}),
        subordinating_conjunction=frozenset({"conj_sub"}),
        proper_noun=frozenset({"noun_prop"}),
        pronoun=frozenset({"pron", "pron_dem"}),
        punctuation=frozenset({"punc"}),
    )
    for sent in golden_dataset:
        vals = extract_pos(sent, golden_connectors, disjoint)
        disjoint_rates = [vals[i] for i in (3, 4, 5, 6, 13, 14, 15, 16, 17)]
        assert sum(disjoint_rates) <= 1.0 + 1e-12, sent.id


def test_single_matched_token_entropy_zero(empty_connectors):
    from qiraa.labels import CefrLabel

    lex = CefrLexicon()
    lex.entries["w1"] = CefrLabel.B2
    s = _sentence([_tok(1, "w1", "w1", "noun"),
                   _tok(2, "zz", "zz", "noun", head=1, deprel="MOD")])
    vals = extract_cefr(s, lex)
    assert vals[3] == 0.5  # one B2 match among two tokens
    assert vals[6] == 0.0  # a single matched token has zero entropy


def test_duplicating_a_token_changes_only_definitional_rates(
        golden_dataset, golden_lexicon, golden_connectors):
    # sentence length is not a feature: doubling a noun changes rates exactly
    # as the definitions dictate, nothing else
    g1 = next(s for s in golden_dataset if s.id == "g1")
    dup = list(g1.tokens)
    extra = replace(dup[2], index=5, head=1)  # second copy of the object noun
    dup = dup[:4] + [extra]
    s2 = AnnotatedSentence(id="g1x", tokens=tuple(dup))
    row = extract_linguistic(s2, golden_lexicon, golden_connectors)
    assert row[0] == 3 / 4        # distinct forms / non-punct tokens
    assert row[3] == 3 / 5        # noun rate over 5 tokens now
    assert row[4] == 1 / 5
    assert row[27] == 3 / 5       # A1 matches gained one


def test_featurize_shapes_and_order(golden_dataset, golden_lexicon, golden_connectors):
    fm = featurize(golden_dataset, golden_lexicon, golden_connectors)
    assert fm.values.shape == (5, 34)
    assert fm.sentence_ids == ["g1", "g2", "g3", "g4", "g5"]
    again = featurize(golden_dataset, golden_lexicon, golden_connectors)
    assert np.array_equal(fm.values, again.values)  # bit-for-bit reproducible


def test_featurize_with_embedding_block(golden_dataset, golden_lexicon, golden_connectors):
    class FakeEmbedder:
        dim = 3

        def vector(self, s):
            return np.asarray([float(len(s.tokens)), 1.0, -1.0])

    fm = featurize(golden_dataset, golden_lexicon, golden_connectors, emb=FakeEmbedder())
    assert fm.values.shape == (5, 37)
    assert fm.names[34:] == ["emb_0", "emb_1", "emb_2"]
    assert fm.group_columns("Embedding") == [34, 35, 36]


def test_300_dim_provider_gives_n_by_334(golden_dataset, golden_lexicon,
                                         golden_connectors):
    from qiraa.embeddings import ComposedEmbedding, TfidfWeights, WordVectorTable

    provider = ComposedEmbedding(WordVectorTable(dim=300, vectors={}),
                                 TfidfWeights(idf={}, doc_count=1))
    fm = featurize(golden_dataset, golden_lexicon, golden_connectors, emb=provider)
    assert fm.values.shape == (5, 334)


def test_csv_export_header(golden_dataset, golden_lexicon, golden_connectors):
    fm = featurize(golden_dataset, golden_lexicon, golden_connectors)
    lines = fm.to_csv().splitlines()
    assert lines[0].split(",")[0] == "sent_id"
    assert lines[0].split(",")[1] == "ttr_forms"
    assert len(lines) == 6


def test_pipeline_single_sentence_matches_featurize(golden_dataset, golden_lexicon,
                                                    golden_connectors):
    pipeline = FeaturePipeline(lexicon=golden_lexicon, connectors=golden_connectors)
    fm = pipeline.featurize(golden_dataset)
    for i, sent in enumerate(golden_dataset):
        row = pipeline.featurize_sentence(sent)
        assert np.array_equal(row, fm.values[i])
