import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qiraa.corpus import (Dataset, Token, AnnotatedSentence, parse_annotated,
                          serialize, stratified_fold_indices, stratified_folds)
from qiraa.errors import CyclicTree, MalformedLine, TooFewInstances, UnknownLabel
from qiraa.labels import CefrLabel

TWO_SENTENCES = """\
# sent_id = a
# cefr = B1
1\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\tseg=1

# sent_id = b
# cefr = C1
# genre = news
1\tقال\tقال\tverb\t_\tasp=perf|vox=act|per=3\t0\t---\t_\tseg=1
2\tشيء\tشيء\tnoun\t_\t_\t1\tSBJ\t_\tseg=1
"""


def test_parse_two_sentences():
    d = parse_annotated(TWO_SENTENCES.encode("utf-8"))
    assert len(d) == 2
    assert d.sentences[0].gold is CefrLabel.B1
    assert d.sentences[1].gold is CefrLabel.C1
    assert d.sentences[1].genre == "news"
    assert d.sentences[1].tokens[0].feats.aspect == "perfective"
    assert d.sentences[1].tokens[1].head == 1


def test_parse_unlabelled_sentence():
    text = "# sent_id = x\n1\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\t_\n"
    d = parse_annotated(text)
    assert d.sentences[0].gold is None
    assert d.sentences[0].tokens[0].seg_count == 1  # missing seg defaults to 1


def test_self_loop_head_is_cyclic():
    text = "# sent_id = x\n1\tكلمة\tكلمة\tnoun\t_\t_\t1\tMOD\t_\t_\n"
    with pytest.raises(CyclicTree):
        parse_annotated(text)


def test_two_node_cycle():
    text = ("# sent_id = x\n"
            "1\tا\tا\tnoun\t_\t_\t2\tMOD\t_\t_\n"
            "2\tب\tب\tnoun\t_\t_\t1\tMOD\t_\t_\n")
    with pytest.raises(CyclicTree):
        parse_annotated(text)


def test_column_count_mismatch():
    text = "# sent_id = x\n1\tكلمة\tnoun\t0\t---\n"
    with pytest.raises(MalformedLine) as err:
        parse_annotated(text)
    assert err.value.line_no == 2


def test_head_out_of_range():
    text = "# sent_id = x\n1\tكلمة\tكلمة\tnoun\t_\t_\t5\tMOD\t_\t_\n"
    with pytest.raises(MalformedLine):
        parse_annotated(text)


def test_unknown_cefr_label():
    text = "# sent_id = x\n# cefr = D9\n1\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\t_\n"
    with pytest.raises(UnknownLabel):
        parse_annotated(text)


def test_comment_keys_case_sensitive():
    text = "# SENT_ID = nope\n# cefr = A1\n1\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\t_\n"
    d = parse_annotated(text)
    assert d.sentences[0].id == "s1"  # fell back to the auto id


def test_multiple_roots_allowed(golden_dataset):
    g4 = next(s for s in golden_dataset if s.id == "g4")
    assert sum(1 for t in g4.tokens if t.head == 0) == 2
    assert g4.depths() == [1, 0, 1, 0, 1]


def test_round_trip(golden_dataset):
    text = serialize(golden_dataset)
    again = parse_annotated(text)
    assert len(again) == len(golden_dataset)
    for a, b in zip(golden_dataset, again):
        assert a == b
    # a second round trip is byte-identical
    assert serialize(again) == text


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_round_trip_random_sentences(data):
    from qiraa.corpus import MorphFeats

    n_sents = data.draw(st.integers(1, 4))
    sentences = []
    for si in range(n_sents):
        n = data.draw(st.integers(1, 6))
        tokens = []
        for i in range(1, n + 1):
            head = data.draw(st.integers(0, i - 1))  # heads point left: acyclic
            feats = MorphFeats(
                aspect=data.draw(st.sampled_from(["perfective", "imperfective",
                                                  "command", "none"])),
                voice=data.draw(st.sampled_from(["active", "passive", "none"])),
                person=data.draw(st.sampled_from(["1", "2", "3", "none"])),
                proper=data.draw(st.booleans()),
                numeric=data.draw(st.booleans()),
                comparative=data.draw(st.booleans()),
            )
            tokens.append(Token(
                index=i,
                form=data.draw(st.sampled_from(["كلمة", "بيت", "قال", "x"])),
                lemma=data.draw(st.sampled_from(["كلمة", "بيت", "قال", "y"])),
                pos=data.draw(st.sampled_from(["noun", "verb", "punc"])),
                feats=feats,
                seg_count=data.draw(st.integers(1, 4)),
                head=head,
                deprel=data.draw(st.sampled_from(["---", "SBJ", "OBJ", "MOD"])),
            ))
        gold = data.draw(st.sampled_from([None, CefrLabel.A1, CefrLabel.B2,
                                          CefrLabel.C1]))
        sentences.append(AnnotatedSentence(
            id=f"r{si}", tokens=tuple(tokens), gold=gold,
            source=data.draw(st.sampled_from(["", "web"])),
            genre=data.draw(st.sampled_from([None, "news"])),
        ))
    d = Dataset(sentences)
    again = parse_annotated(serialize(d))
    assert list(again.sentences) == sentences


def test_label_scheme_validation(golden_dataset):
    with pytest.raises(UnknownLabel):
        Dataset(
            [AnnotatedSentence(id="x", tokens=(Token(1, "ا", "ا", "noun"),),
                               gold=CefrLabel.C2)],
            label_scheme="five_way",
        )
    # three_way accepts C2
    Dataset([AnnotatedSentence(id="x", tokens=(Token(1, "ا", "ا", "noun"),),
                               gold=CefrLabel.C2)])


def test_histogram(golden_dataset):
    assert golden_dataset.histogram() == {"A": 2, "B": 2, "C": 1}


def test_corpus_scale_histogram():
    """A 22740-sentence file parses completely and its label histogram
    reproduces the per-level comment counts (A=9030, B=5083, C=8627)."""
    counts = {"A1": 9030, "B1": 5083, "C1": 8627}
    blocks = []
    i = 0
    for level, n in counts.items():
        for _ in range(n):
            blocks.append(f"# sent_id = big{i}\n# cefr = {level}\n"
                          f"1\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\t_\n")
            i += 1
    d = parse_annotated("\n".join(blocks))
    assert len(d) == 22740
    assert d.histogram() == {"A": 9030, "B": 5083, "C": 8627}


class TestFolds:
    def test_balanced_three_classes_exact(self):
        labels = ["a", "b", "c"] * 10
        folds = stratified_fold_indices(labels, 10, seed=1)
        for _, test in folds:
            got = sorted(labels[i] for i in test)
            assert got == ["a", "b", "c"]

    def test_deterministic(self):
        labels = ["a"] * 40 + ["b"] * 25
        one = stratified_fold_indices(labels, 5, seed=7)
        two = stratified_fold_indices(labels, 5, seed=7)
        for (tr1, te1), (tr2, te2) in zip(one, two):
            assert np.array_equal(tr1, tr2) and np.array_equal(te1, te2)

    def test_unbalanced_counts_derived(self):
        # brute-force count per fold: 50/30/20 over k=5 must give 10/6/4
        labels = ["a"] * 50 + ["b"] * 30 + ["c"] * 20
        folds = stratified_fold_indices(labels, 5, seed=3)
        for _, test in folds:
            counts = {c: sum(1 for i in test if labels[i] == c) for c in "abc"}
            assert counts == {"a": 10, "b": 6, "c": 4}

    def test_too_few_instances(self):
        with pytest.raises(TooFewInstances):
            stratified_fold_indices(["a"] * 10 + ["b"] * 3, 5, seed=0)

    @given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=12, max_size=120),
           st.integers(min_value=2, max_value=4),
           st.integers(min_value=0, max_value=999))
    @settings(max_examples=40, deadline=None)
    def test_partition_property(self, labels, k, seed):
        from collections import Counter
        counts = Counter(labels)
        if min(counts.values()) < k or len(counts) < 2:
            return
        folds = stratified_fold_indices(labels, k, seed)
        seen = Counter()
        for train, test in folds:
            assert set(train) & set(test) == set()
            seen.update(test.tolist())
            # stratification within +-1 of an even split
            for cls, total in counts.items():
                in_fold = sum(1 for i in test if labels[i] == cls)
                assert abs(in_fold - total / k) <= 1
        assert seen == Counter(range(len(labels)))  # each instance tested once

    def test_dataset_folds_skip_unlabelled(self, golden_dataset):
        text = serialize(golden_dataset).replace("# cefr = C1\n", "")
        d = parse_annotated(text)
        assert len(d.labelled_indices()) == 4
        folds = stratified_folds(Dataset(d.sentences, "binary"), 2, seed=0)
        covered = sorted(i for _, te in folds for i in te)
        assert covered == d.labelled_indices()


def test_token_validates_fields():
    with pytest.raises(ValueError):
        Token(index=0, form="x", lemma="x", pos="noun")
    with pytest.raises(ValueError):
        Token(index=1, form="x", lemma="x", pos="noun", seg_count=0)
    with pytest.raises(ValueError):
        Token(index=1, form="x", lemma="x", pos="noun", head=-1)


def test_negative_head_is_malformed():
    text = "# sent_id = x\n1\tكلمة\tكلمة\tnoun\t_\t_\t-2\tMOD\t_\t_\n"
    with pytest.raises(MalformedLine):
        parse_annotated(text)


def test_zero_token_index_is_malformed():
    text = "# sent_id = x\n0\tكلمة\tكلمة\tnoun\t_\t_\t0\t---\t_\t_\n"
    with pytest.raises(MalformedLine):
        parse_annotated(text)
