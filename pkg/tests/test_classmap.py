import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import contingency
from sentnet.classmap import (SplitMergeScores, ambiguity_report, build_class_map, minmax_normalize,
                              parse_grid, select_threshold, split_merge_scores, sweep_and_select)
from sentnet.corpus import Corpus
from sentnet.louvain import Partition
from sentnet.synth import generate_synthetic_corpus
from sentnet.textprep import preprocess_corpus
from sentnet.vectorizer import fit_transform, pairwise_similarities

REFERENCE_SPLIT = [2, 1, 4, 5, 1, 2, 2, 1, 1, 4, 1, 9, 1, 1, 4, 2, 2, 2, 7]
REFERENCE_MERGE = [1, 1, 1, 1, 4, 1, 2, 1, 2, 4, 1, 9, 2, 1, 1, 1, 6, 12]


def test_reference_vectors():
    sc = SplitMergeScores.from_vectors(REFERENCE_SPLIT, REFERENCE_MERGE)
    assert sc.split_score == pytest.approx(2.7368, abs=1e-4)
    assert sc.merge_score == pytest.approx(2.8333, abs=1e-4)


def four_sentences():
    c = Corpus.from_texts(["a", "b", "c", "d"], ["X", "X", "Y", "Y"])
    return c, Partition(np.array([0, 0, 0, 1]))


def test_four_sentence_table():
    c, p = four_sentences()
    cm = build_class_map(p, c)
    assert cm.classes == ("X", "Y") and cm.communities == (0, 1)
    assert cm.counts.tolist() == [[2, 1], [0, 1]]
    sc = split_merge_scores(cm)
    assert sc.split_vector == (1, 2) and sc.merge_vector == (2, 1)
    assert sc.split_score == 1.5 and sc.merge_score == 1.5


def test_diagonal_when_aligned():
    c = Corpus.from_texts(list("abcdef"), ["A", "B", "C", "A", "B", "C"])
    p = Partition.from_labels(c.labels)
    cm = build_class_map(p, c)
    assert np.count_nonzero(cm.counts) == 3
    sc = split_merge_scores(cm)
    assert sc.split_score == 1.0 and sc.merge_score == 1.0
    assert len(ambiguity_report(cm, c, p)) == 0


def test_unlabeled_rejected():
    c = Corpus.from_texts(["a", "b"])
    with pytest.raises(ValueError):
        build_class_map(Partition(np.array([0, 0])), c)


def test_majority_tie_goes_to_smallest_name():
    c = Corpus.from_texts(list("abcd"), ["Z", "A", "Z", "A"])
    cm = build_class_map(Partition(np.array([0, 0, 0, 0])), c)
    assert cm.majority_class() == {0: "A"}


def test_class_map_json_links():
    c, p = four_sentences()
    d = build_class_map(p, c).to_dict()
    assert {"community": 0, "class": "Y", "count": 1} in d["links"]
    json.dumps(d)


labelings = st.integers(1, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 5), min_size=n, max_size=n),
    st.lists(st.sampled_from("ABCDE"), min_size=n, max_size=n)))


@settings(max_examples=150, deadline=None)
@given(labelings)
def test_class_map_properties(lab):
    comm, classes = lab
    c = Corpus.from_texts([f"s{i}" for i in range(len(comm))], classes)
    p = Partition.from_labels(comm)
    cm = build_class_map(p, c)
    assert cm.n_labeled == len(comm) and (cm.counts >= 0).all()
    direct = contingency(p.membership.tolist(), classes)
    for (a, k), n in direct.items():
        assert cm.counts[cm.communities.index(a), cm.classes.index(k)] == n
    sc = split_merge_scores(cm)
    assert sum(sc.split_vector) == sum(sc.merge_vector) == cm.nonzero_cells()
    assert sc.split_score >= 1 and sc.merge_score >= 1
    assert (sc.split_score == 1) == all(len({m for m, k in direct if k == cls}) == 1 for cls in set(classes))
    assert (sc.merge_score == 1) == all(len({k for m, k in direct if m == a}) == 1 for a in set(p.membership.tolist()))
    rep = ambiguity_report(cm, c, p)
    assert len(rep) == sum(1 for a in cm.communities if np.count_nonzero(cm.counts[cm.communities.index(a)]) > 1)
    for e in rep:
        assert len(e.classes) >= 2


def test_select_threshold_linear_crossing():
    theta, method = select_threshold([0.5, 0.6], [0.0, 1.0], [1.0, 0.0])
    assert theta == pytest.approx(0.55) and method == "crossing"


def test_select_threshold_at_grid_point():
    theta, _ = select_threshold([0.0, 0.1, 0.2], [0.0, 0.5, 1.0], [1.0, 0.5, 0.0])
    assert theta == pytest.approx(0.1)


def test_select_threshold_no_crossing():
    theta, method = select_threshold([0.0, 0.1, 0.2], [0.0, 0.1, 0.2], [0.6, 0.4, 0.9])
    assert method == "argmin" and theta == pytest.approx(0.1)


def test_select_threshold_several_crossings():
    th = [0.0, 0.1, 0.2, 0.3, 0.4]
    s = [0.0, 1.0, 0.0, 0.2, 0.4]
    m = [1.0, 0.0, 1.0, 0.0, 0.0]
    theta, _ = select_threshold(th, s, m)
    # crossings near 0.05 (height 0.5), 0.15 (0.5) and between 0.2 and 0.3 (about 0.167)
    assert 0.2 < theta < 0.3


def test_select_threshold_validation():
    with pytest.raises(ValueError):
        select_threshold([0.1], [0.0], [0.0])
    with pytest.raises(ValueError):
        select_threshold([0.2, 0.1], [0.0, 1.0], [1.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12))
def test_minmax(values):
    norm, const = minmax_normalize(values)
    if const:
        assert (norm == 0).all()
    else:
        assert norm.min() == 0.0 and norm.max() == 1.0


def test_parse_grid():
    assert parse_grid("0:0.9:0.1") == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert parse_grid("0.2,0.4") == [0.2, 0.4]
    assert parse_grid([0.1, 0.3]) == [0.1, 0.3]
    with pytest.raises(ValueError):
        parse_grid("0:1:0")


def test_sweep_records_and_outputs(tmp_path, prep):
    c = generate_synthetic_corpus(k_topics=3, per_topic=20, seed=2)
    _, vecs = fit_transform(preprocess_corpus(c.texts, prep))
    res = sweep_and_select(pairwise_similarities(vecs), c, parse_grid("0:0.8:0.2"), keep_partitions=True)
    assert res.thresholds == [0.0, 0.2, 0.4, 0.6, 0.8]
    assert len(res.partitions) == 5
    for r in res.records:
        assert 0.0 <= r.split_norm <= 1.0 and 0.0 <= r.merge_norm <= 1.0
    res.to_csv(tmp_path / "s.csv")
    res.to_curves_tsv(tmp_path / "c.tsv")
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert header == "threshold,n_communities,n_singletons,split,merge,split_norm,merge_norm"
    assert len((tmp_path / "c.tsv").read_text().splitlines()) == 6


def test_sweep_degenerate_flagged(prep):
    # every sentence is its own class: merge is always 1, a constant series
    c = Corpus.from_texts(["alpha beta", "beta gamma", "delta"], ["A", "B", "C"])
    _, vecs = fit_transform(preprocess_corpus(c.texts, prep))
    res = sweep_and_select(pairwise_similarities(vecs), c, [0.0, 0.5])
    assert res.degenerate and res.method == "argmin"


def test_ambiguity_planted_sentence():
    texts = [f"s{i}" for i in range(7)]
    c = Corpus.from_texts(texts, ["A", "A", "A", "B", "B", "B", "A"])
    p = Partition(np.array([0, 0, 0, 1, 1, 1, 1]))
    rep = ambiguity_report(build_class_map(p, c), c, p)
    assert len(rep) == 1
    e = rep.entry_for(1)
    assert e.majority_class == "B"
    assert e.suspects == [6]
    assert e.sentences[0][0] == 6  # minority sentence listed first
    assert [k for k, _ in e.classes] == ["A", "B"]
    d = json.loads(rep.to_json())
    assert d["entries"][0]["sentences"][0]["suspect"] is True
