import pytest

from sentnet.synth import corrupt_labels, generate_synthetic_corpus, synthetic_answer_key
from sentnet.textprep import preprocess_corpus
from sentnet.vectorizer import fit_transform, pairwise_similarities


def test_size_and_labels():
    c = generate_synthetic_corpus(k_topics=5, per_topic=100, overlap=0.1, seed=0)
    assert len(c) == 500
    assert c.classes == [f"TOPIC_{t}" for t in range(5)]
    assert all(4 <= len(s.text.split()) <= 10 for s in c)


def test_deterministic():
    a = generate_synthetic_corpus(k_topics=3, per_topic=10, seed=4)
    b = generate_synthetic_corpus(k_topics=3, per_topic=10, seed=4)
    assert a == b
    assert a != generate_synthetic_corpus(k_topics=3, per_topic=10, seed=5)


def test_no_overlap_means_orthogonal_topics(prep):
    c = generate_synthetic_corpus(k_topics=3, per_topic=20, overlap=0.0, seed=1)
    _, vecs = fit_transform(preprocess_corpus(c.texts, prep))
    pairs = pairwise_similarities(vecs)
    labels = c.labels
    for i, j in zip(pairs.rows.tolist(), pairs.cols.tolist()):
        assert labels[i] == labels[j]


@pytest.mark.parametrize("kw", [dict(k_topics=1), dict(per_topic=4), dict(overlap=1.5),
                                dict(vocab_per_topic=1)])
def test_invalid_sizes(kw):
    with pytest.raises(ValueError):
        generate_synthetic_corpus(**kw)


def test_corrupt_labels():
    c = generate_synthetic_corpus(k_topics=4, per_topic=25, seed=2)
    noisy = corrupt_labels(c, 0.05, seed=0)
    changed = [a != b for a, b in zip(c.labels, noisy.labels)]
    assert sum(changed) == 5
    assert noisy.texts == c.texts
    assert corrupt_labels(c, 0.05, seed=0) == noisy


def test_answer_key():
    c = generate_synthetic_corpus(k_topics=2, per_topic=5, seed=0)
    assert synthetic_answer_key(c) == {"TOPIC_0": "MSG_TOPIC_0", "TOPIC_1": "MSG_TOPIC_1"}
