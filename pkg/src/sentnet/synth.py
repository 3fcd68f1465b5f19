"""Synthetic topic corpora for exercising the pipeline end to end."""
import numpy as np

from sentnet.corpus import Corpus, Sentence
from sentnet.porter import stem
from sentnet.textprep import load_stopwords

_CONSONANTS = "bdfgklmnprtvz"
_VOWELS = "aiou"


def _word_bank(size, rng):
    """Distinct pronounceable pseudo-words that are their own Porter stem."""
    stop = load_stopwords()
    bank, seen = [], set()
    while len(bank) < size:
        n_syl = int(rng.integers(2, 4))
        w = "".join(_CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWELS[rng.integers(len(_VOWELS))]
                    for _ in range(n_syl))
        w += _CONSONANTS[rng.integers(len(_CONSONANTS))]
        if w in seen or w in stop or stem(w) != w:
            continue
        seen.add(w)
        bank.append(w)
    return bank


def _rank_weights(size, zipf):
    w = (np.arange(size) + 1.0) ** -zipf
    return w / w.sum()


def topic_name(t: int) -> str:
    return f"TOPIC_{t}"


def generate_synthetic_corpus(k_topics=5, per_topic=100, vocab_per_topic=20, overlap=0.1, seed=0,
                              min_len=4, max_len=10, shared_size=None, zipf=1.0) -> Corpus:
    """Labeled corpus of ``k_topics * per_topic`` unique sentences.

    Each sentence draws ``min_len..max_len`` words; each word comes from a
    shared pool with probability ``overlap`` and from its topic's private
    vocabulary otherwise. Within a vocabulary the word of rank ``r`` is drawn
    with probability proportional to ``(r + 1) ** -zipf`` (uniform for 0).
    The shared pool has ``shared_size`` words (default ``vocab_per_topic``).
    Sentence order is shuffled.
    """
    if k_topics < 2:
        raise ValueError("need at least two topics")
    if per_topic < 5:
        raise ValueError("need at least five sentences per topic")
    if vocab_per_topic < 2:
        raise ValueError("vocab_per_topic must be at least 2")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    shared_size = vocab_per_topic if shared_size is None else shared_size
    if shared_size < 1:
        raise ValueError("shared_size must be positive")
    rng = np.random.default_rng(seed)
    bank = _word_bank(shared_size + vocab_per_topic * k_topics, rng)
    shared = bank[:shared_size]
    topics = [bank[shared_size + vocab_per_topic * t: shared_size + vocab_per_topic * (t + 1)]
              for t in range(k_topics)]
    p_shared = _rank_weights(shared_size, zipf)
    p_topic = _rank_weights(vocab_per_topic, zipf)

    rows, seen = [], set()
    for t in range(k_topics):
        made, attempts = 0, 0
        while made < per_topic:
            attempts += 1
            if attempts > 1000 * per_topic:
                raise ValueError("vocabulary too small to produce unique sentences")
            length = int(rng.integers(min_len, max_len + 1))
            from_shared = rng.random(length) < overlap
            words = [shared[rng.choice(shared_size, p=p_shared)] if s
                     else topics[t][rng.choice(vocab_per_topic, p=p_topic)]
                     for s in from_shared]
            text = " ".join(words)
            if text in seen:
                continue
            seen.add(text)
            rows.append((text, topic_name(t)))
            made += 1
    order = rng.permutation(len(rows))
    return Corpus(tuple(Sentence(i, rows[k][0], rows[k][1]) for i, k in enumerate(order.tolist())))


def synthetic_answer_key(corpus: Corpus) -> dict:
    return {c: f"MSG_{c}" for c in corpus.classes}


def corrupt_labels(corpus: Corpus, fraction: float, seed=0) -> Corpus:
    """Reassign ``round(fraction * n)`` randomly chosen labels to a different class."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    classes = corpus.classes
    if len(classes) < 2:
        raise ValueError("need two classes to corrupt labels")
    rng = np.random.default_rng(seed)
    n = len(corpus)
    n_bad = int(np.floor(fraction * n + 0.5))
    chosen = set(rng.choice(n, size=n_bad, replace=False).tolist())
    labels = []
    for pos, s in enumerate(corpus):
        if pos in chosen:
            others = [c for c in classes if c != s.label]
            labels.append(others[rng.integers(len(others))])
        else:
            labels.append(s.label)
    return corpus.with_labels(labels)
