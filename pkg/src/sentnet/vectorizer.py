"""TF-IDF vectors and cosine similarities between them.

Weights are ``count(t, d) * ln(n_docs / df(t))``: raw term counts, natural
log, no smoothing. Terms found in every document therefore get weight zero
and are dropped from the sparse form.
"""
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from sentnet import _backend


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple
    df: tuple
    n_docs: int

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self._index

    def index(self, term):
        return self._index[term]

    def get(self, term, default=None):
        return self._index.get(term, default)

    def idf(self):
        df = np.asarray(self.df, dtype=np.float64)
        return np.log(self.n_docs / df)

    def digest(self) -> str:
        """Stable hash of terms, document frequencies and corpus size."""
        h = hashlib.sha256()
        h.update(json.dumps([list(self.terms), list(self.df), self.n_docs],
                            ensure_ascii=False).encode("utf-8"))
        return h.hexdigest()

    def to_dict(self):
        return {"terms": list(self.terms), "df": list(self.df), "n_docs": self.n_docs}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["terms"]), tuple(int(x) for x in d["df"]), int(d["n_docs"]))


class SparseVector:
    """Sorted (term index, weight) pairs with strictly positive weights."""

    __slots__ = ("indices", "weights")

    def __init__(self, indices=(), weights=()):
        idx = np.asarray(indices, dtype=np.int64)
        w = np.asarray(weights, dtype=np.float64)
        if idx.shape != w.shape or idx.ndim != 1:
            raise ValueError("indices and weights must be 1-d and of equal length")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                order = np.argsort(idx, kind="stable")
                idx, w = idx[order], w[order]
                if np.any(np.diff(idx) == 0):
                    raise ValueError("duplicate term index")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite and nonnegative")
            keep = w > 0
            idx, w = idx[keep], w[keep]
        self.indices = idx
        self.weights = w

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    def pairs(self):
        return list(zip(self.indices.tolist(), self.weights.tolist()))

    def norm(self) -> float:
        return math.sqrt(float(np.dot(self.weights, self.weights)))

    def scaled(self, alpha: float) -> "SparseVector":
        return SparseVector(self.indices, self.weights * alpha)

    def __len__(self):
        return int(self.indices.size)

    def __eq__(self, other):
        return (isinstance(other, SparseVector)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self):
        return f"SparseVector({self.pairs()!r})"


def fit_vocabulary(docs) -> Vocabulary:
    """Terms of the corpus (sorted) with their document frequencies."""
    docs = list(docs)
    if not docs:
        raise ValueError("cannot fit a vocabulary on an empty document list")
    df = {}
    for doc in docs:
        for term, count in _counts(doc).items():
            if count > 0:
                df[term] = df.get(term, 0) + 1
    terms = tuple(sorted(df))
    return Vocabulary(terms, tuple(df[t] for t in terms), len(docs))


def _counts(doc):
    if isinstance(doc, dict):
        return doc
    counts = {}
    for t in doc:
        counts[t] = counts.get(t, 0) + 1
    return counts


def transform_tfidf(doc, vocab: Vocabulary) -> SparseVector:
    """TF-IDF vector of a term multiset; terms outside ``vocab`` are ignored."""
    idx, w = [], []
    for term, count in _counts(doc).items():
        i = vocab.get(term)
        if i is None or count <= 0:
            continue
        weight = count * math.log(vocab.n_docs / vocab.df[i])
        if weight > 0:
            idx.append(i)
            w.append(weight)
    return SparseVector(idx, w)


def fit_transform(docs):
    docs = list(docs)
    vocab = fit_vocabulary(docs)
    return vocab, [transform_tfidf(d, vocab) for d in docs]


def cosine_similarity(u: SparseVector, v: SparseVector) -> float:
    """Cosine of two sparse vectors, clamped to [0, 1]; 0 if either is zero."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    _, iu, iv = np.intersect1d(u.indices, v.indices, assume_unique=True, return_indices=True)
    dot = float(np.dot(u.weights[iu], v.weights[iv]))
    return min(1.0, max(0.0, dot / (nu * nv)))


@dataclass(frozen=True)
class PairSimilarities:
    """Positive similarities of unordered pairs ``i < j``, sorted by ``(i, j)``.

    Pairs that are absent have similarity exactly 0.
    """
    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return int(self.rows.size)

    def get(self, i, j) -> float:
        if i == j:
            raise ValueError("diagonal is not stored")
        if i > j:
            i, j = j, i
        lo = np.searchsorted(self.rows, i, side="left")
        hi = np.searchsorted(self.rows, i, side="right")
        k = lo + np.searchsorted(self.cols[lo:hi], j)
        if k < hi and self.cols[k] == j:
            return float(self.weights[k])
        return 0.0

    def as_dict(self):
        return {(int(i), int(j)): float(w) for i, j, w in zip(self.rows, self.cols, self.weights)}

    def to_dense(self):
        m = np.zeros((self.n, self.n))
        m[self.rows, self.cols] = self.weights
        m[self.cols, self.rows] = self.weights
        return m


def to_csr(vectors, n_terms=None) -> sp.csr_matrix:
    vectors = list(vectors)
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for k, v in enumerate(vectors):
        indptr[k + 1] = indptr[k] + len(v)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
    if n_terms is None:
        n_terms = int(indices.max()) + 1 if indices.size else 0
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), n_terms))


def pairwise_similarities(vectors, backend=None) -> PairSimilarities:
    """Cosine similarity of every pair that shares at least one term."""
    vectors = list(vectors)
    n = len(vectors)
    m = to_csr(vectors)
    indptr = np.ascontiguousarray(m.indptr, dtype=np.int64)
    indices = np.ascontiguousarray(m.indices, dtype=np.int64)
    data = np.ascontiguousarray(m.data, dtype=np.float64)
    norms = np.array([v.norm() for v in vectors], dtype=np.float64)
    rows, cols, sims = _backend.get(backend).cosine_pairs(indptr, indices, data, norms, m.shape[1])
    return PairSimilarities(n, rows, cols, sims)


def save_vectors(vectors, path):
    with open(path, "w", encoding="utf-8") as fh:
        for i, v in enumerate(vectors):
            fh.write(json.dumps({"id": i, "terms": [[int(a), float(b)] for a, b in v.pairs()]}) + "\n")


def load_vectors(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                if obj["id"] != len(out):
                    raise ValueError(f"{path}: vector ids must be dense and in order")
                out.append(SparseVector.from_pairs(obj["terms"]))
    return out


def save_vocabulary(vocab: Vocabulary, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocab.to_dict(), fh, ensure_ascii=False)
        fh.write("\n")


def load_vocabulary(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        return Vocabulary.from_dict(json.load(fh))
