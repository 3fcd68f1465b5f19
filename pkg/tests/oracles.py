"""Deliberately naive reference implementations used as test oracles.

None of these share code with the package: they work on plain dicts and dense
numpy arrays and follow the textbook formulas literally.
"""
import itertools
import math

import numpy as np


def naive_tfidf(docs):
    """docs: list of {term: count}. Returns (terms, dense matrix n x m)."""
    terms = sorted({t for d in docs for t in d})
    n = len(docs)
    X = np.zeros((n, len(terms)))
    for j, t in enumerate(terms):
        df = sum(1 for d in docs if d.get(t, 0) > 0)
        for i, d in enumerate(docs):
            X[i, j] = d.get(t, 0) * math.log(n / df)
    return terms, X


def naive_cosine_matrix(X):
    """All-pairs cosine: one dense O(m) dot product per ordered pair."""
    n = X.shape[0]
    norms = [math.sqrt(float(np.dot(X[i], X[i]))) for i in range(n)]
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j or norms[i] == 0.0 or norms[j] == 0.0:
                continue
            S[i, j] = min(1.0, float(np.dot(X[i], X[j])) / (norms[i] * norms[j]))
    return S


def dense_modularity(n, edges, membership):
    """Q = (1/2W) sum_ij [A_ij - k_i k_j / 2W] delta(c_i, c_j) over the dense matrix."""
    A = np.zeros((n, n))
    for i, j, w in edges:
        A[i, j] += w
        A[j, i] += w
    two_w = A.sum()
    if two_w == 0:
        return 0.0
    k = A.sum(axis=1)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if membership[i] == membership[j]:
                q += A[i, j] - k[i] * k[j] / two_w
    return q / two_w


def all_partitions(items):
    """Every set partition of ``items`` (recursive construction)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def exhaustive_best_q(n, edges):
    best = -math.inf
    for part in all_partitions(range(n)):
        memb = [0] * n
        for c, block in enumerate(part):
            for v in block:
                memb[v] = c
        best = max(best, dense_modularity(n, edges, memb))
    return best


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def contingency(communities, labels):
    """{(community, class): count} by direct counting."""
    out = {}
    for c, k in zip(communities, labels):
        out[(c, k)] = out.get((c, k), 0) + 1
    return out


def pairs_from_matrix(S):
    n = S.shape[0]
    return {(i, j): S[i, j] for i, j in itertools.combinations(range(n), 2) if S[i, j] > 0}


def random_docs(n, n_terms=60, max_len=12, seed=0):
    """Random term multisets with a skewed term distribution (so some pairs share nothing)."""
    rng = np.random.default_rng(seed)
    p = 1.0 / np.arange(1, n_terms + 1)
    p /= p.sum()
    docs = []
    for _ in range(n):
        size = int(rng.integers(0, max_len + 1))
        words = rng.choice(n_terms, size=size, p=p)
        d = {}
        for w in words:
            d[f"t{w}"] = d.get(f"t{w}", 0) + 1
        docs.append(d)
    return docs


def random_weighted_edges(n, density, seed):
    """Erdos-Renyi style edge list with uniform (0, 1] weights."""
    rng = np.random.default_rng(seed)
    edges = []
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < density:
            edges.append((i, j, float(1.0 - rng.random())))
    return edges
