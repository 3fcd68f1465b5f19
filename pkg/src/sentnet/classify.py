"""Multiclass text classifiers on TF-IDF vectors and hit-ratio evaluation.

* :class:`LinearSvmModel`: one-vs-rest linear SVMs trained with Pegasos
  (stochastic subgradient descent on the regularized hinge loss). The bias
  is a constant extra feature.
* :class:`RandomForestModel`: bagged CART trees with Gini splits and
  ``sqrt(m)`` candidate features per split.

Every tie, whether between per-class scores, leaf counts or forest votes,
goes to the lexicographically smallest class name.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from sentnet.vectorizer import to_csr

MODEL_FORMAT = "sentnet-model"
MODEL_VERSION = 1


class ClassifierError(ValueError):
    pass


def _check_training(vectors, labels):
    vectors, labels = list(vectors), list(labels)
    if len(vectors) != len(labels):
        raise ClassifierError("vectors and labels differ in length")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ClassifierError("training needs at least two classes")
    return vectors, labels, classes


def _n_features(vectors, n_features):
    if n_features is not None:
        return int(n_features)
    return 1 + max((int(v.indices.max()) for v in vectors if len(v)), default=-1)


def _restrict(vectors, n_features):
    """Drop indices outside the model's feature range."""
    out = []
    for v in vectors:
        if len(v) and v.indices[-1] >= n_features:
            keep = v.indices < n_features
            v = type(v)(v.indices[keep], v.weights[keep])
        out.append(v)
    return out


# ------------------------------------------------------------------ SVM

@dataclass(frozen=True)
class SvmConfig:
    """``lam=None`` uses ``1 / n_train``, the Pegasos equivalent of C = 1."""
    lam: float = None
    epochs: int = 50
    seed: int = 0


@dataclass
class LinearSvmModel:
    classes: list
    weights: np.ndarray  # (n_classes, n_features)
    bias: np.ndarray  # (n_classes,)
    config: SvmConfig = field(default_factory=SvmConfig)
    training_accuracy: float = float("nan")
    vocabulary_hash: str = ""

    kind = "linear_svm"

    @property
    def n_features(self):
        return self.weights.shape[1]

    def decision_function(self, vectors):
        x = to_csr(_restrict(vectors, self.n_features), self.n_features)
        return np.asarray(x @ self.weights.T) + self.bias

    def predict_many(self, vectors):
        scores = self.decision_function(list(vectors))
        return [self.classes[i] for i in np.argmax(scores, axis=1)]

    def predict(self, vector):
        return self.predict_many([vector])[0]

    def to_dict(self):
        return {
            "classes": list(self.classes),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "config": {"lam": self.config.lam, "epochs": self.config.epochs, "seed": self.config.seed},
            "training_accuracy": self.training_accuracy,
        }

    @classmethod
    def from_dict(cls, d, vocabulary_hash=""):
        return cls(list(d["classes"]), np.asarray(d["weights"], dtype=np.float64).reshape(len(d["classes"]), -1),
                   np.asarray(d["bias"], dtype=np.float64), SvmConfig(**d["config"]),
                   float(d["training_accuracy"]), vocabulary_hash)


def train_linear_svm(vectors, labels, config: SvmConfig = None, n_features=None) -> LinearSvmModel:
    """One-vs-rest Pegasos. All binary problems share the step schedule, so
    the weight matrix is kept as ``scale * V`` to make the shrink step O(1)."""
    config = config or SvmConfig()
    vectors, labels, classes = _check_training(vectors, labels)
    m = _n_features(vectors, n_features)
    vectors = _restrict(vectors, m)
    n, C = len(vectors), len(classes)
    code = {c: k for k, c in enumerate(classes)}
    y = np.full((C, n), -1.0)
    y[[code[lab] for lab in labels], np.arange(n)] = 1.0
    rows = [(np.append(v.indices, m), np.append(v.weights, 1.0)) for v in vectors]

    V = np.zeros((C, m + 1))
    scale = 1.0
    lam = config.lam if config.lam is not None else 1.0 / n
    rng = np.random.default_rng(config.seed)
    t = 0
    for _ in range(config.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            idx, val = rows[i]
            margins = y[:, i] * (scale * (V[:, idx] @ val))
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                V[:] = 0.0
                scale = 1.0
            else:
                scale *= shrink
            viol = np.flatnonzero(margins < 1.0)
            if viol.size:
                V[np.ix_(viol, idx)] += (eta * y[viol, i] / scale)[:, None] * val[None, :]
            if scale < 1e-9:
                V *= scale
                scale = 1.0
    W = scale * V
    model = LinearSvmModel(classes, W[:, :m].copy(), W[:, m].copy(), config)
    model.training_accuracy = float(np.mean(np.array(model.predict_many(vectors)) == np.array(labels)))
    return model


# --------------------------------------------------------------- forest

@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = None
    seed: int = 0


@dataclass
class _Tree:
    feature: np.ndarray  # -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray  # majority class code at leaves
    leaf_counts: list  # {class code: count} per node (empty for inner nodes)

    def apply(self, X):
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict_codes(self, X):
        return self.leaf_class[self.apply(X)]

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_counts": [sorted([int(k), int(v)] for k, v in d.items()) for d in self.leaf_counts],
        }

    @classmethod
    def from_dict(cls, d):
        counts = [{int(k): int(v) for k, v in pairs} for pairs in d["leaf_counts"]]
        leaf_class = np.array([min(c, key=lambda k: (-c[k], k)) if c else -1 for c in counts], dtype=np.int64)
        return cls(np.asarray(d["feature"], dtype=np.int64), np.asarray(d["threshold"], dtype=np.float64),
                   np.asarray(d["left"], dtype=np.int64), np.asarray(d["right"], dtype=np.int64),
                   leaf_class, counts)


def _best_split(Xn, yn, n_codes):
    """Best Gini split over the columns of ``Xn``.

    Returns ``(column, threshold, n_valid_columns)``; column is -1 when no
    column has two distinct values.
    """
    n, f = Xn.shape
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    valid = xs[1:] > xs[:-1]  # split between p and p+1
    ok_cols = valid.any(axis=0)
    if not ok_cols.any():
        return -1, 0.0, 0
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    sq_left = np.zeros((n - 1, f))
    sq_right = np.zeros((n - 1, f))
    for k in range(n_codes):
        cum = np.cumsum(ys == k, axis=0, dtype=np.float64)
        total = cum[-1]
        left = cum[:-1]
        sq_left += left * left
        right = total - left
        sq_right += right * right
    score = sq_left / n_left + sq_right / n_right
    score[~valid] = -np.inf
    flat = np.argmax(score.T)  # column-major: first column wins ties
    col, pos = divmod(int(flat), n - 1)
    thr = 0.5 * (xs[pos, col] + xs[pos + 1, col])
    if not thr < xs[pos + 1, col]:
        thr = xs[pos, col]
    return col, float(thr), int(ok_cols.sum())


def _grow_tree(X, Xcsr, y, n_classes, sample, rng, max_depth, k_features):
    feature, threshold, left, right, leaf_class, leaf_counts = [], [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        leaf_class.append(-1)
        leaf_counts.append({})
        return len(feature) - 1

    def make_leaf(node, idx):
        codes, counts = np.unique(y[idx], return_counts=True)
        leaf_counts[node] = dict(zip(codes.tolist(), counts.tolist()))
        leaf_class[node] = int(codes[np.argmax(counts)])

    root = new_node()
    stack = [(root, sample, 0)]
    while stack:
        node, idx, depth = stack.pop()
        yn = y[idx]
        if idx.size < 2 or np.all(yn == yn[0]) or (max_depth is not None and depth >= max_depth):
            make_leaf(node, idx)
            continue
        sub = Xcsr[idx]
        candidates = np.unique(sub.indices)
        codes, yl = np.unique(yn, return_inverse=True)
        yl = yl.reshape(-1)
        best = None
        evaluated = 0
        perm = rng.permutation(candidates)
        pos = 0
        while pos < perm.size and evaluated < k_features:
            chunk = perm[pos:pos + (k_features - evaluated)]
            pos += chunk.size
            col, thr, n_ok = _best_split(X[np.ix_(idx, chunk)], yl, codes.size)
            if col >= 0:
                xcol = X[idx, chunk[col]]
                mask = xcol <= thr
                score = _gini_gain(yl[mask], yl[~mask], codes.size)
                if best is None or score > best[0]:
                    best = (score, int(chunk[col]), thr)
            evaluated += n_ok
        if best is None:
            make_leaf(node, idx)
            continue
        _, feat, thr = best
        mask = X[idx, feat] <= thr
        feature[node] = feat
        threshold[node] = thr
        lnode, rnode = new_node(), new_node()
        left[node], right[node] = lnode, rnode
        stack.append((rnode, idx[~mask], depth + 1))
        stack.append((lnode, idx[mask], depth + 1))

    return _Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                 np.array(right, dtype=np.int64), np.array(leaf_class, dtype=np.int64), leaf_counts)


def _gini_gain(yl, yr, n_codes):
    nl, nr = yl.size, yr.size
    cl = np.bincount(yl, minlength=n_codes).astype(np.float64)
    cr = np.bincount(yr, minlength=n_codes).astype(np.float64)
    return float((cl @ cl) / nl + (cr @ cr) / nr)


@dataclass
class RandomForestModel:
    classes: list
    features: np.ndarray  # vocabulary indices used as columns
    trees: list
    config: ForestConfig = field(default_factory=ForestConfig)
    n_vocab: int = 0
    oob_accuracy: float = float("nan")
    training_accuracy: float = float("nan")
    vocabulary_hash: str = ""

    kind = "random_forest"

    def _dense(self, vectors):
        col = np.full(max(self.n_vocab, 1), -1, dtype=np.int64)
        col[self.features] = np.arange(self.features.size)
        X = np.zeros((len(vectors), self.features.size))
        for r, v in enumerate(vectors):
            idx = v.indices[v.indices < self.n_vocab]
            w = v.weights[v.indices < self.n_vocab]
            c = col[idx]
            X[r, c[c >= 0]] = w[c >= 0]
        return X

    def votes(self, vectors):
        X = self._dense(list(vectors))
        votes = np.zeros((X.shape[0], len(self.classes)), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            np.add.at(votes, (rows, tree.predict_codes(X)), 1)
        return votes

    def predict_many(self, vectors):
        return [self.classes[i] for i in np.argmax(self.votes(vectors), axis=1)]

    def predict(self, vector):
        return self.predict_many([vector])[0]

    def to_dict(self):
        return {
            "classes": list(self.classes),
            "features": self.features.tolist(),
            "n_vocab": self.n_vocab,
            "config": {"n_trees": self.config.n_trees, "max_depth": self.config.max_depth,
                       "seed": self.config.seed},
            "oob_accuracy": self.oob_accuracy,
            "training_accuracy": self.training_accuracy,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d, vocabulary_hash=""):
        return cls(list(d["classes"]), np.asarray(d["features"], dtype=np.int64),
                   [_Tree.from_dict(t) for t in d["trees"]], ForestConfig(**d["config"]),
                   int(d["n_vocab"]), float(d["oob_accuracy"]), float(d["training_accuracy"]),
                   vocabulary_hash)


def train_random_forest(vectors, labels, config: ForestConfig = None, n_features=None) -> RandomForestModel:
    config = config or ForestConfig()
    vectors, labels, classes = _check_training(vectors, labels)
    n_vocab = _n_features(vectors, n_features)
    vectors = _restrict(vectors, n_vocab)
    n = len(vectors)
    code = {c: k for k, c in enumerate(classes)}
    y = np.array([code[lab] for lab in labels], dtype=np.int64)

    full = to_csr(vectors, n_vocab)
    used = np.unique(full.indices)
    Xcsr = full[:, used].tocsr()
    Xcsr.sort_indices()
    X = Xcsr.toarray()
    k_features = max(1, int(math.sqrt(n_vocab)))

    streams = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees = []
    oob_votes = np.zeros((n, len(classes)), dtype=np.int64)
    for ss in streams:
        rng = np.random.default_rng(ss)
        sample = np.sort(rng.integers(0, n, n))
        tree = _grow_tree(X, Xcsr, y, len(classes), sample, rng, config.max_depth, k_features)
        trees.append(tree)
        oob = np.setdiff1d(np.arange(n), sample)
        if oob.size:
            np.add.at(oob_votes, (oob, tree.predict_codes(X[oob])), 1)

    model = RandomForestModel(classes, used.astype(np.int64), trees, config, n_vocab)
    has_oob = oob_votes.sum(axis=1) > 0
    if has_oob.any():
        model.oob_accuracy = float(np.mean(np.argmax(oob_votes[has_oob], axis=1) == y[has_oob]))
    model.training_accuracy = float(np.mean(np.array(model.predict_many(vectors)) == np.array(labels)))
    return model


def predict(model, vector):
    return model.predict(vector)


# ----------------------------------------------------------- evaluation

@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    n_correct: int
    n_total: int
    per_class: dict  # true class -> {"correct": int, "total": int}

    def to_dict(self):
        return {"accuracy": self.accuracy, "n_correct": self.n_correct, "n_total": self.n_total,
                "per_class": {k: dict(v) for k, v in sorted(self.per_class.items())}}


def evaluate(model, vectors, true_labels, key=None, label_to_class=None) -> EvalResult:
    """Hit ratio of ``model`` on a test set.

    Without ``key`` a hit is an exact label match. With an answer ``key``
    (class -> message id) both sides are mapped to messages first; predicted
    labels go through ``label_to_class`` (e.g. community -> majority class)
    when it is given.
    """
    vectors, true_labels = list(vectors), list(true_labels)
    if not vectors:
        raise ClassifierError("empty test set")
    if len(vectors) != len(true_labels):
        raise ClassifierError("vectors and labels differ in length")
    predicted = model.predict_many(vectors)
    if label_to_class is not None:
        missing = sorted({p for p in predicted if p not in label_to_class}, key=str)
        if missing:
            raise ClassifierError(f"predicted labels without a class mapping: {missing}")
        predicted = [label_to_class[p] for p in predicted]
    per_class = {}
    correct = 0
    for pred, true in zip(predicted, true_labels):
        if key is not None:
            if true not in key or pred not in key:
                raise ClassifierError(f"answer key has no message for {true if true not in key else pred!r}")
            hit = key[pred] == key[true]
        else:
            hit = pred == true
        d = per_class.setdefault(true, {"correct": 0, "total": 0})
        d["total"] += 1
        d["correct"] += int(hit)
        correct += int(hit)
    return EvalResult(correct / len(vectors), correct, len(vectors), per_class)


# -------------------------------------------------------- serialization

_KINDS = {"linear_svm": LinearSvmModel, "random_forest": RandomForestModel}


def save_model(model, path, vocabulary=None):
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "vocabulary_hash": vocabulary.digest() if vocabulary is not None else model.vocabulary_hash,
        "model": model.to_dict(),
    }
    if vocabulary is not None:
        doc["vocabulary"] = vocabulary.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Returns ``(model, vocabulary_or_None)``."""
    from sentnet.vectorizer import Vocabulary

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ClassifierError(f"{path}: not a {MODEL_FORMAT} v{MODEL_VERSION} file")
    cls = _KINDS.get(doc["kind"])
    if cls is None:
        raise ClassifierError(f"{path}: unknown model kind {doc['kind']!r}")
    model = cls.from_dict(doc["model"], doc.get("vocabulary_hash", ""))
    vocab = None
    if "vocabulary" in doc:
        vocab = Vocabulary.from_dict(doc["vocabulary"])
        if vocab.digest() != doc["vocabulary_hash"]:
            raise ClassifierError(f"{path}: vocabulary hash mismatch")
    return model, vocab
