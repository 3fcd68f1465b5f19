"""Comparing detected communities with reference classes.

The class map is the community x class contingency table. Class-split counts,
for each class, the communities its sentences fall into; Class-merge counts,
for each community, the classes it contains. Each score is the mean of its
vector, so a perfect one-to-one alignment scores 1 on both.
"""
import csv
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from sentnet.louvain import LouvainConfig, Partition, louvain_detect
from sentnet.simgraph import build_graph


@dataclass(frozen=True)
class ClassMap:
    communities: tuple
    classes: tuple
    counts: np.ndarray  # [community, class]

    @property
    def n_labeled(self) -> int:
        return int(self.counts.sum())

    def nonzero_cells(self) -> int:
        return int(np.count_nonzero(self.counts))

    def majority_class(self) -> dict:
        """Community -> most frequent class (ties to the smallest class name)."""
        # classes are sorted, so argmax picks the lexicographically smallest tie
        return {c: self.classes[int(np.argmax(row))] for c, row in zip(self.communities, self.counts)}

    def to_dict(self):
        return {
            "communities": [int(c) for c in self.communities],
            "classes": list(self.classes),
            "counts": self.counts.tolist(),
            "links": [
                {"community": int(c), "class": k, "count": int(self.counts[a, b])}
                for a, c in enumerate(self.communities)
                for b, k in enumerate(self.classes)
                if self.counts[a, b] > 0
            ],
        }


def build_class_map(p: Partition, corpus) -> ClassMap:
    """Contingency counts for the labeled sentences of ``corpus``.

    Sentence ids index into ``p``, so a split part of a corpus can be mapped
    against the partition of the whole.
    """
    if not corpus.labeled:
        raise ValueError("class map needs a labeled corpus")
    ids = np.asarray(corpus.ids, dtype=np.int64)
    if ids.size and ids.max() >= p.n_nodes:
        raise ValueError("partition does not cover the corpus")
    comm = p.membership[ids]
    communities = tuple(sorted(set(comm.tolist())))
    classes = tuple(corpus.classes)
    ci = {c: a for a, c in enumerate(communities)}
    ki = {k: b for b, k in enumerate(classes)}
    counts = np.zeros((len(communities), len(classes)), dtype=np.int64)
    for c, label in zip(comm.tolist(), corpus.labels):
        counts[ci[c], ki[label]] += 1
    return ClassMap(communities, classes, counts)


@dataclass(frozen=True)
class SplitMergeScores:
    split_score: float
    merge_score: float
    split_vector: tuple
    merge_vector: tuple

    @classmethod
    def from_vectors(cls, split_vector, merge_vector) -> "SplitMergeScores":
        split_vector = tuple(int(x) for x in split_vector)
        merge_vector = tuple(int(x) for x in merge_vector)
        if not split_vector or not merge_vector:
            raise ValueError("split and merge vectors must be non-empty")
        return cls(sum(split_vector) / len(split_vector), sum(merge_vector) / len(merge_vector),
                   split_vector, merge_vector)


def split_merge_scores(cmap: ClassMap) -> SplitMergeScores:
    if cmap.counts.size == 0:
        raise ValueError("empty class map")
    present = cmap.counts > 0
    split = present.sum(axis=0)
    merge = present.sum(axis=1)
    # classes/communities without members contribute nothing
    return SplitMergeScores.from_vectors(split[split > 0], merge[merge > 0])


# ---------------------------------------------------------------- sweep

@dataclass(frozen=True)
class SweepRecord:
    threshold: float
    n_communities: int
    n_singletons: int
    split: float
    merge: float
    split_norm: float = 0.0
    merge_norm: float = 0.0


@dataclass(frozen=True)
class SweepResult:
    records: tuple
    optimal_threshold: float
    method: str  # "crossing" or "argmin"
    degenerate: bool = False
    partitions: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def thresholds(self):
        return [r.threshold for r in self.records]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["threshold", "n_communities", "n_singletons", "split", "merge",
                        "split_norm", "merge_norm"])
            for r in self.records:
                w.writerow([_fmt(r.threshold), r.n_communities, r.n_singletons, _fmt(r.split),
                            _fmt(r.merge), _fmt(r.split_norm), _fmt(r.merge_norm)])

    def to_curves_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("threshold\tsplit_norm\tmerge_norm\n")
            for r in self.records:
                fh.write(f"{_fmt(r.threshold)}\t{_fmt(r.split_norm)}\t{_fmt(r.merge_norm)}\n")

    def summary(self):
        return {"optimal_threshold": self.optimal_threshold, "method": self.method,
                "degenerate": self.degenerate}


def _fmt(x: float) -> str:
    return repr(float(x))


def minmax_normalize(values):
    """Scale to [0, 1]; returns (normalized, is_constant). Constant input maps to zeros."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.zeros_like(v), True
    return (v - lo) / (hi - lo), False


def select_threshold(thresholds, split_norm, merge_norm):
    """Abscissa where the two piecewise-linear curves cross.

    With several crossings the one with the smallest ``split + merge`` wins
    (then the smallest threshold). Without a crossing, falls back to the
    grid point minimizing ``split + merge``. Returns ``(theta, method)``.
    """
    th = np.asarray(thresholds, dtype=np.float64)
    s = np.asarray(split_norm, dtype=np.float64)
    m = np.asarray(merge_norm, dtype=np.float64)
    if th.size < 2 or np.any(np.diff(th) <= 0):
        raise ValueError("need at least two strictly increasing thresholds")
    d = s - m
    crossings = []
    for k in range(th.size):
        if d[k] == 0.0:
            crossings.append((2.0 * s[k], th[k]))
        if k + 1 < th.size and d[k] * d[k + 1] < 0.0:
            t = d[k] / (d[k] - d[k + 1])
            x = th[k] + t * (th[k + 1] - th[k])
            y = s[k] + t * (s[k + 1] - s[k])
            crossings.append((2.0 * y, x))
    if crossings:
        total, theta = min(crossings)
        return float(theta), "crossing"
    total = s + m
    return float(th[int(np.argmin(total))]), "argmin"


def parse_grid(spec) -> list:
    """``start:stop:step`` (inclusive stop) or a comma-separated list."""
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    spec = str(spec).strip()
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(x) for x in spec.split(",") if x.strip()]


def sweep_and_select(pairs, corpus, thresholds, louvain_config: LouvainConfig = None,
                     backend=None, keep_partitions=False) -> SweepResult:
    """Detect communities at every threshold, score them and pick the optimum.

    Both score series are min-max normalized over the grid; the optimum is
    where the normalized curves intersect (see :func:`select_threshold`).
    """
    thresholds = [float(t) for t in thresholds]
    if len(thresholds) < 2:
        raise ValueError("sweep needs at least two thresholds")
    if not corpus.labeled:
        raise ValueError("sweep needs a labeled corpus")
    cfg = louvain_config or LouvainConfig()
    raw, parts = [], []
    for theta in thresholds:
        g = build_graph(pairs, theta)
        p = louvain_detect(g, cfg, backend=backend)
        sc = split_merge_scores(build_class_map(p, corpus))
        raw.append((theta, p.k, p.n_singletons, sc.split_score, sc.merge_score))
        parts.append(p)
    split_norm, s_const = minmax_normalize([r[3] for r in raw])
    merge_norm, m_const = minmax_normalize([r[4] for r in raw])
    degenerate = s_const or m_const
    records = tuple(SweepRecord(*r, float(a), float(b)) for r, a, b in zip(raw, split_norm, merge_norm))
    if degenerate:
        total = split_norm + merge_norm
        theta, method = float(thresholds[int(np.argmin(total))]), "argmin"
    else:
        theta, method = select_threshold(thresholds, split_norm, merge_norm)
    return SweepResult(records, theta, method, degenerate, tuple(parts) if keep_partitions else None)


# ---------------------------------------------------------------- ambiguity

@dataclass(frozen=True)
class AmbiguityEntry:
    community: int
    majority_class: str
    classes: tuple  # (class, count), minority classes first
    sentences: tuple  # (id, class, text), minority-class sentences first

    @property
    def suspects(self):
        """Ids of sentences outside the community's majority class."""
        return [sid for sid, label, _ in self.sentences if label != self.majority_class]

    def to_dict(self):
        return {
            "community": self.community,
            "majority_class": self.majority_class,
            "classes": [{"class": k, "count": n} for k, n in self.classes],
            "sentences": [{"id": i, "class": k, "text": t, "suspect": k != self.majority_class}
                          for i, k, t in self.sentences],
        }


@dataclass(frozen=True)
class AmbiguityReport:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def entry_for(self, community):
        for e in self.entries:
            if e.community == community:
                return e
        return None

    def to_json(self, path=None):
        text = json.dumps({"entries": [e.to_dict() for e in self.entries]},
                          ensure_ascii=False, indent=2, sort_keys=True) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def ambiguity_report(cmap: ClassMap, corpus, p: Partition) -> AmbiguityReport:
    """Communities that mix classes, with candidate mislabeled sentences first.

    Within an entry, classes are ordered by ascending count (ties by name)
    so the rarest classes, the likeliest mislabels or ambiguous phrasings,
    lead; the majority class comes last.
    """
    if not corpus.labeled:
        raise ValueError("ambiguity report needs a labeled corpus")
    members = {}
    for s in corpus:
        members.setdefault(int(p.membership[s.id]), []).append(s)
    entries = []
    for a, comm in enumerate(cmap.communities):
        row = cmap.counts[a]
        present = [(cmap.classes[b], int(row[b])) for b in np.flatnonzero(row)]
        if len(present) < 2:
            continue
        top = max(n for _, n in present)
        majority = min(k for k, n in present if n == top)
        ordered = sorted((kv for kv in present if kv[0] != majority), key=lambda kv: (kv[1], kv[0]))
        ordered.append((majority, top))
        rank = {k: r for r, (k, _) in enumerate(ordered)}
        sents = sorted(members.get(int(comm), []), key=lambda s: (rank[s.label], s.id))
        entries.append(AmbiguityEntry(int(comm), majority, tuple(ordered),
                                      tuple((s.id, s.label, s.text) for s in sents)))
    return AmbiguityReport(tuple(entries))
