"""Louvain community detection on weighted sentence graphs.

Modularity is the weighted Newman-Girvan form with resolution 1::

    Q = sum_c [ in_c / W - (tot_c / 2W)^2 ]

where ``W`` is the total edge weight, ``in_c`` the weight of edges inside
community ``c`` and ``tot_c`` the summed weighted degree of its nodes.
"""
import csv
from dataclasses import dataclass

import numpy as np

from sentnet import _backend
from sentnet.simgraph import SentenceGraph


@dataclass(frozen=True)
class Partition:
    """Community id per node, dense ``0..k-1``."""
    membership: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=np.int64)
        if m.ndim != 1:
            raise ValueError("membership must be 1-d")
        if m.size and (m.min() < 0 or set(np.unique(m).tolist()) != set(range(int(m.max()) + 1))):
            raise ValueError("community ids must be dense 0..k-1")
        object.__setattr__(self, "membership", m)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Canonical partition: ids ordered by size (desc), then smallest member."""
        labels = np.asarray(labels)
        n = labels.size
        if n == 0:
            return cls(np.zeros(0, dtype=np.int64))
        _, inv = np.unique(labels, return_inverse=True)
        inv = inv.reshape(-1)
        k = int(inv.max()) + 1
        sizes = np.bincount(inv, minlength=k)
        first = np.full(k, n, dtype=np.int64)
        np.minimum.at(first, inv, np.arange(n))
        order = np.lexsort((first, -sizes))
        new_id = np.empty(k, dtype=np.int64)
        new_id[order] = np.arange(k)
        return cls(new_id[inv])

    @classmethod
    def singletons(cls, n) -> "Partition":
        return cls(np.arange(n, dtype=np.int64))

    @property
    def n_nodes(self):
        return int(self.membership.size)

    @property
    def k(self):
        return int(self.membership.max()) + 1 if self.membership.size else 0

    def sizes(self):
        return np.bincount(self.membership, minlength=self.k)

    @property
    def n_singletons(self):
        return int(np.sum(self.sizes() == 1))

    def communities(self):
        return [np.flatnonzero(self.membership == c).tolist() for c in range(self.k)]

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.membership, other.membership)

    def __len__(self):
        return self.n_nodes


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 0
    min_gain: float = 1e-9
    max_passes: int = 50

    def __post_init__(self):
        if not self.min_gain > 0:
            raise ValueError("min_gain must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")


def _modularity_arrays(n, rows, cols, weights, membership):
    W = float(weights.sum())
    if W == 0.0:
        return 0.0
    deg = np.bincount(rows, weights, minlength=n) + np.bincount(cols, weights, minlength=n)
    k = int(membership.max()) + 1
    same = membership[rows] == membership[cols]
    inside = np.bincount(membership[rows[same]], weights[same], minlength=k)
    tot = np.bincount(membership, deg, minlength=k)
    return float(np.sum(inside / W - (tot / (2.0 * W)) ** 2))


def modularity(g: SentenceGraph, p) -> float:
    """Modularity of ``p`` on ``g``; 0 for a graph without edge weight."""
    membership = p.membership if isinstance(p, Partition) else np.asarray(p, dtype=np.int64)
    if membership.size != g.n_nodes:
        raise ValueError("partition does not cover the graph")
    if g.n_nodes == 0:
        return 0.0
    return _modularity_arrays(g.n_nodes, g.rows, g.cols, g.weights, membership)


def _aggregate(indptr, indices, data, loops, membership, k):
    """Collapse communities into super-nodes; internal weight becomes a self-loop."""
    n = loops.size
    src = np.repeat(np.arange(n), np.diff(indptr))
    upper = indices > src
    a = membership[src[upper]]
    b = membership[indices[upper]]
    w = data[upper]
    new_loops = np.bincount(membership, loops, minlength=k).astype(np.float64)
    same = a == b
    new_loops += np.bincount(a[same], w[same], minlength=k)
    lo = np.minimum(a[~same], b[~same])
    hi = np.maximum(a[~same], b[~same])
    key, inv = np.unique(lo * k + hi, return_inverse=True)
    sums = np.bincount(inv.reshape(-1), w[~same], minlength=key.size).astype(np.float64)
    er, ec = key // k, key % k
    r = np.concatenate([er, ec])
    c = np.concatenate([ec, er])
    ww = np.concatenate([sums, sums])
    order = np.lexsort((c, r))
    r, c, ww = r[order], c[order], ww[order]
    new_indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=k), out=new_indptr[1:])
    return new_indptr, np.ascontiguousarray(c, dtype=np.int64), np.ascontiguousarray(ww, dtype=np.float64), new_loops


def _dense_first_seen(membership):
    _, first, inv = np.unique(membership, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(order.size, dtype=np.int64)
    rank[order] = np.arange(order.size)
    return rank[inv.reshape(-1)], order.size


def louvain_detect(g: SentenceGraph, config: LouvainConfig = None, trace=None, backend=None) -> Partition:
    """Greedy two-phase modularity maximization.

    Each level sweeps the nodes in a seeded random order, moving a node to
    the neighbouring community with the largest modularity gain (ties go to
    the lowest community id) when that gain is at least ``min_gain``. Sweeps
    repeat until none moves a node; communities are then merged into
    super-nodes and the next level starts. Detection stops at the first
    level with no moves.

    If ``trace`` is a list, the modularity of the current partition of
    ``g`` is appended at the start and after every sweep.
    """
    config = config or LouvainConfig()
    kern = _backend.get(backend)
    n = g.n_nodes
    if n == 0:
        return Partition(np.zeros(0, dtype=np.int64))
    W = g.total_weight
    node_comm = np.arange(n, dtype=np.int64)
    if trace is not None:
        trace.append(modularity(g, node_comm))
    if W == 0.0:
        return Partition.from_labels(node_comm)

    rng = np.random.default_rng(config.seed)
    indptr, indices, data = g.adjacency()
    loops = np.zeros(n)
    two_w = 2.0 * W
    scaled_gain = config.min_gain * W

    for _ in range(config.max_passes):
        size = loops.size
        degrees = np.bincount(np.repeat(np.arange(size), np.diff(indptr)), data, minlength=size).astype(np.float64)
        degrees += 2.0 * loops
        membership = np.arange(size, dtype=np.int64)
        tot = degrees.copy()
        order = rng.permutation(size).astype(np.int64)
        moved = False
        while True:
            moves = kern.local_sweep(indptr, indices, data, degrees, membership, tot,
                                     order, two_w, scaled_gain)
            if trace is not None:
                trace.append(modularity(g, membership[node_comm]))
            if moves == 0:
                break
            moved = True
        if not moved:
            break
        dense, k = _dense_first_seen(membership)
        node_comm = dense[node_comm]
        indptr, indices, data, loops = _aggregate(indptr, indices, data, loops, dense, k)

    return Partition.from_labels(node_comm)


def _set_partitions(n):
    """Restricted growth strings of length ``n`` (every set partition once)."""
    a = [0] * n

    def rec(i, top):
        if i == n:
            yield a
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def brute_force_partition(g: SentenceGraph):
    """Exact modularity maximum by enumerating all set partitions (n <= 10)."""
    n = g.n_nodes
    if n > 10:
        raise ValueError(f"brute force is limited to 10 nodes, got {n}")
    if n == 0:
        return Partition(np.zeros(0, dtype=np.int64)), 0.0
    best_q, best = -np.inf, None
    for labels in _set_partitions(n):
        memb = np.array(labels, dtype=np.int64)
        q = modularity(g, memb)
        if q > best_q + 1e-12:
            best_q, best = q, memb
    return Partition.from_labels(best), float(best_q)


def save_partition(p: Partition, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "community_id"])
        for i, c in enumerate(p.membership.tolist()):
            writer.writerow([i, c])


def load_partition(path) -> Partition:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node_id", "community_id"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: header must be 'node_id,community_id'")
        rows = sorted((int(r["node_id"]), int(r["community_id"])) for r in reader)
    if [i for i, _ in rows] != list(range(len(rows))):
        raise ValueError(f"{path}: node ids must be 0..n-1")
    return Partition(np.array([c for _, c in rows], dtype=np.int64))
