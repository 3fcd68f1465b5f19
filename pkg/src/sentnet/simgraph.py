"""Thresholded sentence networks."""
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True)
class SentenceGraph:
    """Undirected weighted graph; edges stored once with ``i < j``, sorted."""
    n_nodes: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    threshold: float = 0.0

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if not (rows.shape == cols.shape == w.shape):
            raise ValueError("edge arrays differ in length")
        if rows.size:
            if np.any(rows >= cols):
                raise ValueError("edges must satisfy i < j (no self-loops)")
            if rows.min() < 0 or cols.max() >= self.n_nodes:
                raise ValueError("edge endpoint out of range")
            if np.any(w <= 0):
                raise ValueError("edge weights must be positive")
            order = np.lexsort((cols, rows))
            rows, cols, w = rows[order], cols[order], w[order]
            key = rows * self.n_nodes + cols
            if np.any(np.diff(key) == 0):
                raise ValueError("duplicate edge")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, n_nodes, edges, threshold=0.0):
        edges = [(min(i, j), max(i, j), w) for i, j, w in edges]
        return cls(n_nodes,
                   [e[0] for e in edges], [e[1] for e in edges], [e[2] for e in edges],
                   threshold)

    @property
    def n_edges(self):
        return int(self.rows.size)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def edges(self):
        return [(int(i), int(j), float(w)) for i, j, w in zip(self.rows, self.cols, self.weights)]

    def adjacency(self):
        """Symmetric CSR arrays ``(indptr, indices, data)`` with sorted rows."""
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        w = np.concatenate([self.weights, self.weights])
        order = np.lexsort((c, r))
        r, c, w = r[order], c[order], w[order]
        indptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=self.n_nodes), out=indptr[1:])
        return indptr, np.ascontiguousarray(c, dtype=np.int64), np.ascontiguousarray(w)

    def degrees(self):
        return (np.bincount(self.rows, self.weights, minlength=self.n_nodes)
                + np.bincount(self.cols, self.weights, minlength=self.n_nodes))

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(self.n_nodes))
        g.add_weighted_edges_from(self.edges())
        return g


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int
    n_components: int
    n_isolated_nodes: int
    total_weight: float


def build_graph(pairs, threshold: float, n_nodes=None) -> SentenceGraph:
    """Keep pairs with similarity ``>= threshold`` (and ``> 0``).

    ``pairs`` is a :class:`~sentnet.vectorizer.PairSimilarities`. Nodes that
    lose all their edges stay in the graph as isolated nodes.
    """
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must lie in [0, 1)")
    n = pairs.n if n_nodes is None else n_nodes
    keep = (pairs.weights >= threshold) & (pairs.weights > 0)
    return SentenceGraph(n, pairs.rows[keep], pairs.cols[keep], pairs.weights[keep], threshold)


def graph_stats(g: SentenceGraph) -> GraphStats:
    if g.n_nodes == 0:
        return GraphStats(0, 0, 0, 0, 0.0)
    a = coo_matrix((np.ones(g.n_edges), (g.rows, g.cols)), shape=(g.n_nodes, g.n_nodes))
    n_comp, _ = connected_components(a, directed=False)
    deg = np.bincount(np.concatenate([g.rows, g.cols]), minlength=g.n_nodes)
    return GraphStats(g.n_nodes, g.n_edges, int(n_comp), int(np.sum(deg == 0)), g.total_weight)


def component_labels(g: SentenceGraph):
    a = coo_matrix((np.ones(g.n_edges), (g.rows, g.cols)), shape=(g.n_nodes, g.n_nodes))
    return connected_components(a, directed=False)[1]


def format_weight(w: float) -> str:
    """Nine decimals when that is exact, otherwise 17 significant digits."""
    s = f"{w:.9f}"
    return s if float(s) == w else f"{w:.17g}"


_NS = "http://graphml.graphdrawing.org/xmlns"


def export_graph(g: SentenceGraph, path, format="graphml"):
    path = Path(path)
    if format == "edge-list":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# nodes={g.n_nodes} threshold={format_weight(g.threshold)}\n")
            for i, j, w in g.edges():
                fh.write(f"{i} {j} {format_weight(w)}\n")
        return
    if format != "graphml":
        raise ValueError(f"unknown graph format {format!r}")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<graphml xmlns="{_NS}">',
        '  <key id="threshold" for="graph" attr.name="threshold" attr.type="double"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <graph id="G" edgedefault="undirected">',
        f'    <data key="threshold">{format_weight(g.threshold)}</data>',
    ]
    lines += [f'    <node id="{i}"/>' for i in range(g.n_nodes)]
    for i, j, w in g.edges():
        lines.append(f'    <edge source="{i}" target="{j}"><data key="weight">{format_weight(w)}</data></edge>')
    lines += ["  </graph>", "</graphml>", ""]
    path.write_text("\n".join(lines), encoding="utf-8")


def import_graph(path, format=None) -> SentenceGraph:
    path = Path(path)
    if format is None:
        format = "graphml" if path.suffix.lower() == ".graphml" else "edge-list"
    if format == "edge-list":
        n, threshold, edges = None, 0.0, []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for tok in line[1:].split():
                        k, _, v = tok.partition("=")
                        if k == "nodes":
                            n = int(v)
                        elif k == "threshold":
                            threshold = float(v)
                    continue
                i, j, w = line.split()
                edges.append((int(i), int(j), float(w)))
        if n is None:
            n = 1 + max((max(i, j) for i, j, _ in edges), default=-1)
        return SentenceGraph.from_edges(n, edges, threshold)
    if format != "graphml":
        raise ValueError(f"unknown graph format {format!r}")
    root = ET.parse(path).getroot()
    ns = {"g": _NS}
    graph = root.find("g:graph", ns)
    keys = {k.get("id"): k.get("attr.name") for k in root.findall("g:key", ns)}
    threshold = 0.0
    for d in graph.findall("g:data", ns):
        if keys.get(d.get("key")) == "threshold":
            threshold = float(d.text)
    node_ids = [nd.get("id") for nd in graph.findall("g:node", ns)]
    index = {nid: k for k, nid in enumerate(node_ids)}
    edges = []
    for e in graph.findall("g:edge", ns):
        w = math.nan
        for d in e.findall("g:data", ns):
            if keys.get(d.get("key")) == "weight":
                w = float(d.text)
        edges.append((index[e.get("source")], index[e.get("target")], 1.0 if math.isnan(w) else w))
    return SentenceGraph.from_edges(len(node_ids), edges, threshold)
