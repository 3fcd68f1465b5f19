import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_partitions, bell, dense_modularity, exhaustive_best_q, random_weighted_edges
from sentnet import _backend
from sentnet.louvain import (LouvainConfig, Partition, brute_force_partition, load_partition,
                             louvain_detect, modularity, save_partition)
from sentnet.simgraph import SentenceGraph, component_labels

TRIANGLE = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]
TWO_TRIANGLES = TRIANGLE + [(3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]


def clique(nodes, w=1.0):
    return [(a, b, w) for k, a in enumerate(nodes) for b in nodes[k + 1:]]


def graph(n, edges):
    return SentenceGraph.from_edges(n, edges)


def test_modularity_one_community():
    g = graph(6, TWO_TRIANGLES)
    assert modularity(g, np.zeros(6, dtype=int)) == pytest.approx(0.0, abs=1e-15)


def test_modularity_two_cliques():
    g = graph(6, TWO_TRIANGLES)
    assert modularity(g, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5)


def test_modularity_triangle_singletons():
    assert modularity(graph(3, TRIANGLE), [0, 1, 2]) == pytest.approx(-1 / 3)


def test_modularity_zero_weight_graph():
    assert modularity(graph(4, []), [0, 1, 2, 3]) == 0.0


def test_modularity_checks_cover():
    with pytest.raises(ValueError):
        modularity(graph(3, TRIANGLE), [0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_modularity_matches_dense_formula(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    edges = random_weighted_edges(n, 0.5, seed)
    memb = rng.integers(0, 3, size=n)
    assert modularity(graph(n, edges), memb) == pytest.approx(dense_modularity(n, edges, memb), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_modularity_matches_networkx(seed):
    nx = pytest.importorskip("networkx")
    edges = random_weighted_edges(10, 0.4, seed)
    if not edges:
        return
    g = graph(10, edges)
    memb = np.random.default_rng(seed).integers(0, 3, size=10)
    comms = [set(np.flatnonzero(memb == c).tolist()) for c in np.unique(memb)]
    assert modularity(g, memb) == pytest.approx(nx.community.modularity(g.to_networkx(), comms), abs=1e-12)


def test_partition_relabel():
    p = Partition.from_labels(["b", "a", "b", "c", "a", "b"])
    assert p.membership.tolist() == [0, 1, 0, 2, 1, 0]
    assert p.k == 3 and p.sizes().tolist() == [3, 2, 1] and p.n_singletons == 1
    with pytest.raises(ValueError):
        Partition(np.array([0, 2]))


def test_single_node():
    p = louvain_detect(graph(1, []))
    assert p.k == 1


def test_edgeless():
    p = louvain_detect(graph(5, []))
    assert p.k == 5 and p.n_singletons == 5


def test_two_cliques_weak_bridge():
    edges = clique([0, 1, 2, 3]) + clique([4, 5, 6, 7]) + [(3, 4, 0.1)]
    g = graph(8, edges)
    p = louvain_detect(g)
    best, q_best = brute_force_partition(g)
    assert p == best
    assert p.membership.tolist() == [0, 0, 0, 0, 1, 1, 1, 1]
    assert modularity(g, p) == pytest.approx(q_best)


def test_isolated_nodes_are_singletons():
    g = graph(7, TWO_TRIANGLES)
    p = louvain_detect(g)
    assert p.membership[6] not in p.membership[:6]
    assert p.k == 3


def test_deterministic():
    edges = random_weighted_edges(40, 0.15, 1)
    g = graph(40, edges)
    assert louvain_detect(g, LouvainConfig(seed=3)) == louvain_detect(g, LouvainConfig(seed=3))


def test_config_validation():
    with pytest.raises(ValueError):
        LouvainConfig(min_gain=0.0)
    with pytest.raises(ValueError):
        LouvainConfig(max_passes=0)


def test_brute_force_small_cases():
    p, q = brute_force_partition(graph(1, []))
    assert p.k == 1 and q == 0.0
    p, q = brute_force_partition(graph(6, TWO_TRIANGLES))
    assert p.membership.tolist() == [0, 0, 0, 1, 1, 1] and q == pytest.approx(0.5)
    with pytest.raises(ValueError):
        brute_force_partition(graph(11, []))


@pytest.mark.parametrize("n", range(1, 8))
def test_brute_force_enumerates_bell_number(n):
    from sentnet.louvain import _set_partitions
    seen = {tuple(a) for a in _set_partitions(n)}
    assert len(seen) == bell(n) == sum(1 for _ in all_partitions(range(n)))


@pytest.mark.parametrize("seed", range(8))
def test_brute_force_matches_exhaustive_oracle(seed):
    n = 3 + seed % 5
    edges = random_weighted_edges(n, 0.6, seed)
    _, q = brute_force_partition(graph(n, edges))
    assert q == pytest.approx(exhaustive_best_q(n, edges) if edges else 0.0, abs=1e-12)


def test_backends_identical():
    if len(_backend.available()) < 2:
        pytest.skip("compiled kernels not built")
    for seed in range(10):
        g = graph(60, random_weighted_edges(60, 0.08, seed))
        ta, tb = [], []
        a = louvain_detect(g, LouvainConfig(seed=seed), trace=ta, backend="python")
        b = louvain_detect(g, LouvainConfig(seed=seed), trace=tb, backend="cython")
        assert a == b and ta == tb


graphs = st.integers(1, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.floats(0.1, 0.9), st.integers(0, 10_000)))


@settings(max_examples=80, deadline=None)
@given(graphs, st.integers(0, 100))
def test_louvain_properties(spec, seed):
    n, density, gseed = spec
    g = graph(n, random_weighted_edges(n, density, gseed))
    trace = []
    p = louvain_detect(g, LouvainConfig(seed=seed), trace=trace)
    assert len(p) == n and set(p.membership.tolist()) == set(range(p.k))
    assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))
    q = modularity(g, p)
    assert q == pytest.approx(trace[-1], abs=1e-12)
    assert q >= modularity(g, np.arange(n)) - 1e-12
    assert q >= modularity(g, np.zeros(n, dtype=int)) - 1e-12
    comp = component_labels(g)
    for c in range(p.k):
        assert len(set(comp[p.membership == c].tolist())) == 1
    assert louvain_detect(g, LouvainConfig(seed=seed)) == p


def test_partition_io(tmp_path):
    p = Partition.from_labels([2, 2, 0, 1, 0])
    save_partition(p, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().splitlines()[:2] == ["node_id,community_id", "0,0"]
    assert load_partition(tmp_path / "p.csv") == p
