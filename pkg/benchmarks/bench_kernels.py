"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 3]

Times all-pairs cosine similarity and Louvain detection on synthetic corpora
for every available backend and checks that the backends agree exactly.
"""
import argparse
import time

import numpy as np

from sentnet import _backend
from sentnet.louvain import LouvainConfig, louvain_detect
from sentnet.simgraph import build_graph
from sentnet.synth import generate_synthetic_corpus
from sentnet.textprep import PreprocessConfig, preprocess_corpus
from sentnet.vectorizer import fit_transform, pairwise_similarities


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000])
    ap.add_argument("--threshold", type=float, default=0.1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = _backend.available()
    prep = PreprocessConfig.default()
    print(f"backends: {', '.join(backends)}")
    print(f"{'n':>6} {'kernel':<8} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + f" {'speedup':>8}")
    for n in args.sizes:
        corpus = generate_synthetic_corpus(k_topics=5, per_topic=n // 5, seed=0)
        _, vectors = fit_transform(preprocess_corpus(corpus.texts, prep))

        times, pairs = {}, {}
        for b in backends:
            times[b], pairs[b] = best_of(lambda: pairwise_similarities(vectors, backend=b), args.repeat)
        _check_same([(p.rows, p.cols, p.weights) for p in pairs.values()], "cosine")
        _report(n, "cosine", backends, times)

        g = build_graph(pairs[backends[0]], args.threshold)
        times, parts = {}, {}
        for b in backends:
            times[b], parts[b] = best_of(lambda: louvain_detect(g, LouvainConfig(seed=0), backend=b),
                                         args.repeat)
        _check_same([(p.membership,) for p in parts.values()], "louvain")
        _report(n, "louvain", backends, times)


def _check_same(results, what):
    first = results[0]
    for other in results[1:]:
        if not all(np.array_equal(a, b) for a, b in zip(first, other)):
            raise SystemExit(f"{what}: backends disagree")


def _report(n, kernel, backends, times):
    cols = " ".join(f"{times[b]:12.4f}" for b in backends)
    speed = ""
    if "cython" in times and "python" in times:
        speed = f"{times['python'] / times['cython']:7.1f}x"
    print(f"{n:>6} {kernel:<8} {cols} {speed:>8}")


if __name__ == "__main__":
    main()
