"""Pure-Python versions of the hot loops.

These mirror ``_ckernels.pyx`` operation for operation, including the order
in which floating-point sums are accumulated, so both backends return
bit-identical results.
"""
import numpy as np

NAME = "python"


def cosine_pairs(indptr, indices, data, norms, n_terms):
    """All document pairs (i < j) with positive cosine similarity.

    Rows are CSR slices of the TF-IDF matrix with sorted column indices.
    Only pairs that share at least one term are visited, through an
    inverted index over the terms.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    data = data.tolist()
    norms = norms.tolist()
    n = len(indptr) - 1

    postings = [[] for _ in range(n_terms)]
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            postings[indices[p]].append((i, data[p]))
    cursor = [0] * n_terms

    rows, cols, sims = [], [], []
    for i in range(n):
        acc = {}
        for p in range(indptr[i], indptr[i + 1]):
            t = indices[p]
            x = data[p]
            plist = postings[t]
            c = cursor[t]
            while c < len(plist) and plist[c][0] <= i:
                c += 1
            cursor[t] = c
            for q in range(c, len(plist)):
                j, y = plist[q]
                acc[j] = acc.get(j, 0.0) + x * y
        ni = norms[i]
        for j in sorted(acc):
            s = acc[j] / (ni * norms[j])
            if s > 1.0:
                s = 1.0
            if s > 0.0:
                rows.append(i)
                cols.append(j)
                sims.append(s)
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(sims, dtype=np.float64),
    )


def local_sweep(indptr, indices, data, degrees, membership, tot, order, two_w, min_gain):
    """One pass of Louvain local moves over ``order``.

    ``membership`` and ``tot`` are updated in place. ``min_gain`` is already
    scaled by the total edge weight. Returns the number of nodes moved.
    """
    ip = indptr.tolist()
    ix = indices.tolist()
    w = data.tolist()
    deg = degrees.tolist()
    memb = membership.tolist()
    tt = tot.tolist()

    moves = 0
    for i in order.tolist():
        ki = deg[i]
        d = memb[i]
        neigh = {}
        for p in range(ip[i], ip[i + 1]):
            j = ix[p]
            if j == i:
                continue
            c = memb[j]
            neigh[c] = neigh.get(c, 0.0) + w[p]
        tt[d] -= ki
        gain_d = neigh.get(d, 0.0) - tt[d] * ki / two_w
        best = -1
        best_gain = 0.0
        for c, wc in neigh.items():
            if c == d:
                continue
            g = wc - tt[c] * ki / two_w
            if best < 0 or g > best_gain or (g == best_gain and c < best):
                best = c
                best_gain = g
        target = d
        if best >= 0 and best_gain - gain_d >= min_gain:
            target = best
        tt[target] += ki
        if target != d:
            memb[i] = target
            moves += 1

    membership[:] = memb
    tot[:] = tt
    return moves
