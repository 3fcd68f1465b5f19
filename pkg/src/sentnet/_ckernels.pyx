# cython: language_level=3
"""Compiled hot loops: all-pairs cosine over an inverted index and the
Louvain local-move sweep. Semantics match ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort

cnp.import_array()

NAME = "cython"


def cosine_pairs(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                 double[::1] data, double[::1] norms, Py_ssize_t n_terms):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t nnz = indices.shape[0]
    cdef Py_ssize_t i, j, p, q, t, c, end
    cdef double x, s, ni

    # inverted index (CSC layout), postings sorted by document id
    cdef cnp.int64_t[::1] pptr = np.zeros(n_terms + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] pdoc = np.empty(nnz, dtype=np.int64)
    cdef double[::1] pval = np.empty(nnz, dtype=np.float64)
    cdef cnp.int64_t[::1] fill = np.empty(n_terms, dtype=np.int64)
    for p in range(nnz):
        pptr[indices[p] + 1] += 1
    for t in range(n_terms):
        pptr[t + 1] += pptr[t]
        fill[t] = pptr[t]
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            t = indices[p]
            pdoc[fill[t]] = i
            pval[fill[t]] = data[p]
            fill[t] += 1

    cdef cnp.int64_t[::1] cursor = np.empty(n_terms, dtype=np.int64)
    for t in range(n_terms):
        cursor[t] = pptr[t]

    cdef double[::1] acc = np.zeros(max(n, 1), dtype=np.float64)
    cdef cnp.uint8_t[::1] seen = np.zeros(max(n, 1), dtype=np.uint8)
    cdef vector[cnp.int64_t] touched
    cdef vector[cnp.int64_t] rows
    cdef vector[cnp.int64_t] cols
    cdef vector[double] sims

    for i in range(n):
        touched.clear()
        for p in range(indptr[i], indptr[i + 1]):
            t = indices[p]
            x = data[p]
            c = cursor[t]
            end = pptr[t + 1]
            while c < end and pdoc[c] <= i:
                c += 1
            cursor[t] = c
            for q in range(c, end):
                j = pdoc[q]
                if not seen[j]:
                    seen[j] = 1
                    acc[j] = 0.0
                    touched.push_back(j)
                acc[j] = acc[j] + x * pval[q]
        sort(touched.begin(), touched.end())
        ni = norms[i]
        for q in range(<Py_ssize_t>touched.size()):
            j = touched[q]
            s = acc[j] / (ni * norms[j])
            if s > 1.0:
                s = 1.0
            if s > 0.0:
                rows.push_back(i)
                cols.push_back(j)
                sims.push_back(s)
            seen[j] = 0

    cdef Py_ssize_t m = rows.size()
    out_r = np.empty(m, dtype=np.int64)
    out_c = np.empty(m, dtype=np.int64)
    out_s = np.empty(m, dtype=np.float64)
    cdef cnp.int64_t[::1] vr = out_r
    cdef cnp.int64_t[::1] vc = out_c
    cdef double[::1] vs = out_s
    for q in range(m):
        vr[q] = rows[q]
        vc[q] = cols[q]
        vs[q] = sims[q]
    return out_r, out_c, out_s


def local_sweep(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, double[::1] data,
                double[::1] degrees, cnp.int64_t[::1] membership, double[::1] tot,
                cnp.int64_t[::1] order, double two_w, double min_gain):
    cdef Py_ssize_t n = degrees.shape[0]
    cdef Py_ssize_t k, p, i, j, c, d, best, target, q
    cdef double ki, g, gain_d, best_gain
    cdef Py_ssize_t moves = 0
    cdef double[::1] neigh_w = np.zeros(max(n, 1), dtype=np.float64)
    cdef cnp.uint8_t[::1] seen = np.zeros(max(n, 1), dtype=np.uint8)
    cdef vector[cnp.int64_t] touched

    for k in range(order.shape[0]):
        i = order[k]
        ki = degrees[i]
        d = membership[i]
        touched.clear()
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j == i:
                continue
            c = membership[j]
            if not seen[c]:
                seen[c] = 1
                neigh_w[c] = 0.0
                touched.push_back(c)
            neigh_w[c] = neigh_w[c] + data[p]
        tot[d] -= ki
        if seen[d]:
            gain_d = neigh_w[d] - tot[d] * ki / two_w
        else:
            gain_d = 0.0 - tot[d] * ki / two_w
        best = -1
        best_gain = 0.0
        for q in range(<Py_ssize_t>touched.size()):
            c = touched[q]
            if c == d:
                continue
            g = neigh_w[c] - tot[c] * ki / two_w
            if best < 0 or g > best_gain or (g == best_gain and c < best):
                best = c
                best_gain = g
        target = d
        if best >= 0 and best_gain - gain_d >= min_gain:
            target = best
        tot[target] += ki
        if target != d:
            membership[i] = target
            moves += 1
        for q in range(<Py_ssize_t>touched.size()):
            seen[touched[q]] = 0
    return moves
