# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CSR aggregation and edge-sum kernels.

Mirrors the public surface of ``cgbp._pykernels``; the two backends are
interchangeable and must return identical values up to floating-point
associativity.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64


def backend_name():
    return "compiled"


def csr_weighted_sum(i64[:] offsets, i64[:] cols, f64[:] weights, f64[:, :] x):
    """out[i, :] = sum over CSR entries e of row i of weights[e] * x[cols[e], :]."""
    cdef Py_ssize_t n = offsets.shape[0] - 1
    cdef Py_ssize_t k = x.shape[1]
    out_arr = np.zeros((n, k), dtype=np.float64)
    cdef f64[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, e, c
    cdef f64 w
    for i in range(n):
        for e in range(offsets[i], offsets[i + 1]):
            c = cols[e]
            w = weights[e]
            for j in range(k):
                out[i, j] += w * x[c, j]
    return out_arr


def mis_loss_grad(i64[:] eu, i64[:] ev, f64[:] p, double penalty):
    """Independent-set relaxation: loss and gradient wrt p.

    loss = -sum(p) + penalty * sum over edges of p[u]*p[v]
    """
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m = eu.shape[0]
    grad_arr = np.full(n, -1.0, dtype=np.float64)
    cdef f64[::1] grad = grad_arr
    cdef Py_ssize_t e, u, v
    cdef double loss = 0.0, quad = 0.0
    for e in range(m):
        u = eu[e]
        v = ev[e]
        quad += p[u] * p[v]
        grad[u] += penalty * p[v]
        grad[v] += penalty * p[u]
    for e in range(n):
        loss -= p[e]
    return loss + penalty * quad, grad_arr


def mc_loss_grad(i64[:] eu, i64[:] ev, f64[:] p):
    """Cut relaxation: loss = sum over edges of (2 p_u p_v - p_u - p_v)."""
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t m = eu.shape[0]
    grad_arr = np.zeros(n, dtype=np.float64)
    cdef f64[::1] grad = grad_arr
    cdef Py_ssize_t e, u, v
    cdef double loss = 0.0
    for e in range(m):
        u = eu[e]
        v = ev[e]
        loss += 2.0 * p[u] * p[v] - p[u] - p[v]
        grad[u] += 2.0 * p[v] - 1.0
        grad[v] += 2.0 * p[u] - 1.0
    return loss, grad_arr


def gc_loss_grad(i64[:] eu, i64[:] ev, f64[:, :] p):
    """Same-color overlap: loss = sum over edges of dot(p[u], p[v])."""
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t q = p.shape[1]
    cdef Py_ssize_t m = eu.shape[0]
    grad_arr = np.zeros((n, q), dtype=np.float64)
    cdef f64[:, ::1] grad = grad_arr
    cdef Py_ssize_t e, u, v, c
    cdef double loss = 0.0
    for e in range(m):
        u = eu[e]
        v = ev[e]
        for c in range(q):
            loss += p[u, c] * p[v, c]
            grad[u, c] += p[v, c]
            grad[v, c] += p[u, c]
    return loss, grad_arr


def cut_count(i64[:] eu, i64[:] ev, i64[:] x):
    """Number of edges whose endpoints carry different values."""
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t e
    cdef long long total = 0
    for e in range(m):
        if x[eu[e]] != x[ev[e]]:
            total += 1
    return total


def same_value_count(i64[:] eu, i64[:] ev, i64[:] x):
    """Number of edges whose endpoints carry the same value."""
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t e
    cdef long long total = 0
    for e in range(m):
        if x[eu[e]] == x[ev[e]]:
            total += 1
    return total


def both_selected_count(i64[:] eu, i64[:] ev, i64[:] x):
    """Number of edges with both endpoints set to 1."""
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t e
    cdef long long total = 0
    for e in range(m):
        if x[eu[e]] == 1 and x[ev[e]] == 1:
            total += 1
    return total
