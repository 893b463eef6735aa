# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _decode(Py_ssize_t flat, const long long* dims, int n, int* out) noexcept nogil:
    cdef int j
    for j in range(n - 1, -1, -1):
        out[j] = <int>(flat % dims[j])
        flat //= dims[j]


def seesaw_contract(const double complex[:, ::1] h, const long long[::1] dims,
                    const double complex[::1] vecs, int skip):
    """Contract ``h`` with local vectors on every party except ``skip``."""
    cdef int n = dims.shape[0]
    cdef Py_ssize_t total = h.shape[0]
    cdef int dk = <int>dims[skip]
    cdef Py_ssize_t r, c
    cdef int j
    cdef double complex wr, acc
    out_arr = np.zeros((dk, dk), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    cdef long long* offsets = <long long*>malloc(n * sizeof(long long))
    cdef int* idx = <int*>malloc(n * sizeof(int))
    cdef double complex* weight = <double complex*>malloc(total * sizeof(double complex))
    cdef int* local = <int*>malloc(total * sizeof(int))
    if offsets == NULL or idx == NULL or weight == NULL or local == NULL:
        free(offsets); free(idx); free(weight); free(local)
        raise MemoryError()
    try:
        with nogil:
            offsets[0] = 0
            for j in range(1, n):
                offsets[j] = offsets[j - 1] + dims[j - 1]
            for r in range(total):
                _decode(r, &dims[0], n, idx)
                wr = 1.0
                for j in range(n):
                    if j != skip:
                        wr = wr * vecs[offsets[j] + idx[j]]
                weight[r] = wr
                local[r] = idx[skip]
            for r in range(total):
                wr = weight[r].conjugate()
                if wr == 0:
                    continue
                for c in range(total):
                    acc = h[r, c]
                    if acc != 0:
                        out[local[r], local[c]] += wr * acc * weight[c]
    finally:
        free(offsets); free(idx); free(weight); free(local)
    return out_arr


def product_expectations(const double complex[:, ::1] h, const long long[::1] dims,
                         const double complex[:, ::1] batch):
    """Real expectation values of ``h`` on a batch of product states."""
    cdef int n = dims.shape[0]
    cdef Py_ssize_t total = h.shape[0]
    cdef Py_ssize_t nsamp = batch.shape[0]
    cdef Py_ssize_t s, r, c
    cdef int j
    cdef double complex acc, row
    out_arr = np.empty(nsamp, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef long long* offsets = <long long*>malloc(n * sizeof(long long))
    cdef int* idx = <int*>malloc(n * sizeof(int))
    cdef double complex* prod = <double complex*>malloc(total * sizeof(double complex))
    if offsets == NULL or idx == NULL or prod == NULL:
        free(offsets); free(idx); free(prod)
        raise MemoryError()
    try:
        with nogil:
            offsets[0] = 0
            for j in range(1, n):
                offsets[j] = offsets[j - 1] + dims[j - 1]
            for s in range(nsamp):
                for r in range(total):
                    _decode(r, &dims[0], n, idx)
                    acc = 1.0
                    for j in range(n):
                        acc = acc * batch[s, offsets[j] + idx[j]]
                    prod[r] = acc
                acc = 0.0
                for r in range(total):
                    row = 0.0
                    for c in range(total):
                        row = row + h[r, c] * prod[c]
                    acc = acc + prod[r].conjugate() * row
                out[s] = acc.real
    finally:
        free(offsets); free(idx); free(prod)
    return out_arr


def klyshko_fields(const double[::1] corr, const double[::1] coeffs,
                   const double[:, :, ::1] dirs, int k):
    """Local fields ``g[b, i]`` so that the Bell value is ``g[0]·a_k + g[1]·a'_k``."""
    cdef int n = dirs.shape[0]
    cdef Py_ssize_t nterms = coeffs.shape[0]
    cdef Py_ssize_t ncorr = corr.shape[0]
    cdef Py_ssize_t s, t
    cdef int j, bit, comp
    cdef double c, w
    cdef Py_ssize_t rem
    out_arr = np.zeros((2, 3), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int* sbits = <int*>malloc(n * sizeof(int))
    cdef int* tidx = <int*>malloc(n * sizeof(int))
    if sbits == NULL or tidx == NULL:
        free(sbits); free(tidx)
        raise MemoryError()
    try:
        with nogil:
            for s in range(nterms):
                c = coeffs[s]
                if c == 0.0:
                    continue
                rem = s
                for j in range(n - 1, -1, -1):
                    sbits[j] = <int>(rem & 1)
                    rem >>= 1
                bit = sbits[k]
                for t in range(ncorr):
                    rem = t
                    for j in range(n - 1, -1, -1):
                        tidx[j] = <int>(rem % 3)
                        rem //= 3
                    w = corr[t]
                    if w == 0.0:
                        continue
                    for j in range(n):
                        if j != k:
                            w = w * dirs[j, sbits[j], tidx[j]]
                    comp = tidx[k]
                    out[bit, comp] += c * w
    finally:
        free(sbits); free(tidx)
    return out_arr
