# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  See ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, uint8_t, int64_t

cnp.import_array()

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil

cdef enum:
    H = 0
    S = 1
    X = 2
    SX = 3
    CX = 4
    CZ = 5


def conjugate_rows(uint64_t[::1] x, uint64_t[::1] z, uint8_t[::1] r, int kind, int a, int b=-1):
    cdef Py_ssize_t i, m = x.shape[0]
    cdef uint64_t ma = (<uint64_t>1) << a
    cdef uint64_t mb = 0
    cdef uint64_t xa, za, xb, zb
    if kind == CX or kind == CZ:
        mb = (<uint64_t>1) << b
    elif kind < 0 or kind > 5:
        raise ValueError(f"unknown gate kind {kind}")
    with nogil:
        for i in range(m):
            xa = (x[i] >> a) & 1
            za = (z[i] >> a) & 1
            if kind == H:
                r[i] = (r[i] + 2 * (xa & za)) & 3
                if xa != za:
                    x[i] ^= ma
                    z[i] ^= ma
            elif kind == S:
                r[i] = (r[i] + 2 * (xa & za)) & 3
                if xa:
                    z[i] ^= ma
            elif kind == X:
                r[i] = (r[i] + 2 * za) & 3
            elif kind == SX:
                r[i] = (r[i] + 2 * (za & (xa ^ 1))) & 3
                if za:
                    x[i] ^= ma
            elif kind == CX:
                xb = (x[i] >> b) & 1
                zb = (z[i] >> b) & 1
                r[i] = (r[i] + 2 * (xa & zb & (xb ^ za ^ 1))) & 3
                if xa:
                    x[i] ^= mb
                if zb:
                    z[i] ^= ma
            else:
                xb = (x[i] >> b) & 1
                zb = (z[i] >> b) & 1
                r[i] = (r[i] + 2 * (xa & xb & (za ^ zb))) & 3
                if xb:
                    z[i] ^= ma
                if xa:
                    z[i] ^= mb


cdef inline void _mul_into(uint64_t* x1, uint64_t* z1, uint8_t* r1,
                           uint64_t x2, uint64_t z2, uint8_t r2) nogil:
    cdef uint64_t a = x1[0], c = z1[0]
    cdef uint64_t pos = (a & ~c & x2 & z2) | (a & c & ~x2 & z2) | (~a & c & x2 & ~z2)
    cdef uint64_t neg = (a & c & x2 & ~z2) | (~a & c & x2 & z2) | (a & ~c & ~x2 & z2)
    cdef int ph = <int>r1[0] + <int>r2 + popcount64(pos) - popcount64(neg)
    x1[0] = a ^ x2
    z1[0] = c ^ z2
    r1[0] = <uint8_t>(ph & 3)


def canonicalize_rows(uint64_t[::1] x, uint64_t[::1] z, uint8_t[::1] r, int n):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t i, piv, k = 0
    cdef int q, part
    cdef uint64_t bit, tx, tz
    cdef uint8_t tr
    with nogil:
        for q in range(n):
            bit = (<uint64_t>1) << q
            for part in range(2):
                if k >= m:
                    break
                piv = -1
                for i in range(k, m):
                    if (x[i] if part == 0 else z[i]) & bit:
                        piv = i
                        break
                if piv < 0:
                    continue
                tx = x[k]; tz = z[k]; tr = r[k]
                x[k] = x[piv]; z[k] = z[piv]; r[k] = r[piv]
                x[piv] = tx; z[piv] = tz; r[piv] = tr
                for i in range(m):
                    if i != k and ((x[i] if part == 0 else z[i]) & bit):
                        _mul_into(&x[i], &z[i], &r[i], x[k], z[k], r[k])
                k += 1
    return k


def min_weight_rows(uint64_t[::1] ex, uint64_t[::1] ez, uint64_t[::1] gx, uint64_t[::1] gz):
    cdef Py_ssize_t i, j, m = ex.shape[0], g = gx.shape[0]
    cdef int w, best
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(m):
            best = 65
            for j in range(g):
                w = popcount64((ex[i] ^ gx[j]) | (ez[i] ^ gz[j]))
                if w < best:
                    best = w
                    if best == 0:
                        break
            o[i] = best
    return out
