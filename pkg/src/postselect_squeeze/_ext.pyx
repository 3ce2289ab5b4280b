# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the single-site-sum kernels in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef int _nbits(Py_ssize_t dim) except -1:
    cdef int n = 0
    while (<Py_ssize_t>1 << n) < dim:
        n += 1
    if (<Py_ssize_t>1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def apply_site_sum(M, a, b, c):
    # gather form: every output row is written once, from the n rows one bit
    # flip away plus the diagonal term; complex products are spelled out in
    # real arithmetic to avoid the C99 complex-multiply slow path
    src_arr = np.ascontiguousarray(M, dtype=np.complex128)
    cdef Py_ssize_t dim = src_arr.shape[0], m = src_arr.shape[1]
    cdef int n = _nbits(dim)
    cdef double[:, ::1] src = src_arr.view(np.float64)
    cdef double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double complex[::1] cv = np.ascontiguousarray(c, dtype=np.complex128)
    out_arr = np.zeros((dim, m), dtype=np.complex128)
    cdef double[:, ::1] out = out_arr.view(np.float64)
    cdef Py_ssize_t i, j, col, bit
    cdef int p
    cdef double cr, ci, sr, si
    cdef double complex coef, zsum
    cdef bint has_z = False

    for p in range(n):
        if cv[p] != 0:
            has_z = True
    with nogil:
        for i in range(dim):
            if has_z:
                zsum = 0
                for p in range(n):
                    if i & (<Py_ssize_t>1 << p):
                        zsum = zsum + cv[p]
                    else:
                        zsum = zsum - cv[p]
                cr = zsum.real
                ci = zsum.imag
                for col in range(m):
                    sr = src[i, 2 * col]
                    si = src[i, 2 * col + 1]
                    out[i, 2 * col] = cr * sr - ci * si
                    out[i, 2 * col + 1] = cr * si + ci * sr
            for p in range(n):
                bit = <Py_ssize_t>1 << p
                if i & bit:
                    coef = bv[p]  # s+ raises row i ^ bit into row i
                    j = i ^ bit
                else:
                    coef = av[p]  # s- lowers row i | bit into row i
                    j = i | bit
                cr = coef.real
                ci = coef.imag
                if cr == 0 and ci == 0:
                    continue
                for col in range(m):
                    sr = src[j, 2 * col]
                    si = src[j, 2 * col + 1]
                    out[i, 2 * col] += cr * sr - ci * si
                    out[i, 2 * col + 1] += cr * si + ci * sr
    return out_arr


def trace_site_sum(M, a, b, c):
    cdef double complex[:, ::1] src = np.ascontiguousarray(M, dtype=np.complex128)
    cdef double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double complex[::1] cv = np.ascontiguousarray(c, dtype=np.complex128)
    cdef Py_ssize_t dim = src.shape[0]
    cdef int n = _nbits(dim)
    cdef Py_ssize_t i, bit
    cdef int p
    cdef double complex total = 0, zsum

    with nogil:
        for i in range(dim):
            zsum = 0
            for p in range(n):
                bit = <Py_ssize_t>1 << p
                if i & bit:
                    # <i|s-_p ... : s-_p maps i -> i^bit, contributes M[i, i^bit]
                    total = total + av[p] * src[i, i ^ bit]
                    zsum = zsum + cv[p]
                else:
                    total = total + bv[p] * src[i, i | bit]
                    zsum = zsum - cv[p]
            total = total + zsum * src[i, i]
    return complex(total)
