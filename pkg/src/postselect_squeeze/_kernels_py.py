"""NumPy implementation of the dense single-site-sum kernels.

An operator ``O = sum_p (a_p s-_p + b_p s+_p + c_p sz_p)`` acts on the
computational basis where bit ``p`` of the index is emitter ``p``
(1 = excited).  Matrices passed in have shape ``(2**n, m)``; the second axis is
just carried along, so a pure state is a single column and a density matrix
is acted on from the left.
"""
import numpy as np


def _nbits(dim: int) -> int:
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def z_diagonal(n: int, c) -> np.ndarray:
    """Diagonal of ``sum_p c_p sz_p``."""
    idx = np.arange(1 << n)
    out = np.zeros(1 << n, dtype=np.result_type(c, float))
    for p in range(n):
        out += c[p] * (2 * ((idx >> p) & 1) - 1)
    return out


def apply_site_sum(M, a, b, c):
    M = np.ascontiguousarray(M, dtype=complex)
    dim, m = M.shape
    n = _nbits(dim)
    out = np.zeros_like(M)
    for p in range(n):
        if a[p] == 0 and b[p] == 0:
            continue
        T = M.reshape(dim >> (p + 1), 2, 1 << p, m)
        O = out.reshape(dim >> (p + 1), 2, 1 << p, m)
        if a[p] != 0:
            O[:, 0] += a[p] * T[:, 1]
        if b[p] != 0:
            O[:, 1] += b[p] * T[:, 0]
    if np.any(np.asarray(c) != 0):
        out += z_diagonal(n, np.asarray(c, dtype=complex))[:, None] * M
    return out


def trace_site_sum(M, a, b, c):
    """``Tr(O M)`` for a square ``M`` without forming ``O``."""
    M = np.asarray(M)
    dim = M.shape[0]
    n = _nbits(dim)
    idx = np.arange(dim)
    total = 0j
    for p in range(n):
        bit = 1 << p
        up = idx[(idx & bit) != 0]
        if a[p] != 0:
            total += a[p] * M[up, up ^ bit].sum()
        if b[p] != 0:
            total += b[p] * M[up ^ bit, up].sum()
    if np.any(np.asarray(c) != 0):
        total += (z_diagonal(n, np.asarray(c, dtype=complex)) * np.diagonal(M)).sum()
    return complex(total)
