"""Vectorized GF(256) arithmetic and matrix rank.

The field is GF(2^8) with the AES modulus x^8 + x^4 + x^3 + x + 1 (0x11B).
Multiplication goes through log/antilog tables with generator 0x03; addition
is XOR.  Rank reduction runs column by column over a whole stack of matrices
at once so that millions of small coefficient matrices can be ranked per
second.
"""

from __future__ import annotations

import numpy as np

from .params import ParameterError

_MODULUS = 0x11B
_GENERATOR = 0x03


def _build_tables() -> tuple[np.ndarray, np.ndarray]:
    exp = np.zeros(510, dtype=np.int64)
    log = np.zeros(256, dtype=np.int64)
    value = 1
    for i in range(255):
        exp[i] = value
        log[value] = i
        # multiply by the generator 0x03: value * 2 + value, reduced mod 0x11B
        doubled = value << 1
        if doubled & 0x100:
            doubled ^= _MODULUS
        value = doubled ^ value
    exp[255:510] = exp[0:255]
    return exp, log


GF_EXP, GF_LOG = _build_tables()
GF_INV = np.zeros(256, dtype=np.int64)
GF_INV[1:] = GF_EXP[255 - GF_LOG[1:]]


def gf_mul(a, b) -> np.ndarray:
    """Elementwise product in GF(256); accepts broadcastable int arrays."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
    a, b = np.broadcast_to(a, out.shape), np.broadcast_to(b, out.shape)
    nz = (a != 0) & (b != 0)
    out[nz] = GF_EXP[GF_LOG[a[nz]] + GF_LOG[b[nz]]]
    return out


def gf256_rank_many(matrices: np.ndarray) -> np.ndarray:
    """Rank of each matrix in a (count, rows, cols) stack over GF(256)."""
    a = np.asarray(matrices, dtype=np.int64)
    if a.ndim != 3:
        raise ParameterError(f"expected a 3-d stack of matrices, got shape {a.shape}")
    count, rows, cols = a.shape
    if rows == 0 or cols == 0:
        raise ParameterError("matrices must be nonempty")
    a = a.copy()
    pivot_row = np.zeros(count, dtype=np.int64)
    row_index = np.arange(rows)
    for col in range(cols):
        column = a[:, :, col]
        eligible = (row_index[None, :] >= pivot_row[:, None]) & (column != 0)
        has_pivot = eligible.any(axis=1)
        idx = np.nonzero(has_pivot)[0]
        if idx.size == 0:
            continue
        src = eligible[idx].argmax(axis=1)
        dst = pivot_row[idx]
        # Swap the found pivot row into position.
        tmp = a[idx, dst, :].copy()
        a[idx, dst, :] = a[idx, src, :]
        a[idx, src, :] = tmp
        # Scale the pivot row to make the pivot 1.
        inv = GF_INV[a[idx, dst, col]]
        a[idx, dst, :] = gf_mul(a[idx, dst, :], inv[:, None])
        # Eliminate the column below the pivot.
        below = row_index[None, :] > dst[:, None]
        factors = np.where(below, a[idx, :, col], 0)
        a[idx] ^= gf_mul(factors[:, :, None], a[idx, dst, :][:, None, :])
        pivot_row[idx] = dst + 1
        if (pivot_row >= rows).all():
            break
    return pivot_row


def gf256_rank(matrix) -> int:
    """Rank of a single matrix over GF(256)."""
    m = np.asarray(matrix, dtype=np.int64)
    if m.ndim != 2:
        raise ParameterError(f"expected a 2-d matrix, got shape {m.shape}")
    return int(gf256_rank_many(m[None, :, :])[0])
