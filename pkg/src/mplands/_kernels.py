"""Bit-packed GF(2) column-reduction kernels.

The reduction of a boundary matrix is the hot loop of every barcode
computation: columns are stored as bitsets (one uint64 word per 64 rows)
and reduced left-to-right in filtration order.  Two interchangeable
implementations are provided:

* a numba ``@njit`` kernel (default), and
* a pure-numpy fallback, selected by setting the environment variable
  ``MPLANDS_DISABLE_NUMBA=1`` before import (also used automatically if
  numba is not importable).

``benchmarks/bench_reduction.py`` compares the two paths.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("MPLANDS_DISABLE_NUMBA", "0").strip().lower()
_NUMBA_DISABLED = _FLAG not in ("", "0", "false")

try:
    if _NUMBA_DISABLED:
        raise ImportError
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False


def _reduce_columns_py(R, facets, col_order, n_rows, row_rank, cleared, low_out, owner_out):
    """Pure-numpy reduction. Same contract as the njit kernel below."""
    n_cols, n_fac = facets.shape
    if n_cols == 0:
        return 0
    one = np.uint64(1)
    n_adds = 0
    for oi in range(n_cols):
        j = col_order[oi]
        low_out[j] = -1
        if cleared[j]:
            continue
        rr = row_rank[facets[j]]
        words = int(rr.max()) // 64 + 1
        row = R[j]
        row[:words] = 0
        np.bitwise_xor.at(row, (rr // 64).astype(np.intp),
                          one << (rr % 64).astype(np.uint64))
        nz = np.nonzero(row[:words])[0]
        while nz.size:
            tw = int(nz[-1])
            l = (tw << 6) + int(row[tw]).bit_length() - 1
            k = owner_out[l]
            if k < 0:
                low_out[j] = l
                owner_out[l] = j
                break
            row[: tw + 1] ^= R[k, : tw + 1]
            n_adds += 1
            nz = np.nonzero(row[: tw + 1])[0]
    return n_adds


def _reduce_columns_impl(R, facets, col_order, n_rows, row_rank, cleared, low_out, owner_out):
    n_cols, n_fac = facets.shape
    words = (n_rows + 63) >> 6
    zero = np.uint64(0)
    one = np.uint64(1)
    n_adds = 0
    for oi in range(n_cols):
        j = col_order[oi]
        low_out[j] = -1
        if cleared[j]:
            continue
        row = R[j]
        for w in range(words):
            row[w] = zero
        tw = -1
        for f in range(n_fac):
            rr = row_rank[facets[j, f]]
            w = rr >> 6
            row[w] ^= one << np.uint64(rr & 63)
            if w > tw:
                tw = w
        while tw >= 0 and row[tw] == zero:
            tw -= 1
        if tw < 0:
            continue
        x = row[tw]
        h = 0
        if x >> np.uint64(32) != zero:
            h += 32
            x >>= np.uint64(32)
        if x >> np.uint64(16) != zero:
            h += 16
            x >>= np.uint64(16)
        if x >> np.uint64(8) != zero:
            h += 8
            x >>= np.uint64(8)
        if x >> np.uint64(4) != zero:
            h += 4
            x >>= np.uint64(4)
        if x >> np.uint64(2) != zero:
            h += 2
            x >>= np.uint64(2)
        if x >> np.uint64(1) != zero:
            h += 1
        l = (tw << 6) + h
        while l >= 0:
            k = owner_out[l]
            if k < 0:
                break
            other = R[k]
            nt = -1
            for w in range(tw + 1):
                v = row[w] ^ other[w]
                row[w] = v
                if v != zero:
                    nt = w
            n_adds += 1
            tw = nt
            if tw < 0:
                l = -1
                break
            x = row[tw]
            h = 0
            if x >> np.uint64(32) != zero:
                h += 32
                x >>= np.uint64(32)
            if x >> np.uint64(16) != zero:
                h += 16
                x >>= np.uint64(16)
            if x >> np.uint64(8) != zero:
                h += 8
                x >>= np.uint64(8)
            if x >> np.uint64(4) != zero:
                h += 4
                x >>= np.uint64(4)
            if x >> np.uint64(2) != zero:
                h += 2
                x >>= np.uint64(2)
            if x >> np.uint64(1) != zero:
                h += 1
            l = (tw << 6) + h
        low_out[j] = l
        if l >= 0:
            owner_out[l] = j
    return n_adds


if _HAVE_NUMBA:
    _reduce_columns_numba = njit(cache=True, nogil=True, boundscheck=False)(_reduce_columns_impl)
    reduce_columns = _reduce_columns_numba
    BACKEND = "numba"
else:
    _reduce_columns_numba = None
    reduce_columns = _reduce_columns_py
    BACKEND = "numpy"


def backend() -> str:
    """Name of the active reduction backend ("numba" or "numpy")."""
    return BACKEND
