"""Dense GF(2) kernels on bit-packed rows.

Rows are packed into uint64 words. The numba versions are used when numba
imports cleanly, unless ARTIFACT_PURE_NUMPY=1 is set in the environment.
"""
from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("ARTIFACT_PURE_NUMPY", "") not in ("", "0")

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled by ARTIFACT_PURE_NUMPY")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix of shape (r, c) into uint64 words of shape (r, ceil(c/64))."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    r, c = dense.shape
    nwords = max(1, (c + 63) // 64)
    padded = np.zeros((r, nwords * 64), dtype=np.uint8)
    padded[:, :c] = dense
    bits = np.packbits(padded.reshape(r, nwords, 64)[:, :, ::-1], axis=2, bitorder="big")
    return bits.view(">u8").reshape(r, nwords).astype(np.uint64)


def pack_entries(rows: int, cols: int, entries) -> np.ndarray:
    """Packed rows of a sparse 0/1 matrix given as (row, col) pairs, without a dense copy."""
    nwords = max(1, (cols + 63) // 64)
    out = np.zeros((rows, nwords), dtype=np.uint64)
    ents = np.asarray(list(entries), dtype=np.int64).reshape(-1, 2)
    if ents.size:
        r, c = ents[:, 0], ents[:, 1]
        np.bitwise_xor.at(out, (r, c >> 6), np.left_shift(np.uint64(1), (c & 63).astype(np.uint64)))
    return out


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    r, nwords = packed.shape
    as_bytes = packed.astype(">u8").view(np.uint8).reshape(r, nwords, 8)
    bits = np.unpackbits(as_bytes, axis=2, bitorder="big").reshape(r, nwords, 64)[:, :, ::-1]
    return bits.reshape(r, nwords * 64)[:, :cols].copy()


def _rank_numpy(packed: np.ndarray, cols: int) -> int:
    m = packed.copy()
    nrows = m.shape[0]
    rank = 0
    for col in range(cols):
        w, b = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(b)
        hits = np.nonzero(m[rank:, w] & mask)[0]
        if hits.size == 0:
            continue
        piv = rank + hits[0]
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        below = rank + 1 + np.nonzero(m[rank + 1:, w] & mask)[0]
        if below.size:
            m[below] ^= m[rank]
        rank += 1
        if rank == nrows:
            break
    return rank


def _matmul_numpy(a_dense: np.ndarray, b_packed: np.ndarray) -> np.ndarray:
    out = np.zeros((a_dense.shape[0], b_packed.shape[1]), dtype=np.uint64)
    for i in range(a_dense.shape[0]):
        idx = np.nonzero(a_dense[i])[0]
        if idx.size:
            out[i] = np.bitwise_xor.reduce(b_packed[idx], axis=0)
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _rank_numba(packed, cols):
        m = packed.copy()
        nrows, nwords = m.shape
        rank = 0
        for col in range(cols):
            w = col // 64
            mask = np.uint64(1) << np.uint64(col % 64)
            piv = -1
            for i in range(rank, nrows):
                if m[i, w] & mask:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(nwords):
                    t = m[rank, k]
                    m[rank, k] = m[piv, k]
                    m[piv, k] = t
            for i in range(rank + 1, nrows):
                if m[i, w] & mask:
                    for k in range(w, nwords):
                        m[i, k] ^= m[rank, k]
            rank += 1
            if rank == nrows:
                break
        return rank

    @njit(cache=True)
    def _matmul_numba(a_dense, b_packed):
        n = a_dense.shape[0]
        inner = a_dense.shape[1]
        nwords = b_packed.shape[1]
        out = np.zeros((n, nwords), dtype=np.uint64)
        for i in range(n):
            for j in range(inner):
                if a_dense[i, j]:
                    for k in range(nwords):
                        out[i, k] ^= b_packed[j, k]
        return out


def gf2_rank(dense: np.ndarray, backend: str | None = None) -> int:
    """Rank over GF(2) of a 0/1 matrix."""
    dense = np.asarray(dense)
    if dense.size == 0:
        return 0
    packed = pack_rows(dense)
    cols = dense.shape[1]
    if (backend or BACKEND) == "numba" and HAVE_NUMBA:
        return int(_rank_numba(packed, cols))
    return _rank_numpy(packed, cols)


def gf2_rank_sparse(rows: int, cols: int, entries, backend: str | None = None) -> int:
    """Rank over GF(2) of a sparse matrix; packs the shorter side into words."""
    if rows == 0 or cols == 0:
        return 0
    if cols > rows:
        rows, cols = cols, rows
        entries = [(c, r) for r, c in entries]
    packed = pack_entries(rows, cols, entries)
    if (backend or BACKEND) == "numba" and HAVE_NUMBA:
        return int(_rank_numba(packed, cols))
    return _rank_numpy(packed, cols)


def gf2_matmul(a: np.ndarray, b: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Product over GF(2) of two 0/1 matrices, returned as a uint8 matrix."""
    a = np.asarray(a, dtype=np.uint8) & 1
    b = np.asarray(b, dtype=np.uint8) & 1
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    if b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    bp = pack_rows(b)
    if (backend or BACKEND) == "numba" and HAVE_NUMBA:
        out = _matmul_numba(a, bp)
    else:
        out = _matmul_numpy(a, bp)
    return unpack_rows(out, b.shape[1])
