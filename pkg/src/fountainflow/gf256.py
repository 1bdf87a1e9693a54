"""GF(256) arithmetic with lookup tables and bulk row kernels.

The field is GF(2^8) built on the polynomial x^8 + x^4 + x^3 + x^2 + 1
(0x11D).  Addition is XOR.  Single-element multiply uses exp/log tables;
bulk operations on symbol rows go through a flat 256*256 product table so
they can be driven by numpy fancy indexing or the numba kernels below.
"""

from __future__ import annotations

import os

import numpy as np

# the sandboxed TBB runtime predates what numba wants; workqueue is fine
# for the two-kernel workload here
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

POLY = 0x11D
FIELD_SIZE = 256
PARALLEL_WORK_THRESHOLD = 1 << 23  # bytes of table work before threading pays

# exp/log tables for the generator alpha = 2 (primitive for 0x11D).
EXP = np.zeros(512, dtype=np.uint8)
LOG = np.zeros(256, dtype=np.int32)
_x = 1
for _i in range(255):
    EXP[_i] = _x
    LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= POLY
for _i in range(255, 512):
    EXP[_i] = EXP[_i - 255]
del _x, _i

# Flat 64 KiB product table: MUL_FLAT[(a << 8) | b] = a*b.
_a = np.arange(256, dtype=np.int32)
_lo = LOG[_a][:, None] + LOG[_a][None, :]
MUL_TABLE = EXP[_lo % 255].astype(np.uint8)
MUL_TABLE[0, :] = 0
MUL_TABLE[:, 0] = 0
MUL_FLAT = np.ascontiguousarray(MUL_TABLE.reshape(-1))
INV = np.zeros(256, dtype=np.uint8)
INV[1:] = EXP[255 - LOG[np.arange(1, 256)]]
del _a, _lo


def gf_mul(a: int, b: int) -> int:
    """Product of two field elements (integers in [0, 255])."""
    if a == 0 or b == 0:
        return 0
    return int(EXP[LOG[a] + LOG[b]])


def gf_inv(a: int) -> int:
    """Multiplicative inverse; raises on zero."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return int(INV[a])


def gf_add(a: int, b: int) -> int:
    return a ^ b


def mul_row(c: int, row: np.ndarray) -> np.ndarray:
    """Scalar * row over GF(256); returns a new uint8 array."""
    if c == 0:
        return np.zeros_like(row)
    if c == 1:
        return row.copy()
    return MUL_TABLE[c][row]


def addmul_row(acc: np.ndarray, c: int, row: np.ndarray) -> None:
    """acc ^= c * row, in place."""
    if c == 0:
        return
    if c == 1:
        acc ^= row
    else:
        acc ^= MUL_TABLE[c][row]


def _np_matmul(coeffs: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    n, k = coeffs.shape
    for i in range(k):
        col = coeffs[:, i]
        if not col.any():
            continue
        out ^= MUL_TABLE[col[:, None], rows[i][None, :]]


try:  # pragma: no cover - exercised indirectly
    from numba import njit, prange

    @njit(cache=True, nogil=True)
    def _nb_matmul(coeffs, rows, table, out):
        n, k = coeffs.shape
        length = rows.shape[1]
        for j in range(n):
            o = out[j]
            for i in range(k):
                c = coeffs[j, i]
                if c:
                    base = int(c) << 8
                    r = rows[i]
                    for l in range(length):
                        o[l] ^= table[base + r[l]]

    @njit(cache=True, nogil=True, parallel=True)
    def _nb_matmul_par(coeffs, rows, table, out):
        n, k = coeffs.shape
        length = rows.shape[1]
        for j in prange(n):
            o = out[j]
            for i in range(k):
                c = coeffs[j, i]
                if c:
                    base = int(c) << 8
                    r = rows[i]
                    for l in range(length):
                        o[l] ^= table[base + r[l]]

    @njit(cache=True, nogil=True)
    def _nb_reduce_row(row, pivots, pivcols, npiv, table, inv):
        """Eliminate `row` against npiv stored pivot rows; normalize.

        Returns the new pivot column, or -1 if the row reduced to zero.
        Pivot rows are normalized (leading coefficient 1).
        """
        k = row.shape[0]
        for j in range(npiv):
            c = row[pivcols[j]]
            if c:
                base = int(c) << 8
                p = pivots[j]
                for l in range(k):
                    row[l] ^= table[base + p[l]]
        col = -1
        for l in range(k):
            if row[l]:
                col = l
                break
        if col < 0:
            return -1
        s = inv[row[col]]
        if s != 1:
            base = int(s) << 8
            for l in range(k):
                row[l] = table[base + row[l]]
        return col

    @njit(cache=True, nogil=True)
    def _nb_solve_augmented(a, b, table, inv):
        """In-place Gauss-Jordan of a (m x m) with payload rows b (m x L).

        Returns False if a is singular; on success a becomes the identity
        and b the solution rows.
        """
        m = a.shape[0]
        length = b.shape[1]
        for col in range(m):
            piv = -1
            for r in range(col, m):
                if a[r, col]:
                    piv = r
                    break
            if piv < 0:
                return False
            if piv != col:
                for l in range(m):
                    tmp = a[col, l]
                    a[col, l] = a[piv, l]
                    a[piv, l] = tmp
                for l in range(length):
                    tmp = b[col, l]
                    b[col, l] = b[piv, l]
                    b[piv, l] = tmp
            s = inv[a[col, col]]
            if s != 1:
                base = int(s) << 8
                for l in range(m):
                    a[col, l] = table[base + a[col, l]]
                for l in range(length):
                    b[col, l] = table[base + b[col, l]]
            for r in range(m):
                if r != col and a[r, col]:
                    base = int(a[r, col]) << 8
                    for l in range(m):
                        a[r, l] ^= table[base + a[col, l]]
                    for l in range(length):
                        b[r, l] ^= table[base + b[col, l]]
        return True

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False


def reduce_row(row: np.ndarray, pivots: np.ndarray, pivcols: np.ndarray,
               npiv: int) -> int:
    """Eliminate row against stored normalized pivot rows; returns the new
    pivot column or -1.  Normalizes the row in place on success."""
    if HAVE_NUMBA:
        return int(_nb_reduce_row(row, pivots, pivcols, npiv, MUL_FLAT, INV))
    for j in range(npiv):
        c = int(row[pivcols[j]])
        if c:
            addmul_row(row, c, pivots[j])
    nz = np.nonzero(row)[0]
    if nz.size == 0:
        return -1
    col = int(nz[0])
    s = int(INV[row[col]])
    if s != 1:
        row[:] = MUL_TABLE[s][row]
    return col


def solve_augmented(a: np.ndarray, b: np.ndarray) -> bool:
    """Gauss-Jordan solve of a @ x = b over GF(256), in place (x ends in b).

    Returns False when `a` is singular.
    """
    if HAVE_NUMBA:
        return bool(_nb_solve_augmented(a, b, MUL_FLAT, INV))
    m = a.shape[0]
    for col in range(m):
        piv = None
        for r in range(col, m):
            if a[r, col]:
                piv = r
                break
        if piv is None:
            return False
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        s = int(INV[a[col, col]])
        if s != 1:
            a[col] = MUL_TABLE[s][a[col]]
            b[col] = MUL_TABLE[s][b[col]]
        for r in range(m):
            if r != col and a[r, col]:
                c = int(a[r, col])
                addmul_row(a[r], c, a[col])
                addmul_row(b[r], c, b[col])
    return True


def gf_matmul(coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Dense product coeffs (n x k) @ rows (k x L) over GF(256).

    The workhorse for repair-symbol encoding and decode-time residual
    elimination.  Uses the table-driven numba kernel when available,
    otherwise a vectorised numpy fallback.
    """
    n, k = coeffs.shape
    if rows.shape[0] != k:
        raise ValueError(f"shape mismatch: coeffs {coeffs.shape} rows {rows.shape}")
    out = np.zeros((n, rows.shape[1]), dtype=np.uint8)
    if n == 0 or k == 0:
        return out
    if HAVE_NUMBA:
        work = n * k * rows.shape[1]
        # The threaded kernel wins ~2x on throughput but its fork/join can
        # stall for milliseconds on small or oversubscribed machines, so
        # latency-sized jobs stay on the steady serial kernel.
        if n >= 2 and work >= PARALLEL_WORK_THRESHOLD:
            _nb_matmul_par(coeffs, rows, MUL_FLAT, out)
        else:
            _nb_matmul(coeffs, rows, MUL_FLAT, out)
    else:
        _np_matmul(coeffs, rows, out)
    return out


def warm_kernels() -> None:
    """Trigger JIT compilation so first-use latency doesn't pollute benchmarks."""
    if HAVE_NUMBA:
        c = np.full((2, 2), 3, dtype=np.uint8)
        r = np.ones((2, 4), dtype=np.uint8)
        out = np.zeros((2, 4), dtype=np.uint8)
        _nb_matmul(c, r, MUL_FLAT, out)
        _nb_matmul_par(c, r, MUL_FLAT, out)
        row = np.array([0, 7], dtype=np.uint8)
        _nb_reduce_row(row, out, np.zeros(2, dtype=np.int64), 0, MUL_FLAT, INV)
        _nb_solve_augmented(np.eye(2, dtype=np.uint8), r.copy(), MUL_FLAT, INV)
