"""Pure numpy / Python implementations of the hot kernels.

Every kernel here has a compiled twin in ``_kernels.pyx`` with the same
signature and bit-identical results.  Paulis are stored as three parallel
arrays: ``x`` and ``z`` are ``uint64`` bit masks (bit ``q`` is qubit ``q``)
and ``r`` is the ``uint8`` exponent of ``i`` in ``i^r X^x Z^z`` written with
the letter convention ``(x, z) = (1, 1) -> Y``.
"""

import numpy as np

H, S, X, SX, CX, CZ = range(6)

_ONE = np.uint64(1)


def _bit(arr, q):
    return ((arr >> np.uint64(q)) & _ONE).astype(bool)


def conjugate_rows(x, z, r, kind, a, b=-1):
    """Conjugate every row in place by one Clifford gate."""
    ma = _ONE << np.uint64(a)
    xa = _bit(x, a)
    za = _bit(z, a)
    if kind == H:
        r += (2 * (xa & za)).astype(np.uint8)
        flip = np.where(xa ^ za, ma, np.uint64(0))
        x ^= flip
        z ^= flip
    elif kind == S:
        r += (2 * (xa & za)).astype(np.uint8)
        z ^= np.where(xa, ma, np.uint64(0))
    elif kind == X:
        r += (2 * za).astype(np.uint8)
    elif kind == SX:
        r += (2 * (za & ~xa)).astype(np.uint8)
        x ^= np.where(za, ma, np.uint64(0))
    elif kind == CX:
        mb = _ONE << np.uint64(b)
        xb = _bit(x, b)
        zb = _bit(z, b)
        r += (2 * (xa & zb & ~(xb ^ za))).astype(np.uint8)
        x ^= np.where(xa, mb, np.uint64(0))
        z ^= np.where(zb, ma, np.uint64(0))
    elif kind == CZ:
        mb = _ONE << np.uint64(b)
        xb = _bit(x, b)
        zb = _bit(z, b)
        r += (2 * (xa & xb & (za ^ zb))).astype(np.uint8)
        z ^= np.where(xb, ma, np.uint64(0))
        z ^= np.where(xa, mb, np.uint64(0))
    else:
        raise ValueError(f"unknown gate kind {kind}")
    r &= np.uint8(3)


def _mul(x1, z1, r1, x2, z2, r2):
    # phase of sigma(x1,z1) * sigma(x2,z2) for whole words
    pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    neg = (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2) | (x1 & ~z1 & ~x2 & z2)
    return x1 ^ x2, z1 ^ z2, (r1 + r2 + pos.bit_count() - neg.bit_count()) & 3


def canonicalize_rows(x, z, r, n):
    """Reduce the rows in place to canonical echelon form and return the rank.

    For each qubit column in order an X-type pivot is taken first, then a
    Z-type pivot; pivots are cleared from every other row.  Rows that end up
    as identity (dependent rows) are sorted to the bottom.
    """
    rows = [[int(a), int(b), int(c)] for a, b, c in zip(x.tolist(), z.tolist(), r.tolist())]
    m = len(rows)
    k = 0
    for q in range(n):
        bit = 1 << q
        for part in (0, 1):
            if k >= m:
                break
            piv = -1
            for i in range(k, m):
                if rows[i][part] & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            rows[k], rows[piv] = rows[piv], rows[k]
            pk = rows[k]
            for i in range(m):
                if i != k and rows[i][part] & bit:
                    ri = rows[i]
                    rows[i] = list(_mul(ri[0], ri[1], ri[2], pk[0], pk[1], pk[2]))
            k += 1
    for i, row in enumerate(rows):
        x[i], z[i], r[i] = row
    return k


def min_weight_rows(ex, ez, gx, gz):
    """Minimum of ``popcount((ex ^ g_x) | (ez ^ g_z))`` over the group rows."""
    out = np.empty(len(ex), dtype=np.int64)
    chunk = max(1, (1 << 20) // max(1, len(gx)))
    for s in range(0, len(ex), chunk):
        sx = ex[s:s + chunk, None] ^ gx[None, :]
        sz = ez[s:s + chunk, None] ^ gz[None, :]
        out[s:s + chunk] = np.bitwise_count(sx | sz).min(axis=1)
    return out
