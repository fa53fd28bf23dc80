"""Small dense linear algebra over GF(2), on uint8 numpy arrays."""

import numpy as np


def as_bits(a):
    """Coerce to a uint8 array of 0/1 entries."""
    arr = np.asarray(a, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("entries must be bits (0 or 1)")
    return arr


def matmul(a, b):
    """Matrix product over GF(2)."""
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64)) % 2


def rref(mat):
    """Reduced row-echelon form. Returns (reduced matrix, pivot columns)."""
    m = as_bits(mat).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        pivot_rows = np.nonzero(m[r:, c])[0]
        if pivot_rows.size == 0:
            continue
        p = r + pivot_rows[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        # clear every other 1 in this column
        hits = np.nonzero(m[:, c])[0]
        for h in hits:
            if h != r:
                m[h] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat):
    mat = as_bits(mat)
    if mat.size == 0:
        return 0
    _, pivots = rref(mat)
    return len(pivots)


def nullspace(mat):
    """Basis of {x : mat @ x = 0 over GF(2)}, as rows of the returned matrix."""
    mat = as_bits(mat)
    rows, cols = mat.shape
    red, pivots = rref(mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = red[r, f]
    return basis


def row_independent(mat):
    mat = as_bits(mat)
    return rank(mat) == mat.shape[0]
