"""Dense Gaussian elimination over the prime field Z/p."""

import numpy as np


def _inv(x, p):
    return pow(int(x), -1, p)


def row_echelon(M, p=2):
    """Return (R, pivots): reduced row echelon form of ``M`` mod ``p``."""
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        if p != 2:
            R[r] = (R[r] * _inv(R[r, c], p)) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            if p == 2:
                R[hit] ^= R[r]
            else:
                R[hit] = (R[hit] - np.outer(col[hit], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank_mod_p(M, p=2):
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(row_echelon(M, p)[1])


def nullspace_mod_p(M, p=2):
    """Basis of the right kernel of ``M`` mod ``p``, one vector per column of the result."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = row_echelon(M, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-R[i, fc]) % p
    return basis
