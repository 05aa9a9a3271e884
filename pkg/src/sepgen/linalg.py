"""Dense linear algebra over a prime field F_p on int64 numpy arrays.

Vectors are rows; a linear map ``M`` acts as ``v @ M``.
"""

from __future__ import annotations

import numpy as np


def row_reduce(a, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` mod ``p``.

    Returns the nonzero rows and the list of pivot columns.
    """
    a = np.array(a, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("row_reduce expects a 2-d array")
    rows, cols = a.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_reduce(a, p)[1])


def reduce_against(v: np.ndarray, basis: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Residues of the rows of ``v`` modulo the row space of an RREF ``basis``."""
    if not pivots:
        return np.asarray(v, dtype=np.int64) % p
    return (v - (v[:, pivots] @ basis)) % p


def inverse(a, p: int) -> np.ndarray:
    """Inverse of a square matrix mod ``p``; raises ``ValueError`` if singular."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse expects a square matrix")
    red, piv = row_reduce(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return red[:n, n:]


def mat_power(a: np.ndarray, k: int, p: int) -> np.ndarray:
    n = a.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % p
    while k:
        if k & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        k >>= 1
    return result
