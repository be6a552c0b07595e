"""Exact Gaussian elimination over any field implementation.

Entries may be mpq, Cyclo or RatFun; only +, -, *, / and truthiness are used.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


def _zero_like(x):
    return x - x


def rref(rows: Sequence[Sequence]) -> Tuple[List[list], List[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c] if not hasattr(M[r][c], "inverse") else M[r][c].inverse()
        M[r] = [x * inv if x else x for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b if b else a for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def det(rows: Sequence[Sequence]):
    """Determinant by fraction-free-free elimination (field division)."""
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    result = None
    sign = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            return _zero_like(M[0][0])
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        p = M[c][c]
        result = p if result is None else result * p
        inv = p.inverse() if hasattr(p, "inverse") else 1 / p
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [a - f * b if b else a for a, b in zip(M[i], M[c])]
    return result if sign == 1 else -result


def solve_augmented(rows: Sequence[Sequence], nvars: int):
    """Solve rows [A | b] (b is the last column) for x with A x = b.

    Returns (solution or None, rank of A, consistent flag).  Free variables
    are set to zero.
    """
    R, piv = rref(rows)
    rank_a = len([p for p in piv if p < nvars])
    consistent = nvars not in piv
    if not consistent:
        return None, rank_a, False
    zero = _zero_like(rows[0][0])
    x = [zero] * nvars
    for i, c in enumerate(piv):
        if c < nvars:
            x[c] = R[i][nvars]
    return x, rank_a, True


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[list]:
    """Basis of {x : A x = 0}."""
    if not rows:
        return []
    R, piv = rref(rows)
    zero = _zero_like(rows[0][0])
    one = None
    for r in rows:
        for x in r:
            if x:
                one = x / x
                break
        if one is not None:
            break
    if one is None:
        raise ValueError("cannot infer field unit from a zero matrix")
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis
