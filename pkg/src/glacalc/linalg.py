"""Exact Gaussian elimination over the fraction field of ``F``.

Matrices are lists of rows of :class:`~glacalc.coeffring.RatFunc`.  Every
entry is renormalised after each elimination step (the ring arithmetic does
this automatically).  Within a column the pivot is the nonzero entry with the
smallest representation, which keeps intermediate expressions short.
"""

from __future__ import annotations

from .coeffring import RatFunc


def _size(f):
    return len(f.num.terms) + len(f.den.terms) + f.num.total_degree() + f.den.total_degree()


def rref(matrix, ncols=None):
    """Reduced row echelon form.

    Returns ``(rows, pivots)`` where ``pivots[k]`` is the pivot column of row
    ``k``; rows past ``len(pivots)`` are zero.
    """
    rows = [list(r) for r in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        best = None
        for i in range(r, len(rows)):
            e = rows[i][c]
            if e and (best is None or _size(e) < _size(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        if not (piv.is_constant() and piv.constant_value() == 1):
            rows[r] = [e / piv if e else e for e in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i == r:
                continue
            factor = rows[i][c]
            if factor:
                rows[i] = [a - factor * b if b else a for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(matrix, ncols=None):
    return len(rref(matrix, ncols)[1])


def nullspace(matrix, ncols, nvars):
    """Basis of ``{x : matrix @ x = 0}`` (right kernel)."""
    rows, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    zero, one = RatFunc.zero(nvars), RatFunc.one(nvars)
    basis = []
    for f in free:
        vec = [zero] * ncols
        vec[f] = one
        for k, pc in enumerate(pivots):
            vec[pc] = -rows[k][f]
        basis.append(vec)
    return basis


def solve(matrix, rhs, ncols, nvars):
    """One solution of ``matrix @ x = rhs`` or ``None`` if inconsistent."""
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [RatFunc.zero(nvars)] * ncols
    for k, pc in enumerate(pivots):
        x[pc] = rows[k][ncols]
    return x


def inverse(matrix, nvars):
    n = len(matrix)
    zero, one = RatFunc.zero(nvars), RatFunc.one(nvars)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(matrix)]
    rows, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in rows]


def det(matrix, nvars):
    """Determinant by fraction-field elimination."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    result = RatFunc.one(nvars)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c]), None)
        if piv is None:
            return RatFunc.zero(nvars)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            result = -result
        p = rows[c][c]
        result = result * p
        for i in range(c + 1, n):
            factor = rows[i][c]
            if factor:
                q = factor / p
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[c])]
    return result
