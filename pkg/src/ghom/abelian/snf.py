"""Smith and Hermite normal forms over the integers."""

from __future__ import annotations

from typing import Sequence

from ghom.abelian.matrix import IntMatrix


def _snf_work(a: list[list[int]], track: bool = True):
    m = len(a)
    n = len(a[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None
    Vinv = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        if track:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        if track:
            for row in V:
                row[j], row[k] = row[k], row[j]
            Vinv[j], Vinv[k] = Vinv[k], Vinv[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        ra, rs = a[dst], a[src]
        for j in range(n):
            if rs[j]:
                ra[j] += q * rs[j]
        if track:
            ud, us = U[dst], U[src]
            for j in range(m):
                if us[j]:
                    ud[j] += q * us[j]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in a:
            if row[src]:
                row[dst] += q * row[src]
        if track:
            for row in V:
                if row[src]:
                    row[dst] += q * row[src]
            # inverse update: row_src -= q * row_dst
            vd, vs = Vinv[dst], Vinv[src]
            for j in range(n):
                if vd[j]:
                    vs[j] -= q * vd[j]

    def min_entry(s):
        best = None
        for i in range(s, m):
            row = a[i]
            for j in range(s, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        return best

    rank = 0
    for s in range(min(m, n)):
        best = min_entry(s)
        if best is None:
            break
        while True:
            _, i, j = best
            if i != s:
                swap_rows(s, i)
            if j != s:
                swap_cols(s, j)
            p = a[s][s]
            for i in range(s + 1, m):
                if a[i][s]:
                    add_row(i, s, -(a[i][s] // p))
            for j in range(s + 1, n):
                if a[s][j]:
                    add_col(j, s, -(a[s][j] // p))
            if any(a[i][s] for i in range(s + 1, m)) or any(a[s][j] for j in range(s + 1, n)):
                best = min_entry(s)
                continue
            bad = None
            for i in range(s + 1, m):
                row = a[i]
                for j in range(s + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(s, bad, 1)
            best = min_entry(s)
        if a[s][s] < 0:
            a[s] = [-x for x in a[s]]
            if track:
                U[s] = [-x for x in U[s]]
        rank += 1
    return a, U, V, Vinv, rank


def smith_normal_form(A: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with non-negative entries ``d_1 | d_2 | ...``.  The pivot
    is the nonzero entry of least absolute value, ties broken by lowest
    ``(row, col)``, which makes the output deterministic.
    """
    m, n = A.shape
    if m == 0 or n == 0:
        return IntMatrix.identity(m), IntMatrix.zeros(m, n), IntMatrix.identity(n)
    D, U, V, _, _ = _snf_work(A.to_lists())
    return IntMatrix(U, m, m), IntMatrix(D, m, n), IntMatrix(V, n, n)


def smith_with_inverse(A: IntMatrix):
    """``(U, D, V, V^-1, rank)`` as nested lists."""
    m, n = A.shape
    if m == 0 or n == 0:
        ident_n = [[int(i == j) for j in range(n)] for i in range(n)]
        return ([[int(i == j) for j in range(m)] for i in range(m)], [[0] * n for _ in range(m)],
                ident_n, [r[:] for r in ident_n], 0)
    D, U, V, Vinv, rank = _snf_work(A.to_lists())
    return U, D, V, Vinv, rank


def elementary_divisors(A: IntMatrix) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    m, n = A.shape
    if m == 0 or n == 0:
        return []
    D, _, _, _, rank = _snf_work(A.to_lists(), track=False)
    return [D[i][i] for i in range(rank)]


def echelon(rows: Sequence[Sequence[int]], ncols: int, upto: int | None = None,
            reduce_above: bool = True) -> tuple[list[list[int]], int]:
    """Integer row echelon form of ``rows`` on the first ``upto`` columns.

    Returns ``(rows, r)``: the first ``r`` rows carry positive pivots in
    strictly increasing columns below ``upto``; the remaining rows vanish on
    those columns.  Row operations are unimodular.
    """
    upto = ncols if upto is None else upto
    a = [list(r) for r in rows]
    r = 0
    for col in range(upto):
        if r == len(a):
            break
        while True:
            nz = [i for i in range(r, len(a)) if a[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(a[i][col]), i))
            if piv != r:
                a[r], a[piv] = a[piv], a[r]
            p = a[r][col]
            done = True
            for i in range(r + 1, len(a)):
                x = a[i][col]
                if x:
                    q = x // p
                    ri, rr = a[i], a[r]
                    for j in range(col, ncols):
                        if rr[j]:
                            ri[j] -= q * rr[j]
                    if ri[col]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][col]:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
            if reduce_above:
                p = a[r][col]
                for k in range(r):
                    q = a[k][col] // p
                    if q:
                        rk, rr = a[k], a[r]
                        for j in range(col, ncols):
                            if rr[j]:
                                rk[j] -= q * rr[j]
            r += 1
    return a, r


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Canonical basis (row Hermite normal form) of the lattice spanned by ``rows``."""
    a, r = echelon([list(x) for x in rows if any(x)], ncols)
    return [tuple(x) for x in a[:r]]


def kernel_basis(A: IntMatrix) -> list[list[int]]:
    """Basis of ``{x in Z^cols : A x = 0}``."""
    m, n = A.shape
    aug = [A.column(j) + [int(i == j) for i in range(n)] for j in range(n)]
    a, r = echelon(aug, m + n, upto=m, reduce_above=False)
    return [row[m:] for row in a[r:]]
