"""Ranks and homology over prime fields."""

from __future__ import annotations

from ghom.abelian.matrix import IntMatrix
from ghom.errors import CompositionNotZero, NotPrime


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def rank_mod_p(A: IntMatrix, p: int) -> int:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    a = [[x % p for x in row] for row in A.entries]
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


def field_homology(d_in: IntMatrix, d_out: IntMatrix, p: int) -> int:
    """``dim ker(d_out) - rank(d_in)`` over the field with ``p`` elements."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if any(x % p for row in (d_out @ d_in).entries for x in row):
        raise CompositionNotZero("d_out o d_in is not zero mod p")
    n = d_in.rows
    return n - rank_mod_p(d_out, p) - rank_mod_p(d_in, p)
