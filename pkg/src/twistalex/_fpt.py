"""Dense univariate polynomials over F_p.

A polynomial is a tuple of residues, lowest degree first, with no trailing
zeros; the zero polynomial is the empty tuple.  These helpers are the hot
path of the Smith normal form over F_p[t] and deliberately avoid objects.
"""
from __future__ import annotations

ZERO: tuple = ()


def trim(c) -> tuple:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def from_list(c, p: int) -> tuple:
    return trim([x % p for x in c])


def deg(a: tuple) -> int:
    return len(a) - 1


def add(a: tuple, b: tuple, p: int) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return trim(out)


def sub(a: tuple, b: tuple, p: int) -> tuple:
    n = max(len(a), len(b))
    out = list(a) + [0] * (n - len(a))
    for i, x in enumerate(b):
        out[i] = (out[i] - x) % p
    return trim(out)


def scale(a: tuple, c: int, p: int) -> tuple:
    c %= p
    if not c:
        return ZERO
    return tuple(x * c % p for x in a)


def mul(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ZERO
    if len(a) == 1:
        return scale(b, a[0], p)
    if len(b) == 1:
        return scale(a, b[0], p)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([x % p for x in out])


def divmod_(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return ZERO, a
    inv = pow(b[-1], p - 2, p)
    if len(b) == 1:
        return scale(a, inv, p), ZERO
    r = list(a)
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = r[i] % p
        if c:
            c = c * inv % p
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % p
    return trim(q), trim(r[:db])


def monic(a: tuple, p: int) -> tuple:
    if not a or a[-1] == 1:
        return a
    return scale(a, pow(a[-1], p - 2, p), p)


def gcd(a: tuple, b: tuple, p: int) -> tuple:
    while b:
        a, b = b, divmod_(a, b, p)[1]
    return monic(a, p)


def strip_t(a: tuple) -> tuple:
    """Remove the largest power of t dividing ``a`` (a unit in F_p[t^-1, t])."""
    i = 0
    while i < len(a) and not a[i]:
        i += 1
    return a[i:]


def shift(a: tuple, k: int) -> tuple:
    if not a or k == 0:
        return a
    return (0,) * k + a
