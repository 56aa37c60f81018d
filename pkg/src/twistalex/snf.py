"""Smith normal form over Z and over F_p[t^±1].

Two engines share the same contract.  The dense engine tracks unimodular
transforms and works over any Euclidean ring adapter; the sparse engine
only produces the diagonal and is what the twisted Alexander computations
use, since their presentation matrices are large and mostly zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd as igcd
from typing import Sequence

from . import _fpt
from .laurent import LaurentPoly


@dataclass(frozen=True)
class SnfResult:
    """Invariant factors d_1 | d_2 | ... of a matrix.

    ``diagonal`` has one entry per diagonal position (``min(rows, cols)``),
    zeros last.  When transforms were requested, ``left @ M @ right`` is the
    diagonal matrix with these entries.
    """

    diagonal: list
    rank: int
    left_transform: list | None = None
    right_transform: list | None = None

    @property
    def nonunit_factors(self) -> list:
        return [d for d in self.diagonal[: self.rank] if not _is_unit_entry(d)]


def _is_unit_entry(d) -> bool:
    if isinstance(d, int):
        return abs(d) == 1
    return len(d.terms) == 1


# ring adapters -----------------------------------------------------------------

class _Integers:
    zero = 0
    one = 1

    def is_zero(self, a):
        return a == 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def divmod(self, a, b):
        q = a // b
        r = a - q * b
        # least absolute remainder keeps the Euclidean size strictly decreasing
        if 2 * abs(r) > abs(b):
            q += 1 if (b > 0) == (r > 0) else -1
            r = a - q * b
        return q, r

    def size(self, a):
        return abs(a)

    def unit_normal(self, a):
        """Return (u, u_inv) with u*a normalized."""
        return (-1, -1) if a < 0 else (1, 1)

    def gcd(self, a, b):
        return igcd(a, b)


class _PolyFp:
    def __init__(self, p: int):
        self.p = p
        self.zero = _fpt.ZERO
        self.one = (1,)

    def is_zero(self, a):
        return not a

    def add(self, a, b):
        return _fpt.add(a, b, self.p)

    def sub(self, a, b):
        return _fpt.sub(a, b, self.p)

    def mul(self, a, b):
        return _fpt.mul(a, b, self.p)

    def divmod(self, a, b):
        return _fpt.divmod_(a, b, self.p)

    def size(self, a):
        return len(a)

    def unit_normal(self, a):
        c = a[-1]
        return (pow(c, self.p - 2, self.p),), (c,)

    def gcd(self, a, b):
        return _fpt.gcd(a, b, self.p)


def _identity(ring, n):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def _dense_snf(A: list[list], ring, transforms: bool):
    """Diagonalize ``A`` in place to Smith form; returns (diag, U, V)."""
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(ring, m) if transforms else None
    V = _identity(ring, n) if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def row_axpy(dst, src, q):  # row_dst -= q * row_src
        A[dst] = [ring.sub(a, ring.mul(q, b)) for a, b in zip(A[dst], A[src])]
        if U is not None:
            U[dst] = [ring.sub(a, ring.mul(q, b)) for a, b in zip(U[dst], U[src])]

    def col_axpy(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] = ring.sub(row[dst], ring.mul(q, row[src]))
        if V is not None:
            for row in V:
                row[dst] = ring.sub(row[dst], ring.mul(q, row[src]))

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if not ring.is_zero(a) and (best is None or ring.size(a) < best[0]):
                    best = (ring.size(a), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if not ring.is_zero(A[i][t]):
                    q, r = ring.divmod(A[i][t], piv)
                    row_axpy(i, t, q)
                    dirty = dirty or not ring.is_zero(r)
            for j in range(t + 1, n):
                if not ring.is_zero(A[t][j]):
                    q, r = ring.divmod(A[t][j], piv)
                    col_axpy(j, t, q)
                    dirty = dirty or not ring.is_zero(r)
            if dirty:
                best = None
                for i in range(t + 1, m):
                    a = A[i][t]
                    if not ring.is_zero(a) and (best is None or ring.size(a) < best[0]):
                        best = (ring.size(a), i, "r")
                for j in range(t + 1, n):
                    a = A[t][j]
                    if not ring.is_zero(a) and (best is None or ring.size(a) < best[0]):
                        best = (ring.size(a), j, "c")
                _, k, kind = best
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if not ring.is_zero(A[i][j]) and not ring.is_zero(ring.divmod(A[i][j], piv)[1]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # row_t += row_bad, then reduce again
            row_axpy(t, bad, ring.sub(ring.zero, ring.one))
        u, _ = ring.unit_normal(A[t][t])
        A[t] = [ring.mul(u, a) for a in A[t]]
        if U is not None:
            U[t] = [ring.mul(u, a) for a in U[t]]
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    return diag, U, V


def _invariant_chain(diag: list, ring) -> list:
    """Turn a list of nonzero diagonal entries into a divisibility chain."""
    d = list(diag)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            a, b = d[i], d[j]
            if ring.is_zero(ring.divmod(b, a)[1]):
                continue
            g = ring.gcd(a, b)
            d[i], d[j] = g, ring.divmod(ring.mul(a, b), g)[0]
    out = []
    for a in d:
        u, _ = ring.unit_normal(a)
        out.append(ring.mul(u, a))
    return out


def sparse_fpt_diagonal(rows: list[dict], p: int) -> list[tuple]:
    """Diagonalize a sparse matrix over F_p[t] and return its invariant factors.

    ``rows`` holds one ``{column: dense poly}`` dict per row; it is consumed.
    The result is the list of nonzero invariant factors over F_p[t^±1]
    (powers of t stripped), monic, in divisibility order.
    """
    R = {i: {c: v for c, v in row.items() if v} for i, row in enumerate(rows)}
    R = {i: row for i, row in R.items() if row}
    cols: dict = {}
    for i, row in R.items():
        for c in row:
            cols.setdefault(c, set()).add(i)

    def put(i, c, v):
        row = R[i]
        if v:
            if c not in row:
                cols.setdefault(c, set()).add(i)
            row[c] = v
        elif c in row:
            del row[c]
            cols[c].discard(i)

    diag = []
    while R:
        best = None
        for i, row in R.items():
            lr = len(row) - 1
            for c, v in row.items():
                key = (len(v), lr * (len(cols[c]) - 1))
                if best is None or key < best[0]:
                    best = (key, i, c)
                    if key == (1, 0):
                        break
            if best is not None and best[0] == (1, 0):
                break
        _, r, c = best
        while True:
            piv = R[r][c]
            prow = R[r]
            moved = None
            for i in list(cols[c]):
                if i == r:
                    continue
                q, rem = _fpt.divmod_(R[i][c], piv, p)
                for j, v in list(prow.items()):
                    if j == c:
                        continue
                    put(i, j, _fpt.sub(R[i].get(j, _fpt.ZERO), _fpt.mul(q, v, p), p))
                put(i, c, rem)
                if rem and (moved is None or len(rem) < len(R[moved][c])):
                    moved = i
            if moved is not None:
                r = moved
                continue
            # column c now only meets row r: column ops reduce row r modulo the pivot
            smaller = None
            for j, v in list(prow.items()):
                if j == c:
                    continue
                rem = _fpt.divmod_(v, piv, p)[1]
                put(r, j, rem)
                if rem and (smaller is None or len(rem) < len(prow[smaller])):
                    smaller = j
            if smaller is not None:
                c = smaller
                continue
            break
        diag.append(_fpt.strip_t(_fpt.monic(piv, p)))
        put(r, c, _fpt.ZERO)
        del R[r]
        cols.pop(c, None)
        R = {i: row for i, row in R.items() if row}
    ring = _PolyFp(p)
    units = [d for d in diag if len(d) == 1]
    rest = [d for d in diag if len(d) > 1]
    return [(1,)] * len(units) + _invariant_chain(rest, ring)


# public entry point -----------------------------------------------------------

def _poly_ring_of(M):
    for row in M:
        for a in row:
            if isinstance(a, LaurentPoly):
                if a.nvars != 1:
                    raise ValueError("Smith normal form needs a single-variable polynomial ring")
                if a.modulus is None:
                    raise ValueError("Z[t^±1] is not a principal ideal domain; reduce mod p first")
                return a.variables[0], a.modulus
    return None


def smith_normal_form(M: Sequence[Sequence], modulus: int | None = None, transforms: bool = False,
                      variable: str = "t") -> SnfResult:
    """Smith normal form of ``M`` over Z (int entries) or F_p[t^±1].

    Polynomial entries are ``LaurentPoly`` over F_p in one variable; plain
    ints are accepted as constants when ``modulus`` is given.  Diagonal
    entries are normalized: positive over Z, monic with nonzero constant
    term over F_p[t^±1].
    """
    m = len(M)
    n = len(M[0]) if m else 0
    info = _poly_ring_of(M)
    if info is None and modulus is None:
        A = [[int(a) for a in row] for row in M]
        ring = _Integers()
        diag, U, V = _dense_snf(A, ring, transforms)
        rank = sum(1 for d in diag if d)
        return SnfResult(diag, rank, U, V)

    if info is not None:
        variable, p = info
        if modulus is not None and modulus != p:
            raise ValueError("modulus does not match the polynomial entries")
    else:
        p = modulus

    def to_laurent(a) -> LaurentPoly:
        if isinstance(a, LaurentPoly):
            return a
        return LaurentPoly.const(a, (variable,), p)

    L = [[to_laurent(a) for a in row] for row in M]
    shifts = []
    dense_rows = []
    for row in L:
        nz = [a for a in row if not a.is_zero()]
        low = min(a.min_exponents()[0] for a in nz) if nz else 0
        shifts.append(low)
        dense = []
        for a in row:
            lo, coeffs = a.to_dense()
            dense.append(_fpt.shift(_fpt.from_list(coeffs, p), lo - low) if coeffs else _fpt.ZERO)
        dense_rows.append(dense)

    def lift(d) -> LaurentPoly:
        return LaurentPoly.from_dense(d, 0, variable, p)

    if not transforms:
        sparse = [{j: v for j, v in enumerate(row) if v} for row in dense_rows]
        factors = sparse_fpt_diagonal(sparse, p)
        zero = LaurentPoly.zero((variable,), p)
        diag = [lift(d) for d in factors] + [zero] * (min(m, n) - len(factors))
        return SnfResult(diag, len(factors))

    ring = _PolyFp(p)
    diag, U, V = _dense_snf(dense_rows, ring, True)
    out_diag = []
    Lu = []
    for i in range(m):
        Ui = [LaurentPoly.from_dense(a, 0, variable, p).shift((-shifts[j],)) for j, a in enumerate(U[i])]
        if i < len(diag) and diag[i]:
            d = diag[i]
            v = len(d) - len(_fpt.strip_t(d))
            Ui = [a.shift((-v,)) for a in Ui]
            out_diag.append(lift(_fpt.strip_t(d)))
        elif i < len(diag):
            out_diag.append(LaurentPoly.zero((variable,), p))
        Lu.append(Ui)
    Lv = [[lift(a) for a in row] for row in V]
    rank = sum(1 for d in out_diag if not d.is_zero())
    return SnfResult(out_diag, rank, Lu, Lv)


def matmul(A, B):
    """Plain matrix product for int or LaurentPoly entries."""
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = []
        for j in range(n):
            s = 0
            for a, brow in zip(row, B):
                s = a * brow[j] + s
            acc.append(s)
        out.append(acc)
    return out
