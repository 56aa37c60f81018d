"""Exact multivariable Laurent polynomials over the integers or over F_p."""
from __future__ import annotations

import random
import re
from typing import Iterable, Mapping, Sequence

from . import _fpt


class RingMismatchError(ValueError):
    """Operands live in different rings (variables or coefficients differ)."""


class InexactDivisionError(ArithmeticError):
    """The divisor does not divide the dividend in the Laurent ring."""


class ZeroPolynomialError(ValueError):
    pass


class PolyParseError(ValueError):
    pass


Exponent = tuple


class LaurentPoly:
    """An immutable element of R[t1^±1, ..., tn^±1] with R = Z or F_p.

    ``modulus`` is ``None`` for integer coefficients and a prime otherwise.
    Terms map exponent vectors to nonzero coefficients.
    """

    __slots__ = ("variables", "modulus", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponent, int] | None = None,
                 modulus: int | None = None):
        self.variables = tuple(variables)
        self.modulus = modulus
        n = len(self.variables)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match {n} variables")
            if modulus is not None:
                c %= modulus
            if c:
                clean[e] = c
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, variables=("t",), modulus=None):
        return cls(variables, {}, modulus)

    @classmethod
    def const(cls, c: int, variables=("t",), modulus=None):
        return cls(variables, {(0,) * len(tuple(variables)): c}, modulus)

    @classmethod
    def monomial(cls, exps, c: int = 1, variables=("t",), modulus=None):
        return cls(variables, {tuple(exps): c}, modulus)

    @classmethod
    def var(cls, name: str, variables=None, modulus=None):
        variables = tuple(variables or (name,))
        e = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {e: 1}, modulus)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _like(self, terms) -> "LaurentPoly":
        return LaurentPoly(self.variables, terms, self.modulus)

    def _check(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly.const(other, self.variables, self.modulus)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.variables != self.variables or other.modulus != self.modulus:
            raise RingMismatchError(
                f"ring mismatch: {self.variables}/{self.modulus} vs {other.variables}/{other.modulus}")
        return other

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for monomials")
            (e, c), = self._terms.items()
            if c not in (1, -1) and self.modulus is None:
                raise ValueError("non-unit monomial has no inverse over Z")
            inv = c if self.modulus is None else pow(c, -1, self.modulus)
            return self._like({tuple(-a for a in e): inv}) ** (-k)
        out = LaurentPoly.const(1, self.variables, self.modulus)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other, self.variables, self.modulus)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.variables == other.variables and self.modulus == other.modulus
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, self.modulus, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        ring = "Z" if self.modulus is None else f"F{self.modulus}"
        return f"LaurentPoly({self.format()!r} over {ring})"

    def __str__(self):
        return self.format()

    # structure
    def _index(self, var) -> int:
        if var is None:
            if self.nvars != 1:
                raise ValueError("variable must be given for multivariable polynomials")
            return 0
        if isinstance(var, int):
            return var
        return self.variables.index(var)

    def min_exponents(self) -> tuple:
        return tuple(min(e[i] for e in self._terms) for i in range(self.nvars))

    def max_exponents(self) -> tuple:
        return tuple(max(e[i] for e in self._terms) for i in range(self.nvars))

    def shift(self, exps) -> "LaurentPoly":
        """Multiply by the monomial t^exps."""
        return self._like({tuple(a + b for a, b in zip(e, exps)): c for e, c in self._terms.items()})

    def leading_term(self) -> tuple[tuple, int]:
        e = max(self._terms)
        return e, self._terms[e]

    def lowest_shift(self) -> "LaurentPoly":
        """Shift so the minimum exponent of every variable is zero."""
        if not self._terms:
            return self
        return self.shift(tuple(-m for m in self.min_exponents()))

    def normalize(self) -> "LaurentPoly":
        """Canonical representative of the class of ``self`` modulo units.

        Lowest exponents become zero; the lex-leading coefficient becomes
        positive over Z and one over F_p.
        """
        if not self._terms:
            return self
        q = self.lowest_shift()
        _, c = q.leading_term()
        if self.modulus is None:
            return -q if c < 0 else q
        inv = pow(c, -1, self.modulus)
        return q._like({e: a * inv for e, a in q._terms.items()})

    def associate(self, other) -> bool:
        """Equality up to a unit c*t^k."""
        return self.normalize() == other.normalize()

    def content(self) -> int:
        from math import gcd
        g = 0
        for c in self._terms.values():
            g = gcd(g, c)
        return g

    def substitute(self, exps_per_var: Sequence[Sequence[int]], new_variables=("t",)) -> "LaurentPoly":
        """Monomial substitution t_i -> prod_j s_j^{exps_per_var[i][j]}."""
        m = len(tuple(new_variables))
        out: dict = {}
        for e, c in self._terms.items():
            ne = [0] * m
            for i, a in enumerate(e):
                for j in range(m):
                    ne[j] += a * exps_per_var[i][j]
            ne = tuple(ne)
            out[ne] = out.get(ne, 0) + c
        return LaurentPoly(new_variables, out, self.modulus)

    def reduce_mod(self, p: int) -> "LaurentPoly":
        if self.modulus is not None and self.modulus != p:
            raise RingMismatchError("cannot reduce an F_p polynomial modulo another prime")
        return LaurentPoly(self.variables, self._terms, p)

    def evaluate(self, values: Sequence):
        """Evaluate at a point; negative exponents need invertible values."""
        p = self.modulus
        total = 0
        for e, c in self._terms.items():
            term = c
            for v, a in zip(values, e):
                if p is not None:
                    term = term * pow(v, a, p) % p
                else:
                    term = term * v ** a
            total += term
        return total % p if p is not None else total

    # dense univariate bridge
    def to_dense(self) -> tuple[int, list[int]]:
        """Return (lowest exponent, coefficient list) for a single-variable polynomial."""
        if self.nvars != 1:
            raise ValueError("to_dense needs a single-variable polynomial")
        if not self._terms:
            return 0, []
        lo = min(e[0] for e in self._terms)
        hi = max(e[0] for e in self._terms)
        coeffs = [0] * (hi - lo + 1)
        for (a,), c in self._terms.items():
            coeffs[a - lo] = c
        return lo, coeffs

    @classmethod
    def from_dense(cls, coeffs: Iterable[int], low: int = 0, variable: str = "t", modulus=None):
        return cls((variable,), {(low + i,): c for i, c in enumerate(coeffs) if c}, modulus)

    # formatting
    def format(self, order: str = "desc") -> str:
        if not self._terms:
            return "0"
        keys = sorted(self._terms, key=lambda e: (sum(e), e), reverse=(order == "desc"))
        parts = []
        for e in keys:
            c = self._terms[e]
            if self.modulus is not None and c > self.modulus // 2 and self.modulus > 2:
                c -= self.modulus
            mono = "".join(
                v if a == 1 else f"{v}^{a}" for v, a in zip(self.variables, e) if a)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def one(variables=("t",), modulus=None) -> LaurentPoly:
    return LaurentPoly.const(1, variables, modulus)


# parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z_]*\d*)|(\^)|([-+*()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyParseError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        num, name, caret, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("var", name))
        elif caret:
            out.append(("op", "^"))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


def parse_poly(text: str, variables: Sequence[str] | None = None, modulus: int | None = None) -> LaurentPoly:
    """Parse text such as ``1 - t + t^2`` or ``(t1^12 - t1^6 + 1)(t1^3t2^3 + 1)``.

    ``*`` is optional and exponents may be negative (``t^-3``).  When
    ``variables`` is omitted the variables found in the text are used in
    sorted order.
    """
    tokens = _tokenize(text)
    if variables is None:
        found = sorted({v for kind, v in tokens if kind == "var"})
        variables = tuple(found) or ("t",)
    variables = tuple(variables)
    for kind, v in tokens:
        if kind == "var" and v not in variables:
            raise PolyParseError(f"unknown variable {v!r}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        kind, v = peek()
        neg = False
        if (kind, v) in (("op", "-"), ("op", "+")):
            take()
            neg = v == "-"
        acc = term()
        if neg:
            acc = -acc
        while peek() in (("op", "+"), ("op", "-")):
            _, v = take()
            rhs = term()
            acc = acc + rhs if v == "+" else acc - rhs
        return acc

    def term():
        acc = power()
        while True:
            kind, v = peek()
            if (kind, v) == ("op", "*"):
                take()
                acc = acc * power()
            elif kind in ("num", "var") or (kind, v) == ("op", "("):
                acc = acc * power()
            else:
                return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() in (("op", "-"), ("op", "+")):
                sign = -1 if take()[1] == "-" else 1
            kind, v = take()
            if kind != "num":
                raise PolyParseError("exponent must be an integer")
            base = base ** (sign * v)
        return base

    def atom():
        kind, v = take()
        if kind == "num":
            return LaurentPoly.const(v, variables, modulus)
        if kind == "var":
            return LaurentPoly.var(v, variables, modulus)
        if (kind, v) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise PolyParseError("unbalanced parenthesis")
            return inner
        raise PolyParseError(f"unexpected token {v!r}")

    result = expr()
    if pos != len(tokens):
        raise PolyParseError(f"trailing input near token {tokens[pos][1]!r}")
    return result


# operations -----------------------------------------------------------------

def exact_divide(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Quotient ``q`` with ``q * den == num``; raises InexactDivisionError otherwise."""
    den = num._check(den)
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return num
    n = num.nvars
    lo_q = [a - b for a, b in zip(num.min_exponents(), den.min_exponents())]
    hi_q = [a - b for a, b in zip(num.max_exponents(), den.max_exponents())]
    if any(l > h for l, h in zip(lo_q, hi_q)):
        raise InexactDivisionError(f"{den} does not divide {num}")
    lead_e, lead_c = den.leading_term()
    p = num.modulus
    inv = pow(lead_c, -1, p) if p is not None else None
    rem = dict(num._terms)
    quot: dict = {}
    while rem:
        e = max(rem)
        c = rem[e]
        qe = tuple(a - b for a, b in zip(e, lead_e))
        if any(not (lo_q[i] <= qe[i] <= hi_q[i]) for i in range(n)):
            raise InexactDivisionError(f"{den} does not divide {num}")
        if p is None:
            if c % lead_c:
                raise InexactDivisionError(f"{den} does not divide {num}")
            qc = c // lead_c
        else:
            qc = c * inv % p
        quot[qe] = qc
        for de, dc in den._terms.items():
            te = tuple(a + b for a, b in zip(qe, de))
            v = rem.get(te, 0) - qc * dc
            if p is not None:
                v %= p
            if v:
                rem[te] = v
            else:
                rem.pop(te, None)
    return num._like(quot)


def degree_span(p: LaurentPoly, var=None) -> int:
    """Maximum minus minimum exponent of ``var``."""
    if p.is_zero():
        raise ZeroPolynomialError("degree of the zero polynomial is undefined")
    i = p._index(var)
    exps = [e[i] for e in p._terms]
    return max(exps) - min(exps)


def leading_coefficient(p: LaurentPoly, var=None) -> LaurentPoly:
    """Coefficient of the top power of ``var`` (a polynomial in the other variables)."""
    if p.is_zero():
        raise ZeroPolynomialError("zero polynomial has no leading coefficient")
    i = p._index(var)
    top = max(e[i] for e in p._terms)
    return p._like({e: c for e, c in p._terms.items() if e[i] == top})


def is_monic(p: LaurentPoly, var=None) -> bool:
    """True iff the top coefficient in ``var`` is a single term with coefficient ±1."""
    if p.is_zero():
        return False
    lc = leading_coefficient(p, var)
    if len(lc._terms) != 1:
        return False
    (c,) = lc._terms.values()
    if p.modulus is None:
        return abs(c) == 1
    return c in (1, p.modulus - 1)


def gcd_univariate(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic generator of the ideal (a, b) in F_p[t^±1], lowest exponent zero."""
    b = a._check(b)
    if a.nvars != 1:
        raise ValueError("gcd_univariate needs single-variable polynomials")
    p = a.modulus
    if p is None:
        raise ValueError("gcd_univariate works over F_p; reduce the polynomials first")
    if a.is_zero():
        return b.normalize()
    if b.is_zero():
        return a.normalize()
    da = _fpt.from_list(a.to_dense()[1], p)
    db = _fpt.from_list(b.to_dense()[1], p)
    g = _fpt.strip_t(_fpt.gcd(da, db, p))
    return LaurentPoly.from_dense(g, 0, a.variables[0], p)


def random_poly(rng: random.Random, variables=("t",), modulus=None, terms: int = 4,
                exp_range: tuple[int, int] = (-3, 3), coeff_range: tuple[int, int] = (-5, 5)) -> LaurentPoly:
    out = {}
    for _ in range(terms):
        e = tuple(rng.randint(*exp_range) for _ in variables)
        out[e] = rng.randint(*coeff_range)
    return LaurentPoly(variables, out, modulus)
