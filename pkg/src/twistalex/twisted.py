"""Twisted Alexander polynomials over F_p[t^±1].

A permutation representation P: G -> S_k and an integral character
phi: G -> Z combine into Phi(g) = t^phi(g) P(g).  Every Phi(w) is a monomial
matrix, so it is stored as a (permutation, exponent) pair and the Fox
matrix is assembled directly in sparse form.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import _fpt, perms
from .laurent import (InexactDivisionError, LaurentPoly, ZeroPolynomialError, degree_span,
                      exact_divide)
from .perms import PermRep, perm_matrix  # noqa: F401  (re-exported)
from .presentation import (GroupPresentation, MissingImageError, fox_derivative, rep_images)
from .snf import sparse_fpt_diagonal

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29)

# Delta_2 of a link exterior with nonempty boundary is taken to be 1.
DELTA_TWO_DEGREE = 0
DELTA_TWO_CONVENTION = "Delta_2 = 1 assumed (link exterior with nonempty boundary)"

MONIC_NO = "no"
MONIC_UNKNOWN = "unknown-at-p"
MONIC_NEEDS_Z = "would-require-ℤ"


class CharacterError(ValueError):
    pass


class NoAdmissibleColumnError(ValueError):
    pass


@dataclass(frozen=True)
class TensorRep:
    """Phi = t^phi ⊗ P reduced mod p."""

    rep: PermRep
    character: Mapping[str, int]
    prime: int

    @property
    def degree(self) -> int:
        return self.rep.degree

    def generator_pair(self, name: str) -> tuple:
        if not self.rep.has(name):
            raise MissingImageError(f"representation has no image for generator {name!r}")
        if name not in self.character:
            raise CharacterError(f"character has no value on generator {name!r}")
        return self.rep.image(name), int(self.character[name])

    def word_pair(self, w, names: Sequence[str]) -> tuple:
        """(permutation, exponent) with Phi(w) = t^exponent P(permutation)."""
        acc = perms.identity(self.degree)
        e = 0
        for g, s in w:
            sig, a = self.generator_pair(names[g])
            if s == 1:
                acc = perms.compose(acc, sig)
                e += a
            else:
                acc = perms.compose(acc, perms.inverse(sig))
                e -= a
        return acc, e

    def matrix(self, w, names: Sequence[str]) -> list[list[LaurentPoly]]:
        sig, e = self.word_pair(w, names)
        return monomial_matrix(sig, e, self.prime)


def monomial_matrix(sig, e: int, p: int) -> list[list[LaurentPoly]]:
    k = len(sig)
    zero = LaurentPoly.zero(("t",), p)
    m = [[zero] * k for _ in range(k)]
    for b, a in enumerate(sig):
        m[a - 1][b] = LaurentPoly.monomial((e,), 1, ("t",), p)
    return m


def check_character(g: GroupPresentation, char: Mapping[str, int]) -> None:
    for name in g.generators:
        if name not in char:
            raise CharacterError(f"character has no value on generator {name!r}")
    for i, r in enumerate(g.relators):
        total = sum(s * char[g.generators[x]] for x, s in r)
        if total:
            raise CharacterError(f"character does not vanish on relator {i} ({g.format_word(r)})")


def _add(entry: dict, e: int, c: int, p: int) -> None:
    v = (entry.get(e, 0) + c) % p
    if v:
        entry[e] = v
    else:
        entry.pop(e, None)


def _fox_blocks(g: GroupPresentation, phi: TensorRep) -> dict:
    """Sparse Fox matrix: {(row, col): {exponent: coefficient}}.

    Row i*k + a, column j*k + b holds the (a, b) entry of Phi(d r_i / d x_j).
    """
    k = phi.degree
    p = phi.prime
    pairs = [phi.generator_pair(n) for n in g.generators]
    inverses = [perms.inverse(s) for s, _ in pairs]
    out: dict = {}
    for i, r in enumerate(g.relators):
        acc = perms.identity(k)
        e = 0
        for x, s in r:
            sig, a = pairs[x]
            if s == 1:
                term_perm, term_exp, c = acc, e, 1
                acc = perms.compose(acc, sig)
                e += a
            else:
                acc = perms.compose(acc, inverses[x])
                e -= a
                term_perm, term_exp, c = acc, e, -1
            for b in range(k):
                key = (i * k + term_perm[b] - 1, x * k + b)
                _add(out.setdefault(key, {}), term_exp, c, p)
    return {key: v for key, v in out.items() if v}


def alexander_matrix(g: GroupPresentation, phi: TensorRep) -> list[list[LaurentPoly]]:
    """The (m k) x (n k) matrix with blocks Phi(d r_i / d x_j)."""
    check_character(g, phi.character)
    k = phi.degree
    p = phi.prime
    blocks = _fox_blocks(g, phi)
    zero = LaurentPoly.zero(("t",), p)
    M = [[zero] * (g.ngens * k) for _ in range(len(g.relators) * k)]
    for (r, c), terms in blocks.items():
        M[r][c] = LaurentPoly(("t",), {(e,): v for e, v in terms.items()}, p)
    return M


def alexander_matrix_via_fox(g: GroupPresentation, phi: TensorRep) -> list[list[LaurentPoly]]:
    """Same matrix built from explicit group-ring Fox derivatives (slow reference)."""
    check_character(g, phi.character)
    k, p = phi.degree, phi.prime
    zero = LaurentPoly.zero(("t",), p)
    M = [[zero] * (g.ngens * k) for _ in range(len(g.relators) * k)]
    for i, r in enumerate(g.relators):
        for j in range(g.ngens):
            d = fox_derivative(r, j)
            for w, c in d.terms.items():
                sig, e = phi.word_pair(w, g.generators)
                for b in range(k):
                    a = sig[b] - 1
                    M[i * k + a][j * k + b] = M[i * k + a][j * k + b] + LaurentPoly(("t",), {(e,): c}, p)
    return M


def _diagonal_of_sparse(entries: dict, p: int) -> list[tuple]:
    """Invariant factors of a sparse Laurent matrix {(r, c): {e: coef}}."""
    rows: dict = {}
    for (r, c), terms in entries.items():
        rows.setdefault(r, {})[c] = terms
    dense_rows = []
    for r, row in rows.items():
        low = min(min(t) for t in row.values())
        dense = {}
        for c, terms in row.items():
            top = max(terms) - low
            coeffs = [0] * (top + 1)
            for e, v in terms.items():
                coeffs[e - low] = v
            dense[c] = _fpt.trim(coeffs)
        dense_rows.append(dense)
    return sparse_fpt_diagonal(dense_rows, p)


def _to_poly(d: tuple, p: int) -> LaurentPoly:
    return LaurentPoly.from_dense(d, 0, "t", p)


def _product(polys, p: int) -> LaurentPoly:
    out = LaurentPoly.const(1, ("t",), p)
    for f in polys:
        out = out * f
    return out


def _normalized(f: LaurentPoly) -> LaurentPoly:
    return f if f.is_zero() else f.normalize()


def delta_zero(g: GroupPresentation, phi: TensorRep) -> LaurentPoly:
    """Order of the module presented by the stacked blocks Phi(x_i) - I."""
    k, p = phi.degree, phi.prime
    entries: dict = {}
    for i, name in enumerate(g.generators):
        sig, e = phi.generator_pair(name)
        for b in range(k):
            _add(entries.setdefault((i * k + sig[b] - 1, b), {}), e, 1, p)
            _add(entries.setdefault((i * k + b, b), {}), 0, -1, p)
    entries = {key: v for key, v in entries.items() if v}
    diag = _diagonal_of_sparse(entries, p)
    if len(diag) < k:
        return LaurentPoly.zero(("t",), p)
    return _normalized(_product((_to_poly(d, p) for d in diag), p))


def column_factor(phi: TensorRep, name: str) -> LaurentPoly:
    """det(Phi(x) - I): one factor t^(|phi(x)| L) - 1 per L-cycle of P(x)."""
    sig, e = phi.generator_pair(name)
    p = phi.prime
    if e == 0:
        return LaurentPoly.zero(("t",), p)
    out = LaurentPoly.const(1, ("t",), p)
    for L in perms.cycle_type(sig):
        out = out * LaurentPoly(("t",), {(abs(e) * L,): 1, (0,): -1}, p)
    return out.normalize()


@dataclass
class TwistedResult:
    prime: int
    degree: int
    deleted_generator: str
    free_rank: int
    torsion_invariants: list
    delta: LaurentPoly
    delta_tilde: LaurentPoly
    delta_zero: LaurentPoly
    column_factor: LaurentPoly
    h1_order: LaurentPoly | None
    monic_mod_p: str
    notes: list = field(default_factory=list)

    @property
    def vanishes(self) -> bool:
        return self.delta.is_zero()

    def delta_degree(self) -> int | None:
        return None if self.delta.is_zero() else degree_span(self.delta)

    def to_dict(self) -> dict:
        def fmt(f):
            return None if f is None else f.format("asc")

        return {
            "prime": self.prime,
            "degree": self.degree,
            "deleted_generator": self.deleted_generator,
            "free_rank": self.free_rank,
            "torsion_invariants": [fmt(f) for f in self.torsion_invariants],
            "delta": fmt(self.delta),
            "delta_tilde": fmt(self.delta_tilde),
            "delta_zero": fmt(self.delta_zero),
            "column_factor": fmt(self.column_factor),
            "h1_order": fmt(self.h1_order),
            "monic_mod_p": self.monic_mod_p,
            "notes": list(self.notes),
        }


def admissible_generators(g: GroupPresentation, char: Mapping[str, int]) -> list[str]:
    return [n for n in g.generators if char.get(n, 0) != 0]


def twisted_alexander(g: GroupPresentation, phi: TensorRep, deleted: str | int | None = None) -> TwistedResult:
    """Twisted Alexander data of (g, Phi) at the prime of ``phi``.

    ``delta`` is the order of the module presented by the Fox matrix with the
    block column of ``deleted`` removed (zero when that module has free rank).
    ``h1_order`` = delta * delta_zero / column_factor is the order of the
    twisted first homology itself.
    """
    check_character(g, phi.character)
    k, p = phi.degree, phi.prime
    if deleted is None:
        cands = admissible_generators(g, phi.character)
        if not cands:
            raise NoAdmissibleColumnError("character vanishes on every generator")
        deleted = cands[0]
    elif isinstance(deleted, int):
        deleted = g.generators[deleted]
    j = g.index(deleted)
    if phi.character[deleted] == 0:
        raise NoAdmissibleColumnError(f"character vanishes on {deleted!r}; its column cannot be deleted")
    blocks = _fox_blocks(g, phi)
    kept = {}
    for (r, c), v in blocks.items():
        if c // k != j:
            kept[(r, c)] = v
    diag = _diagonal_of_sparse(kept, p)
    ncols = (g.ngens - 1) * k
    free_rank = ncols - len(diag)
    invariants = [_to_poly(d, p) for d in diag if len(d) > 1]
    tilde = _product(invariants, p).normalize()
    zero = LaurentPoly.zero(("t",), p)
    delta = zero if free_rank > 0 else tilde
    d0 = delta_zero(g, phi)
    cf = column_factor(phi, deleted)
    notes = []
    h1 = None
    if delta.is_zero():
        h1 = zero
    else:
        try:
            h1 = exact_divide(delta * d0, cf).normalize()
        except InexactDivisionError:
            notes.append("delta * delta_zero is not divisible by the column factor")
    monic = MONIC_NO if delta.is_zero() else MONIC_NEEDS_Z
    log.debug("p=%d deleted=%s rank=%d free=%d", p, deleted, len(diag), free_rank)
    return TwistedResult(p, k, deleted, free_rank, invariants, delta, tilde, d0, cf, h1, monic, notes)


def _sweep_one(args):
    g, rep, char, p, deleted = args
    return twisted_alexander(g, TensorRep(rep, char, p), deleted)


def twisted_sweep(g: GroupPresentation, rep: PermRep, char: Mapping[str, int],
                  primes: Sequence[int] = DEFAULT_PRIMES, deleted=None, workers: int = 1) -> list[TwistedResult]:
    """One result per prime.  Results whose degree is below the largest degree
    seen are marked unknown-at-p: that prime divides the integral leading
    coefficient."""
    jobs = [(g, rep, dict(char), p, deleted) for p in primes]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    degs = [r.delta_degree() for r in results if not r.vanishes]
    if degs:
        top = max(degs)
        for r in results:
            if not r.vanishes and r.delta_degree() < top:
                r.monic_mod_p = MONIC_UNKNOWN
    return results


def monic_verdict(results: Sequence[TwistedResult]) -> str:
    """``no`` when some prime proves non-monicness, otherwise ``would-require-ℤ``."""
    if any(r.vanishes or r.monic_mod_p == MONIC_UNKNOWN for r in results):
        return MONIC_NO
    return MONIC_NEEDS_Z


@dataclass(frozen=True)
class FkReport:
    monic: str
    degree_lhs: int | None
    degree_rhs: int
    delta_zero_degree: int
    delta_two_degree: int
    obstructed: bool
    reason: str
    convention: str = DELTA_TWO_CONVENTION

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def fk_degree_test(res: TwistedResult, k: int, norm: int) -> FkReport:
    """Compare deg H_1-order with k*norm + deg Delta_0 + deg Delta_2."""
    d0 = degree_span(res.delta_zero) if not res.delta_zero.is_zero() else 0
    rhs = k * norm + d0 + DELTA_TWO_DEGREE
    if res.vanishes:
        return FkReport(MONIC_NO, None, rhs, d0, DELTA_TWO_DEGREE, True, "vanishes")
    if res.monic_mod_p == MONIC_UNKNOWN:
        lhs = degree_span(res.h1_order) if res.h1_order else None
        return FkReport(MONIC_NO, lhs, rhs, d0, DELTA_TWO_DEGREE, True, "nonmonic")
    if res.h1_order is None:
        lhs = degree_span(res.delta) + d0 - degree_span(res.column_factor)
    else:
        lhs = degree_span(res.h1_order)
    if lhs != rhs:
        return FkReport(res.monic_mod_p, lhs, rhs, d0, DELTA_TWO_DEGREE, True, "degree_mismatch")
    return FkReport(res.monic_mod_p, lhs, rhs, d0, DELTA_TWO_DEGREE, False, "consistent")


def tilde_norm_bound(delta_tilde: LaurentPoly, k: int) -> int:
    """floor(deg / k) - 1.  Valid only for classes dual to a meridian, which the
    caller must know: that condition is topological and not visible here."""
    if delta_tilde.is_zero():
        raise ZeroPolynomialError("the secondary polynomial is zero")
    if k < 1:
        raise ValueError("representation degree must be positive")
    return degree_span(delta_tilde) // k - 1
