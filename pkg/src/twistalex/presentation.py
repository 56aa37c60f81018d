"""Finitely presented groups, free differential calculus and abelianization.

A word is a tuple of ``(generator index, sign)`` pairs with sign ±1.

Presentation files (``.grp``)::

    gens: x y s t b
    rel: x y x = y x y, x s = s x
    rel: s = x^-1 y x^2 y x^-3
    meridians: t          # optional: H_1 basis used for cohomology classes
    alias: n = x          # optional: named elements, checked against reps

Generators are alphanumeric; ``X`` is shorthand for ``x^-1`` when ``X`` is
not itself a generator, juxtaposed single-letter generators may be run
together (``xyxY``), ``(st)^-1`` groups, and ``1`` is the empty word.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import perms
from .perms import PermRep
from .snf import smith_normal_form

Word = tuple


class PresentationParseError(ValueError):
    pass


class UnknownGeneratorError(PresentationParseError):
    pass


class UnbalancedRelationError(PresentationParseError):
    pass


class MissingImageError(KeyError):
    pass


# words ------------------------------------------------------------------------

def free_reduce(w: Iterable) -> Word:
    out: list = []
    for g, s in w:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def word_inverse(w: Word) -> Word:
    return tuple((g, -s) for g, s in reversed(w))


def word_mul(*ws: Word) -> Word:
    out: tuple = ()
    for w in ws:
        out = free_reduce(out + tuple(w))
    return out


def cyclic_permutations(w: Word) -> list[Word]:
    return [tuple(w[i:]) + tuple(w[:i]) for i in range(max(len(w), 1))]


def exponent_sums(w: Word, n: int) -> list[int]:
    v = [0] * n
    for g, s in w:
        v[g] += s
    return v


# group presentations ----------------------------------------------------------

@dataclass
class GroupPresentation:
    generators: tuple
    relators: tuple
    meridians: tuple | None = None
    aliases: dict = field(default_factory=dict)  # name -> Word
    notes: tuple = ()

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self.relators = tuple(tuple(r) for r in self.relators)
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise PresentationParseError("duplicate generator names")
        for r in self.relators:
            for g, s in r:
                if not (0 <= g < n) or s not in (1, -1):
                    raise UnknownGeneratorError(f"relator letter {(g, s)} is out of range")
        if self.meridians is not None:
            self.meridians = tuple(self.meridians)
            for m in self.meridians:
                if m not in self.generators:
                    raise UnknownGeneratorError(f"meridian {m!r} is not a generator")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise UnknownGeneratorError(f"unknown generator {name!r}") from None

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def format_word(self, w: Word) -> str:
        return format_word(w, self.generators)

    def relator_support(self, i: int) -> frozenset:
        return frozenset(g for g, _ in self.relators[i])

    def canonical_text(self) -> str:
        lines = ["gens: " + " ".join(self.generators)]
        for r in self.relators:
            lines.append("rel: " + (self.format_word(r, ) if r else "1"))
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def to_text(self) -> str:
        out = [f"# {n}" for n in self.notes]
        out.append(self.canonical_text().rstrip("\n"))
        if self.meridians:
            out.append("meridians: " + " ".join(self.meridians))
        for name, w in self.aliases.items():
            out.append(f"alias: {name} = {self.format_word(w) or '1'}")
        return "\n".join(out) + "\n"


def format_word(w: Word, names: Sequence[str], compact: bool | None = None) -> str:
    """Words print as ``x y^-1`` or, with single-letter lowercase names, ``xY``."""
    if compact is None:
        compact = all(len(n) == 1 and n.islower() for n in names)
    if not w:
        return ""
    if compact:
        return "".join(names[g] if s == 1 else names[g].upper() for g, s in w)
    parts = []
    i = 0
    while i < len(w):
        g, s = w[i]
        j = i
        while j < len(w) and w[j] == (g, s):
            j += 1
        e = (j - i) * s
        parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
        i = j
    return " ".join(parts)


_LEX = re.compile(r"\s*(?:([A-Za-z0-9_]+)|(\^)\s*([+-]?\d+)|([()]))")


def _split_chunk(chunk: str, names: Sequence[str]) -> list:
    """Split a run of characters into generator letters by greedy longest match."""
    lookup = {}
    for i, n in enumerate(names):
        lookup[n] = (i, 1)
    for i, n in enumerate(names):
        inv = n[0].upper() + n[1:] if n[0].islower() else None
        if inv and inv not in lookup:
            lookup[inv] = (i, -1)
    if chunk == "1":
        return []
    out = []
    pos = 0
    longest = max((len(k) for k in lookup), default=0)
    while pos < len(chunk):
        for size in range(min(longest, len(chunk) - pos), 0, -1):
            piece = chunk[pos:pos + size]
            if piece in lookup:
                out.append(lookup[piece])
                pos += size
                break
        else:
            raise UnknownGeneratorError(f"unknown generator in {chunk!r} at {chunk[pos:]!r}")
    return out


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse one side of a relation into a freely reduced word."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _LEX.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationParseError(f"unexpected character {text[pos]!r} in {text!r}")
        tokens.append(m.groups())
        pos = m.end()
    k = 0

    def seq(depth):
        nonlocal k
        items: list = []
        while k < len(tokens):
            chunk, caret, exp, paren = tokens[k]
            if paren == "(":
                k += 1
                inner = seq(depth + 1)
                if k >= len(tokens) or tokens[k][3] != ")":
                    raise UnbalancedRelationError(f"unbalanced parenthesis in {text!r}")
                k += 1
                items.append(list(inner))
            elif paren == ")":
                if depth == 0:
                    raise UnbalancedRelationError(f"unbalanced parenthesis in {text!r}")
                return [x for item in items for x in item]
            elif caret:
                if not items or not items[-1]:
                    raise PresentationParseError(f"exponent without a base in {text!r}")
                e = int(exp)
                items.append(_power(items.pop(), e))
                k += 1
            else:
                letters = _split_chunk(chunk, names)
                # an exponent binds to the last letter of a run like "yx^2"
                for letter in letters[:-1]:
                    items.append([letter])
                items.append(letters[-1:])
                k += 1
        if depth:
            raise UnbalancedRelationError(f"unbalanced parenthesis in {text!r}")
        return [x for item in items for x in item]

    return free_reduce(seq(0))


def _power(base: list, e: int) -> list:
    if e >= 0:
        return base * e
    inv = [(g, -s) for g, s in reversed(base)]
    return inv * (-e)


def parse_relation(text: str, names: Sequence[str]) -> Word:
    sides = text.split("=")
    if len(sides) > 2 or any(not s.strip() for s in sides):
        raise UnbalancedRelationError(f"malformed relation {text!r}")
    left = parse_word(sides[0], names)
    if len(sides) == 1:
        return left
    return word_mul(left, word_inverse(parse_word(sides[1], names)))


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s for s in (x.strip() for x in out) if s]


def parse_presentation(text: str) -> GroupPresentation:
    gens: list | None = None
    rels: list = []
    meridians = None
    aliases: dict = {}
    notes = []
    pending_aliases = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            notes.append(stripped.lstrip("#").strip())
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PresentationParseError(f"line {lineno}: expected 'key: value'")
        key = key.strip()
        try:
            if key == "gens":
                gens = [g for g in re.split(r"[\s,]+", value.strip()) if g]
                for g in gens:
                    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", g):
                        raise PresentationParseError(f"bad generator name {g!r}")
            elif key in ("rel", "rels"):
                if gens is None:
                    raise PresentationParseError("'gens' must come before relations")
                for part in _split_top_level(value):
                    rels.append(parse_relation(part, gens))
            elif key == "meridians":
                meridians = tuple(value.split())
            elif key == "alias":
                pending_aliases.append(value)
            else:
                raise PresentationParseError(f"unknown key {key!r}")
        except PresentationParseError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
    if gens is None:
        raise PresentationParseError("missing 'gens' line")
    for value in pending_aliases:
        name, sep, body = value.partition("=")
        if not sep:
            raise UnbalancedRelationError(f"alias needs 'name = word': {value!r}")
        aliases[name.strip()] = parse_word(body, gens)
    return GroupPresentation(tuple(gens), tuple(rels), meridians, aliases, tuple(notes))


def load_presentation(path) -> GroupPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


# integral group ring of the free group ----------------------------------------

class GroupRingElement:
    """Finite Z-linear combination of freely reduced words."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, int] | None = None):
        clean: dict = {}
        for w, c in (terms or {}).items():
            w = free_reduce(w)
            clean[w] = clean.get(w, 0) + c
        self.terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def of(cls, w: Word, c: int = 1):
        return cls({w: c})

    @classmethod
    def one(cls):
        return cls({(): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElement(out)

    def __neg__(self):
        return GroupRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement({w: c * other for w, c in self.terms.items()})
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = free_reduce(w1 + w2)
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElement(out)

    def __eq__(self, other):
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda w: (len(w), w))
        out = ""
        for i, w in enumerate(keys):
            c = self.terms[w]
            body = format_word(w, names) or "1"
            mag = abs(c)
            text = body if mag == 1 else (f"{mag}" if not w else f"{mag}*{body}")
            if i == 0:
                out = ("-" if c < 0 else "") + text
            else:
                out += (" - " if c < 0 else " + ") + text
        return out

    def __repr__(self):
        return f"GroupRingElement({self.terms})"


def fox_derivative(w: Word, x: int) -> GroupRingElement:
    """Free derivative d w / d x_x as an element of Z[F]."""
    terms: dict = {}
    prefix: tuple = ()
    for g, s in w:
        if g == x:
            if s == 1:
                key = free_reduce(prefix)
                terms[key] = terms.get(key, 0) + 1
            else:
                key = free_reduce(prefix + ((g, -1),))
                terms[key] = terms.get(key, 0) - 1
        prefix = prefix + ((g, s),)
    return GroupRingElement(terms)


# abelianization --------------------------------------------------------------

@dataclass(frozen=True)
class AbelianizationMap:
    generators: tuple
    rank: int
    torsion: tuple
    free_images: dict  # name -> tuple of length rank
    torsion_images: dict  # name -> tuple of residues, one per torsion factor
    basis: tuple | None = None  # meridian names if the basis was adapted to them

    def image(self, w: Word) -> tuple:
        v = [0] * self.rank
        for g, s in w:
            for i, a in enumerate(self.free_images[self.generators[g]]):
                v[i] += s * a
        return tuple(v)

    def torsion_image(self, w: Word) -> tuple:
        v = [0] * len(self.torsion)
        for g, s in w:
            for i, a in enumerate(self.torsion_images[self.generators[g]]):
                v[i] += s * a
        return tuple(x % d for x, d in zip(v, self.torsion))


def _invert_rational(B: list[list[int]]) -> list[list[Fraction]]:
    n = len(B)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(B)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ValueError("meridian images are linearly dependent in H_1")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def abelianize(g: GroupPresentation) -> AbelianizationMap:
    """Exponent-sum matrix and its Smith form give H_1 and generator images."""
    n = g.ngens
    R = [exponent_sums(r, n) for r in g.relators] or [[0] * n]
    snf = smith_normal_form(R, transforms=True)
    V = snf.right_transform
    diag = list(snf.diagonal) + [0] * (n - len(snf.diagonal))
    r = snf.rank
    torsion_idx = [i for i in range(r) if abs(diag[i]) > 1]
    free_idx = list(range(r, n))
    # generator j maps to row j of V in the new coordinates
    frees = {name: tuple(V[j][i] for i in free_idx) for j, name in enumerate(g.generators)}
    tors = tuple(abs(diag[i]) for i in torsion_idx)
    tors_images = {name: tuple(V[j][i] % abs(diag[i]) for i in torsion_idx)
                   for j, name in enumerate(g.generators)}
    basis = None
    if g.meridians and frees:
        b = len(free_idx)
        if len(g.meridians) != b:
            raise ValueError(f"{len(g.meridians)} meridians declared but H_1 has rank {b}")
        B = [list(frees[m]) for m in g.meridians]
        Binv = _invert_rational(B)
        new = {}
        for name, v in frees.items():
            coords = [sum(Fraction(v[i]) * Binv[i][j] for i in range(b)) for j in range(b)]
            if any(c.denominator != 1 for c in coords):
                raise ValueError("meridians do not form a basis of the free part of H_1")
            new[name] = tuple(int(c) for c in coords)
        frees = new
        basis = g.meridians
    return AbelianizationMap(g.generators, len(free_idx), tors, frees, tors_images, basis)


def class_as_char(ab: AbelianizationMap, phi: Sequence[int]) -> dict:
    """Integral character on generators: phi composed with abelianization."""
    phi = tuple(int(x) for x in phi)
    if len(phi) != ab.rank:
        raise ValueError(f"class has {len(phi)} entries but H_1 has rank {ab.rank}")
    return {name: sum(p * a for p, a in zip(phi, ab.free_images[name])) for name in ab.generators}


def character_kills_relators(g: GroupPresentation, char: Mapping[str, int]) -> bool:
    return all(sum(s * char[g.generators[i]] for i, s in r) == 0 for r in g.relators)


def character_from_vector(g: GroupPresentation, phi: Sequence[int], ab: AbelianizationMap | None = None) -> dict:
    """Interpret ``phi`` as an H_1 class (length = rank) or as values on generators."""
    ab = abelianize(g) if ab is None else ab
    phi = [int(x) for x in phi]
    if len(phi) == ab.rank:
        return class_as_char(ab, phi)
    if len(phi) == g.ngens:
        char = dict(zip(g.generators, phi))
        if not character_kills_relators(g, char):
            raise ValueError("character does not vanish on every relator")
        return char
    raise ValueError(f"phi has {len(phi)} entries; expected rank {ab.rank} or {g.ngens} generators")


# homomorphisms into S_k --------------------------------------------------------

def evaluate_word(w: Word, images: Sequence) -> tuple:
    """Evaluate a word given per-generator-index permutation images."""
    k = len(images[0]) if images else 0
    acc = perms.identity(k)
    for g, s in w:
        p = images[g] if s == 1 else perms.inverse(images[g])
        acc = perms.compose(acc, p)
    return acc


def rep_images(g: GroupPresentation, rep: PermRep) -> list:
    out = []
    for name in g.generators:
        if not rep.has(name):
            raise MissingImageError(f"representation has no image for generator {name!r}")
        out.append(rep.image(name))
    return out


def check_homomorphism(g: GroupPresentation, rep: PermRep) -> bool:
    images = rep_images(g, rep)
    e = perms.identity(rep.degree)
    return all(evaluate_word(r, images) == e for r in g.relators)


def check_aliases(g: GroupPresentation, rep: PermRep) -> dict:
    """For each alias with a stored image, does the image match the word's value?"""
    images = rep_images(g, rep)
    return {name: rep.images[name] == evaluate_word(w, images)
            for name, w in g.aliases.items() if name in rep.images}


def substitute(w: Word, mapping: Sequence[Word]) -> Word:
    """Image of ``w`` under the free-group map sending generator i to mapping[i]."""
    out: list = []
    for gi, s in w:
        piece = mapping[gi] if s == 1 else word_inverse(mapping[gi])
        out.extend(piece)
    return free_reduce(out)


# Wirtinger presentations -----------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    over: str
    incoming: str
    outgoing: str
    sign: int


def wirtinger(crossings: Sequence[Crossing], arcs: Sequence[str] | None = None) -> GroupPresentation:
    """One generator per arc and one relator ``out = over^s in over^-s`` per crossing."""
    if arcs is None:
        seen: list = []
        for c in crossings:
            for a in (c.over, c.incoming, c.outgoing):
                if a not in seen:
                    seen.append(a)
        arcs = seen
    arcs = tuple(arcs)
    idx = {a: i for i, a in enumerate(arcs)}
    starts: dict = {}
    ends: dict = {}
    for c in crossings:
        for a in (c.over, c.incoming, c.outgoing):
            if a not in idx:
                raise ValueError(f"crossing references unknown arc {a!r}")
        if c.sign not in (1, -1):
            raise ValueError(f"crossing sign must be +1 or -1, got {c.sign}")
        ends[c.incoming] = ends.get(c.incoming, 0) + 1
        starts[c.outgoing] = starts.get(c.outgoing, 0) + 1
    for a in arcs:
        s, e = starts.get(a, 0), ends.get(a, 0)
        if s > 1 or e > 1 or s != e:
            raise ValueError(f"arc {a!r} starts at {s} and ends at {e} undercrossings; expected 0/0 or 1/1")
    rels = []
    for c in crossings:
        o, i, j = idx[c.over], idx[c.incoming], idx[c.outgoing]
        s = c.sign
        rels.append(free_reduce([(o, s), (i, 1), (o, -s), (j, -1)]))
    return GroupPresentation(arcs, tuple(rels))


def parse_crossings(text: str) -> tuple[list[Crossing], list[str] | None]:
    """``arcs: a b c`` (optional) and ``crossing <over> <in> <out> +|-`` lines."""
    arcs = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("arcs:"):
            arcs = line[5:].split()
            continue
        words = line.split()
        if words[0] != "crossing" or len(words) != 5 or words[4] not in ("+", "-", "+1", "-1"):
            raise PresentationParseError(f"line {lineno}: expected 'crossing <over> <in> <out> +|-'")
        out.append(Crossing(words[1], words[2], words[3], -1 if words[4].startswith("-") else 1))
    return out, arcs
