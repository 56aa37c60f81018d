"""Permutations in one-line notation and permutation representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations as _itperms
from typing import Iterable, Mapping, Sequence

# Products act like function composition: (s*t)(i) = s(t(i)), so in a word
# the rightmost letter acts first.  This is the convention under which the
# shipped representation fixtures satisfy their relators; the opposite
# order breaks the Wirtinger relators of the L_alpha fixture.
COMPOSITION = "right_to_left"


class RepParseError(ValueError):
    pass


Perm = tuple


def identity(k: int) -> Perm:
    return tuple(range(1, k + 1))


def compose(s: Perm, t: Perm) -> Perm:
    return tuple(s[j - 1] for j in t)


def inverse(s: Perm) -> Perm:
    out = [0] * len(s)
    for i, x in enumerate(s, 1):
        out[x - 1] = i
    return tuple(out)


def is_permutation(s: Sequence[int]) -> bool:
    return sorted(s) == list(range(1, len(s) + 1))


def parse_one_line(text: str, k: int | None = None) -> Perm:
    """Parse ``1 5 2 3 4`` or the compact ``15234`` (degree below 10)."""
    text = text.strip().strip("()")
    parts = text.split()
    if len(parts) == 1 and (k is None or k < 10) and len(parts[0]) > 1:
        parts = list(parts[0])
    try:
        perm = tuple(int(x) for x in parts)
    except ValueError:
        raise RepParseError(f"bad permutation {text!r}") from None
    if k is not None and len(perm) != k:
        raise RepParseError(f"permutation {text!r} has length {len(perm)}, expected {k}")
    if not is_permutation(perm):
        raise RepParseError(f"{text!r} is not a permutation of 1..{len(perm)}")
    return perm


def one_line(s: Perm) -> str:
    if len(s) < 10:
        return "".join(map(str, s))
    return " ".join(map(str, s))


def cycle_type(s: Perm) -> tuple:
    seen = set()
    lengths = []
    for i in range(1, len(s) + 1):
        if i in seen:
            continue
        n = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = s[j - 1]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def canonical_representative(ctype: Sequence[int]) -> Perm:
    """Product of consecutive cycles (1..a)(a+1..a+b)... of the given lengths."""
    out = []
    start = 1
    for n in ctype:
        out.extend(range(start + 1, start + n))
        out.append(start)
        start += n
    return tuple(out)


def partitions(k: int, largest: int | None = None) -> list[tuple]:
    largest = k if largest is None else largest
    if k == 0:
        return [()]
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            out.append((first,) + rest)
    return out


def all_permutations(k: int) -> list[Perm]:
    return [tuple(p) for p in _itperms(range(1, k + 1))]


def class_representatives(k: int) -> list[Perm]:
    return [canonical_representative(c) for c in partitions(k)]


def perm_matrix(s: Perm) -> list[list[int]]:
    """Matrix with ones at (s(i), i), so that perm_matrix is multiplicative."""
    k = len(s)
    m = [[0] * k for _ in range(k)]
    for i, x in enumerate(s):
        m[x - 1][i] = 1
    return m


@dataclass
class PermRep:
    """Images of generators in S_k, as one-line tuples.

    Images for names that are not generators of the target presentation
    (derived elements such as aliases) may be stored too.
    """

    degree: int
    images: dict = field(default_factory=dict)
    default_identity: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("representation degree must be at least 1")
        for name, s in self.images.items():
            if len(s) != self.degree or not is_permutation(s):
                raise ValueError(f"image of {name!r} is not a permutation of degree {self.degree}")

    def image(self, name: str) -> Perm:
        if name in self.images:
            return self.images[name]
        if self.default_identity:
            return identity(self.degree)
        raise KeyError(name)

    def has(self, name: str) -> bool:
        return self.default_identity or name in self.images

    def restricted(self, names: Iterable[str]) -> "PermRep":
        return PermRep(self.degree, {n: self.image(n) for n in names})

    def with_image(self, name: str, s: Perm) -> "PermRep":
        images = dict(self.images)
        images[name] = tuple(s)
        return PermRep(self.degree, images, self.default_identity)

    def to_text(self, order: Sequence[str] | None = None) -> str:
        lines = [f"degree: {self.degree}"]
        if self.default_identity:
            lines.append("default: identity")
        for name in order or self.images:
            if name in self.images:
                lines.append(f"gen {name}: {' '.join(map(str, self.images[name]))}")
        return "\n".join(lines) + "\n"


def parse_rep(text: str) -> PermRep:
    """Parse a ``.rep`` file: ``degree: k``, then ``gen <name>: i1 ... ik`` lines."""
    degree = None
    images: dict = {}
    default = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise RepParseError(f"line {lineno}: expected 'key: value'")
        key = key.strip()
        if key == "degree":
            degree = int(value)
        elif key == "default":
            if value.strip() != "identity":
                raise RepParseError(f"line {lineno}: only 'default: identity' is supported")
            default = True
        elif key.startswith("gen "):
            if degree is None:
                raise RepParseError(f"line {lineno}: 'degree' must come first")
            name = key[4:].strip()
            if name in images:
                raise RepParseError(f"line {lineno}: duplicate image for {name!r}")
            images[name] = parse_one_line(value, degree)
        else:
            raise RepParseError(f"line {lineno}: unknown key {key!r}")
    if degree is None:
        raise RepParseError("missing 'degree'")
    return PermRep(degree, images, default)


def load_rep(path) -> PermRep:
    with open(path, encoding="utf-8") as fh:
        return parse_rep(fh.read())


def trivial_rep(k: int = 1) -> PermRep:
    return PermRep(k, {}, True)


def images_from_mapping(degree: int, mapping: Mapping[str, str]) -> PermRep:
    return PermRep(degree, {n: parse_one_line(v, degree) for n, v in mapping.items()})
