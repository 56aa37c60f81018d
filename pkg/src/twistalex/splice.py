"""Splice diagrams of graph links and their Eisenbud-Neumann invariants.

File format, one construct per line (``#`` starts a comment)::

    vertex <id> arrowhead|boundary|node
    edge <u> <v> <weight near u> <weight near v>
    components <arrowhead ids in variable order>
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .laurent import LaurentPoly, degree_span, exact_divide, is_monic

KINDS = ("arrowhead", "boundary", "node")


class SpliceParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SpliceStructureError(ValueError):
    """The diagram is not a valid splice diagram (cycle, bad degree, ...)."""


class ENConventionError(ArithmeticError):
    """Zero factors (t^0 - 1) left over in the denominator of the product formula."""


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    weight_u: int
    weight_v: int

    def weight_at(self, x: str) -> int:
        return self.weight_u if x == self.u else self.weight_v

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class EnFactor:
    exponents: tuple  # one linking number per component
    multiplicity: int
    vertex: str | None = None  # None for the knot-case extra factor


@dataclass
class SpliceDiagram:
    vertices: dict  # id -> kind
    edges: list
    components: tuple
    _adj: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._adj = {v: [] for v in self.vertices}
        for e in self.edges:
            self._adj[e.u].append(e)
            self._adj[e.v].append(e)

    @property
    def n(self) -> int:
        return len(self.components)

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def incident(self, v: str) -> list:
        return list(self._adj[v])

    def kind(self, v: str) -> str:
        return self.vertices[v]

    def nodes(self) -> list:
        return [v for v, k in self.vertices.items() if k == "node"]

    def non_arrowheads(self) -> list:
        return [v for v, k in self.vertices.items() if k != "arrowhead"]

    def variables(self) -> tuple:
        return ("t",) if self.n == 1 else tuple(f"t{i + 1}" for i in range(self.n))

    def path(self, a: str, b: str) -> list:
        """Vertices on the unique tree path from a to b."""
        for x in (a, b):
            if x not in self.vertices:
                raise KeyError(f"vertex {x!r} not in diagram")
        prev = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for e in self._adj[x]:
                y = e.other(x)
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    def validate(self) -> None:
        nv = len(self.vertices)
        if len(self.edges) != nv - 1:
            raise SpliceStructureError(
                f"a tree on {nv} vertices has {nv - 1} edges, found {len(self.edges)} (cycle or forest)")
        seen = set()
        start = next(iter(self.vertices))
        stack = [start]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(e.other(x) for e in self._adj[x])
        if len(seen) != nv:
            raise SpliceStructureError("diagram is disconnected (so it contains a cycle)")
        for v, k in self.vertices.items():
            d = self.degree(v)
            if k in ("arrowhead", "boundary") and d != 1:
                raise SpliceStructureError(f"{k} vertex {v!r} has degree {d}, expected 1")
            if k == "node" and d < 3:
                raise SpliceStructureError(f"node {v!r} has degree {d}, expected at least 3")
        arrows = [v for v, k in self.vertices.items() if k == "arrowhead"]
        if not arrows:
            raise SpliceStructureError("diagram has no arrowhead vertex")
        if sorted(self.components) != sorted(arrows):
            raise SpliceStructureError(
                f"components {list(self.components)} must list each arrowhead {arrows} once")


def parse_splice(text: str) -> SpliceDiagram:
    vertices: dict = {}
    edges: list = []
    components = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        spans = [m.start() + 1 for m in re.finditer(r"\S+", line)]
        words = line.split()
        col = spans[0]
        head = words[0]
        if head == "vertex":
            if len(words) != 3:
                raise SpliceParseError("expected 'vertex <id> <kind>'", lineno, col)
            vid, kind = words[1], words[2]
            if kind not in KINDS:
                raise SpliceParseError(f"unknown vertex kind {kind!r}", lineno, spans[2])
            if vid in vertices:
                raise SpliceParseError(f"duplicate vertex {vid!r}", lineno, spans[1])
            vertices[vid] = kind
        elif head == "edge":
            if len(words) != 5:
                raise SpliceParseError("expected 'edge <u> <v> <weight u> <weight v>'", lineno, col)
            u, v = words[1], words[2]
            for k in (1, 2):
                if words[k] not in vertices:
                    raise SpliceParseError(f"undeclared vertex {words[k]!r}", lineno, spans[k])
            if u == v:
                raise SpliceStructureError(f"self-loop at {u!r} (line {lineno})")
            try:
                wu, wv = int(words[3]), int(words[4])
            except ValueError:
                raise SpliceParseError("edge weights must be integers", lineno, spans[3]) from None
            edges.append(Edge(u, v, wu, wv))
        elif head == "components":
            components = tuple(words[1:])
            for k, a in enumerate(components, 1):
                if a not in vertices:
                    raise SpliceParseError(f"undeclared vertex {a!r}", lineno, spans[k])
        else:
            raise SpliceParseError(f"unknown directive {head!r}", lineno, col)
    if not vertices:
        raise SpliceStructureError("empty diagram")
    if components is None:
        components = tuple(v for v, k in vertices.items() if k == "arrowhead")
    d = SpliceDiagram(vertices, edges, components)
    d.validate()
    return d


def load_splice(path) -> SpliceDiagram:
    with open(path, encoding="utf-8") as fh:
        return parse_splice(fh.read())


def linking_number(d: SpliceDiagram, a: str, v: str) -> int:
    """Product of the near-weights of edges touching the a-v path but not on it."""
    if d.kind(a) != "arrowhead":
        raise ValueError(f"{a!r} is not an arrowhead")
    path = d.path(a, v)
    on_path = set()
    for x, y in zip(path, path[1:]):
        on_path.add(frozenset((x, y)))
    out = 1
    for x in path:
        for e in d.incident(x):
            if frozenset((e.u, e.v)) not in on_path:
                out *= e.weight_at(x)
    return out


def linking_vector(d: SpliceDiagram, v: str) -> tuple:
    return tuple(linking_number(d, a, v) for a in d.components)


def en_factor_set(d: SpliceDiagram) -> list[EnFactor]:
    factors = [EnFactor(linking_vector(d, v), d.degree(v) - 2, v) for v in d.non_arrowheads()]
    if d.n == 1:
        factors.append(EnFactor((1,), 1, None))
    return factors


def _binomial(exps: Sequence[int], variables) -> LaurentPoly:
    return LaurentPoly(variables, {tuple(exps): 1, (0,) * len(variables): -1})


def en_alexander(d: SpliceDiagram) -> LaurentPoly:
    """Alexander polynomial from the product of (t^l_v - 1)^(deg v - 2)."""
    variables = d.variables()
    factors = en_factor_set(d)
    zero_balance = sum(f.multiplicity for f in factors if not any(f.exponents))
    if zero_balance > 0:
        return LaurentPoly.zero(variables)
    if zero_balance < 0:
        raise ENConventionError(
            f"{-zero_balance} uncancelled zero factor(s) (t^0 - 1) in the denominator")
    num = LaurentPoly.const(1, variables)
    den = LaurentPoly.const(1, variables)
    for f in factors:
        if not any(f.exponents) or f.multiplicity == 0:
            continue
        b = _binomial(f.exponents, variables) ** abs(f.multiplicity)
        if f.multiplicity > 0:
            num = num * b
        else:
            den = den * b
    return exact_divide(num, den).normalize()


def _check_class(d: SpliceDiagram, phi: Sequence[int]) -> tuple:
    phi = tuple(int(x) for x in phi)
    if len(phi) != d.n:
        raise ValueError(f"class has {len(phi)} entries, diagram has {d.n} components")
    return phi


def multiplicity(d: SpliceDiagram, phi: Sequence[int], v: str) -> int:
    phi = _check_class(d, phi)
    return sum(p * l for p, l in zip(phi, linking_vector(d, v)))


def thurston_norm(d: SpliceDiagram, phi: Sequence[int]) -> int:
    phi = _check_class(d, phi)
    return sum((d.degree(v) - 2) * abs(multiplicity(d, phi, v)) for v in d.non_arrowheads())


def knot_genus(d: SpliceDiagram) -> int:
    if d.n != 1:
        raise ValueError("genus is computed for knots (one arrowhead)")
    norm = thurston_norm(d, (1,))
    if norm < 0:
        raise ValueError(f"norm sum is {norm}; the formula is clamped here and gives no genus")
    if norm % 2 == 0:
        raise ValueError(f"norm {norm} is even, but a knot has norm 2g - 1")
    return (norm + 1) // 2


def en_is_fibered(d: SpliceDiagram, phi: Sequence[int]) -> bool:
    """Fibered iff the multiplicity of phi is nonzero at every node."""
    phi = _check_class(d, phi)
    if not any(phi):
        raise ValueError("the zero class is never fibered; fiberedness needs a nonzero class")
    return all(multiplicity(d, phi, v) != 0 for v in d.nodes())


def specialize(delta: LaurentPoly, phi: Sequence[int]) -> LaurentPoly:
    """One-variable polynomial of phi: t_i -> t^phi_i, times (t - 1), normalized."""
    phi = tuple(int(x) for x in phi)
    if delta.nvars < 2:
        raise ValueError("specialize needs a multivariable polynomial")
    if len(phi) != delta.nvars:
        raise ValueError("class length does not match the number of variables")
    if not any(phi):
        raise ValueError("cannot specialize at the zero class")
    if delta.is_zero():
        return LaurentPoly.zero(("t",), delta.modulus)
    one_var = delta.substitute([[p] for p in phi], ("t",))
    t_minus_1 = LaurentPoly(("t",), {(1,): 1, (0,): -1}, delta.modulus)
    return (one_var * t_minus_1).normalize()


def knot_specialize(delta: LaurentPoly, phi: Sequence[int]) -> LaurentPoly:
    """For a knot, the polynomial of the class (c) is delta(t^c)."""
    (c,) = phi
    if c == 0:
        raise ValueError("cannot specialize at the zero class")
    if delta.is_zero():
        return delta
    return delta.substitute([[c]], ("t",)).normalize()


def class_polynomial(d: SpliceDiagram, phi: Sequence[int], delta: LaurentPoly | None = None) -> LaurentPoly:
    delta = en_alexander(d) if delta is None else delta
    return knot_specialize(delta, phi) if d.n == 1 else specialize(delta, phi)


@dataclass(frozen=True)
class McMullenReport:
    degree: int | None
    bound: int
    inequality_holds: bool
    monic: bool
    equality: bool
    obstructs_fibering: bool


def mcmullen_check(delta_phi: LaurentPoly, norm: int, b1: int, div_phi: int, b3: int = 0) -> McMullenReport:
    """Compare deg(delta_phi) with the norm bound.

    For b1 = 1 the allowance is div(phi)*(1 + b3).  For b1 >= 2 the
    single-variable polynomial is the one produced by :func:`specialize`,
    whose extra (t - 1) factor contributes exactly one to the degree.
    """
    allowance = div_phi * (1 + b3) if b1 == 1 else 1
    bound = norm + allowance
    if delta_phi.is_zero():
        return McMullenReport(None, bound, True, False, False, True)
    deg = degree_span(delta_phi)
    monic = is_monic(delta_phi)
    equality = deg == bound
    return McMullenReport(deg, bound, deg <= bound, monic, equality, not (monic and equality))


def primitive_classes(n: int, radius: int) -> Iterable[tuple]:
    """All primitive integer vectors with entries in [-radius, radius]."""
    from itertools import product

    for v in product(range(-radius, radius + 1), repeat=n):
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            yield v


def divisibility(phi: Sequence[int]) -> int:
    g = 0
    for x in phi:
        g = gcd(g, x)
    return g


__all__ = [
    "Edge", "EnFactor", "ENConventionError", "McMullenReport", "SpliceDiagram", "SpliceParseError",
    "SpliceStructureError", "class_polynomial", "divisibility", "en_alexander", "en_factor_set",
    "en_is_fibered", "knot_genus", "knot_specialize", "linking_number", "linking_vector",
    "load_splice", "mcmullen_check", "multiplicity", "parse_splice", "primitive_classes",
    "specialize", "thurston_norm",
]
