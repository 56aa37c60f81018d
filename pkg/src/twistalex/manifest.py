"""Fixture manifest: named expectations checked against fresh computations.

A manifest is a JSON object ``{"entries": [...]}``.  Each entry has an
``id``, a ``kind`` naming one of the checks below, file references
relative to the manifest's directory, the expected values, an ``origin``
("published" or "derived") and optionally ``"slow": true``.
"""
from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import presentation as pres
from . import splice as sp
from .laurent import degree_span, is_monic, parse_poly
from .perms import load_rep
from .search import Certificate, verify_certificate
from .twisted import TensorRep, tilde_norm_bound, twisted_alexander

log = logging.getLogger(__name__)

FIXTURES = Path(__file__).resolve().parent / "fixtures"
DEFAULT_MANIFEST = FIXTURES / "manifest" / "corpus.json"


@dataclass
class CheckResult:
    id: str
    kind: str
    passed: bool
    detail: str
    seconds: float
    criterion: int | None = None
    skipped: bool = False


@dataclass
class ManifestReport:
    results: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if not r.skipped)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed and not r.skipped]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "warnings": list(self.warnings),
                "results": [r.__dict__ for r in self.results]}


class _Ctx:
    def __init__(self, base: Path):
        self.base = base
        self._cache: dict = {}

    def path(self, rel: str) -> Path:
        return (self.base / rel).resolve()

    def _load(self, rel, loader):
        key = (loader.__name__, rel)
        if key not in self._cache:
            self._cache[key] = loader(self.path(rel))
        return self._cache[key]

    def splice(self, rel):
        return self._load(rel, sp.load_splice)

    def group(self, rel):
        return self._load(rel, load_group)

    def rep(self, rel):
        return self._load(rel, load_rep)


def load_group(path) -> pres.GroupPresentation:
    """``.grp`` presentation or ``.wirt`` crossing list."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".wirt":
        crossings, arcs = pres.parse_crossings(text)
        return pres.wirtinger(crossings, arcs)
    return pres.parse_presentation(text)


def _character(ctx, g, e) -> dict:
    if "char" in e:
        return pres.character_from_vector(g, e["char"])
    return pres.character_from_vector(g, e.get("class", [1]))


def _poly(text, variables=None):
    return parse_poly(text, variables)


def _check_splice_alexander(ctx, e):
    d = ctx.splice(e["splice"])
    got = sp.en_alexander(d)
    want = _poly(e["expected"], d.variables())
    return got.associate(want), f"got {got}"


def _check_linking(ctx, e):
    d = ctx.splice(e["splice"])
    got = {v: sp.linking_number(d, e["arrowhead"], v) for v in e["expected"]}
    return got == e["expected"], f"got {got}"


def _check_norm(ctx, e):
    d = ctx.splice(e["splice"])
    got = sp.thurston_norm(d, e["class"])
    return got == e["expected"], f"got {got}"


def _check_norm_formula(ctx, e):
    d = ctx.splice(e["splice"])
    r = e.get("radius", 5)
    bad = []
    from itertools import product

    for phi in product(range(-r, r + 1), repeat=d.n):
        want = sum(c * abs(sum(a * p for a, p in zip(coef, phi))) for c, coef in e["terms"])
        got = sp.thurston_norm(d, phi)
        if got != want:
            bad.append((phi, got, want))
    return not bad, f"{len(bad)} mismatches" + (f", first {bad[0]}" if bad else "")


def _check_fibered(ctx, e):
    d = ctx.splice(e["splice"])
    got = sp.en_is_fibered(d, e["class"])
    return got == e["expected"], f"got {got}"


def _check_never_fibered(ctx, e):
    d = ctx.splice(e["splice"])
    fib = [phi for phi in sp.primitive_classes(d.n, e.get("radius", 5)) if sp.en_is_fibered(d, phi)]
    return not fib, f"{len(fib)} fibered classes" + (f", e.g. {fib[0]}" if fib else "")


def _check_genus(ctx, e):
    got = sp.knot_genus(ctx.splice(e["splice"]))
    return got == e["expected"], f"got {got}"


def _check_specialize(ctx, e):
    d = ctx.splice(e["splice"])
    got = sp.class_polynomial(d, e["class"])
    ok = got.associate(_poly(e["expected"], ("t",)))
    detail = f"got {got}"
    if "degree" in e:
        ok = ok and degree_span(got) == e["degree"]
    if "monic" in e:
        ok = ok and is_monic(got) == e["monic"]
        detail += f", monic={is_monic(got)}"
    return ok, detail


def _check_homomorphism(ctx, e):
    g = ctx.group(e["group"])
    rep = ctx.rep(e["rep"])
    ok = pres.check_homomorphism(g, rep) == e.get("expected", True)
    aliases = pres.check_aliases(g, rep)
    return ok and all(aliases.values()), f"aliases {aliases}"


def _check_twisted_vanishing(ctx, e):
    g = ctx.group(e["group"])
    rep = ctx.rep(e["rep"])
    char = _character(ctx, g, e)
    bad = []
    for p in e["primes"]:
        res = twisted_alexander(g, TensorRep(rep, char, p))
        if not res.vanishes:
            bad.append(p)
    return not bad, "vanishes at every prime" if not bad else f"nonzero at {bad}"


def _check_twisted_poly(ctx, e):
    g = ctx.group(e["group"])
    rep = ctx.rep(e["rep"])
    char = _character(ctx, g, e)
    bad = []
    for p in e["primes"]:
        res = twisted_alexander(g, TensorRep(rep, char, p))
        want = parse_poly(e["expected"], ("t",), p)
        if res.vanishes or not res.delta.associate(want) or res.monic_mod_p == "no":
            bad.append((p, res.delta.format("asc")))
    return not bad, "all primes match" if not bad else f"mismatch {bad}"


def _check_twisted_tilde(ctx, e):
    g = ctx.group(e["group"])
    rep = ctx.rep(e["rep"])
    char = _character(ctx, g, e)
    p = e["prime"]
    res = twisted_alexander(g, TensorRep(rep, char, p))
    ok = res.delta_tilde.associate(parse_poly(e["expected"], ("t",), p))
    bound = tilde_norm_bound(res.delta_tilde, rep.degree)
    detail = f"tilde {res.delta_tilde.format('asc')}, bound {bound}"
    if "bound" in e:
        ok = ok and bound == e["bound"]
    if "splice" in e:
        norm = sp.thurston_norm(ctx.splice(e["splice"]), e["class"])
        detail += f", norm {norm}"
        ok = ok and (bound == norm if e.get("sharp") else bound <= norm)
    return ok, detail


def _check_certificate(ctx, e):
    g = ctx.group(e["group"])
    cert = Certificate.load(ctx.path(e["cert"]))
    ok = verify_certificate(g, None, cert)
    if "reason" in e:
        ok = ok and cert.reason == e["reason"]
    return ok, f"reason {cert.reason} at p={cert.prime}"


CHECKS: dict[str, Callable] = {
    "splice_alexander": _check_splice_alexander,
    "linking": _check_linking,
    "norm": _check_norm,
    "norm_formula": _check_norm_formula,
    "fibered": _check_fibered,
    "never_fibered": _check_never_fibered,
    "genus": _check_genus,
    "specialize": _check_specialize,
    "homomorphism": _check_homomorphism,
    "twisted_vanishing": _check_twisted_vanishing,
    "twisted_poly": _check_twisted_poly,
    "twisted_tilde": _check_twisted_tilde,
    "certificate": _check_certificate,
}


def load_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not isinstance(data.get("entries", []), list):
        raise ValueError("manifest must be an object with an 'entries' list")
    return data


def run_manifest(path=DEFAULT_MANIFEST, include_slow: bool = False, only=None) -> ManifestReport:
    path = Path(path)
    data = load_manifest(path)
    ctx = _Ctx(path.parent)
    report = ManifestReport()
    entries = data.get("entries", [])
    if not entries:
        report.warnings.append(f"manifest {path.name} has no entries; nothing was checked")
    for e in entries:
        eid = e.get("id", "?")
        kind = e.get("kind")
        if only is not None and eid not in only:
            continue
        if e.get("slow") and not include_slow:
            report.results.append(CheckResult(eid, kind, True, "slow; skipped", 0.0, e.get("criterion"), True))
            continue
        t0 = time.perf_counter()
        try:
            check = CHECKS[kind]
        except KeyError:
            report.results.append(CheckResult(eid, str(kind), False, f"unknown check kind {kind!r}", 0.0,
                                              e.get("criterion")))
            continue
        try:
            ok, detail = check(ctx, e)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.results.append(CheckResult(eid, kind, bool(ok), detail, time.perf_counter() - t0,
                                          e.get("criterion")))
    return report


def find_fixture(name: str) -> str:
    """Return ``name`` if it exists, else look it up in the bundled fixtures."""
    if os.path.exists(name):
        return name
    base = os.path.basename(name)
    for sub in ("splice", "groups", "reps", "certs", "manifest"):
        cand = FIXTURES / sub / base
        if cand.exists():
            return str(cand)
    raise FileNotFoundError(name)
