"""Backtracking search for homomorphisms G -> S_k and fiberedness certificates.

Generators are assigned in an order chosen so that relators become fully
assigned, and therefore checkable, as early as possible.  When a relator
that completes at some depth contains the new generator exactly once, the
generator's image is solved for instead of enumerated.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import perms
from .perms import PermRep
from .presentation import GroupPresentation, check_homomorphism
from .twisted import (MONIC_NO, NoAdmissibleColumnError, TensorRep, check_character,
                      twisted_alexander)

log = logging.getLogger(__name__)

REASONS = ("vanishes", "nonmonic", "degree_mismatch")
THREADS_ENV = "TWISTALEX_THREADS"


class BudgetExhausted(RuntimeError):
    def __init__(self, message: str, stats: dict):
        super().__init__(f"{message} ({_fmt_stats(stats)})")
        self.stats = dict(stats)


def _fmt_stats(stats) -> str:
    return ", ".join(f"{k}={v}" for k, v in stats.items())


@dataclass
class SearchConfig:
    degree: int
    primes: Sequence[int] = (5,)
    order: Sequence[str] | None = None
    node_budget: int | None = None
    time_budget: float | None = None
    seed: PermRep | None = None
    stop_at_first: bool = False
    conjugacy_reduction: bool = True
    prune: bool = True
    norm: int | None = None
    workers: int = 1
    checkpoint: str | None = None

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node budget must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        self.primes = tuple(sorted(set(int(p) for p in self.primes)))
        if not self.primes:
            raise ValueError("at least one prime is required")

    def fingerprint(self) -> dict:
        return {
            "degree": self.degree,
            "primes": list(self.primes),
            "order": list(self.order) if self.order else None,
            "seed": self.seed.to_text() if self.seed else None,
            "stop_at_first": self.stop_at_first,
            "conjugacy_reduction": self.conjugacy_reduction,
            "norm": self.norm,
        }


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# assignment plan ---------------------------------------------------------------

def assignment_order(g: GroupPresentation) -> list[int]:
    """Greedy order: each step picks the generator completing the most relators."""
    supports = [frozenset(x for x, _ in r) for r in g.relators]
    occurrences = [0] * g.ngens
    for r in g.relators:
        for x, _ in r:
            occurrences[x] += 1
    chosen: list[int] = []
    done: set = set()
    while len(chosen) < g.ngens:
        best = None
        for x in range(g.ngens):
            if x in done:
                continue
            trial = done | {x}
            completes = sum(1 for s in supports if x in s and s <= trial)
            touches = sum(1 for s in supports if x in s and s & done)
            key = (completes, touches, occurrences[x], -x)
            if best is None or key > best[0]:
                best = (key, x)
        chosen.append(best[1])
        done.add(best[1])
    return chosen


@dataclass
class _Plan:
    order: list
    checks: list  # depth -> relator indices completed at that depth
    solvers: list  # depth -> (relator index, position) or None


def make_plan(g: GroupPresentation, order: Sequence[str] | None = None, prune: bool = True) -> _Plan:
    idx = [g.index(n) for n in order] if order else assignment_order(g)
    if sorted(idx) != list(range(g.ngens)):
        raise ValueError("assignment order must list every generator exactly once")
    depth_of = {x: d for d, x in enumerate(idx)}
    checks: list = [[] for _ in idx]
    for i, r in enumerate(g.relators):
        if not r:
            continue
        d = max(depth_of[x] for x, _ in r) if prune else len(idx) - 1
        checks[d].append(i)
    solvers: list = [None] * len(idx)
    if prune:
        for d, x in enumerate(idx):
            for i in checks[d]:
                pos = [p for p, (y, _) in enumerate(g.relators[i]) if y == x]
                if len(pos) == 1:
                    solvers[d] = (i, pos[0])
                    break
    return _Plan(idx, checks, solvers)


def _eval(word, images, k):
    acc = perms.identity(k)
    for x, s in word:
        sig = images[x]
        acc = perms.compose(acc, sig if s == 1 else perms.inverse(sig))
    return acc


def _solve(word, pos, images, k):
    """Image of the letter at ``pos`` making ``word`` trivial: u g^s v = 1."""
    u = _eval(word[:pos], images, k)
    v = _eval(word[pos + 1:], images, k)
    gs = perms.inverse(perms.compose(v, u))  # g^s = u^-1 v^-1 = (v u)^-1
    return gs if word[pos][1] == 1 else perms.inverse(gs)


class _Counter:
    def __init__(self, node_budget, time_budget, start=None):
        self.nodes = 0
        self.homs = 0
        self.node_budget = node_budget
        self.deadline = None if time_budget is None else (start or time.monotonic()) + time_budget
        self.start = start or time.monotonic()

    def tick(self):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExhausted("node budget exhausted", self.stats())
        if self.deadline is not None and not (self.nodes & 255) and time.monotonic() > self.deadline:
            raise BudgetExhausted("time budget exhausted", self.stats())

    def stats(self) -> dict:
        return {"nodes": self.nodes, "homomorphisms": self.homs,
                "elapsed_s": round(time.monotonic() - self.start, 3)}


def first_candidates(g: GroupPresentation, cfg: SearchConfig, plan: _Plan) -> list:
    """Images tried for the first generator; these label the search partitions."""
    k = cfg.degree
    name = g.generators[plan.order[0]]
    if cfg.seed is not None and name in cfg.seed.images:
        return [cfg.seed.images[name]]
    # a seed pins images, so conjugating the first one would lose solutions
    if cfg.conjugacy_reduction and cfg.seed is None:
        return perms.class_representatives(k)
    return perms.all_permutations(k)


def _search(g: GroupPresentation, cfg: SearchConfig, plan: _Plan, first, counter: _Counter) -> Iterator[list]:
    k = cfg.degree
    n = g.ngens
    images: list = [None] * n
    everything = perms.all_permutations(k)
    seeded = {}
    if cfg.seed is not None:
        for name, sig in cfg.seed.images.items():
            if name in g.generators:
                seeded[g.index(name)] = sig
    rels = g.relators
    ident = perms.identity(k)

    def rec(d):
        if d == n:
            counter.homs += 1
            yield list(images)
            return
        x = plan.order[d]
        if d == 0:
            cands = [first]
        elif x in seeded:
            cands = [seeded[x]]
        elif plan.solvers[d] is not None:
            i, pos = plan.solvers[d]
            cands = [_solve(rels[i], pos, images, k)]
        else:
            cands = everything
        for sig in cands:
            counter.tick()
            images[x] = sig
            if all(_eval(rels[i], images, k) == ident for i in plan.checks[d]):
                yield from rec(d + 1)
        images[x] = None

    yield from rec(0)


def _as_rep(g: GroupPresentation, images, k) -> PermRep:
    return PermRep(k, {name: tuple(images[i]) for i, name in enumerate(g.generators)})


def enumerate_homs(g: GroupPresentation, cfg: SearchConfig) -> Iterator[PermRep]:
    """Every homomorphism G -> S_k, in a deterministic order.

    With conjugacy reduction the first generator's image runs over canonical
    cycle-type representatives only, so each conjugacy class of
    homomorphisms appears at least once.  Raises BudgetExhausted.
    """
    plan = make_plan(g, cfg.order, cfg.prune)
    counter = _Counter(cfg.node_budget, cfg.time_budget)
    for first in first_candidates(g, cfg, plan):
        for images in _search(g, cfg, plan, first, counter):
            yield _as_rep(g, images, cfg.degree)


def count_homs(g: GroupPresentation, cfg: SearchConfig) -> int:
    return sum(1 for _ in enumerate_homs(g, cfg))


# certificates --------------------------------------------------------------------

@dataclass
class Certificate:
    presentation_digest: str
    generators: tuple
    character: dict
    degree: int
    prime: int
    images: dict
    polynomial: str
    delta_tilde: str
    free_rank: int
    reason: str
    deleted_generator: str
    digest: str = ""

    def payload(self) -> dict:
        return {
            "presentation_digest": self.presentation_digest,
            "generators": list(self.generators),
            "character": {n: int(self.character[n]) for n in self.generators},
            "degree": self.degree,
            "prime": self.prime,
            "images": {n: perms.one_line(tuple(self.images[n])) if self.degree < 10
                       else list(self.images[n]) for n in self.generators},
            "polynomial": self.polynomial,
            "delta_tilde": self.delta_tilde,
            "free_rank": self.free_rank,
            "reason": self.reason,
            "deleted_generator": self.deleted_generator,
        }

    def compute_digest(self) -> str:
        blob = json.dumps(self.payload(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode()).hexdigest()

    def seal(self) -> "Certificate":
        self.digest = self.compute_digest()
        return self

    def rep(self) -> PermRep:
        return PermRep(self.degree, {n: tuple(self.images[n]) for n in self.generators})

    def sort_key(self):
        return (self.prime, REASONS.index(self.reason),
                tuple(tuple(self.images[n]) for n in self.generators))

    def to_json(self) -> str:
        d = self.payload()
        d["digest"] = self.digest
        return json.dumps(d, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping) -> "Certificate":
        deg = int(d["degree"])
        images = {}
        for n, v in d["images"].items():
            images[n] = perms.parse_one_line(v, deg) if isinstance(v, str) else tuple(int(x) for x in v)
        return cls(d["presentation_digest"], tuple(d["generators"]), dict(d["character"]), deg,
                   int(d["prime"]), images, d["polynomial"], d.get("delta_tilde", ""),
                   int(d.get("free_rank", 0)), d["reason"], d["deleted_generator"], d.get("digest", ""))

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "Certificate":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _make_certificate(g, char, rep, res, reason) -> Certificate:
    return Certificate(g.digest(), g.generators, {n: int(char[n]) for n in g.generators}, rep.degree,
                       res.prime, {n: rep.image(n) for n in g.generators}, res.delta.format("asc"),
                       res.delta_tilde.format("asc"), res.free_rank, reason,
                       res.deleted_generator).seal()


def certify(g: GroupPresentation, char: Mapping[str, int], rep: PermRep, primes: Sequence[int],
            norm: int | None = None) -> Certificate | None:
    """First certificate for ``rep``, trying primes in increasing order."""
    from .twisted import fk_degree_test

    results = []
    for p in sorted(primes):
        res = twisted_alexander(g, TensorRep(rep, char, p))
        if res.vanishes:
            return _make_certificate(g, char, rep, res, "vanishes")
        results.append(res)
    top = max(r.delta_degree() for r in results)
    for res in results:
        if res.delta_degree() < top:
            return _make_certificate(g, char, rep, res, "nonmonic")
    if norm is not None:
        for res in results:
            if fk_degree_test(res, rep.degree, norm).obstructed:
                return _make_certificate(g, char, rep, res, "degree_mismatch")
    return None


def verify_certificate(g: GroupPresentation, char: Mapping[str, int] | None, cert: Certificate,
                       prime: int | None = None) -> bool:
    """Recompute everything the certificate claims."""
    if cert.digest != cert.compute_digest():
        return False
    if prime is not None and prime != cert.prime:
        return False
    if cert.presentation_digest != g.digest() or tuple(cert.generators) != g.generators:
        return False
    if char is not None and any(int(char[n]) != int(cert.character[n]) for n in g.generators):
        return False
    rep = cert.rep()
    if not check_homomorphism(g, rep):
        return False
    try:
        check_character(g, cert.character)
        res = twisted_alexander(g, TensorRep(rep, cert.character, cert.prime), cert.deleted_generator)
    except (ValueError, NoAdmissibleColumnError):
        return False
    if res.delta.format("asc") != cert.polynomial or res.free_rank != cert.free_rank:
        return False
    if res.delta_tilde.format("asc") != cert.delta_tilde:
        return False
    if cert.reason == "vanishes":
        return res.vanishes and res.monic_mod_p == MONIC_NO
    if cert.reason == "nonmonic":
        # the stored prime must show a lower degree than some other prime
        if res.vanishes:
            return False
        d = res.delta_degree()
        for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
            if p == cert.prime:
                continue
            other = twisted_alexander(g, TensorRep(rep, cert.character, p), cert.deleted_generator)
            if not other.vanishes and other.delta_degree() > d:
                return True
        return False
    if cert.reason == "degree_mismatch":
        return not res.vanishes
    return False


# sweep ------------------------------------------------------------------------------

@dataclass
class SweepOutcome:
    certificates: list
    stats: dict
    partitions_done: list = field(default_factory=list)


def _partition_job(args):
    g, char, cfg, first, budget_nodes, budget_time = args
    plan = make_plan(g, cfg.order, cfg.prune)
    counter = _Counter(budget_nodes, budget_time)
    found = []
    for images in _search(g, cfg, plan, first, counter):
        rep = _as_rep(g, images, cfg.degree)
        cert = certify(g, char, rep, cfg.primes, cfg.norm)
        if cert is not None:
            found.append(cert)
            if cfg.stop_at_first:
                break
    return found, counter.nodes, counter.homs


def _load_checkpoint(path, g, cfg) -> dict:
    if not path or not os.path.exists(path):
        return {"completed": [], "certificates": [], "nodes": 0, "homomorphisms": 0}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("presentation_digest") != g.digest() or data.get("config") != cfg.fingerprint():
        raise ValueError("checkpoint was written for a different presentation or configuration")
    return data


def _save_checkpoint(path, g, cfg, state) -> None:
    if not path:
        return
    data = dict(state)
    data["presentation_digest"] = g.digest()
    data["config"] = cfg.fingerprint()
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
    os.replace(tmp, path)


def obstruction_sweep(g: GroupPresentation, char: Mapping[str, int], cfg: SearchConfig) -> list[Certificate]:
    return obstruction_sweep_detailed(g, char, cfg).certificates


def obstruction_sweep_detailed(g: GroupPresentation, char: Mapping[str, int], cfg: SearchConfig) -> SweepOutcome:
    """Search partitions (one per first-generator image) for certificates.

    Completed partitions and their certificates are written to
    ``cfg.checkpoint`` after each partition, so an interrupted sweep resumes
    where it stopped.  With several workers each partition receives the full
    node budget; the time budget is global.
    """
    check_character(g, char)
    plan = make_plan(g, cfg.order, cfg.prune)
    firsts = first_candidates(g, cfg, plan)
    state = _load_checkpoint(cfg.checkpoint, g, cfg)
    done = set(state["completed"])
    certs = [Certificate.from_dict(c) for c in state["certificates"]]
    start = time.monotonic()
    nodes, homs = state.get("nodes", 0), state.get("homomorphisms", 0)

    def stats():
        return {"nodes": nodes, "homomorphisms": homs, "partitions_done": len(done),
                "partitions": len(firsts), "elapsed_s": round(time.monotonic() - start, 3)}

    def record(idx, found, n_nodes, n_homs):
        nonlocal nodes, homs
        nodes += n_nodes
        homs += n_homs
        done.add(idx)
        certs.extend(found)
        state.update(completed=sorted(done), certificates=[c.payload() | {"digest": c.digest} for c in certs],
                     nodes=nodes, homomorphisms=homs)
        _save_checkpoint(cfg.checkpoint, g, cfg, state)

    if cfg.stop_at_first and certs:
        return SweepOutcome(sorted(certs, key=Certificate.sort_key)[:1], stats(), sorted(done))
    todo = [i for i in range(len(firsts)) if i not in done]

    def remaining_time():
        if cfg.time_budget is None:
            return None
        left = cfg.time_budget - (time.monotonic() - start)
        if left <= 0:
            raise BudgetExhausted("time budget exhausted", stats())
        return left

    if cfg.workers > 1 and len(todo) > 1:
        jobs = [(g, dict(char), cfg, firsts[i], cfg.node_budget, remaining_time()) for i in todo]
        ex = ProcessPoolExecutor(max_workers=cfg.workers)
        try:
            for i, (found, n_nodes, n_homs) in zip(todo, ex.map(_partition_job, jobs)):
                record(i, found, n_nodes, n_homs)
                if cfg.stop_at_first and found:
                    break
        except BudgetExhausted as exc:
            raise BudgetExhausted("budget exhausted in a partition", stats() | exc.stats) from None
        finally:
            ex.shutdown(wait=True, cancel_futures=True)
    else:
        for i in todo:
            budget = None if cfg.node_budget is None else cfg.node_budget - nodes
            if budget is not None and budget <= 0:
                raise BudgetExhausted("node budget exhausted", stats())
            partial = (g, char, cfg, firsts[i], budget, remaining_time())
            try:
                found, n_nodes, n_homs = _partition_job(partial)
            except BudgetExhausted as exc:
                nodes += exc.stats.get("nodes", 0)
                raise BudgetExhausted(str(exc).split(" (")[0], stats()) from None
            record(i, found, n_nodes, n_homs)
            log.info("partition %d/%d done: %s", i + 1, len(firsts), _fmt_stats(stats()))
            if cfg.stop_at_first and found:
                break
    certs.sort(key=Certificate.sort_key)
    if cfg.stop_at_first:
        certs = certs[:1]
    return SweepOutcome(certs, stats(), sorted(done))
