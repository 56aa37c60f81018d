"""Command line interface: ``twistalex <command> ...``.

Exit codes: 0 success, 2 parse or usage error, 3 precondition violation,
4 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import presentation as pres
from . import splice as sp
from .laurent import InexactDivisionError, PolyParseError, ZeroPolynomialError, degree_span
from .manifest import DEFAULT_MANIFEST, find_fixture, load_group, run_manifest
from .perms import RepParseError, load_rep
from .search import BudgetExhausted, Certificate, SearchConfig, default_workers, obstruction_sweep_detailed, verify_certificate
from .twisted import (DEFAULT_PRIMES, CharacterError, NoAdmissibleColumnError, TensorRep, fk_degree_test,
                      monic_verdict, tilde_norm_bound, twisted_sweep)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_BUDGET = 0, 2, 3, 4

PARSE_ERRORS = (sp.SpliceParseError, sp.SpliceStructureError, pres.PresentationParseError, RepParseError,
                PolyParseError, json.JSONDecodeError, FileNotFoundError, IsADirectoryError)
PRECONDITION_ERRORS = (sp.ENConventionError, CharacterError, NoAdmissibleColumnError, ZeroPolynomialError,
                       InexactDivisionError, pres.MissingImageError, ValueError, KeyError)


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _emit(args, data, text: str) -> None:
    if args.json:
        print(json.dumps(data, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


# splice -------------------------------------------------------------------------

def cmd_splice(args) -> int:
    d = sp.load_splice(find_fixture(args.file))
    out: dict = {}
    lines = []
    if args.alexander:
        delta = sp.en_alexander(d)
        out["alexander"] = delta.format("desc")
        lines.append(out["alexander"])
    if args.norm is not None:
        phi = _ints(args.norm)
        out["norm"] = sp.thurston_norm(d, phi)
        lines.append(str(out["norm"]))
    if args.fibered is not None:
        phi = _ints(args.fibered)
        out["fibered"] = sp.en_is_fibered(d, phi)
        lines.append("fibered" if out["fibered"] else "not fibered")
    if args.genus:
        out["genus"] = sp.knot_genus(d)
        lines.append(str(out["genus"]))
    if args.specialize is not None:
        phi = _ints(args.specialize)
        poly = sp.class_polynomial(d, phi)
        out["specialization"] = poly.format("desc")
        lines.append(out["specialization"])
    if args.linking is not None:
        a, v = args.linking
        out["linking"] = sp.linking_number(d, a, v)
        lines.append(str(out["linking"]))
    if not lines:
        out = {"vertices": len(d.vertices), "arrowheads": d.n, "nodes": len(d.nodes())}
        lines.append(f"{out['vertices']} vertices, {out['arrowheads']} arrowheads, {out['nodes']} nodes")
    _emit(args, out, "\n".join(lines))
    return EXIT_OK


# group ----------------------------------------------------------------------------

def cmd_group(args) -> int:
    g = load_group(find_fixture(args.file))
    out: dict = {"generators": list(g.generators), "relators": len(g.relators)}
    lines = [f"{g.ngens} generators, {len(g.relators)} relators"]
    if args.abelianize:
        ab = pres.abelianize(g)
        out["rank"] = ab.rank
        out["torsion"] = list(ab.torsion)
        out["images"] = {n: list(v) for n, v in ab.free_images.items()}
        lines = [f"rank {ab.rank}" + (f", torsion {list(ab.torsion)}" if ab.torsion else "")]
        if ab.basis:
            lines.append("basis: " + " ".join(ab.basis))
        for n in g.generators:
            v = ab.free_images[n]
            lines.append(f"{n}: {','.join(map(str, v)) if v else '-'}")
    if args.fox is not None:
        word_text, gen = args.fox
        w = g.word(word_text)
        d = pres.fox_derivative(w, g.index(gen))
        out["fox"] = d.format(g.generators)
        lines = [out["fox"]]
    if args.check is not None:
        rep = load_rep(find_fixture(args.check))
        ok = pres.check_homomorphism(g, rep)
        aliases = pres.check_aliases(g, rep)
        out["homomorphism"] = ok
        out["aliases"] = aliases
        lines = ["homomorphism" if ok else "not a homomorphism"]
        lines += [f"alias {n}: {'consistent' if v else 'INCONSISTENT'}" for n, v in aliases.items()]
        if not ok:
            _emit(args, out, "\n".join(lines))
            return EXIT_PRECONDITION
    _emit(args, out, "\n".join(lines))
    return EXIT_OK


# twisted -----------------------------------------------------------------------------

def _character_arg(g, phi_text):
    if phi_text is None:
        ab = pres.abelianize(g)
        if ab.rank != 1:
            raise UsageError(f"H_1 has rank {ab.rank}; pass --phi")
        return pres.class_as_char(ab, (1,))
    return pres.character_from_vector(g, _ints(phi_text))


def cmd_twisted(args) -> int:
    g = load_group(find_fixture(args.group))
    rep = load_rep(find_fixture(args.rep))
    char = _character_arg(g, args.phi)
    primes = _ints(args.primes) if args.primes else list(DEFAULT_PRIMES)
    workers = args.workers or default_workers()
    results = twisted_sweep(g, rep, char, primes, args.deleted, workers)
    rows = []
    lines = []
    for r in results:
        row = r.to_dict()
        shown = r.delta_tilde if args.tilde else r.delta
        text = shown.format("asc")
        if args.tilde:
            row["tilde_norm_bound"] = tilde_norm_bound(r.delta_tilde, rep.degree)
        if args.norm is not None:
            row["fk"] = fk_degree_test(r, rep.degree, args.norm).to_dict()
        rows.append(row)
        lines.append(f"p={r.prime}: {text}")
    verdict = monic_verdict(results)
    lines.append(f"monic: {verdict}")
    _emit(args, {"character": char, "results": rows, "monic": verdict}, "\n".join(lines))
    return EXIT_OK


# search -------------------------------------------------------------------------------

def cmd_search(args) -> int:
    if args.degree < 1:
        raise UsageError("--degree must be at least 1")
    g = load_group(find_fixture(args.group))
    char = _character_arg(g, args.phi)
    primes = _ints(args.primes) if args.primes else [5]
    cfg = SearchConfig(args.degree, primes, node_budget=args.budget, time_budget=args.time_budget,
                       stop_at_first=args.first, conjugacy_reduction=not args.no_conjugacy,
                       norm=args.norm, workers=args.workers or default_workers(), checkpoint=args.resume)
    try:
        outcome = obstruction_sweep_detailed(g, char, cfg)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"budget_exhausted": True, "stats": exc.stats}, sort_keys=True))
        return EXIT_BUDGET
    paths = []
    if outcome.certificates:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.group).stem
        for i, c in enumerate(outcome.certificates):
            p = outdir / f"{stem}_k{c.degree}_p{c.prime}_{i}.cert"
            c.save(p)
            paths.append(str(p))
    lines = [f"{c.reason} at p={c.prime}: {path}" for c, path in zip(outcome.certificates, paths)]
    if not lines:
        lines = ["no certificates"]
    lines.append("stats: " + ", ".join(f"{k}={v}" for k, v in outcome.stats.items()))
    data = {"certificates": [c.payload() | {"digest": c.digest} for c in outcome.certificates],
            "files": paths, "stats": outcome.stats}
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


# verify --------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.cert:
        if not args.group:
            raise UsageError("--cert needs --group")
        g = load_group(find_fixture(args.group))
        cert = Certificate.load(find_fixture(args.cert))
        char = pres.character_from_vector(g, _ints(args.phi)) if args.phi else None
        ok = verify_certificate(g, char, cert, args.prime)
        _emit(args, {"verified": ok}, "verified" if ok else "NOT verified")
        return EXIT_OK if ok else EXIT_PRECONDITION
    path = find_fixture(args.manifest) if args.manifest else str(DEFAULT_MANIFEST)
    report = run_manifest(path, include_slow=args.slow)
    lines = [f"warning: {w}" for w in report.warnings]
    for r in report.results:
        status = "skip" if r.skipped else ("PASS" if r.passed else "FAIL")
        lines.append(f"{status} {r.id}: {r.detail}")
    n_fail = len(report.failures)
    n_run = sum(1 for r in report.results if not r.skipped)
    lines.append(f"{n_run - n_fail}/{n_run} passed" + (f", {n_fail} failed" if n_fail else ""))
    _emit(args, report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.passed else 1


# parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistalex", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("splice", help="invariants of a splice diagram")
    p.add_argument("file")
    p.add_argument("--alexander", action="store_true")
    p.add_argument("--norm", metavar="P,Q")
    p.add_argument("--fibered", metavar="P,Q")
    p.add_argument("--genus", action="store_true")
    p.add_argument("--specialize", metavar="P,Q")
    p.add_argument("--linking", nargs=2, metavar=("ARROWHEAD", "VERTEX"))
    common(p)
    p.set_defaults(func=cmd_splice)

    p = sub.add_parser("group", help="presentation utilities")
    p.add_argument("file")
    p.add_argument("--abelianize", action="store_true")
    p.add_argument("--fox", nargs=2, metavar=("WORD", "GEN"))
    p.add_argument("--check", metavar="REP", help="check a .rep file is a homomorphism")
    common(p)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("twisted", help="twisted Alexander polynomials per prime")
    p.add_argument("group")
    p.add_argument("rep")
    p.add_argument("--phi", help="H_1 class, or one value per generator")
    p.add_argument("--primes")
    p.add_argument("--tilde", action="store_true", help="report the secondary polynomial")
    p.add_argument("--deleted", help="generator whose column is deleted")
    p.add_argument("--norm", type=int, help="Thurston norm for the degree test")
    p.add_argument("--workers", type=int)
    common(p)
    p.set_defaults(func=cmd_twisted)

    p = sub.add_parser("search", help="search S_k representations for certificates")
    p.add_argument("group")
    p.add_argument("--phi")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--primes")
    p.add_argument("--budget", type=int, help="node budget")
    p.add_argument("--time-budget", type=float, help="seconds")
    p.add_argument("--first", action="store_true", help="stop at the first certificate")
    p.add_argument("--no-conjugacy", action="store_true")
    p.add_argument("--norm", type=int)
    p.add_argument("--resume", metavar="CHECKPOINT", help="checkpoint file to resume from and update")
    p.add_argument("--out", default=".", help="directory for .cert files")
    p.add_argument("--workers", type=int)
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="run a fixture manifest or verify a certificate")
    p.add_argument("manifest", nargs="?")
    p.add_argument("--slow", action="store_true")
    p.add_argument("--cert")
    p.add_argument("--group")
    p.add_argument("--phi")
    p.add_argument("--prime", type=int)
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PARSE_ERRORS as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
