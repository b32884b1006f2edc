"""Command-line front end.

Every subcommand prints one JSON document (or CSV table) whose layout is
described in docs/schemas.md.  Exit codes: 0 success, 1 a violated identity,
2 bad input or usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from pathlib import Path

from gmpy2 import mpq

from . import __version__
from .arith import Poly, format_scalar, monomials_of_degree
from .bsbim import MorphismMatrix
from .cellular import AlgebraA
from .context import Session
from .coxeter import CoxeterSystem
from .errors import IdentityFailure, InputError, NotComparable
from .leaves import DoubleLeafBasis
from .linalg import rank
from .mono import certify_phi, monotonicity_scan

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group", required=True, help="preset (A2, B3, G2, H3, Dinf, I2(m), ...) or Coxeter JSON path")
    p.add_argument("--field", default="auto", help="auto | rational | quadratic:d")
    p.add_argument("--max-length", type=int, default=None, help="radius of the enumerated ball")
    p.add_argument("--seed", type=int, default=0, help="choice-ledger seed (0 = canonical choices)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="soergel", description="Soergel calculus and Kazhdan-Lusztig computations")
    parser.add_argument("--version", action="version", version=f"soergel {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("kl", help="Kazhdan-Lusztig polynomials h_{x,w} for all x <= w")
    _common(p)
    p.add_argument("--w", required=True)

    p = sub.add_parser("bruhat", help="Bruhat comparison and interval")
    _common(p)
    p.add_argument("--u", required=True)
    p.add_argument("--w", required=True)

    p = sub.add_parser("leaves", help="light leaves of an expression")
    _common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--matrices", action="store_true", help="include morphism matrices")

    p = sub.add_parser("gram", help="Gram matrices of cell modules")
    _common(p)
    p.add_argument("--w", required=True, help="reduced expression")
    p.add_argument("--x", default=None, help="restrict to one cell")

    p = sub.add_parser("decomp", help="graded dimensions, multiplicities and d(x, w)")
    _common(p)
    p.add_argument("--w", required=True, help="reduced expression")

    p = sub.add_parser("mono", help="monotonicity scan, optionally certifying Phi")
    _common(p)
    p.add_argument("--mode", choices=("kl-only", "full-phi"), default="kl-only")
    p.add_argument("--phi-length", type=int, default=3, help="length budget for full-phi")

    p = sub.add_parser("expand", help="expand a morphism in the double-leaves basis")
    _common(p)
    p.add_argument("--word", required=True, help="source expression")
    p.add_argument("--target", default=None, help="target expression (default: the source)")
    p.add_argument("--morphism", default="identity", help="'identity', 'random' or a JSON file")
    return parser


# -- helpers -------------------------------------------------------------------


def _session(args, needed: int) -> Session:
    system = CoxeterSystem.resolve(args.group, args.field)
    radius = args.max_length if args.max_length is not None else needed
    if radius < needed:
        raise InputError(f"--max-length {radius} is smaller than the word length {needed}")
    return Session(system, radius, seed=args.seed)


def _header(args, session: Session, command: str) -> dict:
    return {
        "schema": f"soergel.{command}/{SCHEMA_VERSION}",
        "group": session.system.to_json(),
        "ledger": session.ledger.to_json(),
    }


def _word(session: Session, text: str) -> tuple:
    return session.system.parse_word(text)


def _reduced(session: Session, text: str) -> tuple:
    word = _word(session, text)
    if not session.universe.is_reduced(word):
        raise InputError(f"{text!r} is not a reduced expression")
    return word


# -- subcommands -------------------------------------------------------------


def cmd_kl(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    word = system.parse_word(args.w)
    session = _session(args, len(word))
    u, kl = session.universe, session.kl
    w = u.element(word)
    rows = []
    for x in sorted(u.lower_interval(w), key=u.sort_key):
        h = kl.h(x, w)
        rows.append(
            {
                "x": session.fmt(x),
                "length": u.lengths[x],
                "h": str(h),
                "P": kl.P(x, w).to_str("q"),
                "mu": kl.mu(x, w),
            }
        )
    report = _header(args, session, "kl") | {"w": session.fmt(w), "rows": rows}
    return report, ["x", "length", "h", "P", "mu"], rows


def cmd_bruhat(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    uw, ww = system.parse_word(args.u), system.parse_word(args.w)
    session = _session(args, max(len(uw), len(ww)))
    U = session.universe
    a, b = U.element(uw), U.element(ww)
    leq = U.bruhat_leq(a, b)
    interval = [session.fmt(x) for x in U.interval(a, b)] if leq else []
    report = _header(args, session, "bruhat") | {
        "u": session.fmt(a),
        "w": session.fmt(b),
        "leq": leq,
        "interval": interval,
    }
    rows = [{"u": report["u"], "w": report["w"], "leq": leq, "interval_size": len(interval)}]
    return report, ["u", "w", "leq", "interval_size"], rows


def cmd_leaves(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    word = system.parse_word(args.word)
    session = _session(args, len(word))
    tree = session.tree(word)
    targets = []
    rows = []
    for x in tree.targets():
        leaves = tree.leaves_to(x)
        entry = {
            "target": session.fmt(x),
            "target_word": session.system.format_word(tree.target_word(x)),
            "count": len(leaves),
            "degrees": sorted(leaf.degree for leaf in leaves),
            "leaves": [
                {
                    "i": "".join(map(str, leaf.i_seq)),
                    "j": "".join(map(str, leaf.j_seq)),
                    "degree": leaf.degree,
                }
                | ({"morphism": leaf.morphism.to_json()} if args.matrices else {})
                for leaf in leaves
            ],
        }
        targets.append(entry)
        rows.append({"target": entry["target"], "count": entry["count"], "degrees": " ".join(map(str, entry["degrees"]))})
    report = _header(args, session, "leaves") | {
        "word": session.system.format_word(word),
        "total": len(tree.leaves),
        "targets": targets,
    }
    return report, ["target", "count", "degrees"], rows


def _scalar_rows(M):
    return [[format_scalar(x) for x in row] for row in M]


def cmd_gram(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    word = system.parse_word(args.w)
    session = _session(args, len(word))
    word = _reduced(session, args.w)
    alg = AlgebraA(session, word)
    xs = alg.poset
    if args.x is not None:
        x = session.element(_word(session, args.x))
        if x not in alg.T:
            raise NotComparable("x is not below w")
        xs = [x]
    cells, rows = [], []
    for x in xs:
        cm = alg.cell(x)
        G = cm.gram()
        blocks = cm.gram_blocks(G)
        ranks = {str(k): rank(b, alg.d) for k, b in blocks.items()}
        cells.append(
            {
                "x": session.fmt(x),
                "degrees": cm.degrees,
                "gram": _scalar_rows(G),
                "block_ranks": ranks,
                "gd_cell": str(cm.gd_cell()),
                "gd_simple": str(cm.gd_simple()),
            }
        )
        rows.append({"x": session.fmt(x), "size": len(cm), "gd_cell": str(cm.gd_cell()), "gd_simple": str(cm.gd_simple())})
    report = _header(args, session, "gram") | {"w": session.fmt(alg.w), "cells": cells}
    return report, ["x", "size", "gd_cell", "gd_simple"], rows


def cmd_decomp(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    word = system.parse_word(args.w)
    session = _session(args, len(word))
    word = _reduced(session, args.w)
    alg = AlgebraA(session, word)
    alg.verify_axioms()
    kl = session.kl
    m = alg.solve_multiplicities(kl)
    rows = []
    for x in alg.poset:
        d = alg.decomposition_number(x, kl)
        rows.append(
            {
                "x": session.fmt(x),
                "gd_cell": str(alg.gd_cell(x)),
                "gd_simple": str(alg.gd_simple(x)),
                "m": str(m[x]),
                "d": str(d),
            }
        )
    report = _header(args, session, "decomp") | {"w": session.fmt(alg.w), "dimension": alg.N, "rows": rows}
    return report, ["x", "gd_cell", "gd_simple", "m", "d"], rows


def cmd_mono(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    length = args.max_length if args.max_length is not None else 4
    session = Session(system, length, seed=args.seed)
    U = session.universe
    report = monotonicity_scan(U, session.kl, length)
    phi_certified = 0
    failures = []
    if args.mode == "full-phi":
        budget = min(args.phi_length, length)
        for w in sorted(range(len(U)), key=U.sort_key):
            if U.lengths[w] > budget:
                continue
            alg = AlgebraA(session, session.ledger.rexp(w))
            for v in alg.poset:
                for u in alg.poset:
                    if not U.bruhat_leq(u, v):
                        continue
                    res = certify_phi(alg, u, v)
                    if res["intertwines"] and res["injective"] and res["graded"]:
                        phi_certified += 1
                    else:
                        failures.append(res | {"w": session.fmt(w)})
        if failures:
            raise IdentityFailure(f"{len(failures)} Phi certificates failed")
    out = _header(args, session, "mono") | {
        "mode": args.mode,
        "complete_group": U.complete,
        "elements": report["elements"],
        "triples_checked": report["triples_checked"],
        "violations": report["violations"],
        "phi_certified": phi_certified,
    }
    rows = [
        {
            "triples_checked": out["triples_checked"],
            "violations": len(out["violations"]),
            "phi_certified": phi_certified,
        }
    ]
    if report["violations"]:
        _emit(args, out, ["triples_checked", "violations", "phi_certified"], rows)
        raise IdentityFailure(f"{len(report['violations'])} monotonicity violations")
    return out, ["triples_checked", "violations", "phi_certified"], rows


def random_endomorphism(session: Session, word, rng: random.Random, basis=None) -> MorphismMatrix:
    """A homogeneous bimodule endomorphism built from double leaves and polynomial actions."""
    if basis is None:
        basis = DoubleLeafBasis(session, word, word)
    nv = session.nvars

    def poly(k):
        return Poly({m: mpq(rng.randint(-3, 3)) for m in monomials_of_degree(k, nv)}, nv)

    a, b = rng.choice(basis.elements), rng.choice(basis.elements)
    mid = session.bims.left_mult_operator(b.morphism.target, poly(rng.randint(0, 1)))
    return (a.morphism @ mid @ b.morphism).scale(poly(rng.randint(0, 1)))


def cmd_expand(args):
    system = CoxeterSystem.resolve(args.group, args.field)
    src = system.parse_word(args.word)
    tgt = system.parse_word(args.target) if args.target is not None else src
    session = _session(args, max(len(src), len(tgt)))
    if args.morphism == "identity":
        if tgt != src:
            raise InputError("the identity needs equal source and target")
        M = session.bims.identity(src)
    elif args.morphism == "random":
        if tgt != src:
            raise InputError("random morphisms are endomorphisms")
        M = random_endomorphism(session, src, random.Random(args.seed))
    else:
        data = json.loads(Path(args.morphism).read_text())
        M = MorphismMatrix.from_json(data, session.nvars)
        if M.source.word != src or M.target.word != tgt:
            raise InputError("morphism file does not match --word/--target")
    if not session.bims.is_bimodule_morphism(M):
        raise InputError("input matrix is not a homogeneous bimodule morphism")
    basis = DoubleLeafBasis(session, src, tgt)
    coeffs = basis.expand(M)
    rows = []
    for dl, c in zip(basis.elements, coeffs):
        if c:
            rows.append(
                {
                    "through": session.fmt(dl.through),
                    "upper": "".join(map(str, dl.upper.j_seq)),
                    "lower": "".join(map(str, dl.lower.j_seq)),
                    "degree": dl.degree,
                    "coefficient": str(c),
                }
            )
    report = _header(args, session, "expand") | {
        "source": system.format_word(src),
        "target": system.format_word(tgt),
        "basis_size": len(basis),
        "terms": rows,
    }
    return report, ["through", "upper", "lower", "degree", "coefficient"], rows


COMMANDS = {
    "kl": cmd_kl,
    "bruhat": cmd_bruhat,
    "leaves": cmd_leaves,
    "gram": cmd_gram,
    "decomp": cmd_decomp,
    "mono": cmd_mono,
    "expand": cmd_expand,
}


def _render(args, report, columns, rows) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in columns})
        return buf.getvalue()
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _emit(args, report, columns, rows) -> None:
    text = _render(args, report, columns, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_help())
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return 2
    try:
        report, columns, rows = COMMANDS[args.command](args)
        _emit(args, report, columns, rows)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except IdentityFailure as exc:
        sys.stderr.write(f"identity failure: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())
