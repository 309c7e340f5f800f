"""Command-line interface: ``sofic <subcommand> ...``.

Exit codes: 0 success or PASS, 1 malformed input, 2 honest refusal
(hypotheses not met, search budget or size cap exhausted), 3 a checked
witness FAILS, 4 internal error.
"""
import argparse
import json
import os
import sys
from fractions import Fraction

from . import builder, green
from .errors import CapExceeded, ParseError, RefusalError, SoficError
from .fixtures import describe_fixture, fixture_names, load_fixture
from .groups import DEFAULT_SEARCH_BUDGET, find_folner, folner_quality, parse_group
from .monoids import read_monoid
from .witness import (DEFAULT_GROUND_CAP, check_witness, diagonal_power_exponent,
                      diagonal_power_report, diagonal_power_witness, fmt, passes,
                      read_witness, write_witness)

EXIT_OK, EXIT_INPUT, EXIT_REFUSED, EXIT_FAIL, EXIT_INTERNAL = 0, 1, 2, 3, 4


def rational(text):
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from None
    return q


def positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _env_int(name, default):
    value = os.environ.get(name)
    return positive_int(value) if value else default


def split_labels(text):
    """Split on commas that are not nested inside (), [] or {}."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return [s for s in out if s]


def _monoid(args):
    if getattr(args, "monoid", None):
        return read_monoid(args.monoid)
    if getattr(args, "fixture", None):
        try:
            return load_fixture(args.fixture)
        except KeyError as exc:
            raise ParseError(exc.args[0]) from None
    raise ParseError("give --fixture NAME or --monoid FILE")


def _elements(M, text):
    if text is None:
        raise ParseError("--K is required")
    if text.strip() == "all":
        if not M.is_finite:
            raise ParseError("--K all needs a finite monoid")
        return M.elements()
    return [M.parse(s) for s in split_labels(text)]


def _emit(args, doc, text):
    if args.format == "json":
        sys.stdout.write(json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


# -- subcommands -------------------------------------------------------------------

def cmd_fixtures(args):
    rows = []
    for name in fixture_names():
        rows.append({"name": name, "description": describe_fixture(name)})
    _emit(args, rows, "\n".join(f"{r['name']:<12} {r['description']}" for r in rows))
    return EXIT_OK


def cmd_analyze(args):
    M = _monoid(args)
    if not M.is_finite:
        doc = {"monoid": M.name, "finite": False, "declared": M.declared,
               "verified": list(M.verified), "unit_group": M.unit_group.describe()}
        text = "\n".join([f"{M.name}: structured monoid (declared facts only)",
                          f"unit group: {doc['unit_group']}"]
                         + [f"  {k}: {v}" for k, v in M.declared.items()])
        _emit(args, doc, text)
        return EXIT_OK
    g = green.green_relations(M)
    summary = green.eggbox_summary(M, g)
    counts = {k: g.count(f"{k.lower()}_class") for k in "RLHDJ"}
    units = [M.label(u) for u in M.units]
    doc = {"monoid": M.name, "size": M.size, "identity": M.label(M.one), "units": units,
           "unit_group_order": len(units), "units_equal_j_class": M.units_equal_j_class,
           "class_counts": counts, "d_classes": summary}
    head = [f"{M.name}: {M.size} elements, identity {M.label(M.one)}",
            f"units ({len(units)}): {', '.join(units)}",
            f"J-class of identity equals units: {M.units_equal_j_class}",
            "classes: " + ", ".join(f"{k}={v}" for k, v in counts.items()),
            f"{len(summary)} D-classes", ""]
    _emit(args, doc, "\n".join(head) + green.render_eggbox(summary))
    return EXIT_OK


def cmd_hypotheses(args):
    M = _monoid(args)
    K = _elements(M, args.K) if args.K else None
    rep = builder.check_hypotheses(M, K)
    doc = rep.to_dict()
    lines = [f"units equal J-class of 1: {rep.units_equal_j_class} ({rep.units_source})",
             f"unit group sofic-capable: {rep.unit_group_sofic_capable}",
             f"orbit amenability declaration: {rep.orbit_declaration}"]
    lines += [f"  orbit of {o['orbit']}: {o['status']}" for o in rep.local_amenability]
    lines.append("matched: " + (", ".join(rep.matched_conditions) or "none"))
    if rep.failing_clause:
        lines.append(f"failing: {rep.failing_clause}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_build(args):
    M = _monoid(args)
    K = _elements(M, args.K)
    W, log = builder.build_witness(M, K, args.eps, budget=args.search_budget,
                                   cap=args.ground_cap, workers=args.workers)
    if args.out:
        write_witness(args.out, W)
    if args.provenance:
        with open(args.provenance, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(log.to_json())
    doc = log.to_dict()
    text = "\n".join([f"built witness on N = {log.N} points (delta = {fmt(log.delta)})",
                      f"|Y| = {log.Y_size}, |Z| = {log.Z_size}, |F| = {log.F_size}, |P| = {log.P_size}",
                      f"F quality {fmt(log.F_quality)}, good fraction {fmt(log.good_fraction)}",
                      f"checker: mult {log.report['max_mult_defect']}, sep {log.report['max_sep_overlap']}"])
    _emit(args, doc, text)
    return EXIT_OK


def _k_from_witness(M, W):
    seen = []
    for i, j, _ in W.products:
        for x in (i, j):
            if x not in seen:
                seen.append(x)
    return [M.decode(W.encodings[i]) for i in seen]


def _report_text(rep, verdict=None):
    lines = []
    if verdict is not None:
        lines.append(verdict)
    lines += [f"N = {rep.N}", f"identity violations: {rep.identity_violations}",
              f"max mult defect: {fmt(rep.max_mult_defect)}",
              f"max sep overlap: {fmt(rep.max_sep_overlap)}"]
    return "\n".join(lines)


def cmd_check(args):
    M = _monoid(args)
    W = read_witness(args.witness)
    K = _elements(M, args.K) if args.K else _k_from_witness(M, W)
    rep = check_witness(M, K, W, workers=args.workers, strict=args.strict)
    ok = passes(rep, args.eps)
    verdict = "PASS" if ok else "FAIL"
    doc = dict(rep.to_dict(), eps=fmt(args.eps), result=verdict)
    _emit(args, doc, _report_text(rep, verdict))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args):
    M = _monoid(args)
    if not M.is_finite:
        raise ParseError("the diagonal power oracle needs a finite monoid")
    K = _elements(M, args.K)
    n, p = diagonal_power_exponent(M, K, args.eps)
    mode = "materialised"
    try:
        W = diagonal_power_witness(M, K, args.eps, cap=args.ground_cap)
        rep = check_witness(M, K, W, workers=args.workers)
        if args.out:
            write_witness(args.out, W)
    except CapExceeded:
        if args.out:
            raise
        rep = diagonal_power_report(M, K, args.eps)
        mode = "implicit"
    ok = passes(rep, args.eps)
    doc = dict(rep.to_dict(), exponent=n, agreement=fmt(p), mode=mode,
               result="PASS" if ok else "FAIL")
    _emit(args, doc, f"exponent n = {n}, agreement {fmt(p)}, {mode}\n" + _report_text(rep))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_folner(args):
    G = parse_group(args.group)
    K = [G.parse(s) for s in split_labels(args.K)]
    if args.box is not None:
        F = G.folner_candidate(args.box)
        q = folner_quality(G, K, F)
        size = len(F)
    elif args.delta is not None:
        found = find_folner(G, K, args.delta, budget=args.search_budget)
        q, size = found.quality_for(K), len(found)
    else:
        raise ParseError("give --box N or --delta p/q")
    doc = {"group": G.describe(), "K": [G.label(k) for k in K], "F_size": size, "quality": fmt(q)}
    _emit(args, doc, f"{doc['group']}: |F| = {size}, quality {fmt(q)}")
    return EXIT_OK


def cmd_probe(args):
    M = load_fixture("bicyclic")
    K = [M.parse(s) for s in split_labels(args.K)]
    rep = builder.bicyclic_defect_probe(args.N, K, family=args.family, M=M, workers=args.workers)
    doc = dict(rep.to_dict(), family=args.family)
    _emit(args, doc, f"family {args.family}\n" + _report_text(rep))
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser():
    ground_cap = _env_int("SOFIC_GROUND_CAP", DEFAULT_GROUND_CAP)
    budget = _env_int("SOFIC_SEARCH_BUDGET", DEFAULT_SEARCH_BUDGET)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--workers", type=positive_int, default=1)
    common.add_argument("--ground-cap", type=positive_int, default=ground_cap)
    common.add_argument("--search-budget", type=positive_int, default=budget)

    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument("--fixture")
    group.add_argument("--monoid", metavar="FILE")

    p = argparse.ArgumentParser(prog="sofic", description="Finite approximate actions of monoids.")
    sub = p.add_subparsers(dest="command", required=True)

    fx = sub.add_parser("fixtures", parents=[common], help="built-in monoids")
    fx.add_argument("action", choices=("list",))
    fx.set_defaults(func=cmd_fixtures)

    a = sub.add_parser("analyze", parents=[common, source], help="egg-box and unit report")
    a.set_defaults(func=cmd_analyze)

    h = sub.add_parser("hypotheses", parents=[common, source], help="classify the soficity criteria")
    h.add_argument("--K")
    h.set_defaults(func=cmd_hypotheses)

    b = sub.add_parser("build-witness", parents=[common, source], help="construct a (K, eps)-action")
    b.add_argument("--K", required=True)
    b.add_argument("--eps", type=rational, required=True)
    b.add_argument("--out", metavar="FILE")
    b.add_argument("--provenance", metavar="FILE")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check-witness", parents=[common, source], help="measure a witness file")
    c.add_argument("--witness", metavar="FILE", required=True)
    c.add_argument("--K")
    c.add_argument("--eps", type=rational, required=True)
    c.add_argument("--strict", action="store_true", help="identity violations are errors")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("oracle-witness", parents=[common, source], help="diagonal power witness")
    o.add_argument("--K", required=True)
    o.add_argument("--eps", type=rational, required=True)
    o.add_argument("--out", metavar="FILE")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("folner", parents=[common], help="Følner quality in an abelian group")
    f.add_argument("--group", required=True, help='e.g. "Z", "Z^2", "ZxZ/3"')
    f.add_argument("--K", required=True)
    f.add_argument("--box", type=int)
    f.add_argument("--delta", type=rational)
    f.set_defaults(func=cmd_folner)

    pb = sub.add_parser("probe-bicyclic", parents=[common], help="defects of a bicyclic candidate")
    pb.add_argument("--N", type=positive_int, required=True)
    pb.add_argument("--K", default="p,q,1,qp")
    pb.add_argument("--family", choices=sorted(builder.PROBE_FAMILIES), default="truncation")
    pb.set_defaults(func=cmd_probe)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except RefusalError as exc:
        name = "" if str(exc).startswith(type(exc).__name__) else f"{type(exc).__name__}: "
        print(f"{name}{exc} [{exc.module}]", file=sys.stderr)
        return EXIT_REFUSED
    except SoficError as exc:
        code = EXIT_INTERNAL if type(exc).__name__ == "WitnessRejected" else EXIT_INPUT
        print(f"{type(exc).__name__}: {exc} [{exc.module}]", file=sys.stderr)
        return code
    except (OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
