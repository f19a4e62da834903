"""Command-line interface.

Exit codes: 0 success, 1 usage or file error, 2 a checked property failed,
3 research event (no comparison-graph source, cyclic comparison graph, or a
conjecture violation).
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import List, Optional

from . import comparison, conjectures, distortion, flows, instances, rules
from .profile import ProfileFormatError, check_consistency, check_triangle, parse_metric, parse_profile, social_cost

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_RESEARCH = 0, 1, 2, 3

RULES = ("copeland", "uncovered", "ranked-pairs", "schulze", "abm", "lp-optimal")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    value = Fraction(value)
    return f"{value} (~{float(value):.6f})" if value.denominator != 1 else str(value)


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load_profile(path: str):
    try:
        return parse_profile(_read(path))
    except ProfileFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _candidate(profile, x: int, what: str) -> int:
    if not 0 <= x < profile.n:
        raise UsageError(f"{what} {x} is not a candidate (profile has {profile.n})")
    return x


def _dump(path: Optional[str], pairs) -> None:
    if path:
        _write(path, "".join(f"{k}={v}\n" for k, v in pairs))


# ---------------------------------------------------------------------------
# commands


def cmd_winners(args) -> int:
    profile = _load_profile(args.profile)
    rule = args.rule
    if rule == "uncovered":
        result = sorted(rules.uncovered_set(profile))
        print(" ".join(map(str, result)))
        _dump(args.dump, [("rule", rule), ("winners", ",".join(map(str, result)))])
        return EXIT_OK
    if rule == "copeland":
        w = rules.copeland_winner(profile)
    elif rule == "ranked-pairs":
        w = rules.ranked_pairs_winner(profile)
    elif rule == "schulze":
        w = rules.schulze_winner(profile)
    elif rule == "lp-optimal":
        w, value = distortion.lp_optimal_winner(profile, workers=args.workers)
        print(w)
        print(f"distortion bound {_fmt(value)}")
        _dump(args.dump, [("rule", rule), ("winner", w), ("distortion", value)])
        return EXIT_OK
    else:
        outcome = comparison.abm_winner(profile)
        if not outcome.ok:
            print(outcome.report, end="")
            print("distortion bounds per candidate:")
            for x, value in enumerate(distortion.all_w_opt_dist(profile, workers=args.workers)):
                print(f"  {x}: {_fmt(value)}")
            _dump(args.dump, [("rule", rule), ("winner", "none")])
            return EXIT_RESEARCH
        w = outcome.winner
    print(w)
    _dump(args.dump, [("rule", rule), ("winner", w)])
    return EXIT_OK


def cmd_distortion(args) -> int:
    profile = _load_profile(args.profile)
    w = _candidate(profile, args.winner, "winner")
    if args.opt is None:
        value = distortion.w_opt_dist(profile, w, workers=args.workers)
        print(_fmt(value))
        _dump(args.dump, [("winner", w), ("distortion", value)])
        return EXIT_OK
    c = _candidate(profile, args.opt, "opt")
    value = distortion.opt_dist(profile, w, c)
    print(_fmt(value))
    if args.dump:
        metric = distortion.worst_case_metric(profile, w, c)
        if metric is None:
            raise UsageError("ratio is unbounded; there is no worst-case metric to dump")
        _write(args.dump, metric.to_text())
    return EXIT_OK


def _parse_path(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"malformed path {text!r}; expected comma-separated candidates") from None


def cmd_certificate(args) -> int:
    profile = _load_profile(args.profile)
    if args.verify:
        try:
            cert = flows.load_certificate(_read(args.verify), profile)
            value = flows.verify_certificate(cert)
        except flows.CertificateError as exc:
            print(f"certificate invalid: {exc}")
            return EXIT_FAIL
        print(f"max per-voter cost {_fmt(value)}")
        return EXIT_OK
    try:
        if args.kind == "chain":
            if not args.path:
                raise UsageError("--path is required for chain certificates")
            path = _parse_path(args.path)
            for x in path:
                _candidate(profile, x, "path entry")
            cert = flows.chain_flow(profile, path)
            bound = flows.lambda_bound(flows.chain_taus(profile, path))
        else:
            if args.winner is None or args.opt is None:
                raise UsageError("--winner and --opt are required for matching certificates")
            w = _candidate(profile, args.winner, "winner")
            c = _candidate(profile, args.opt, "opt")
            found = comparison.abm_matching(profile, w, c)
            if found is None:
                raise UsageError(f"B({w},{c}) has no perfect matching")
            cert = flows.matching_flow(profile, w, c, *found)
            bound = Fraction(3)
    except flows.FlowConstructionError as exc:
        raise UsageError(str(exc)) from None
    try:
        value = flows.verify_certificate(cert)
    except flows.CertificateError as exc:
        print(f"certificate invalid: {exc}")
        return EXIT_FAIL
    print(f"max per-voter cost {_fmt(value)}")
    print(f"construction bound {_fmt(bound)}")
    if args.out:
        _write(args.out, cert.dumps())
    return EXIT_OK if value <= bound else EXIT_FAIL


def cmd_compg(args) -> int:
    if args.batch:
        if args.n is None or args.m is None:
            raise UsageError("--batch needs --n and --m")
        seed = 0 if args.seed is None else args.seed
        acyclic = with_source = 0
        for k in range(args.batch):
            p = instances.gen_random_profile(args.n, args.m, f"{seed}:{k}")
            g = comparison.build_compg(p, with_witnesses=False)
            acyclic += g.find_cycle() is None
            with_source += bool(g.sources())
        print(f"profiles {args.batch} acyclic {acyclic} with-source {with_source}")
        return EXIT_OK if acyclic == args.batch else EXIT_RESEARCH
    if not args.profile:
        raise UsageError("a profile file is required unless --batch is given")
    profile = _load_profile(args.profile)
    g = comparison.build_compg(profile)
    print(g.to_edge_list(), end="")
    print("sources " + " ".join(map(str, g.sources())))
    if args.dot:
        _write(args.dot, g.to_dot())
    if args.dump:
        _write(args.dump, g.to_edge_list())
    bad = comparison.check_majority_subgraph(profile, g)
    if bad is not None:
        y, x, p = bad
        print(f"majority property fails on edge {y} -> {x}: p = {p}")
        return EXIT_FAIL
    cycle = g.find_cycle()
    if cycle is not None:
        print("RESEARCH EVENT: cycle " + " -> ".join(map(str, cycle)))
        return EXIT_RESEARCH
    print("acyclic")
    return EXIT_OK


def cmd_conjecture(args) -> int:
    n = args.n
    if n is None or n < 3:
        raise UsageError("--n must be at least 3")
    if args.graph is not None:
        try:
            g = conjectures.ConstraintChoiceGraph(n, args.graph)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        res = conjectures.check_ccg(g)
        if res.satisfied:
            print(f"graph {args.graph}: witness S = {list(res.witness)}")
            for line in res.audit:
                print("  " + line)
            return EXIT_OK
        print(conjectures.violation_dump(res), end="")
        return EXIT_RESEARCH

    def progress(pos, done, elapsed):
        rate = done / elapsed if elapsed > 0 else 0.0
        print(f"[conjecture n={n}] at {pos}, {done} graphs, {rate:.0f} graphs/s", file=sys.stderr)

    try:
        report = conjectures.exhaustive_search(
            n, lo=args.lo, hi=args.hi, checkpoint=args.checkpoint, workers=args.workers,
            progress=progress if args.progress else None,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(report.summary())
    print(f"max witness size {report.max_witness_size}")
    print(f"runtime {report.runtime:.2f}s")
    _dump(args.dump, [
        ("n", n), ("graphs", report.graphs_checked), ("violations", len(report.violations)),
        ("max_witness_size", report.max_witness_size),
    ])
    if report.violations:
        for bits in report.violations:
            print(conjectures.violation_dump(conjectures.check_ccg(conjectures.ConstraintChoiceGraph(n, bits))), end="")
        return EXIT_RESEARCH
    return EXIT_OK


def cmd_gen(args) -> int:
    out = args.out
    if args.kind == "lowerbound":
        if args.m is None:
            raise UsageError("--m is required")
        try:
            inst = instances.gen_lower_bound(args.m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write(out + ".profile", inst.profile.to_text())
        _write(out + ".metric", inst.metric.to_text())
        a, b = inst.predicted
        print(f"wrote {out}.profile {out}.metric (n={inst.n}, voters={inst.profile.m})")
        print(f"predicted costs {a}, {b}")
        return EXIT_OK
    if args.n is None or args.m is None or args.seed is None:
        raise UsageError("--n, --m and --seed are required")
    if args.n < 1 or args.m < 1:
        raise UsageError("--n and --m must be positive")
    if args.kind == "random":
        profile = instances.gen_random_profile(args.n, args.m, args.seed)
        _write(out + ".profile", profile.to_text())
        print(f"wrote {out}.profile")
        return EXIT_OK
    if args.dim < 1:
        raise UsageError("--dim must be positive")
    profile, metric = instances.gen_euclidean_profile(args.n, args.m, args.dim, args.seed)
    _write(out + ".profile", profile.to_text())
    _write(out + ".metric", metric.to_text())
    print(f"wrote {out}.profile {out}.metric")
    return EXIT_OK


def cmd_metric_check(args) -> int:
    profile = _load_profile(args.profile)
    try:
        metric = parse_metric(_read(args.metric))
    except ProfileFormatError as exc:
        raise UsageError(f"{args.metric}: {exc}") from None
    if metric.m != profile.m or metric.n != profile.n:
        raise UsageError(f"metric is {metric.m}x{metric.n} but the profile has {profile.m} voters and {profile.n} candidates")
    ok = True
    bad = check_consistency(metric, profile)
    if bad is None:
        print("consistency ok")
    else:
        v, x, y = bad
        print(f"consistency FAIL: voter {v} ranks {x} above {y} but d({v},{x}) = {metric[v][x]} > d({v},{y}) = {metric[v][y]}")
        ok = False
    bad = check_triangle(metric)
    if bad is None:
        print("triangle ok")
    else:
        v, u, x, y = bad
        print(f"triangle FAIL: d({v},{x}) > d({v},{y}) + d({u},{y}) + d({u},{x}) at (v={v}, v'={u}, x={x}, y={y})")
        ok = False
    if ok:
        print("costs " + " ".join(str(social_cost(metric, x)) for x in range(metric.n)))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="metricvote", description="Exact metric-distortion tools for ranked voting.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("winners", help="winner of a voting rule")
    s.add_argument("profile")
    s.add_argument("--rule", required=True, choices=RULES)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump")
    s.set_defaults(func=cmd_winners)

    s = sub.add_parser("distortion", help="worst-case cost ratio of a winner")
    s.add_argument("profile")
    s.add_argument("--winner", type=int, required=True)
    s.add_argument("--opt", type=int)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump", help="write the worst-case metric here (needs --opt)")
    s.set_defaults(func=cmd_distortion)

    s = sub.add_parser("certificate", help="build and verify a flow certificate")
    s.add_argument("profile")
    s.add_argument("--kind", choices=("chain", "matching"), default="chain")
    s.add_argument("--path", help="comma-separated candidates for a chain certificate")
    s.add_argument("--winner", type=int)
    s.add_argument("--opt", type=int)
    s.add_argument("--out", help="write the certificate here")
    s.add_argument("--verify", help="re-check an existing certificate file instead")
    s.set_defaults(func=cmd_certificate)

    s = sub.add_parser("compg", help="comparison graph with Hall witnesses")
    s.add_argument("profile", nargs="?")
    s.add_argument("--dot")
    s.add_argument("--dump")
    s.add_argument("--batch", type=int, help="check this many random profiles instead")
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_compg)

    s = sub.add_parser("conjecture", help="exhaustive constraint-choice graph search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--lo", type=int, default=0)
    s.add_argument("--hi", type=int)
    s.add_argument("--graph", type=int, help="check a single graph by number")
    s.add_argument("--checkpoint")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--progress", action="store_true", help="report progress on stderr")
    s.add_argument("--dump")
    s.set_defaults(func=cmd_conjecture)

    s = sub.add_parser("gen", help="generate instances")
    s.add_argument("kind", choices=("lowerbound", "random", "euclidean"))
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--out", required=True, help="output path prefix")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("metric-check", help="check a metric against a profile")
    s.add_argument("profile")
    s.add_argument("metric")
    s.set_defaults(func=cmd_metric_check)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
