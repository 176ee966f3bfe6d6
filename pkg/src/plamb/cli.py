"""Command-line front end.

Subcommands: eval, trace, lts, sim, bisim, lift, approx, normalize,
selftest.  Operands are inline expressions unless they name an existing
file (or end in ``.lam``), in which case the file's contents are parsed.
Exit codes: 0 success / no counterexample, 1 refuted or failed data
condition, 2 usage, file, or parse errors.

The environment variable ``PLAMB_PRELUDE`` points at an alternative prelude
file (``name = source`` lines).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import corpus as corpus_mod
from .approximants import (
    approx_check,
    approx_generate,
    embed,
    parse_fin,
    print_fin_dist,
)
from .lifting import FinSupportDist, lift_check_flow, lift_check_subsets
from .lts import available_labels, weak_max_transition
from .prelude import DEFAULT_PRELUDE, load_prelude_file
from .reduction import evolve, step, vals
from .simulation import SimParams, bisim_check, sim_check
from .syntax import (
    Dist,
    LambError,
    ZERO,
    dist_scale,
    fresh_name,
    free_names,
    parse,
    print_dist,
)

TV_EPSILON = Fraction(1, 1024)


class Config:
    """Run-wide defaults shared by the subcommands."""

    __slots__ = ("fuel", "depth", "grain", "format", "seed")

    def __init__(self, fuel=64, depth=4, grain=Fraction(1, 16), format="text", seed=0):
        self.fuel = fuel
        self.depth = depth
        self.grain = grain
        self.format = format
        self.seed = seed


def _prelude():
    path = os.environ.get("PLAMB_PRELUDE")
    if path:
        return load_prelude_file(path)
    return DEFAULT_PRELUDE


def _load_operand(text):
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return parse(fh.read(), prelude=_prelude())
    if text.endswith(".lam"):
        raise LambError("file not found: %s" % text)
    return parse(text, prelude=_prelude())


def _dist_json(d):
    return {repr(t): str(w) for t, w in d.entries()}


# ---------------------------------------------------------------------------
# Normalization report


class NormalizationReport:
    """Per-step normalized value distributions and their total-variation
    drift; convergence is flagged after three consecutive steps whose drift
    stays under 1/1024, and ``converged_at`` is the step at which the final
    normalized distribution first appeared."""

    __slots__ = ("rows", "converged", "converged_at")

    def __init__(self, rows, converged, converged_at):
        self.rows = rows
        self.converged = converged
        self.converged_at = converged_at


def total_variation(a, b):
    """Half the pointwise absolute weight difference over the union of the
    canonical supports."""
    keys = set(a._index) | set(b._index)
    total = ZERO
    for k in keys:
        total += abs(a._index.get(k, ZERO) - b._index.get(k, ZERO))
    return total / 2


def normalize(m, cfg):
    """Evolve step by step, renormalizing the value mass at each fuel step;
    raises on programs whose value mass stays zero throughout."""
    rows = []
    cur = m
    small_run = 0
    for s in range(1, cfg.fuel + 1):
        cur = step(cur)
        v = vals(cur)
        mass = v.mass()
        if mass == 0:
            continue
        normalized = Dist((t, w / mass) for t, w in v.entries())
        tvd = total_variation(normalized, rows[-1][1]) if rows else None
        rows.append((s, normalized, tvd))
        if tvd is not None and tvd < TV_EPSILON:
            small_run += 1
            if small_run >= 3:
                break
        elif tvd is not None:
            small_run = 0
    if not rows:
        raise LambError("all mass divergent: no value mass at any step")
    final = rows[-1][1]
    converged = small_run >= 3
    converged_at = rows[-1][0]
    for s, d, _ in reversed(rows):
        if d == final:
            converged_at = s
        else:
            break
    return NormalizationReport(rows, converged, converged_at)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_eval(args, cfg):
    d = _load_operand(args.expr)
    report = evolve(d, cfg.fuel)
    if cfg.format == "json":
        print(json.dumps({
            "values": _dist_json(report.values),
            "mass": str(report.values.mass()),
            "residual": str(report.residual),
            "steps_used": report.steps_used,
            "converged": report.converged,
        }))
    else:
        print(print_dist(report.values, explicit=True))
    return 0


def _cmd_trace(args, cfg):
    d = _load_operand(args.expr)
    cur = d
    for i in range(cfg.fuel + 1):
        v = vals(cur)
        print("%d\t%s\tvalue=%s\tresidual=%s" % (
            i, print_dist(cur), v.mass(), cur.mass() - v.mass()
        ))
        if v.mass() == cur.mass():
            break
        cur = step(cur)
    return 0


def _cmd_lts(args, cfg):
    d = _load_operand(args.expr)
    report = evolve(d, cfg.fuel)
    print("tau\t%s\tresidual=%s" % (print_dist(report.values, explicit=True), report.residual))
    sym = fresh_name(free_names(d))
    for label in available_labels(report.values, sym):
        r = weak_max_transition(report.values, label, cfg.fuel)
        print("%s\t%s\tresidual=%s" % (label, print_dist(r.values, explicit=True), r.residual))
    return 0


def _verdict_exit(verdicts):
    return 0 if all(v.holds for v in verdicts) else 1


def _cmd_sim(args, cfg):
    m = _load_operand(args.left)
    n = _load_operand(args.right)
    params = SimParams(cfg.depth, cfg.fuel, not args.no_slack)
    v = sim_check(m, n, params)
    if cfg.format == "json":
        print(json.dumps(v.to_dict()))
    else:
        print(repr(v))
    return _verdict_exit([v])


def _cmd_bisim(args, cfg):
    m = _load_operand(args.left)
    n = _load_operand(args.right)
    params = SimParams(cfg.depth, cfg.fuel, not args.no_slack)
    fwd, bwd = bisim_check(m, n, params)
    if cfg.format == "json":
        print(json.dumps({
            "holds_at_bound": fwd.holds and bwd.holds,
            "forward": fwd.to_dict(),
            "backward": bwd.to_dict(),
        }))
    else:
        print("forward:  %r" % fwd)
        print("backward: %r" % bwd)
    return _verdict_exit([fwd, bwd])


def _lift_dist(obj, side):
    try:
        return FinSupportDist(obj[side]["points"], [Fraction(w) for w in obj[side]["weights"]])
    except KeyError as exc:
        raise LambError("lift instance missing %s.%s" % (side, exc)) from exc


def _cmd_lift(args, cfg):
    if os.path.exists(args.instance):
        with open(args.instance, encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = json.loads(args.instance)
    d = _lift_dist(obj, "source")
    e = _lift_dist(obj, "target")
    relation = {(a, b) for a, b in obj.get("relation", [])}
    slack = Fraction(obj.get("slack", args.slack))
    flow = lift_check_flow(d, e, relation, slack)
    subsets = None
    if len(d) <= 12 and slack == 0:
        subsets = lift_check_subsets(d, e, relation)
    if cfg.format == "json":
        out = {
            "flow": {
                "holds": flow.holds,
                "deficit": str(flow.deficit),
                "witness_cut": sorted(map(str, flow.witness_cut)),
            }
        }
        if subsets is not None:
            out["subsets"] = {
                "holds": subsets.holds,
                "deficit": str(subsets.deficit),
                "witness_cut": sorted(map(str, subsets.witness_cut)),
            }
        print(json.dumps(out))
    else:
        print("flow:    %r" % flow)
        if subsets is not None:
            print("subsets: %r" % subsets)
    return 0 if flow.holds else 1


def _cmd_approx(args, cfg):
    m = _load_operand(args.expr)
    if args.check:
        with open(args.check, encoding="utf-8") as fh:
            candidate = parse_fin(fh.read())
        ok = approx_check(candidate, m, cfg.depth, cfg.fuel)
        print("true" if ok else "false")
        return 0 if ok else 1
    out = approx_generate(m, cfg.depth, cfg.fuel, cfg.grain)
    for c in sorted(out, key=lambda c: c.canon()):
        print(print_fin_dist(c))
    return 0


def _cmd_normalize(args, cfg):
    m = _load_operand(args.expr)
    report = normalize(m, cfg)
    if cfg.format == "json":
        print(json.dumps({
            "rows": [
                {
                    "step": s,
                    "normalized": _dist_json(d),
                    "tv_distance": None if tvd is None else str(tvd),
                }
                for s, d, tvd in report.rows
            ],
            "converged": report.converged,
            "converged_at": report.converged_at,
        }))
    else:
        for s, d, tvd in report.rows:
            print("%d\t%s\ttv=%s" % (s, print_dist(d, explicit=True), "-" if tvd is None else tvd))
        print("converged=%s at=%s" % (report.converged, report.converged_at))
    return 0


# ---------------------------------------------------------------------------
# Self-test battery


def _selftest_checks(cfg):
    from .syntax import dist_leq, dist_union, parse as _p

    rng = random.Random(cfg.seed)
    terms = corpus_mod.corpus()

    def check_roundtrip():
        bad = 0
        for d in terms:
            if parse(print_dist(d), prelude={}) != d:
                bad += 1
        return bad

    def check_reduction_laws():
        bad = 0
        for d in terms:
            cur = d
            prev_vals = vals(cur)
            for _ in range(8):
                nxt = step(cur)
                if nxt.mass() > cur.mass():
                    bad += 1
                if not dist_leq(prev_vals, vals(nxt)):
                    bad += 1
                prev_vals = vals(nxt)
                cur = nxt
        return bad

    def check_linearity():
        bad = 0
        for _ in range(30):
            a = dist_scale(Fraction(1, 2), rng.choice(terms))
            b = dist_scale(Fraction(1, 2), rng.choice(terms))
            both = evolve(dist_union(a, b), 16).values
            split = dist_union(evolve(a, 16).values, evolve(b, 16).values)
            if both != split:
                bad += 1
        return bad

    def check_lift_agreement():
        bad = 0
        grid = [Fraction(i, 8) for i in range(1, 9)]
        for _ in range(100):
            ns, nt = rng.randint(1, 5), rng.randint(1, 5)
            sw = [rng.choice(grid) for _ in range(ns)]
            tw = [rng.choice(grid) for _ in range(nt)]
            if sum(sw) > 1:
                sw = [w / sum(sw) for w in sw]
            if sum(tw) > 1:
                tw = [w / sum(tw) for w in tw]
            d = FinSupportDist(range(ns), sw)
            e = FinSupportDist(range(100, 100 + nt), tw)
            rel = {
                (i, 100 + j)
                for i in range(ns)
                for j in range(nt)
                if rng.random() < 0.4
            }
            a = lift_check_flow(d, e, rel)
            b = lift_check_subsets(d, e, rel)
            if a.holds != b.holds or a.deficit != b.deficit:
                bad += 1
        return bad

    def check_simulation():
        bad = 0
        om = _p("omega")
        params = SimParams(2, 8)
        for d in terms:
            if not sim_check(d, d, params).holds:
                bad += 1
            if not sim_check(om, d, params).holds:
                bad += 1
        if sim_check(_p(r"\x. omega"), om, params).holds:
            bad += 1
        yt = _p(r"Y (\x. {1/2: I, 1/2: x})")
        if not sim_check(_p("I"), yt, SimParams(3, 9)).holds:
            bad += 1
        if not sim_check(yt, _p("I"), SimParams(3, 9)).holds:
            bad += 1
        return bad

    def check_approximants():
        bad = 0
        for d in terms[:20]:
            for c in approx_generate(d, 2, 12, Fraction(1, 8)):
                if not any(approx_check(c, d, k, 12) for k in range(5)):
                    bad += 1
                if not sim_check(embed(c), d, SimParams(2, 12)).holds:
                    bad += 1
        return bad

    return [
        ("parse/print round-trip", check_roundtrip),
        ("reduction laws", check_reduction_laws),
        ("evolution linearity", check_linearity),
        ("lift flow vs subsets", check_lift_agreement),
        ("simulation basics", check_simulation),
        ("approximant soundness", check_approximants),
    ]


def _cmd_selftest(args, cfg):
    failures = 0
    passed = 0
    for name, fn in _selftest_checks(cfg):
        bad = fn()
        if bad:
            failures += 1
            print("FAIL %s (%d violations)" % (name, bad))
        else:
            passed += 1
            print("PASS %s" % name)
    print("%d passed, %d failed" % (passed, failures))
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Entry point


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="plamb",
        description="Probabilistic lazy lambda calculus workbench",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, depth=False, grain=False, slack=False, seed=False):
        p.add_argument("--fuel", type=int, default=64, help="parallel reduction steps per evolution")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if depth:
            p.add_argument("--depth", type=int, default=4)
        if grain:
            p.add_argument("--grain", default="1/16", help="granularity grid, a unit fraction")
        if slack:
            p.add_argument("--no-slack", action="store_true", help="disable residual-mass refutation slack")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("eval", help="evolve and print the value distribution")
    p.add_argument("expr")
    common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("trace", help="print one line per parallel step")
    p.add_argument("expr")
    common(p)
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("lts", help="print the weak transition fan-out")
    p.add_argument("expr")
    common(p)
    p.set_defaults(fn=_cmd_lts)

    p = sub.add_parser("sim", help="bounded simulation check")
    p.add_argument("left")
    p.add_argument("right")
    common(p, depth=True, slack=True)
    p.set_defaults(fn=_cmd_sim)

    p = sub.add_parser("bisim", help="bounded bisimulation check")
    p.add_argument("left")
    p.add_argument("right")
    common(p, depth=True, slack=True)
    p.set_defaults(fn=_cmd_bisim)

    p = sub.add_parser("lift", help="debug a lifting instance (JSON)")
    p.add_argument("instance", help="JSON text or file: {source, target, relation, slack?}")
    p.add_argument("--slack", default="0")
    common(p)
    p.set_defaults(fn=_cmd_lift)

    p = sub.add_parser("approx", help="generate or check finite approximants")
    p.add_argument("expr")
    p.add_argument("--check", help="file with a candidate approximant (`_|_` for bottom)")
    common(p, depth=True, grain=True)
    p.set_defaults(fn=_cmd_approx)

    p = sub.add_parser("normalize", help="report normalized value distributions per step")
    p.add_argument("expr")
    common(p)
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("selftest", help="run the bundled invariant battery")
    common(p, seed=True)
    p.set_defaults(fn=_cmd_selftest)

    return ap


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    cfg = Config(
        fuel=getattr(args, "fuel", 64),
        depth=getattr(args, "depth", 4),
        grain=Fraction(getattr(args, "grain", "1/16")),
        format=getattr(args, "format", "text"),
        seed=getattr(args, "seed", 0),
    )
    try:
        return args.fn(args, cfg)
    except LambError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
