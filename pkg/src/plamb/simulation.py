"""Bounded open simulation and bisimulation with counterexample witnesses.

The check is stratified by depth: depth 0 relates everything, and depth k
compares the fuel-evolved value distributions of the two sides, splitting
each into one abstraction block plus one point per open-application spine.
The abstraction block is compared by convergence mass and by recursing at
depth k-1 on the bodies applied to a shared fresh symbol (abstraction is
linear with respect to formal sums, so a single block is sound and
complete).  Spine points are compared by an exact max-flow matching whose
edges require equal head and arity and, for every argument position, a
nested check at the same depth; merging spine points instead would conflate
behaviorally different sums, so they stay separate.

Depth therefore counts applicative (ret) unfoldings; spine argument edges
do not consume depth, and re-entrant argument comparisons (possible only
through recursive spines) are resolved coinductively by assuming the
in-progress pair holds.  Both choices only ever add "no counterexample"
outcomes; every refutation remains a genuine one.

Refutation slack: mass still unreduced on the target side could later
become value mass of any shape, so it is added as an allowance to every
mass comparison at the current level and threaded down the ret recursion.
Residual mass whose trajectory provably cycles (for example the pure
divergent loop) can never convert and contributes no slack, which is what
makes divergence refutable.  A verdict with ``exact=True`` had zero
residual everywhere and decides its stratum precisely; a non-exact
``NoCounterexample`` deliberately claims nothing beyond "no counterexample
at these bounds".
"""

from __future__ import annotations

import enum

from .lifting import FinSupportDist, lift_check_flow
from .lts import Ret
from .reduction import AbsView, SpineView, evolve, whnf_view
from .syntax import (
    EMPTY,
    LambError,
    Var,
    ZERO,
    dist_scale,
    dist_union,
    fresh_name,
    subst,
    unit,
)


class SimParams:
    """Bounds for a simulation check: stratum depth, evolve fuel per level,
    and whether residual mass grants refutation slack (default yes)."""

    __slots__ = ("depth", "fuel", "slack_enabled")

    def __init__(self, depth, fuel, slack_enabled=True):
        if depth < 0 or fuel < 0:
            raise LambError("depth and fuel must be nonnegative")
        self.depth = depth
        self.fuel = fuel
        self.slack_enabled = slack_enabled

    def __repr__(self):
        return "SimParams(depth=%d, fuel=%d, slack_enabled=%s)" % (
            self.depth,
            self.fuel,
            self.slack_enabled,
        )


class WitnessKind(enum.Enum):
    CONVERGE_DEFICIT = "ConvergeDeficit"
    KERNEL_TYPE_MISMATCH = "KernelTypeMismatch"
    FLOW_DEFICIT = "FlowDeficit"


class Witness:
    """Replayable refutation: the labels taken from the root pair to the
    failing comparison, which test failed, the violating source entries,
    and the exact mass deficit after slack."""

    __slots__ = ("path", "kind", "cut", "deficit")

    def __init__(self, path, kind, cut, deficit):
        self.path = tuple(path)
        self.kind = kind
        self.cut = tuple(cut)
        self.deficit = deficit

    def prepend(self, label):
        return Witness((label,) + self.path, self.kind, self.cut, self.deficit)

    def __repr__(self):
        return "Witness(path=%r, kind=%s, deficit=%s, cut=%r)" % (
            list(self.path),
            self.kind.value,
            self.deficit,
            list(self.cut),
        )

    def to_dict(self):
        return {
            "path": [str(l) for l in self.path],
            "kind": self.kind.value,
            "deficit": str(self.deficit),
            "cut": [repr(t) for t in self.cut],
        }


class Verdict:
    __slots__ = ()

    @property
    def holds(self):
        raise NotImplementedError


class NoCounterexample(Verdict):
    """No test failed within the bounds.  Asserts the simulation stratum
    only when ``exact`` is true; otherwise it is an honest "not refuted"."""

    __slots__ = ("params", "exact")

    def __init__(self, params, exact):
        self.params = params
        self.exact = exact

    @property
    def holds(self):
        return True

    def __repr__(self):
        return "NoCounterexample(%r, exact=%s)" % (self.params, self.exact)

    def to_dict(self):
        return {
            "holds_at_bound": True,
            "exact": self.exact,
            "depth": self.params.depth,
            "fuel": self.params.fuel,
            "witness": None,
        }


class Refuted(Verdict):
    __slots__ = ("params", "witness")

    def __init__(self, params, witness):
        self.params = params
        self.witness = witness

    @property
    def holds(self):
        return False

    def __repr__(self):
        return "Refuted(%r)" % (self.witness,)

    def to_dict(self):
        return {
            "holds_at_bound": False,
            "exact": False,
            "depth": self.params.depth,
            "fuel": self.params.fuel,
            "witness": self.witness.to_dict(),
        }


class _SimState:
    __slots__ = ("fuel", "slack_enabled", "memo", "inprog")

    def __init__(self, fuel, slack_enabled):
        self.fuel = fuel
        self.slack_enabled = slack_enabled
        self.memo = {}
        self.inprog = set()


def _split_values(values):
    """Decompose a value distribution into the abstraction block and the
    spine points (term, weight, view)."""
    abs_entries = []
    spine_entries = []
    for t, w in values.entries():
        view = whnf_view(t)
        if isinstance(view, AbsView):
            abs_entries.append((t, w, view))
        elif isinstance(view, SpineView):
            spine_entries.append((t, w, view))
    return abs_entries, spine_entries


def _ret_block(abs_entries, sym):
    """Bodies of an abstraction block applied to a shared fresh symbol,
    combined with their weights."""
    out = EMPTY
    arg = unit(Var(sym))
    for _, w, view in abs_entries:
        out = dist_union(out, dist_scale(w, subst(view.body, view.binder, arg)))
    return out


def _sim(st, m, n, k, slack_in):
    """Returns (witness or None, exact).  Witness paths are relative to
    this pair; callers prepend their own label."""
    if k == 0:
        return None, True
    key = (m.canon(), n.canon(), k, slack_in)
    if key in st.memo:
        return st.memo[key]
    if key in st.inprog:
        # re-entrant pair within a stratum: coinductive assumption
        return None, True
    st.inprog.add(key)
    try:
        result = _sim_level(st, m, n, k, slack_in)
    finally:
        st.inprog.discard(key)
    st.memo[key] = result
    return result


def _sim_level(st, m, n, k, slack_in):
    rm = evolve(m, st.fuel)
    rn = evolve(n, st.fuel)
    exact = rm.residual == 0 and rn.residual == 0
    live = ZERO if rn.limit_exact else rn.residual
    slack = slack_in + live if st.slack_enabled else ZERO

    d_abs, d_app = _split_values(rm.values)
    e_abs, e_app = _split_values(rn.values)

    # (a) abstraction block: convergence mass, then the shared applicative test
    d_abs_mass = sum((w for _, w, _ in d_abs), ZERO)
    e_abs_mass = sum((w for _, w, _ in e_abs), ZERO)
    if d_abs_mass > e_abs_mass + slack:
        wit = Witness(
            (),
            WitnessKind.CONVERGE_DEFICIT,
            tuple(t for t, _, _ in d_abs),
            d_abs_mass - e_abs_mass - slack,
        )
        return wit, exact
    if d_abs:
        sym = fresh_name(_block_names(d_abs) | _block_names(e_abs))
        d_body = _ret_block(d_abs, sym)
        e_body = _ret_block(e_abs, sym)
        wit, sub_exact = _sim(st, d_body, e_body, k - 1, slack)
        exact = exact and sub_exact
        if wit is not None:
            return wit.prepend(Ret(sym)), exact

    # (b) spine points, matched by exact max flow over same-head edges
    if d_app:
        points_d = {t.canon(): (t, w, view) for t, w, view in d_app}
        points_e = {t.canon(): (t, w, view) for t, w, view in e_app}
        fd = FinSupportDist(
            list(points_d), [points_d[c][1] for c in points_d]
        )
        fe = FinSupportDist(
            list(points_e), [points_e[c][1] for c in points_e]
        )
        edges = set()
        for cu, (tu, _, vu) in points_d.items():
            for cv, (tv, _, vv) in points_e.items():
                ok, sub_exact = _edge(st, vu, vv, k)
                exact = exact and sub_exact
                if ok:
                    edges.add((cu, cv))
        verdict = lift_check_flow(fd, fe, edges, slack)
        if not verdict.holds:
            kind = (
                WitnessKind.KERNEL_TYPE_MISMATCH
                if not e_app
                else WitnessKind.FLOW_DEFICIT
            )
            cut = tuple(points_d[c][0] for c in sorted(verdict.witness_cut))
            return Witness((), kind, cut, verdict.deficit), exact
    return None, exact


def _block_names(entries):
    names = set()
    for t, _, _ in entries:
        names |= t.free_names()
    return names


def _edge(st, vu, vv, k):
    """Edge predicate between two spine views: same head, same arity, and
    every argument pair passes at the current depth and unit scale."""
    if vu.head != vv.head or len(vu.args) != len(vv.args):
        return False, True
    exact = True
    for au, av in zip(vu.args, vv.args):
        wit, sub_exact = _sim(st, au, av, k, ZERO)
        exact = exact and sub_exact
        if wit is not None:
            return False, exact
    return True, exact


def sim_check(m, n, params):
    """Bounded simulation check of ``m`` against ``n``.

    ``Refuted`` is always sound: the witness replays to a genuine mass
    deficit that no continuation of the target's unreduced mass could
    cover.  ``NoCounterexample`` decides the stratum only when exact.
    """
    st = _SimState(params.fuel, params.slack_enabled)
    wit, exact = _sim(st, m, n, params.depth, ZERO)
    if wit is None:
        return NoCounterexample(params, exact)
    return Refuted(params, wit)


def bisim_check(m, n, params):
    """Both simulation directions; bisimilar at the bound iff both hold."""
    return sim_check(m, n, params), sim_check(n, m, params)


def app_edge(u, v, k, fuel):
    """Public edge predicate on two whnf spine terms: equal head and arity
    and argument-wise simulation at depth ``k`` and unit scale."""
    vu = whnf_view(u)
    vv = whnf_view(v)
    if not isinstance(vu, SpineView) or not isinstance(vv, SpineView):
        raise LambError("app_edge expects open-application spines")
    st = _SimState(fuel, True)
    ok, _ = _edge(st, vu, vv, k)
    return ok
