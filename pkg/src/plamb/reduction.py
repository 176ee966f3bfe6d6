"""Lazy reduction of weighted term distributions.

Reduction stops at weak head normal forms: abstractions and open spines
``x M1 ... Mn``.  One parallel step rewrites every non-whnf component of a
distribution by a single head reduction; fuel counts parallel steps.
``evolve`` iterates the step and reports the value mass found, the residual
mass still unreduced, and whether the residual is provably inert (the
trajectory reached a fixpoint or a cycle, so no further value mass can ever
appear).

The parallel step and any sequential one-redex-at-a-time schedule reach the
same value distribution in the limit; ``step_entry``/``evolve_sequential``
provide the reference schedule used by the property suite.
"""

from __future__ import annotations

from .syntax import Abs, App, Dist, LambError, Var, ZERO, subst, unit


class AbsView:
    """Weak head normal form ``\\binder. body``."""

    __slots__ = ("binder", "body")

    def __init__(self, binder, body):
        self.binder = binder
        self.body = body


class SpineView:
    """Weak head normal form ``head arg1 ... argn``; a bare variable has an
    empty argument vector."""

    __slots__ = ("head", "args")

    def __init__(self, head, args):
        self.head = head
        self.args = tuple(args)


def whnf_view(t):
    """Classify a term: AbsView, SpineView, or None when it is reducible.

    A spine requires every operator position to be a weight-1 singleton
    down to the head variable; anything else (head redex, sub-unit or
    non-singleton operator) is not a weak head normal form.
    """
    if isinstance(t, Abs):
        return AbsView(t.binder, t.body)
    if isinstance(t, Var):
        return SpineView(t.name, ())
    if isinstance(t, App):
        args = [t.arg]
        fun = t.fun
        while True:
            e = fun.entries()
            if len(e) != 1 or e[0][1] != 1:
                return None
            head = e[0][0]
            if isinstance(head, Var):
                args.reverse()
                return SpineView(head.name, args)
            if isinstance(head, Abs):
                return None
            args.append(head.arg)
            fun = head.fun
    raise LambError("not a term: %r" % (t,))


def is_whnf(t):
    return whnf_view(t) is not None


def head_step(t):
    """One head reduction of a non-whnf term, as a distribution.

    Beta for a unit-singleton abstraction operator, left-linearity when the
    operator distribution is not a unit singleton (this is where mass can
    leak), and the context rule pushing into the operator otherwise.
    """
    if not isinstance(t, App):
        raise LambError("head_step on a weak head normal form")
    e = t.fun.entries()
    if len(e) == 1 and e[0][1] == 1:
        m = e[0][0]
        if isinstance(m, Abs):
            return subst(m.body, m.binder, t.arg)
        if isinstance(m, App):
            return unit(App(head_step(m), t.arg))
        raise LambError("head_step on a weak head normal form")
    return Dist(
        (App(unit(m), t.arg), w) for m, w in e
    )


def step(d):
    """One parallel step: every non-whnf entry is replaced by its head
    reduction scaled by its weight; whnf entries pass through."""
    pairs = []
    for t, w in d.entries():
        if is_whnf(t):
            pairs.append((t, w))
        else:
            for rt, rw in head_step(t).entries():
                pairs.append((rt, w * rw))
    return Dist(pairs)


def vals(d):
    """Sub-distribution of ``d`` supported on weak head normal forms."""
    return Dist((t, w) for t, w in d.entries() if is_whnf(t))


class EvolveReport:
    """Result of a fuel-bounded evolution.

    ``converged`` means residual mass is zero, in which case ``values`` is
    exactly the big-step value distribution.  ``limit_exact`` additionally
    covers trajectories that reached a fixpoint or cycle: the residual can
    then never convert to value mass, so ``values`` is still the exact
    limit even though mass is missing.
    """

    __slots__ = ("values", "residual", "steps_used", "converged", "limit_exact")

    def __init__(self, values, residual, steps_used, converged, limit_exact):
        self.values = values
        self.residual = residual
        self.steps_used = steps_used
        self.converged = converged
        self.limit_exact = limit_exact

    def __repr__(self):
        return "EvolveReport(values=%r, residual=%s, steps_used=%d, converged=%s)" % (
            self.values,
            self.residual,
            self.steps_used,
            self.converged,
        )


def evolve(d, fuel):
    """Iterate the parallel step up to ``fuel`` times, stopping early when
    all mass is on values or the trajectory repeats."""
    cur = d
    seen = {cur: 0}
    steps = 0
    cycled = False
    for _ in range(fuel):
        v = vals(cur)
        if v.mass() == cur.mass():
            break
        nxt = step(cur)
        steps += 1
        cur = nxt
        if cur in seen:
            cycled = True
            break
        seen[cur] = steps
    v = vals(cur)
    residual = cur.mass() - v.mass()
    converged = residual == 0
    return EvolveReport(v, residual, steps, converged, converged or cycled)


def step_entry(d, index):
    """Reference sequential step: reduce only the ``index``-th non-whnf
    entry (canonical order) by one head reduction."""
    pairs = []
    seen = -1
    fired = False
    for t, w in d.entries():
        if not is_whnf(t):
            seen += 1
            if seen == index:
                fired = True
                for rt, rw in head_step(t).entries():
                    pairs.append((rt, w * rw))
                continue
        pairs.append((t, w))
    if not fired:
        raise LambError("no non-whnf entry at index %d" % index)
    return Dist(pairs)


def evolve_sequential(d, max_steps, rng=None):
    """Evolve by single-entry steps in an arbitrary (optionally random)
    order; used to cross-check confluence of the parallel step."""
    cur = d
    for steps in range(max_steps):
        pending = sum(1 for t, _ in cur.entries() if not is_whnf(t))
        if pending == 0:
            return EvolveReport(vals(cur), ZERO, steps, True, True)
        index = rng.randrange(pending) if rng is not None else 0
        cur = step_entry(cur, index)
    v = vals(cur)
    residual = cur.mass() - v.mass()
    return EvolveReport(v, residual, max_steps, residual == 0, residual == 0)
