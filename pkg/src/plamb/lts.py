"""Labelled transitions on weak head normal forms.

Labels record what a context can observe: internal steps (tau), convergence
to an abstraction (conv), calling the term with a fresh symbolic argument
(ret s), and the term invoking an unknown head variable at a given argument
position (call y i/n).  Index 0 of a call, by convention, targets the
identity and measures the weight of convergence to a head application of
that variable and arity, which in turn separates spines of different
lengths.

The applicative test folds the beta step into the transition: ``ret s`` on
``\\x. B`` goes straight to ``B[s/x]`` instead of to the application, since
the silent step would fire immediately anyway.
"""

from __future__ import annotations

from .syntax import Abs, LambError, Var, dist_scale, dist_union, EMPTY, unit
from .reduction import AbsView, SpineView, evolve, head_step, whnf_view

IDENTITY = Abs("x", unit(Var("x")))


class FreshNameCollisionError(LambError):
    """The supplied fresh symbol occurs free in the inspected term."""


class LabelNotApplicableError(LambError):
    """No entry of the distribution affords the requested label."""


class Label:
    __slots__ = ()


class _Tau(Label):
    __slots__ = ()

    def __repr__(self):
        return "tau"

    def __eq__(self, other):
        return isinstance(other, _Tau)

    def __hash__(self):
        return hash("tau")


class _Converge(Label):
    __slots__ = ()

    def __repr__(self):
        return "conv"

    def __eq__(self, other):
        return isinstance(other, _Converge)

    def __hash__(self):
        return hash("conv")


class Ret(Label):
    __slots__ = ("sym",)

    def __init__(self, sym):
        self.sym = sym

    def __repr__(self):
        return "ret %s" % self.sym

    def __eq__(self, other):
        return isinstance(other, Ret) and other.sym == self.sym

    def __hash__(self):
        return hash(("ret", self.sym))


class Call(Label):
    __slots__ = ("sym", "index", "arity")

    def __init__(self, sym, index, arity):
        if not 0 <= index <= arity:
            raise LambError("call index %d out of range 0..%d" % (index, arity))
        self.sym = sym
        self.index = index
        self.arity = arity

    def __repr__(self):
        return "call %s %d/%d" % (self.sym, self.index, self.arity)

    def __eq__(self, other):
        return (
            isinstance(other, Call)
            and other.sym == self.sym
            and other.index == self.index
            and other.arity == self.arity
        )

    def __hash__(self):
        return hash(("call", self.sym, self.index, self.arity))


TAU = _Tau()
CONVERGE = _Converge()


class Transition:
    __slots__ = ("label", "target")

    def __init__(self, label, target):
        self.label = label
        self.target = target

    def __repr__(self):
        return "%r -> %r" % (self.label, self.target)


def strong_transitions(t, fresh):
    """All strong transitions of a term, at unit weight.

    Internal reduction takes priority: a reducible term has exactly one tau
    transition.  Abstractions afford conv and ret; spines afford the call
    family of their head and arity.  Callers scale targets by entry weights
    when lifting to distributions.
    """
    if fresh in t.free_names():
        raise FreshNameCollisionError("%r occurs free in the term" % fresh)
    view = whnf_view(t)
    if view is None:
        return [Transition(TAU, head_step(t))]
    if isinstance(view, AbsView):
        return [
            Transition(CONVERGE, unit(IDENTITY)),
            Transition(Ret(fresh), _apply_ret(view, fresh)),
        ]
    n = len(view.args)
    out = [Transition(Call(view.head, 0, n), unit(IDENTITY))]
    for i in range(1, n + 1):
        out.append(Transition(Call(view.head, i, n), view.args[i - 1]))
    return out


def _apply_ret(view, sym):
    from .syntax import subst

    return subst(view.body, view.binder, unit(Var(sym)))


def _affords(view, label):
    if isinstance(view, AbsView):
        return isinstance(label, (Ret, _Converge))
    if isinstance(view, SpineView):
        return (
            isinstance(label, Call)
            and label.sym == view.head
            and label.arity == len(view.args)
        )
    return False


def label_target(t, label):
    """Target of a visible label on a whnf term, at unit weight, or None
    when the term does not afford the label."""
    view = whnf_view(t)
    if view is None or not _affords(view, label):
        return None
    if isinstance(label, _Converge):
        return unit(IDENTITY)
    if isinstance(label, Ret):
        if label.sym in t.free_names():
            raise FreshNameCollisionError(
                "%r occurs free in the term" % label.sym
            )
        return _apply_ret(view, label.sym)
    if label.index == 0:
        return unit(IDENTITY)
    return view.args[label.index - 1]


def weak_max_transition(d, label, fuel):
    """The unique weak max transition of a distribution under a label.

    tau evolves the distribution.  A visible label applies to every whnf
    entry affording it, scaled by entry weight, and the combined target is
    then evolved; the result is deterministic.
    """
    if label == TAU:
        return evolve(d, fuel)
    combined = EMPTY
    hit = False
    for t, w in d.entries():
        target = label_target(t, label)
        if target is not None:
            hit = True
            combined = dist_union(combined, dist_scale(w, target))
    if not hit:
        raise LabelNotApplicableError("no entry affords %r" % label)
    return evolve(combined, fuel)


def available_labels(d, fresh):
    """Visible labels afforded by the whnf entries of ``d``, deterministic
    order: conv/ret first when abstractions are present, then call families
    per (head, arity)."""
    labels = []
    have_abs = False
    call_sigs = []
    for t, _ in d.entries():
        view = whnf_view(t)
        if isinstance(view, AbsView):
            have_abs = True
        elif isinstance(view, SpineView):
            sig = (view.head, len(view.args))
            if sig not in call_sigs:
                call_sigs.append(sig)
    if have_abs:
        labels.append(CONVERGE)
        labels.append(Ret(fresh))
    for head, arity in sorted(call_sigs):
        for i in range(arity + 1):
            labels.append(Call(head, i, arity))
    return labels
