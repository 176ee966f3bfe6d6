"""Finite approximants of program behavior.

An approximant is a finite tree over a bottom element, abstractions, and
open applications, with rational weights.  ``approx_check`` decides
fuel-bounded membership at an index k: the candidate's non-bottom mass must
match strictly below the evolved value mass of the program (strictly, on
every relation-closed subset), with bodies and spine arguments checked
recursively one index down.  Bottom entries need no support at all, so the
bottom-only candidates approximate every program at every index.

``approx_generate`` produces approximants constructively: evolve, truncate
the value trees at a depth, and round every weight strictly down to a
granularity grid.  Strict rounding realizes the strict inequalities of the
membership rules, so generated candidates always pass the check.
"""

from __future__ import annotations

from fractions import Fraction

from .syntax import (
    Abs,
    App,
    Dist,
    LambError,
    Term,
    Var,
    ZERO,
    check_name,
    check_weight,
    parse as _parse_lambda,
    unit,
)
from .reduction import AbsView, SpineView, evolve, whnf_view


class GranularityError(LambError):
    """Generation granularity must be a unit fraction 1/g."""


# ---------------------------------------------------------------------------
# Finite terms and distributions


class FinTerm:
    __slots__ = ()

    def __repr__(self):
        return print_fin_term(self)


class Omega(FinTerm):
    __slots__ = ("_hash",)

    def __init__(self):
        self._hash = None

    def canon(self):
        return ("o",)

    def free_names(self):
        return frozenset()

    def __eq__(self, other):
        return isinstance(other, Omega)

    def __hash__(self):
        return hash(("o",))


OMEGA = Omega()


class FinAbs(FinTerm):
    __slots__ = ("binder", "body", "_canon")

    def __init__(self, binder, body):
        self.binder = check_name(binder)
        if not isinstance(body, FinDist):
            raise LambError("FinAbs body must be a FinDist")
        self.body = body
        self._canon = None

    def canon(self):
        if self._canon is None:
            self._canon = _canon_fin(self, {}, 0)
        return self._canon

    def free_names(self):
        return self.body.free_names() - {self.binder}

    def __eq__(self, other):
        return (
            isinstance(other, FinAbs)
            and other.binder == self.binder
            and other.body == self.body
        )

    def __hash__(self):
        return hash(("fl", self.binder, self.body))


class FinSpine(FinTerm):
    __slots__ = ("head", "args", "_canon")

    def __init__(self, head, args):
        self.head = check_name(head)
        self.args = tuple(args)
        if not all(isinstance(a, FinDist) for a in self.args):
            raise LambError("FinSpine arguments must be FinDists")
        self._canon = None

    def canon(self):
        if self._canon is None:
            self._canon = _canon_fin(self, {}, 0)
        return self._canon

    def free_names(self):
        names = {self.head}
        for a in self.args:
            names |= a.free_names()
        return frozenset(names)

    def __eq__(self, other):
        return (
            isinstance(other, FinSpine)
            and other.head == self.head
            and other.args == self.args
        )

    def __hash__(self):
        return hash(("fs", self.head, self.args))


def _canon_fin(t, env, depth):
    if isinstance(t, Omega):
        return ("o",)
    if isinstance(t, FinAbs):
        inner = dict(env)
        inner[t.binder] = depth
        return ("l", _canon_fin_dist(t.body, inner, depth + 1))
    if isinstance(t, FinSpine):
        lvl = env.get(t.head)
        head = ("f", t.head) if lvl is None else ("b", lvl)
        return ("s", head) + tuple(_canon_fin_dist(a, env, depth) for a in t.args)
    raise LambError("not a finite term: %r" % (t,))


def _canon_fin_dist(d, env, depth):
    return ("d",) + tuple(
        sorted((_canon_fin(t, env, depth), w) for t, w in d.entries())
    )


class FinDist:
    """Finite map from finite terms to rational weights, total mass <= 1,
    alpha-equivalent keys merged."""

    __slots__ = ("_entries", "_canon", "_mass", "_hash")

    def __init__(self, pairs=()):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        merged = {}
        display = {}
        for t, w in pairs:
            if not isinstance(t, FinTerm):
                raise LambError("FinDist key must be a FinTerm: %r" % (t,))
            w = check_weight(w)
            if w == 0:
                continue
            key = t.canon()
            if key in merged:
                merged[key] += w
            else:
                merged[key] = w
                display[key] = t
        mass = sum(merged.values(), ZERO)
        if mass > 1:
            raise LambError("total mass %s exceeds 1" % mass)
        keys = sorted(merged)
        self._entries = tuple((display[k], merged[k]) for k in keys)
        self._canon = ("d",) + tuple((k, merged[k]) for k in keys)
        self._mass = mass
        self._hash = None

    def entries(self):
        return self._entries

    def mass(self):
        return self._mass

    def canon(self):
        return self._canon

    def free_names(self):
        names = frozenset()
        for t, _ in self._entries:
            names |= t.free_names()
        return names

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        return isinstance(other, FinDist) and other._canon == self._canon

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._canon)
        return self._hash

    def __repr__(self):
        return print_fin_dist(self)


FIN_EMPTY = FinDist()
FIN_BOTTOM = FinDist(((OMEGA, Fraction(1)),))


def print_fin_term(t):
    if isinstance(t, Omega):
        return "_|_"
    if isinstance(t, FinAbs):
        return "\\%s. %s" % (t.binder, print_fin_dist(t.body))
    if isinstance(t, FinSpine):
        if not t.args:
            return t.head
        return " ".join([t.head] + [_fin_atom(a) for a in t.args])
    raise LambError("not a finite term: %r" % (t,))


def _fin_atom(d):
    e = d.entries()
    if len(e) == 1 and e[0][1] == 1:
        t = e[0][0]
        if isinstance(t, Omega):
            return "_|_"
        if isinstance(t, FinSpine) and not t.args:
            return t.head
    return "(%s)" % print_fin_dist(d)


def print_fin_dist(d):
    e = d.entries()
    if not e:
        return "{}"
    if len(e) == 1 and e[0][1] == 1:
        return print_fin_term(e[0][0])
    return "{%s}" % ", ".join(
        "%s: %s" % (w, print_fin_term(t)) for t, w in e
    )


# ---------------------------------------------------------------------------
# Embedding into the full calculus

_DIVERGE_SRC = r"(\x. x x) (\x. x x)"


def _diverge_term():
    return _parse_lambda(_DIVERGE_SRC, prelude={}).entries()[0][0]


def embed(c):
    """Structural image of a finite distribution in the full calculus, with
    the bottom element mapped to the divergent self-application."""
    return Dist((_embed_term(t), w) for t, w in c.entries())


def _embed_term(t):
    if isinstance(t, Omega):
        return _diverge_term()
    if isinstance(t, FinAbs):
        return Abs(t.binder, embed(t.body))
    if isinstance(t, FinSpine):
        if not t.args:
            return Var(t.head)
        d = unit(Var(t.head))
        term = None
        for a in t.args:
            term = App(d, embed(a))
            d = unit(term)
        return term
    raise LambError("not a finite term: %r" % (t,))


# ---------------------------------------------------------------------------
# Membership

def approx_check(c, m, k, fuel):
    """Fuel-bounded membership of candidate ``c`` at index ``k``.

    Bottom-only candidates pass at any index.  Otherwise the evolved value
    mass of ``m`` must strictly dominate the candidate on every closed
    subset (the strict matching realizes the strict weight inequalities of
    the membership rules), with bodies and arguments checked at k-1.
    """
    if not isinstance(c, FinDist):
        raise LambError("candidate must be a FinDist")
    non_bottom = [(t, w) for t, w in c.entries() if not isinstance(t, Omega)]
    if not non_bottom:
        return True
    if k <= 0:
        return False
    values = evolve(m, fuel).values
    targets = values.entries()
    edges = {}
    for i, (ct, _) in enumerate(non_bottom):
        for j, (wt, _) in enumerate(targets):
            if _compat(ct, wt, k, fuel):
                edges.setdefault(i, set()).add(j)
    return _strict_match(
        [w for _, w in non_bottom], [w for _, w in targets], edges
    )


def _strict_match(supplies, demands, edges):
    """Strict Hall criterion: every nonempty subset of sources must weigh
    strictly less than its neighborhood's capacity."""
    n = len(supplies)
    for mask in range(1, 1 << n):
        srcs = [i for i in range(n) if mask >> i & 1]
        nbhd = set()
        for i in srcs:
            nbhd |= edges.get(i, set())
        if sum(supplies[i] for i in srcs) >= sum(
            (demands[j] for j in nbhd), ZERO
        ):
            return False
    return True


def _compat(ct, wt, k, fuel):
    view = whnf_view(wt)
    if isinstance(ct, FinAbs) and isinstance(view, AbsView):
        avoid = ct.free_names() | wt.free_names()
        sym = _fresh(avoid)
        cbody = fin_subst_head(ct.body, ct.binder, sym)
        from .syntax import subst

        wbody = subst(view.body, view.binder, unit(Var(sym)))
        return approx_check(cbody, wbody, k - 1, fuel)
    if isinstance(ct, FinSpine) and isinstance(view, SpineView):
        if ct.head != view.head or len(ct.args) != len(view.args):
            return False
        return all(
            approx_check(ca, wa, k - 1, fuel)
            for ca, wa in zip(ct.args, view.args)
        )
    return False


def _fresh(avoid):
    i = 0
    while "#%d" % i in avoid:
        i += 1
    return "#%d" % i


def fin_subst_head(d, v, sym):
    """Rename free occurrences of ``v`` (spine heads) to ``sym``."""
    return FinDist((_fin_rename(t, v, sym), w) for t, w in d.entries())


def _fin_rename(t, v, sym):
    if isinstance(t, Omega):
        return t
    if isinstance(t, FinAbs):
        if t.binder == v:
            return t
        return FinAbs(t.binder, fin_subst_head(t.body, v, sym))
    if isinstance(t, FinSpine):
        head = sym if t.head == v else t.head
        return FinSpine(head, tuple(fin_subst_head(a, v, sym) for a in t.args))
    raise LambError("not a finite term: %r" % (t,))


# ---------------------------------------------------------------------------
# Generation

def approx_generate(m, k, fuel, granularity):
    """Truncate-and-round approximants of ``m``.

    Evolves with ``fuel``, truncates each value tree to depths 0..k
    (deeper or still-reducible structure becomes bottom), and rounds every
    weight strictly down to the largest multiple of ``granularity`` (a unit
    fraction 1/g) strictly below it, dropping entries that reach zero.
    Returns the set of distinct results plus the canonical bottom.
    """
    g = _grid_denominator(granularity)
    values = evolve(m, fuel).values
    out = {FIN_BOTTOM}
    for depth in range(k + 1):
        out.add(_round_down(_truncate_dist(values, depth), g))
    return out


def _grid_denominator(granularity):
    granularity = Fraction(granularity)
    if granularity <= 0 or granularity.numerator != 1:
        raise GranularityError(
            "granularity must be a unit fraction, got %s" % granularity
        )
    return granularity.denominator


def _truncate_dist(d, depth):
    return FinDist((_truncate_term(t, depth), w) for t, w in d.entries())


def _truncate_term(t, depth):
    if depth <= 0:
        return OMEGA
    view = whnf_view(t)
    if isinstance(view, AbsView):
        return FinAbs(view.binder, _truncate_dist(view.body, depth - 1))
    if isinstance(view, SpineView):
        return FinSpine(
            view.head, tuple(_truncate_dist(a, depth - 1) for a in view.args)
        )
    return OMEGA


def _round_down(c, g):
    # bottom entries need no supporting mass, so their weights stay put;
    # every other weight moves strictly below its grid cell
    pairs = []
    for t, w in c.entries():
        if isinstance(t, Omega):
            pairs.append((t, w))
            continue
        r = Fraction(-(-w.numerator * g // w.denominator) - 1, g)
        if r > 0:
            pairs.append((_round_term(t, g), r))
    return FinDist(pairs)


def _round_term(t, g):
    if isinstance(t, Omega):
        return t
    if isinstance(t, FinAbs):
        return FinAbs(t.binder, _round_down(t.body, g))
    if isinstance(t, FinSpine):
        return FinSpine(t.head, tuple(_round_down(a, g) for a in t.args))
    raise LambError("not a finite term: %r" % (t,))


# ---------------------------------------------------------------------------
# Concrete syntax for candidates (the full grammar plus the `_|_` atom)

def parse_fin(src):
    """Parse a finite-approximant distribution; ``_|_`` denotes bottom."""
    from .syntax import _tokenize

    p = _FinParser(_tokenize(src))
    d = p.fin_dist()
    if not p.at_kind("eof"):
        p.fail("trailing input after distribution")
    return d


from .syntax import _Parser as _BaseParser


class _FinParser(_BaseParser):
    def fin_dist(self):
        if self.at("{"):
            _, _, line, col = self.next()
            if self.at("}"):
                self.next()
                return FIN_EMPTY
            pairs = []
            while True:
                w = self.weight()
                self.expect(":")
                t = self.fin_term()
                pairs.append((t, w))
                if self.at(","):
                    self.next()
                    continue
                self.expect("}")
                break
            return FinDist(pairs)
        return FinDist(((self.fin_term(), Fraction(1)),))

    def fin_term(self):
        if self.at("_") and self._bottom_ahead():
            self._eat_bottom()
            return OMEGA
        if self.at("\\"):
            self.next()
            if not self.at_kind("name"):
                self.fail("expected a binder name")
            _, name, _, _ = self.next()
            self.expect(".")
            return FinAbs(name, self.fin_dist())
        if self.at_kind("name"):
            _, head, _, _ = self.next()
            args = []
            while True:
                if self.at("("):
                    self.next()
                    d = self.fin_dist()
                    self.expect(")")
                    args.append(d)
                elif self.at("_") and self._bottom_ahead():
                    self._eat_bottom()
                    args.append(FIN_BOTTOM)
                elif self.at_kind("name"):
                    _, nm, _, _ = self.next()
                    args.append(FinDist(((FinSpine(nm, ()), Fraction(1)),)))
                else:
                    break
            return FinSpine(head, tuple(args))
        self.fail("expected a finite term")

    def _bottom_ahead(self):
        return (
            self.tokens[self.i][1] == "_"
            and self.tokens[self.i + 1][1] == "|"
            and self.tokens[self.i + 2][1] == "_"
        )

    def _eat_bottom(self):
        self.next()
        self.next()
        self.next()
