"""Shared term generators for the property and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

import hypothesis.strategies as st

from plamb.syntax import Abs, App, Dist, Var
from plamb.reduction import evolve

GRID8 = [Fraction(i, 8) for i in range(1, 9)]
FREE_NAMES = ("u", "v", "w")
BINDERS = ("a", "b", "c")


def gen_term(rng, depth, bound=()):
    kinds = ["var"]
    if depth > 0:
        kinds += ["abs", "abs", "app", "app"]
    kind = rng.choice(kinds)
    if kind == "var":
        pool = tuple(bound) + FREE_NAMES
        return Var(rng.choice(pool))
    if kind == "abs":
        b = rng.choice(BINDERS)
        return Abs(b, gen_dist(rng, depth - 1, tuple(bound) + (b,)))
    return App(gen_dist(rng, depth - 1, bound), gen_dist(rng, depth - 1, bound))


def gen_dist(rng, depth, bound=()):
    n = rng.choice((1, 1, 1, 2, 2, 3))
    pairs = [(gen_term(rng, depth, bound), rng.choice(GRID8)) for _ in range(n)]
    total = sum(w for _, w in pairs)
    if total > 1:
        pairs = [(t, w / total) for t, w in pairs]
    return Dist(pairs)


def gen_terminating(rng, depth=3, fuel=32, tries=50):
    for _ in range(tries):
        d = gen_dist(rng, depth)
        if evolve(d, fuel).converged:
            return d
    raise AssertionError("could not generate a terminating distribution")


# hypothesis strategies built over the seeded generator: deterministic
# per-example and cheap, at the cost of weaker shrinking


@st.composite
def dists(draw, depth=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return gen_dist(random.Random(seed), depth)


@st.composite
def terminating_dists(draw, depth=3, fuel=32):
    seed = draw(st.integers(0, 2**32 - 1))
    return gen_terminating(random.Random(seed), depth, fuel)
