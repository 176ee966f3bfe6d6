import random
from fractions import Fraction as F

import pytest

from conftest import gen_terminating
from plamb.approximants import (
    FIN_BOTTOM,
    FinAbs,
    FinDist,
    FinSpine,
    GranularityError,
    OMEGA,
    approx_check,
    approx_generate,
    embed,
    parse_fin,
    print_fin_dist,
)
from plamb.reduction import evolve
from plamb.simulation import SimParams, sim_check
from plamb.syntax import dist_scale, parse

YT = parse(r"Y (\x. {1/2: I, 1/2: x})")


class TestEmbed:
    def test_bottom_diverges(self):
        d = embed(FIN_BOTTOM)
        assert d == parse("omega")
        assert evolve(d, 20).values.is_empty()

    def test_abstraction(self):
        c = FinDist({FinAbs("x", FIN_BOTTOM): F(1, 2)})
        assert embed(c) == parse(r"{1/2: \x. omega}")

    def test_bare_spine(self):
        c = FinDist({FinSpine("y", ()): F(1)})
        assert embed(c) == parse("y")

    def test_spine_with_arguments(self):
        c = FinDist({FinSpine("y", (FIN_BOTTOM, FinDist({FinSpine("z", ()): F(1)}))): F(1)})
        assert embed(c) == parse("y (omega) z")


class TestApproxCheck:
    def test_bottom_at_index_zero(self):
        for src in (r"\x. x", "omega", "y z", "{}"):
            assert approx_check(FIN_BOTTOM, parse(src), 0, 4)
            assert approx_check(FinDist(), parse(src), 0, 4)

    def test_bottom_mixture_at_index_zero(self):
        assert approx_check(FinDist({OMEGA: F(1, 3)}), parse("{}"), 0, 4)

    def test_strictly_smaller_abstraction(self):
        c = FinDist({FinAbs("x", FIN_BOTTOM): F(1, 2)})
        assert approx_check(c, parse(r"\x. x"), 1, 1)

    def test_equal_weight_rejected(self):
        c = FinDist({FinAbs("x", FIN_BOTTOM): F(1)})
        for k in range(5):
            assert not approx_check(c, parse(r"\x. x"), k, 8)

    def test_non_bottom_needs_positive_index(self):
        c = FinDist({FinAbs("x", FIN_BOTTOM): F(1, 2)})
        assert not approx_check(c, parse(r"\x. x"), 0, 4)

    def test_spine_compatibility(self):
        c = parse_fin("{1/2: y _|_}")
        assert approx_check(c, parse("y tt"), 2, 4)
        assert not approx_check(c, parse("z tt"), 3, 4)
        assert not approx_check(c, parse("y"), 3, 4)

    def test_cumulative_in_index(self):
        for i in range(25):
            m = gen_terminating(random.Random(700 + i))
            for c in approx_generate(m, 2, 16, F(1, 8)):
                ok = [approx_check(c, m, k, 16) for k in range(5)]
                # once a membership index is reached it persists
                assert ok == sorted(ok)

    def test_splits_across_alpha_equal_mass(self):
        # two half-weight candidates against one full-weight value entry
        c = parse_fin("{1/4: \\x. _|_, 1/4: \\y. _|_}")
        assert approx_check(c, parse(r"\z. z"), 1, 2)


class TestApproxGenerate:
    def test_divergent_program_yields_bottoms(self):
        out = approx_generate(parse("omega"), 3, 8, F(1, 4))
        assert out == {FIN_BOTTOM, FinDist()}

    def test_identity_at_grain_quarter(self):
        out = approx_generate(parse(r"\x. x"), 1, 1, F(1, 4))
        assert parse_fin("{3/4: \\x. _|_}") in out

    def test_fixpoint_two_unfoldings(self):
        out = approx_generate(YT, 2, 6, F(1, 8))
        assert parse_fin("{5/8: \\x. _|_}") in out

    def test_granularity_must_be_unit_fraction(self):
        with pytest.raises(GranularityError):
            approx_generate(parse("I"), 1, 4, F(2, 3))

    def test_generated_pass_check(self):
        for i in range(40):
            m = gen_terminating(random.Random(800 + i))
            for c in approx_generate(m, 2, 16, F(1, 8)):
                assert any(approx_check(c, m, k, 16) for k in range(5)), (c, m)

    def test_generated_are_simulated(self):
        for i in range(30):
            m = gen_terminating(random.Random(850 + i))
            for c in approx_generate(m, 2, 16, F(1, 8)):
                v = sim_check(embed(c), m, SimParams(2, 16))
                assert v.holds, (c, m, v)

    def test_transfer_across_simulation(self):
        # approximants of a sub-distribution are approximants of the whole
        for i in range(20):
            n = gen_terminating(random.Random(880 + i))
            m = dist_scale(F(3, 4), n)
            sim = sim_check(m, n, SimParams(3, 16))
            if not (sim.holds and sim.exact):
                continue
            for c in approx_generate(m, 2, 16, F(1, 8)):
                assert any(approx_check(c, n, k, 16) for k in range(5)), (c, m, n)


class TestFinSyntax:
    def test_parse_bottom(self):
        assert parse_fin("_|_") == FIN_BOTTOM

    def test_roundtrip(self):
        for src in (
            "_|_",
            "{}",
            "{1/2: \\x. _|_}",
            "{5/8: \\x. {7/8: x}}",
            "y _|_ (z _|_)",
            "{1/4: y, 1/4: \\a. {1/2: b c}}",
        ):
            c = parse_fin(src)
            assert parse_fin(print_fin_dist(c)) == c

    def test_alpha_merging(self):
        assert parse_fin("{1/4: \\a. _|_, 1/4: \\b. _|_}") == parse_fin(
            "{1/2: \\z. _|_}"
        )
