import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memlab import (GameParams, SpaceBudget, YExperiment, binomial_tail_exact,
                    chernoff_tail, generate_valid_input, monte_carlo_wrap,
                    multi_pass_play, relent, unique_pairs,
                    unique_pairs_expected, unique_pairs_expected_enumerated,
                    unique_pairs_mc, y_exact_distribution, y_expectation,
                    y_sample, y_sample_many, y_sample_size, y_tail_bound,
                    y_tail_estimate, y_tail_exact)
from memlab.strategies import MultiPass, randomized_order


def _y_distribution_by_subsets(n, r):
    """Oracle: enumerate all C(2n, r) draws and count completed pairs."""
    from collections import Counter
    tally = Counter()
    total = 0
    for subset in itertools.combinations(range(2 * n), r):
        pairs = Counter(idx >> 1 for idx in subset)
        tally[sum(1 for c in pairs.values() if c == 2)] += 1
        total += 1
    return [Fraction(tally.get(u, 0), total) for u in range(r // 2 + 1)]


class TestYSample:
    def test_full_draw_is_always_n(self):
        for n in (1, 2, 5):
            exp = YExperiment(n=n, r=2 * n, seed=3)
            assert all(y_sample(exp, random.Random(k)) == n for k in range(20))

    def test_tiny_draws_are_zero(self):
        for r in (0, 1):
            exp = YExperiment(n=4, r=r)
            assert all(y_sample(exp, random.Random(k)) == 0 for k in range(20))

    def test_r_beyond_deck_rejected(self):
        with pytest.raises(ValueError, match="r <= 2n"):
            YExperiment(n=2, r=5)

    def test_vectorized_sampler_matches_exact_law(self):
        # independent route: frequency of each value vs the closed form
        n, r = 3, 4
        ys = y_sample_many(n, r, 40_000, seed=12)
        exact = y_exact_distribution(n, r)
        for u, p in enumerate(exact):
            freq = (ys == u).mean()
            assert abs(freq - float(p)) < 0.02, (u, freq, p)


class TestYExactDistribution:
    def test_n2_r2(self):
        assert y_exact_distribution(2, 2) == [Fraction(2, 3), Fraction(1, 3)]

    def test_point_mass_at_full_draw(self):
        for n in (1, 3, 5):
            dist = y_exact_distribution(n, 2 * n)
            assert dist[-1] == 1 and sum(dist) == 1

    def test_n3_r3(self):
        assert y_exact_distribution(3, 3)[1] == Fraction(3, 5)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_matches_subset_enumeration(self, n):
        # cap 2n <= 16 keeps the C(2n, r) oracle desk-scale
        for r in range(0, 2 * n + 1):
            assert y_exact_distribution(n, r) == _y_distribution_by_subsets(n, r), (n, r)

    @given(st.integers(min_value=1, max_value=20), st.data())
    @settings(max_examples=50, deadline=None)
    def test_sums_to_one(self, n, data):
        r = data.draw(st.integers(min_value=0, max_value=2 * n))
        assert sum(y_exact_distribution(n, r)) == 1


class TestYExpectation:
    def test_full_draw(self):
        for n in (1, 4, 9):
            assert y_expectation(n, 2 * n) == n

    def test_n2_r2(self):
        assert y_expectation(2, 2) == Fraction(1, 3)

    def test_degenerate(self):
        assert y_expectation(5, 0) == 0
        assert y_expectation(5, 1) == 0

    def test_equals_distribution_mean_and_quarter_bound(self):
        for n in range(1, 9):
            for r in range(0, 2 * n + 1):
                mean = sum(u * p for u, p in enumerate(y_exact_distribution(n, r)))
                assert y_expectation(n, r) == mean
                assert y_expectation(n, r) <= Fraction(r * r, 4 * n)


class TestYTailBound:
    def test_threshold_sample_size_hits_e_minus_t(self):
        # r exactly (2/e) sqrt(nt) makes the bound e^-t
        n, t = 100, 4
        r_star = 2.0 / math.e * math.sqrt(n * t)
        assert abs(y_tail_bound(n, r_star, t) - math.exp(-t)) < 1e-12

    def test_spec_point(self):
        # n=100, t=4, r=14: r <= (2/e)sqrt(400) ~ 14.71, bound below e^-4
        b = y_tail_bound(100, 14, 4)
        assert b == pytest.approx(0.0122948230433289)
        assert b <= math.exp(-4)
        assert 14 == y_sample_size(100, 4)

    def test_exact_tail_below_bound_on_grid(self):
        for n in range(1, 9):
            for r in range(1, 2 * n + 1):
                for t in range(1, r // 2 + 1):
                    if 4 * n * t / (math.e * r * r) >= 1.0:
                        assert float(y_tail_exact(n, r, t)) <= y_tail_bound(n, r, t) + 1e-15

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            y_tail_bound(4, 2, 0)
        with pytest.raises(ValueError):
            y_tail_bound(4, 0, 1)

    def test_monte_carlo_cell(self):
        est = y_tail_estimate(YExperiment(n=100, r=14, t=4, trials=30_000, seed=5))
        assert est.ok
        assert est.estimate <= est.bound + 3 * est.sigma


class TestBoundParams:
    def test_sampling_reduction(self):
        from memlab.analysis import BoundParams
        bp = BoundParams.for_sample(100, 14, 4)
        assert bp.a == 0.04 and bp.p == pytest.approx(196 / 40000)
        assert bp.tail() == chernoff_tail(100, bp.a, bp.p)

    def test_validation(self):
        from memlab.analysis import BoundParams
        with pytest.raises(ValueError, match="p <= a"):
            BoundParams(a=0.1, p=0.2, n=10)
        with pytest.raises(ValueError, match="in \\(0,1\\)"):
            BoundParams(a=1.0, p=0.2, n=10)


class TestChernoff:
    def test_relent_at_equality_is_zero(self):
        for a in (0.1, 0.5, 0.9):
            assert abs(relent(a, a)) < 1e-12

    def test_relent_half_quarter(self):
        # 0.5 ln 2 + 0.5 ln(2/3), evaluated independently
        want = 0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
        assert relent(0.5, 0.25) == pytest.approx(want)
        assert relent(0.5, 0.25) == pytest.approx(0.14384103622589042)

    def test_tail_domination_spot(self):
        exact = binomial_tail_exact(20, Fraction(1, 4), 10)
        assert exact == Fraction(7622043821, 549755813888)
        assert chernoff_tail(20, 0.5, 0.25) >= float(exact)

    def test_rejects_outside_unit_interval(self):
        with pytest.raises(ValueError):
            relent(0.0, 0.5)
        with pytest.raises(ValueError):
            relent(0.5, 1.0)
        with pytest.raises(ValueError):
            chernoff_tail(10, 0.3, 0.4)

    def test_simplification_chain(self):
        # D(a||p) >= a ln(a/p) + (1-a) ln(1-a) >= a ln(a/(ep))
        for a in (0.2, 0.5, 0.8):
            for p in (0.01, 0.1, a / 2, a * 0.9):
                d = relent(a, p)
                mid = a * math.log(a / p) + (1 - a) * math.log(1 - a)
                low = a * math.log(a / (math.e * p))
                assert d >= mid - 1e-12 >= low - 1e-12

    def test_domination_on_grid(self):
        for n in (1, 7, 40, 120, 200):
            for ai in range(1, 10):
                a = ai / 10
                for pj in range(1, 8):
                    p = Fraction(pj, 10) * Fraction(ai, 10)
                    tail = binomial_tail_exact(n, p, Fraction(ai, 10) * n)
                    assert float(tail) <= chernoff_tail(n, a, float(p)) * (1 + 1e-9)


class TestMonteCarloWrap:
    def test_randomized_player_with_tenfold_mean_budget(self):
        n = 16
        budget = SpaceBudget.for_slots(n, 4)
        runs = [multi_pass_play(generate_valid_input(GameParams(n, n, k)),
                                budget, order=randomized_order(n, 7 * k), lean=True).flips
                for k in range(200)]
        mean = sum(runs) / len(runs)
        wrapped = monte_carlo_wrap(MultiPass(order=randomized_order(n, 999)), mean)
        errs = 0
        for k in range(500):
            x = generate_valid_input(GameParams(n, n, 10_000 + k))
            run = wrapped.play(x, budget)
            errs += run.errored
        assert errs / 500 <= 0.1 + 3 * math.sqrt(0.1 * 0.9 / 500)

    def test_rejects_nonpositive_budget(self):
        with pytest.raises(ValueError):
            monte_carlo_wrap(MultiPass(), 0)


class TestUniquePairs:
    def test_singleton(self):
        assert unique_pairs((1, 1)) == [(1, 2)]

    def test_triple_and_single_suppressed(self):
        assert unique_pairs((1, 1, 1, 2)) == []

    def test_mixed(self):
        assert unique_pairs((2, 1, 2, 3, 3, 1)) == [(1, 3), (2, 6), (4, 5)]

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="1..2"):
            unique_pairs((1, 3, 1, 2))
        with pytest.raises(ValueError, match="even"):
            unique_pairs((1, 1, 1))

    def test_enumerated_n2_adjudicates_formulas(self):
        # full 16-input enumeration: the all-position-pairs form is the truth
        truth = unique_pairs_expected_enumerated(2)
        assert truth == Fraction(3, 4)
        exp = unique_pairs_expected(2)
        assert exp.from_n_pairs == pytest.approx(1 / 8)
        assert exp.from_all_pairs == pytest.approx(float(truth))

    def test_enumerated_n3_matches_all_pairs_form(self):
        truth = unique_pairs_expected_enumerated(3)
        exp = unique_pairs_expected(3)
        assert float(truth) == pytest.approx(exp.from_all_pairs)

    def test_exceeds_threshold_both_forms(self):
        for n in (5, 10, 100):
            exp = unique_pairs_expected(n)
            assert exp.from_all_pairs > exp.threshold
            assert exp.from_n_pairs > exp.threshold

    def test_mc_close_to_exact_at_n3(self):
        truth = float(unique_pairs_expected_enumerated(3))
        mean, sigma = unique_pairs_mc(3, 4000, seed=2)
        assert abs(mean - truth) <= 4 * sigma
