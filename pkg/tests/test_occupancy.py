"""Occupancy-law tests: Stirling values, exact pmfs, moments, sampler."""

import math
from fractions import Fraction
from random import Random

import pytest

from wreathmix.occupancy import (
    OccupancyWeights,
    SamplingParams,
    ball_occupancy_law,
    empty_factorial_moment,
    gen_stirling2,
    never_chosen_pmf_log_space,
    poisson_pmf,
    sample_occupancy,
    stirling2,
    subset_occupancy_law,
)


def stirling2_recurrence(k, a):
    """Independent oracle: {k,a} = {k-1,a-1} + a*{k-1,a}."""
    table = [[0] * (a + 1) for _ in range(k + 1)]
    table[0][0] = 1
    for i in range(1, k + 1):
        for j in range(1, a + 1):
            table[i][j] = table[i - 1][j - 1] + j * table[i - 1][j]
    return table[k][a]


def test_stirling2_base_cases():
    assert stirling2(0, 0) == 1
    assert stirling2(5, 5) == 1
    assert stirling2(4, 2) == 7 == stirling2_recurrence(4, 2)
    assert stirling2(3, 0) == 0
    assert stirling2(2, 5) == 0


def test_stirling2_matches_recurrence():
    for k in range(9):
        for a in range(9):
            assert stirling2(k, a) == stirling2_recurrence(k, a)


def test_stirling2_validation():
    with pytest.raises(ValueError):
        stirling2(-1, 0)


def test_gen_stirling2_reduces_to_stirling2():
    for k in range(1, 9):
        for a in range(9):
            assert gen_stirling2(k, a, 1) == stirling2(k, a)


def test_gen_stirling2_vanishes_below_m():
    for m in (2, 3):
        for k in range(1, 6):
            for a in range(m):
                assert gen_stirling2(k, a, m) == 0


def test_gen_stirling2_small_values():
    assert gen_stirling2(1, 2, 2) == 1
    # one round of a 2-subset occupies exactly 2 boxes: the a=2 weight is 1
    law = subset_occupancy_law(SamplingParams(5, 2, 1))
    assert law.weight(2) == 1
    assert gen_stirling2(1, 2, 2).denominator == 1


def test_gen_stirling2_integrality():
    for m in (1, 2, 3):
        for k in range(1, 7):
            for a in range(9):
                assert gen_stirling2(k, a, m).denominator == 1


def test_weights_constructor_validation():
    with pytest.raises(ValueError):
        OccupancyWeights(2, (1, 1, 1), 2)  # does not sum to 1
    with pytest.raises(ValueError):
        OccupancyWeights(2, (1, 1), 2)  # wrong length
    with pytest.raises(ValueError):
        OccupancyWeights(1, (-1, 2), 1)  # negative mass


def test_weights_from_fractions_and_equality():
    w = OccupancyWeights.from_fractions(2, [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)])
    assert w.weight(0) == Fraction(1, 3)
    assert w == OccupancyWeights(2, (2, 2, 2), 6)


def test_ball_law_trivial_k():
    assert ball_occupancy_law(5, 0).weight(0) == 1
    law = ball_occupancy_law(5, 1)
    assert law.weight(1) == 1


def test_ball_law_sums_to_one_exactly():
    for n in (1, 3, 6):
        for k in (0, 1, 4, 9):
            law = ball_occupancy_law(n, k)
            assert sum(law.weights) == 1


def test_ball_law_example_trajectory_semantics():
    # throwing balls into boxes (2,2,5,1,2,5) occupies {1,2,5}
    locations = (2, 2, 5, 1, 2, 5)
    occupied = len(set(locations))
    assert occupied == 3 and 5 - occupied == 2
    law = ball_occupancy_law(5, 6)
    assert law.weight(3) > 0 and law.never_chosen(2) == law.weight(3)


def test_ball_law_empirical_agreement():
    # n=5, k=6: sampler frequencies within 4 sigma of the exact pmf per bin
    law = ball_occupancy_law(5, 6)
    params = SamplingParams(5, 1, 6)
    rng = Random(11)
    reps = 100_000
    counts = [0] * 6
    for _ in range(reps):
        counts[params.n - sample_occupancy(params, rng)] += 1
    for a in range(6):
        q = float(law.weight(a))
        sigma = math.sqrt(q * (1 - q) / reps)
        assert abs(counts[a] / reps - q) <= 4 * sigma + 1e-12


def test_subset_law_trivial_cases():
    assert subset_occupancy_law(SamplingParams(6, 2, 0)).weight(0) == 1
    law = subset_occupancy_law(SamplingParams(6, 2, 1))
    assert law.weight(2) == 1


def test_subset_law_matches_ball_law_at_m_1():
    for n in range(1, 7):
        for k in range(13):
            assert subset_occupancy_law(SamplingParams(n, 1, k)) == ball_occupancy_law(n, k)


def test_subset_law_support_bounds():
    for n, m in ((6, 2), (7, 3)):
        for k in range(1, 6):
            law = subset_occupancy_law(SamplingParams(n, m, k))
            for a in range(n + 1):
                inside = m <= a <= min(n, m * k)
                if not inside:
                    assert law.weight(a) == 0
            # equivalently: never-chosen mass vanishes above n - m
            for u in range(n - m + 1, n + 1):
                assert law.never_chosen(u) == 0


def test_subset_law_validation():
    with pytest.raises(ValueError):
        SamplingParams(4, 5, 1)
    with pytest.raises(ValueError):
        SamplingParams(4, 1, -1)


def test_factorial_moment_edges():
    params = SamplingParams(8, 3, 4)
    assert empty_factorial_moment(params, 0) == 1
    for u in range(8 - 3 + 1, 9):
        assert empty_factorial_moment(params, u) == 0
    with pytest.raises(ValueError):
        empty_factorial_moment(SamplingParams(8, 3, 0), 1)


def test_factorial_moment_consistency_with_pmf():
    # sum_u P(E=u) (u)_j equals the closed-form moment, exactly
    for n in range(2, 9):
        for m in (1, 2):
            if m > n:
                continue
            for k in (1, 2, 5):
                params = SamplingParams(n, m, k)
                law = subset_occupancy_law(params)
                for j in range(min(3, n) + 1):
                    total = sum(
                        law.never_chosen(u) * math.perm(u, j) for u in range(n + 1)
                    )
                    assert total == empty_factorial_moment(params, j)


def test_domination_bounds_exact():
    # P(E=u) u! <= E[(E)_u] <= (n e^{-mk/n})^u
    for n in (5, 12, 20):
        for m in (1, 2):
            for k in (1, 3, 8):
                params = SamplingParams(n, m, k)
                law = subset_occupancy_law(params)
                for u in range(n + 1):
                    moment = empty_factorial_moment(params, u)
                    assert law.never_chosen(u) * math.factorial(u) <= moment
                    if moment > 0:
                        log_upper = u * (math.log(n) - m * k / n)
                        log_moment = (
                            math.log(moment.numerator) - math.log(moment.denominator)
                        )
                        assert log_moment <= log_upper + 1e-9


def test_poisson_pmf_values():
    assert poisson_pmf(0.7, 0) == pytest.approx(math.exp(-0.7), rel=1e-14)
    assert poisson_pmf(2.0, 3) == pytest.approx(math.exp(-2) * 8 / 6, rel=1e-12)
    assert sum(poisson_pmf(3.0, u) for u in range(80)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        poisson_pmf(0.0, 1)


class _ScriptedRng:
    """Feeds predetermined subsets to sample_occupancy."""

    def __init__(self, subsets):
        self._subsets = list(subsets)

    def sample(self, population, m):
        return self._subsets.pop(0)


def test_sample_occupancy_worked_example():
    # rounds {1,4}, {4,5}, {2,4} on 5 boxes leave only box 3 untouched
    rng = _ScriptedRng([[0, 3], [3, 4], [1, 3]])
    assert sample_occupancy(SamplingParams(5, 2, 3), rng) == 1


def test_log_space_path_tracks_exact_law():
    # the approximate float path stays within 1e-8 of the exact pmf in its
    # intended regime (window-scale k, order-one expected never-chosen count)
    params = SamplingParams(300, 2, 855)
    exact = subset_occupancy_law(params)
    approx = never_chosen_pmf_log_space(params, u_max=12)
    for u in range(13):
        assert abs(approx[u] - float(exact.never_chosen(u))) <= 1e-8


def test_log_space_path_refuses_out_of_regime():
    with pytest.raises(ValueError):
        never_chosen_pmf_log_space(SamplingParams(300, 2, 1))
    with pytest.raises(ValueError):
        never_chosen_pmf_log_space(SamplingParams(300, 2, 0))


def test_poisson_convergence_along_n():
    # at k = floor(n log n) the never-chosen law approaches Poisson(1),
    # with the error shrinking as n doubles
    prev = None
    for n in (50, 100, 200, 400):
        k = math.floor(n * math.log(n))
        law = subset_occupancy_law(SamplingParams(n, 1, k))
        errs = [
            abs(float(law.never_chosen(u)) - poisson_pmf(1.0, u)) for u in range(5)
        ]
        if prev is not None:
            assert all(e <= pe for e, pe in zip(errs, prev))
        prev = errs
