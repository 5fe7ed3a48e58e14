"""Group-law, enumeration, and tail-statistic tests."""

import math
from fractions import Fraction
from random import Random

import numpy as np
import pytest

from wreathmix.group import (
    BudgetExceededError,
    ColoredPermutation,
    GroupParams,
    enumerate_group,
    has_ordered_tail,
    identity,
    increment_support_size,
    inverse,
    multiply,
    ordered_tail,
    sample_increment,
    tail_event_size,
    validate_element,
)

SMALL_GROUPS = [GroupParams(n, p) for n in (1, 2, 3) for p in (1, 2, 3)]


def test_group_order():
    assert GroupParams(3, 2).order == 48
    assert GroupParams(1, 1).order == 1
    assert GroupParams(4, 3).order == 81 * 24


def test_params_validation():
    with pytest.raises(ValueError):
        GroupParams(0, 1)
    with pytest.raises(ValueError):
        GroupParams(2, 0)


def test_multiply_hand_example():
    # two swaps with colors (1,0) and (0,1): colors cancel, permutation undoes
    g = GroupParams(2, 2)
    x = ColoredPermutation(colors=(1, 0), perm=(2, 1))
    y = ColoredPermutation(colors=(0, 1), perm=(2, 1))
    assert multiply(x, y, g) == ColoredPermutation((0, 0), (1, 2))


def test_multiply_identity_and_inverse():
    g = GroupParams(3, 2)
    e = identity(g)
    for x in enumerate_group(g):
        assert multiply(e, x, g) == x
        assert multiply(x, e, g) == x
        assert multiply(x, inverse(x, g), g) == e
        assert multiply(inverse(x, g), x, g) == e
    assert inverse(e, g) == e


def test_multiply_dimension_mismatch():
    g = GroupParams(3, 2)
    x = identity(g)
    y = identity(GroupParams(2, 2))
    with pytest.raises(ValueError):
        multiply(x, y, g)


def test_validate_element():
    g = GroupParams(3, 2)
    validate_element(identity(g), g)
    with pytest.raises(ValueError):
        validate_element(ColoredPermutation((0, 0, 0), (1, 1, 3)), g)
    with pytest.raises(ValueError):
        validate_element(ColoredPermutation((0, 2, 0), (1, 2, 3)), g)
    with pytest.raises(ValueError):
        validate_element(ColoredPermutation((0, 0), (1, 2)), g)


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=lambda g: f"n{g.n}p{g.p}")
def test_group_axioms_exhaustive(g):
    # full multiplication table, then associativity as a table identity
    elements = list(enumerate_group(g))
    index = {x: i for i, x in enumerate(elements)}
    size = len(elements)
    table = np.empty((size, size), dtype=np.int32)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[multiply(x, y, g)]
    # (xy)z == x(yz) for every triple
    assert np.array_equal(table[table, :], table[:, table])
    e = index[identity(g)]
    assert np.array_equal(table[e, :], np.arange(size))
    assert np.array_equal(table[:, e], np.arange(size))
    for i, x in enumerate(elements):
        assert table[i, index[inverse(x, g)]] == e


def test_enumerate_counts():
    assert sum(1 for _ in enumerate_group(GroupParams(3, 2))) == 48
    assert sum(1 for _ in enumerate_group(GroupParams(1, 1))) == 1


def test_enumerate_unique_and_valid():
    g = GroupParams(3, 3)
    seen = set()
    for x in enumerate_group(g):
        assert sorted(x.perm) == [1, 2, 3]
        assert all(0 <= c < 3 for c in x.colors)
        seen.add(x)
    assert len(seen) == g.order


def test_enumerate_deterministic_order():
    g = GroupParams(2, 2)
    first = list(enumerate_group(g))
    assert first == list(enumerate_group(g))
    # lexicographic: permutation-major, colors within
    assert first[0] == ColoredPermutation((0, 0), (1, 2))
    assert first[1] == ColoredPermutation((0, 1), (1, 2))
    assert first[-1] == ColoredPermutation((1, 1), (2, 1))


def test_enumerate_budget():
    with pytest.raises(BudgetExceededError):
        list(enumerate_group(GroupParams(12, 2), cap=1000))


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("WREATHMIX_BUDGET", "10")
    with pytest.raises(BudgetExceededError):
        list(enumerate_group(GroupParams(3, 2)))
    monkeypatch.setenv("WREATHMIX_BUDGET", "100")
    assert sum(1 for _ in enumerate_group(GroupParams(3, 2))) == 48


def test_ordered_tail_identity():
    for g in SMALL_GROUPS:
        assert ordered_tail(identity(g), g) == g.n


def test_ordered_tail_colored_top():
    # a nonzero color on the top label kills the whole tail
    g = GroupParams(4, 2)
    x = ColoredPermutation((0, 0, 0, 1), (1, 2, 3, 4))
    assert ordered_tail(x, g) == 0


def test_ordered_tail_reverse_permutation():
    for n in (2, 3, 5):
        g = GroupParams(n, 1)
        rev = ColoredPermutation((0,) * n, tuple(range(n, 0, -1)))
        assert ordered_tail(rev, g) == 1


def test_tail_event_trivial_levels():
    g = GroupParams(3, 2)
    for x in enumerate_group(g):
        assert has_ordered_tail(x, 0, g)
    g1 = GroupParams(4, 1)
    for x in enumerate_group(g1):
        assert has_ordered_tail(x, 1, g1)


def test_tail_event_out_of_range():
    g = GroupParams(3, 2)
    with pytest.raises(ValueError):
        has_ordered_tail(identity(g), 4, g)


def test_tail_event_matches_statistic_and_nesting():
    for g in SMALL_GROUPS:
        for x in enumerate_group(g):
            tail = ordered_tail(x, g)
            memberships = [has_ordered_tail(x, u, g) for u in range(g.n + 1)]
            assert memberships == [u <= tail for u in range(g.n + 1)]
            # nested family: membership is monotone decreasing in u
            for u in range(g.n):
                assert memberships[u] or not memberships[u + 1]


def test_tail_event_count_formula():
    g = GroupParams(3, 2)
    count = sum(1 for x in enumerate_group(g) if has_ordered_tail(x, 2, g))
    assert count == 6 == tail_event_size(2, g)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_tail_statistic_uniform_law(n, p):
    # #{tail >= u} / |G| = 1/(u! p^u), by exhaustive count
    g = GroupParams(n, p)
    stats = [ordered_tail(x, g) for x in enumerate_group(g)]
    for u in range(n + 1):
        hits = sum(1 for t in stats if t >= u)
        assert Fraction(hits, g.order) == Fraction(1, math.factorial(u) * p**u)
        assert hits == tail_event_size(u, g)


def test_increment_support_sizes():
    g = GroupParams(3, 2)
    assert increment_support_size(1, g) == 6
    assert increment_support_size(2, g) == 24
    assert increment_support_size(3, g) == 48 == g.order


def test_sample_increment_support_and_range():
    g = GroupParams(4, 3)
    rng = Random(0)
    for m in (1, 2, 4):
        for _ in range(200):
            x = sample_increment(m, g, rng)
            assert has_ordered_tail(x, g.n - m, g)
            assert sorted(x.perm) == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        sample_increment(0, g, rng)
    with pytest.raises(ValueError):
        sample_increment(5, g, rng)


def test_sample_increment_m_equals_n_is_uniform():
    # coarse check: 48 outcomes, all seen, counts near uniform
    g = GroupParams(3, 2)
    rng = Random(42)
    reps = 48 * 500
    counts = {}
    for _ in range(reps):
        x = sample_increment(3, g, rng)
        counts[x] = counts.get(x, 0) + 1
    assert len(counts) == 48
    expected = reps / 48
    assert all(abs(c - expected) < 5 * math.sqrt(expected) for c in counts.values())


def test_sample_increment_uniform_frequency_4_sigma():
    # n=3, p=2, m=1: six equally likely increments, 10^5 draws
    g = GroupParams(3, 2)
    rng = Random(2024)
    reps = 100_000
    counts = {}
    for _ in range(reps):
        x = sample_increment(1, g, rng)
        counts[x] = counts.get(x, 0) + 1
    assert len(counts) == 6
    q = 1 / 6
    sigma = math.sqrt(q * (1 - q) / reps)
    for c in counts.values():
        assert abs(c / reps - q) <= 4 * sigma
