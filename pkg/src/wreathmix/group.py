"""Colored permutations: elements of C_p wr S_n and their nested tail events.

An element is stored positionally, mirroring a deck of n cards: ``perm[t]``
is the (1-based) label of the card in position ``t + 1`` and ``colors[t]``
is that card's color, a residue mod p.  The group law permutes colors along
with positions, so products compose like physical restackings of the deck.

The "ordered tail" statistic of an element is the largest u such that the
labels n-u+1, ..., n occur in increasing position order and all carry color
0.  The events "ordered tail >= u" form a decreasing family; they are the
supports of the increment laws of the top-m-to-random shuffle and carry the
entire likelihood-ratio structure used by the distance modules.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import permutations, product
from random import Random
from typing import Iterator

DEFAULT_ENUMERATION_CAP = 10**7
BUDGET_ENV = "WREATHMIX_BUDGET"


class BudgetExceededError(RuntimeError):
    """An enumeration or convolution would exceed the configured budget."""


def enumeration_cap() -> int:
    """Enumeration budget: the WREATHMIX_BUDGET env var, or 10^7 elements."""
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_ENUMERATION_CAP
    cap = int(raw)
    if cap <= 0:
        raise ValueError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return cap


@dataclass(frozen=True)
class GroupParams:
    """Parameters of the group of p-colored permutations of n cards."""

    n: int
    p: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def order(self) -> int:
        """Group order p^n * n!."""
        return self.p**self.n * math.factorial(self.n)


@dataclass(frozen=True)
class ColoredPermutation:
    """A colored permutation in positional (word) form.

    ``perm[t]`` is the label in position t+1; ``colors[t]`` its color mod p.
    The position of label i is ``perm.index(i) + 1``.
    """

    colors: tuple[int, ...]
    perm: tuple[int, ...]


def _check_element(x: ColoredPermutation, g: GroupParams) -> None:
    if len(x.perm) != g.n or len(x.colors) != g.n:
        raise ValueError(
            f"element of length {len(x.perm)}/{len(x.colors)} does not match n={g.n}"
        )


def validate_element(x: ColoredPermutation, g: GroupParams) -> None:
    """Raise ValueError unless x is a well-formed element for g."""
    _check_element(x, g)
    if sorted(x.perm) != list(range(1, g.n + 1)):
        raise ValueError(f"perm {x.perm} is not a permutation of 1..{g.n}")
    if any(not 0 <= c < g.p for c in x.colors):
        raise ValueError(f"colors {x.colors} not all in 0..{g.p - 1}")


def identity(g: GroupParams) -> ColoredPermutation:
    """The identity: labels 1..n in order, all colors 0."""
    return ColoredPermutation((0,) * g.n, tuple(range(1, g.n + 1)))


def multiply(
    x: ColoredPermutation, y: ColoredPermutation, g: GroupParams
) -> ColoredPermutation:
    """Product x*y under the wreath rule.

    The permutation of the product is the composition x.perm after y.perm,
    and the color in position t is x's color at position y.perm[t] plus y's
    color there, mod p.
    """
    _check_element(x, g)
    _check_element(y, g)
    p = g.p
    xp, xc = x.perm, x.colors
    perm = tuple(xp[j - 1] for j in y.perm)
    colors = tuple((xc[j - 1] + c) % p for j, c in zip(y.perm, y.colors))
    return ColoredPermutation(colors, perm)


def inverse(x: ColoredPermutation, g: GroupParams) -> ColoredPermutation:
    """The group inverse: multiply(x, inverse(x), g) is the identity."""
    _check_element(x, g)
    n, p = g.n, g.p
    pos = [0] * n
    for t, label in enumerate(x.perm, start=1):
        pos[label - 1] = t
    perm = tuple(pos)
    colors = tuple((-x.colors[pos[j] - 1]) % p for j in range(n))
    return ColoredPermutation(colors, perm)


def enumerate_group(
    g: GroupParams, cap: int | None = None
) -> Iterator[ColoredPermutation]:
    """Yield every element exactly once, lexicographic in (perm, colors).

    Refuses to start when the group order exceeds the budget (``cap``
    argument, else WREATHMIX_BUDGET, else 10^7): this is a desk-scale tool.
    """
    limit = enumeration_cap() if cap is None else cap
    if g.order > limit:
        raise BudgetExceededError(
            f"group order {g.order} exceeds enumeration budget {limit}"
        )
    color_range = range(g.p)
    for perm in permutations(range(1, g.n + 1)):
        for colors in product(color_range, repeat=g.n):
            yield ColoredPermutation(colors, perm)


def _positions(x: ColoredPermutation, n: int) -> list[int]:
    """pos[i-1] = 1-based position of label i."""
    pos = [0] * n
    for t, label in enumerate(x.perm, start=1):
        pos[label - 1] = t
    return pos


def has_ordered_tail(x: ColoredPermutation, u: int, g: GroupParams) -> bool:
    """True iff the largest u labels sit in increasing order with color 0.

    Vacuously true at u = 0.  Equivalent to ordered_tail(x, g) >= u.
    """
    _check_element(x, g)
    n = g.n
    if not 0 <= u <= n:
        raise ValueError(f"u must be in 0..{n}, got {u}")
    if u == 0:
        return True
    pos = _positions(x, n)
    last = 0
    for label in range(n - u + 1, n + 1):
        t = pos[label - 1]
        if t < last or x.colors[t - 1] != 0:
            return False
        last = t
    return True


def ordered_tail(x: ColoredPermutation, g: GroupParams) -> int:
    """Largest u such that labels n-u+1..n are in increasing order, color 0.

    Ranges over 0..n; equals n exactly at the identity-colored sorted deck.
    For p = 1 the color condition is vacuous and the statistic is at least 1.
    """
    _check_element(x, g)
    n = g.n
    pos = _positions(x, n)
    tail = 0
    for label in range(n, 0, -1):
        t = pos[label - 1]
        if x.colors[t - 1] != 0:
            break
        if label < n and t > pos[label]:
            break
        tail += 1
    return tail


def tail_event_size(u: int, g: GroupParams) -> int:
    """Number of elements with ordered tail >= u: C(n,u) * p^(n-u) * (n-u)!."""
    if not 0 <= u <= g.n:
        raise ValueError(f"u must be in 0..{g.n}, got {u}")
    return math.comb(g.n, u) * g.p ** (g.n - u) * math.factorial(g.n - u)


def increment_support_size(m: int, g: GroupParams) -> int:
    """Size of the top-m increment support: (n)_m * p^m."""
    if not 1 <= m <= g.n:
        raise ValueError(f"m must be in 1..{g.n}, got {m}")
    return math.perm(g.n, m) * g.p**m


def sample_increment(m: int, g: GroupParams, rng: Random) -> ColoredPermutation:
    """Uniform draw from the top-m-to-random increment support.

    Labels 1..m land on a uniform ordered m-tuple of distinct positions with
    independent uniform colors; labels m+1..n fill the remaining positions in
    increasing order with color 0.  Each of (n)_m * p^m outcomes is equally
    likely.
    """
    n, p = g.n, g.p
    if not 1 <= m <= n:
        raise ValueError(f"m must be in 1..{n}, got {m}")
    chosen = rng.sample(range(n), m)
    perm = [0] * n
    colors = [0] * n
    for label, t in enumerate(chosen, start=1):
        perm[t] = label
        colors[t] = rng.randrange(p)
    nxt = m + 1
    for t in range(n):
        if perm[t] == 0:
            perm[t] = nxt
            nxt += 1
    return ColoredPermutation(tuple(colors), tuple(perm))
