"""Brute-force ground truth on fully enumerated groups.

Everything the formula modules compute has a direct counterpart here:
one-step laws are built by support membership, k-step laws by exact
rational convolution, and distances by literal summation over the group.
mixture_certify cross-checks the occupancy-mixture representation of the
k-step law atom by atom, which is the package's main self-verification.

The group enumeration is cached per parameter set and deliberately
desk-scale: convolution refuses groups above a configurable order (default
10^4) and enumeration above the WREATHMIX_BUDGET cap.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from random import Random
from typing import Iterable, Optional, Sequence

import numpy as np

from .distances import (
    DistanceReport,
    MixtureSpec,
    distance_report,
    likelihood_profile,
    stat_level_mass,
)
from .group import (
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
)
from .occupancy import SamplingParams, subset_occupancy_law

DEFAULT_CONVOLUTION_BUDGET = 10**4


@lru_cache(maxsize=8)
def group_elements(g: GroupParams) -> tuple[ColoredPermutation, ...]:
    """All elements in enumeration order (cached)."""
    return tuple(enumerate_group(g))


@lru_cache(maxsize=8)
def element_index(g: GroupParams) -> dict[ColoredPermutation, int]:
    """Map element -> enumeration position (cached)."""
    return {x: i for i, x in enumerate(group_elements(g))}


@lru_cache(maxsize=8)
def tail_stats(g: GroupParams) -> tuple[int, ...]:
    """Ordered-tail statistic of every element, in enumeration order."""
    return tuple(ordered_tail(x, g) for x in group_elements(g))


class GroupDistribution:
    """A probability law on the enumerated group, as dense exact rationals."""

    __slots__ = ("group", "mass")

    def __init__(self, group: GroupParams, mass: Iterable[Fraction]):
        mass = tuple(Fraction(v) for v in mass)
        if len(mass) != group.order:
            raise ValueError(
                f"need {group.order} masses for {group}, got {len(mass)}"
            )
        if any(v < 0 for v in mass):
            raise ValueError("masses must be nonnegative")
        if sum(mass) != 1:
            raise ValueError("masses must sum to exactly 1")
        self.group = group
        self.mass = mass

    def support_size(self) -> int:
        return sum(1 for v in self.mass if v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupDistribution):
            return NotImplemented
        return self.group == other.group and self.mass == other.mass

    def __repr__(self) -> str:
        return f"GroupDistribution({self.group}, support={self.support_size()})"


def _check_budget(g: GroupParams, budget: int) -> None:
    if g.order > budget:
        raise BudgetExceededError(
            f"group order {g.order} exceeds convolution budget {budget}"
        )


def delta_e(g: GroupParams) -> GroupDistribution:
    """Point mass at the identity."""
    idx = element_index(g)[identity(g)]
    mass = [Fraction(0)] * g.order
    mass[idx] = Fraction(1)
    return GroupDistribution(g, mass)


def uniform_law(g: GroupParams) -> GroupDistribution:
    return GroupDistribution(g, [Fraction(1, g.order)] * g.order)


def one_step_law(
    m: int, g: GroupParams, budget: int = DEFAULT_CONVOLUTION_BUDGET
) -> GroupDistribution:
    """Uniform law on the top-m increment support.

    Mass 1/((n)_m p^m) on every element whose labels m+1..n stand in
    increasing order with color 0, i.e. ordered tail >= n - m.
    """
    _check_budget(g, budget)
    size = increment_support_size(m, g)
    atom = Fraction(1, size)
    mass = [
        atom if has_ordered_tail(x, g.n - m, g) else Fraction(0)
        for x in group_elements(g)
    ]
    law = GroupDistribution(g, mass)
    if law.support_size() != size:
        raise AssertionError("increment support size mismatch")
    return law


def reversed_law(dist: GroupDistribution) -> GroupDistribution:
    """The law of the inverse element (time reversal of the walk)."""
    g = dist.group
    idx = element_index(g)
    mass = [Fraction(0)] * g.order
    for i, x in enumerate(group_elements(g)):
        mass[idx[inverse(x, g)]] = dist.mass[i]
    return GroupDistribution(g, mass)


def convolve(
    left: GroupDistribution,
    right: GroupDistribution,
    budget: int = DEFAULT_CONVOLUTION_BUDGET,
) -> GroupDistribution:
    """Exact convolution: the law of X*Y for X ~ left, Y ~ right independent.

    Runs in O(|supp left| * |supp right|) exact multiplications, so the
    sparser factor should be on the right for k-step laws.
    """
    g = left.group
    if right.group != g:
        raise ValueError("cannot convolve laws on different groups")
    _check_budget(g, budget)
    elements = group_elements(g)
    idx = element_index(g)
    out = [Fraction(0)] * g.order
    for j, nu in enumerate(right.mass):
        if not nu:
            continue
        y = elements[j]
        for i, mx in enumerate(left.mass):
            if not mx:
                continue
            out[idx[multiply(elements[i], y, g)]] += mx * nu
    return GroupDistribution(g, out)


def power(
    dist: GroupDistribution, k: int, budget: int = DEFAULT_CONVOLUTION_BUDGET
) -> GroupDistribution:
    """k-fold convolution power; k = 0 is the point mass at the identity."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    acc = delta_e(dist.group)
    for _ in range(k):
        acc = convolve(acc, dist, budget=budget)
    return acc


def direct_distances(
    dist: GroupDistribution, q_list: Iterable[float] = ()
) -> DistanceReport:
    """All distances to uniform by literal summation over the group.

    TV, separation, L-infinity and chi-squared are exact rationals; KL and
    the L^q powers are floats.
    """
    g = dist.group
    order = g.order
    tv = Fraction(0)
    chi2_sum = Fraction(0)
    min_ratio: Optional[Fraction] = None
    max_dev = Fraction(0)
    kl = 0.0
    lq: dict[float, float] = {q: 0.0 for q in q_list}
    log_order = math.log(order)
    for v in dist.mass:
        ratio = v * order
        dev = abs(ratio - 1)
        tv += dev
        chi2_sum += v * ratio
        if min_ratio is None or ratio < min_ratio:
            min_ratio = ratio
        if dev > max_dev:
            max_dev = dev
        if v:
            kl += float(v) * (
                math.log(v.numerator) - math.log(v.denominator) + log_order
            )
        for q in lq:
            if dev:
                lq[q] += float(dev) ** q / order
    return DistanceReport(
        tv=tv / (2 * order),
        sep=1 - min_ratio,
        linfty=max_dev,
        chi2=chi2_sum - 1,
        kl=kl,
        lq=lq,
        w_mu=None,
    )


@dataclass
class CertifyFailure:
    """One mismatch found by mixture_certify."""

    k: int
    kind: str
    where: str
    expected: str
    actual: str


@dataclass
class CertifyReport:
    """Outcome of the mixture certification run."""

    n: int
    p: int
    m: int
    k_max: int
    checks: int = 0
    failures: list[CertifyFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _rel_close(a: float, b: float, rel: float = 1e-12) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def mixture_certify(
    n: int,
    p: int,
    m: int,
    k_max: int,
    q_list: Sequence[float] = (1.0, 2.0),
    budget: int = DEFAULT_CONVOLUTION_BUDGET,
) -> CertifyReport:
    """Certify the occupancy-mixture structure of the k-step law, k <= k_max.

    For every k it verifies, against the brute-force convolution power:
      * the law equals sum_u P(E=u) * uniform(tail >= u) atom by atom;
      * the density against uniform equals the likelihood prefix sum at the
        ordered-tail statistic of every element;
      * formula distances (tv, sep, linfty, chi2 exact; kl and L^q to 1e-12
        relative) equal their direct-summation counterparts.
    Failures carry the offending k, location, and both values as strings.
    """
    g = GroupParams(n, p)
    report = CertifyReport(n=n, p=p, m=m, k_max=k_max)
    elements = group_elements(g)
    stats = tail_stats(g)
    law = delta_e(g)
    step = one_step_law(m, g, budget=budget)
    for k in range(k_max + 1):
        mu = subset_occupancy_law(SamplingParams(n, m, k))
        spec = MixtureSpec(g, mu)
        prof = likelihood_profile(spec)
        # mixture value and density are constant on tail level sets
        level_mass = [Fraction(0)] * (n + 1)
        acc = Fraction(0)
        for u in range(n + 1):
            acc += mu.never_chosen(u) / tail_event_size(u, g)
            level_mass[u] = acc
        order = g.order
        for i, x in enumerate(elements):
            ell = stats[i]
            actual = law.mass[i]
            report.checks += 1
            if actual != level_mass[ell]:
                report.failures.append(
                    CertifyFailure(
                        k, "mixture-atom", repr(x), str(level_mass[ell]), str(actual)
                    )
                )
            if actual * order != prof[ell]:
                report.failures.append(
                    CertifyFailure(
                        k, "density", repr(x), str(prof[ell]), str(actual * order)
                    )
                )
        formula = distance_report(spec, q_list=q_list)
        direct = direct_distances(law, q_list=q_list)
        for name in ("tv", "sep", "linfty", "chi2"):
            report.checks += 1
            f_val = getattr(formula, name)
            d_val = getattr(direct, name)
            if f_val != d_val:
                report.failures.append(
                    CertifyFailure(k, name, "distance", str(f_val), str(d_val))
                )
        report.checks += 1
        if not _rel_close(formula.kl, direct.kl):
            report.failures.append(
                CertifyFailure(k, "kl", "distance", repr(formula.kl), repr(direct.kl))
            )
        for q in q_list:
            report.checks += 1
            if not _rel_close(formula.lq[q], direct.lq[q]):
                report.failures.append(
                    CertifyFailure(
                        k, f"lq[{q:g}]", "distance", repr(formula.lq[q]), repr(direct.lq[q])
                    )
                )
        if k < k_max:
            law = convolve(law, step, budget=budget)
    return report


def simulate_chain(
    g: GroupParams, m: int, k: int, reps: int, rng: Random
) -> Counter[int]:
    """Monte Carlo law of the ordered-tail statistic after k shuffle steps.

    Runs reps independent walks from the identity, multiplying by fresh
    increments on the right, and counts the endpoint statistic.  Plain
    Python; see simulate_tail_law for the vectorized batch equivalent.
    """
    if k < 0 or reps < 0:
        raise ValueError("k and reps must be >= 0")
    counts: Counter[int] = Counter()
    e = identity(g)
    for _ in range(reps):
        x = e
        for _ in range(k):
            x = multiply(x, sample_increment(m, g, rng), g)
        counts[ordered_tail(x, g)] += 1
    return counts


def _batch_positions(rng: np.random.Generator, rows: int, n: int, m: int) -> np.ndarray:
    """Uniform ordered m-tuples of distinct positions, shape (rows, m)."""
    if m > min(8, n // 4):
        # dense subsets: rejection would thrash, permute whole rows instead
        return rng.permuted(
            np.broadcast_to(np.arange(n, dtype=np.int16), (rows, n)), axis=1
        )[:, :m].copy()
    out = rng.integers(0, n, size=(rows, m), dtype=np.int16)
    if m == 1:
        return out
    while True:
        ordered = np.sort(out, axis=1)
        clash = (ordered[:, 1:] == ordered[:, :-1]).any(axis=1)
        if not clash.any():
            return out
        out[clash] = rng.integers(0, n, size=(int(clash.sum()), m), dtype=np.int16)


def _batch_tail_stats(perm: np.ndarray, colors: np.ndarray, n: int) -> np.ndarray:
    """Vectorized ordered-tail statistic for rows of positional arrays."""
    pos = np.argsort(perm, axis=1)  # pos[:, label-1] = 0-based position of label
    colors_by_label = np.take_along_axis(colors, pos, axis=1)
    ok_color = colors_by_label == 0
    increasing = pos[:, :-1] < pos[:, 1:]
    alive = ok_color[:, n - 1].copy()
    tails = alive.astype(np.int64)
    for label in range(n - 1, 0, -1):
        alive &= ok_color[:, label - 1] & increasing[:, label - 1]
        tails += alive
    return tails


def simulate_tail_law(
    g: GroupParams,
    m: int,
    k: int,
    reps: int,
    rng: np.random.Generator,
    chunk: int = 16384,
) -> np.ndarray:
    """Vectorized twin of simulate_chain: endpoint tail-statistic counts.

    Identical walk and increment law, batched over replications with numpy;
    returns an array of counts indexed by the statistic 0..n.  Deterministic
    for a seeded generator.
    """
    if not 1 <= m <= g.n:
        raise ValueError(f"m must be in 1..{g.n}, got {m}")
    if k < 0 or reps < 0:
        raise ValueError("k and reps must be >= 0")
    if g.n > 30000:
        raise ValueError("batch simulator packs labels into int16; n too large")
    n, p = g.n, g.p
    counts = np.zeros(n + 1, dtype=np.int64)
    done = 0
    base_perm = np.arange(1, n + 1, dtype=np.int16)
    labels0 = np.arange(m, dtype=np.int16)  # labels 1..m as 0-based sources
    p_mask = p - 1 if p & (p - 1) == 0 else None
    while done < reps:
        rows = min(chunk, reps - done)
        perm = np.broadcast_to(base_perm, (rows, n)).copy()
        colors = np.zeros((rows, n), dtype=np.int16)
        rowsel = np.arange(rows)[:, None]
        ones_row = np.ones((rows, n), dtype=np.int16)
        for _ in range(k):
            chosen = _batch_positions(rng, rows, n, m)
            # gather index: label in position t of the increment, 0-based;
            # unchosen positions carry labels m+1.. in increasing order
            unchosen = ones_row.copy()
            unchosen[rowsel, chosen] = 0
            take = np.cumsum(unchosen, axis=1, dtype=np.int16)
            take += m - 1
            take[rowsel, chosen] = labels0
            perm = np.take_along_axis(perm, take, axis=1)
            if p > 1:
                colors = np.take_along_axis(colors, take, axis=1)
                colors[rowsel, chosen] += rng.integers(
                    0, p, size=(rows, m), dtype=np.int16
                )
                if p_mask is not None:
                    colors &= p_mask
                else:
                    colors %= p
        tails = _batch_tail_stats(perm, colors, n)
        counts += np.bincount(tails, minlength=n + 1)
        done += rows
    return counts


def tail_law_tv_estimate(counts: Sequence[int], g: GroupParams) -> float:
    """Plug-in TV estimate from an empirical tail-statistic law.

    The walk's distance to uniform equals the distance between the
    tail-statistic pushforwards (the density is a function of the
    statistic), so half the L1 gap between the empirical law and the
    uniform marginal estimates it.
    """
    total = sum(counts)
    if total <= 0:
        raise ValueError("need at least one observation")
    return 0.5 * sum(
        abs(counts[ell] / total - float(stat_level_mass(g, ell)))
        for ell in range(g.n + 1)
    )
