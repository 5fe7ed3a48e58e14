"""Exact distances to uniform for nested-tail mixtures.

A mixture assigns occupancy weight mu(a) to the uniform law on the event
"ordered tail >= n - a".  Because those events are nested, the density of
the mixture against the uniform law is a function of the ordered-tail
statistic alone: on the level set {tail = ell} it equals the prefix sum

    S(ell) = sum_{u <= ell} mu(n - u) * u! * p^u.

Every distance reduces to a one-dimensional sum over ell.  Total variation,
separation, L-infinity and chi-squared are rational in the weights and are
computed exactly; relative entropy and general L^q powers need logs and are
returned as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .group import GroupParams
from .occupancy import OccupancyWeights


@dataclass(frozen=True)
class MixtureSpec:
    """A nested-tail mixture: group parameters plus occupancy weights."""

    group: GroupParams
    mu: OccupancyWeights

    def __post_init__(self) -> None:
        if self.mu.n != self.group.n:
            raise ValueError(
                f"weights are over 0..{self.mu.n} but the group has n={self.group.n}"
            )


@dataclass(frozen=True)
class LikelihoodProfile:
    """Exact density values S(0..n) of a mixture against uniform.

    Nondecreasing in ell, and constant from the largest u with positive
    weight onward.
    """

    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, ell: int) -> Fraction:
        return self.values[ell]


def likelihood_profile(spec: MixtureSpec) -> LikelihoodProfile:
    """Prefix sums S(ell) = sum_{u<=ell} mu(n-u) * u! * p^u, exactly."""
    n, p = spec.group.n, spec.group.p
    nums = spec.mu.numerators
    den = spec.mu.denominator
    acc = 0
    upu = 1
    prefix = []
    for u in range(n + 1):
        if u:
            upu *= u * p
        acc += nums[n - u] * upu
        prefix.append(acc)
    return LikelihoodProfile(tuple(Fraction(v, den) for v in prefix))


def stat_level_mass(g: GroupParams, ell: int) -> Fraction:
    """Uniform mass of the level set {ordered tail = ell}.

    Equals 1/(ell! p^ell) - 1/((ell+1)! p^(ell+1)) for ell < n and
    1/(n! p^n) at ell = n.
    """
    n, p = g.n, g.p
    if not 0 <= ell <= n:
        raise ValueError(f"ell must be in 0..{n}, got {ell}")
    if ell == n:
        return Fraction(1, math.factorial(n) * p**n)
    return Fraction((ell + 1) * p - 1, math.factorial(ell + 1) * p ** (ell + 1))


def _profile(spec: MixtureSpec, profile: Optional[LikelihoodProfile]) -> LikelihoodProfile:
    return profile if profile is not None else likelihood_profile(spec)


def tv_exact(
    spec: MixtureSpec, profile: Optional[LikelihoodProfile] = None
) -> tuple[Fraction, Optional[int]]:
    """Exact total variation distance to uniform, with its crossing index.

    The crossing index w is the first ell where the density S exceeds 1; the
    distance is the mixture-minus-uniform mass of the event {tail >= w}:

        1 - sum_{u<w} mu(n-u) + (S(w-1) - 1) / (w! p^w).

    Returns (0, None) when the mixture is uniform (S identically 1).
    """
    S = _profile(spec, profile).values
    w = next((ell for ell, v in enumerate(S) if v > 1), None)
    if w is None:
        return Fraction(0), None
    n, p = spec.group.n, spec.group.p
    nums = spec.mu.numerators
    mass_below = Fraction(sum(nums[n - u] for u in range(w)), spec.mu.denominator)
    tv = 1 - mass_below + (S[w - 1] - 1) / (math.factorial(w) * p**w)
    return tv, w


def sep_exact(
    spec: MixtureSpec, profile: Optional[LikelihoodProfile] = None
) -> Fraction:
    """Exact separation 1 - min density.

    The density is minimized at the smallest attainable tail value, which is
    1 when p = 1 (a single label is vacuously ordered) and 0 otherwise; so
    separation is 1 - mu(n) - mu(n-1) for p = 1 and 1 - mu(n) for p >= 2.
    """
    S = _profile(spec, profile).values
    ell_min = 1 if spec.group.p == 1 else 0
    return 1 - S[ell_min]


def linfty_exact(
    spec: MixtureSpec, profile: Optional[LikelihoodProfile] = None
) -> Fraction:
    """Exact L-infinity norm of density - 1, which is S(n) - 1."""
    S = _profile(spec, profile).values
    return S[spec.group.n] - 1


def _to_float(fr: Fraction) -> float:
    try:
        return float(fr)
    except OverflowError:
        return math.inf


def _log_fraction(fr: Fraction) -> float:
    """log of a positive Fraction, safe for huge numerators."""
    if fr <= 0:
        raise ValueError("log of a nonpositive value")
    return math.log(fr.numerator) - math.log(fr.denominator)


def ratio_functional(
    spec: MixtureSpec,
    phi: Callable[[float], float],
    profile: Optional[LikelihoodProfile] = None,
) -> float:
    """Uniform expectation of phi(density), via the tail-statistic marginal.

    Evaluates sum_ell U{tail = ell} * phi(S(ell)) in floating point from the
    exact S values; phi must be finite at every S(ell) (densities too large
    for a float are passed as inf).  Levels whose mass underflows double
    precision are skipped rather than poisoning the sum with 0 * inf.
    """
    S = _profile(spec, profile).values
    g = spec.group
    acc = 0.0
    for ell in range(g.n + 1):
        mass = float(stat_level_mass(g, ell))
        if mass == 0.0:
            continue
        acc += mass * phi(_to_float(S[ell]))
    return acc


def lq_exact(
    spec: MixtureSpec, q: float, profile: Optional[LikelihoodProfile] = None
) -> float:
    """q-th power of the L^q(U) norm of density - 1, q >= 1.

    sum_ell U{tail = ell} |S(ell) - 1|^q.  Integer q is accumulated exactly
    and converted at the end; fractional q goes through logs.  Values beyond
    float range come back as inf.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    S = _profile(spec, profile).values
    g = spec.group
    if float(q).is_integer():
        qi = int(q)
        total = Fraction(0)
        for ell in range(g.n + 1):
            total += stat_level_mass(g, ell) * abs(S[ell] - 1) ** qi
        return _to_float(total)
    acc = 0.0
    for ell in range(g.n + 1):
        dev = abs(S[ell] - 1)
        if dev == 0:
            continue
        log_term = _log_fraction(stat_level_mass(g, ell)) + q * _log_fraction(dev)
        try:
            acc += math.exp(log_term)
        except OverflowError:
            return math.inf
    return acc


def chi2_exact(
    spec: MixtureSpec, profile: Optional[LikelihoodProfile] = None
) -> Fraction:
    """Exact chi-squared divergence from uniform.

    Uses the closed double sum over weight pairs,

        sum_{u,v} mu(n-u) mu(n-v) min(u,v)! p^min(u,v) - 1,

    folded to a single pass with suffix sums (min(u,v) splits at the
    diagonal).  All arithmetic is big-integer over the squared denominator.
    """
    del profile  # the pairwise route does not need the prefix sums
    n, p = spec.group.n, spec.group.p
    nums = spec.mu.numerators
    den = spec.mu.denominator
    w = [nums[n - u] for u in range(n + 1)]
    suffix = [0] * (n + 2)
    for u in range(n, -1, -1):
        suffix[u] = suffix[u + 1] + w[u]
    total = 0
    upu = 1
    for u in range(n + 1):
        if u:
            upu *= u * p
        if w[u]:
            total += upu * w[u] * (w[u] + 2 * suffix[u + 1])
    return Fraction(total - den * den, den * den)


def kl_exact(
    spec: MixtureSpec, profile: Optional[LikelihoodProfile] = None
) -> float:
    """Relative entropy D(mixture || uniform) as a float.

    sum_ell U{tail = ell} S(ell) log S(ell) with 0 log 0 = 0.  The products
    U{tail = ell} * S(ell) are mixture masses in [0, 1], so only the log
    leaves exact arithmetic.
    """
    S = _profile(spec, profile).values
    g = spec.group
    acc = 0.0
    for ell in range(g.n + 1):
        s = S[ell]
        if s == 0:
            continue
        mass = stat_level_mass(g, ell) * s
        acc += float(mass) * _log_fraction(s)
    return acc


@dataclass
class DistanceReport:
    """All distances of one mixture from uniform.

    tv, sep, linfty and chi2 are exact rationals; kl and the L^q powers are
    floats; w_mu is the total-variation crossing index (None when the
    mixture is uniform or not derived, e.g. for brute-force reports).
    """

    tv: Fraction
    sep: Fraction
    linfty: Fraction
    chi2: Fraction
    kl: float
    lq: dict[float, float]
    w_mu: Optional[int] = None


def distance_report(
    spec: MixtureSpec, q_list: Iterable[float] = ()
) -> DistanceReport:
    """Compute every supported distance for one mixture, sharing the profile."""
    prof = likelihood_profile(spec)
    tv, w_mu = tv_exact(spec, prof)
    return DistanceReport(
        tv=tv,
        sep=sep_exact(spec, prof),
        linfty=linfty_exact(spec, prof),
        chi2=chi2_exact(spec, prof),
        kl=kl_exact(spec, prof),
        lq={q: lq_exact(spec, q, prof) for q in q_list},
        w_mu=w_mu,
    )
