"""Limit profiles of the shuffle distances in the cutoff window.

At step count floor((n/m)(log n + c)) the never-chosen count converges to
Poisson(lambda) with lambda = exp(-c).  In the limit the density against
uniform on tail-level ell becomes

    s(ell) = exp(-lambda) * sum_{u<=ell} r^u,        r = p * lambda,

the level masses become a_ell = 1/(ell! p^ell) - 1/((ell+1)! p^(ell+1)),
and each distance has a limit profile expressed through these.  Everything
here is double precision; sums that can dwarf or starve a float are carried
in log space, and the infinite series are truncated only once a provable
factorial-decay tail bound drops below the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

_LOG_FLOAT_MIN = math.log(2.2250738585072014e-308)  # smallest normal double


class SeriesTruncationError(RuntimeError):
    """A profile series failed to meet its tolerance within max_terms."""

    def __init__(self, message: str, partial_sum: float, tail_bound: float):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.tail_bound = tail_bound


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the profile series."""

    tol: float = 1e-12
    max_terms: int = 10000

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


_DEFAULT_CONTROL = SeriesControl()


def _logaddexp(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _logsumexp(values: Sequence[float]) -> float:
    hi = max(values)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(sum(math.exp(v - hi) for v in values))


def _log1pexp(x: float) -> float:
    """log(1 + e^x) without overflow."""
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _log1m_exp(x: float) -> float:
    """log(1 - e^x) for x < 0."""
    return math.log(-math.expm1(x))


def _log_abs_expm1(x: float) -> float:
    """log|e^x - 1|, stable across all regimes; -inf at x = 0."""
    if x == 0.0:
        return -math.inf
    if x >= 1.0:
        return x + math.log1p(-math.exp(-x))
    if x > 0.0:
        return math.log(math.expm1(x))
    return math.log(-math.expm1(x))


def window_time(n: int, m: int, c: float) -> int:
    """Window step count floor((n/m) * (log n + c)).

    Evaluated in double precision; floor ties at representation boundaries
    follow the platform's single rounding of the product.
    """
    if n < 1 or not 1 <= m <= n:
        raise ValueError(f"need n >= 1 and 1 <= m <= n, got n={n}, m={m}")
    return math.floor((n / m) * (math.log(n) + c))


def crossing_index(c: float, p: int, max_terms: int = 10**6) -> int:
    """First level ell where the limit density s(ell) exceeds 1.

    Found by direct scan of the partial sums (the source of truth; the
    closed form below is a cross-check target).  Always >= 1 because
    s(0) = exp(-lambda) < 1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    lam = math.exp(-c)
    if lam <= 690.0:
        # s(ell) > 1  <=>  sum_{u<=ell} r^u > e^lambda, all safely in range
        r = p * lam
        target = math.exp(lam)
        acc = 1.0
        term = 1.0
        ell = 0
        while acc <= target:
            ell += 1
            if ell > max_terms:
                raise SeriesTruncationError(
                    f"crossing index not found within {max_terms} levels",
                    acc,
                    math.inf,
                )
            term *= r
            acc += term
        return ell
    log_r = math.log(p) - c
    log_acc = 0.0
    ell = 0
    while log_acc <= lam:
        ell += 1
        if ell > max_terms:
            raise SeriesTruncationError(
                f"crossing index not found within {max_terms} levels",
                log_acc,
                math.inf,
            )
        log_acc = _logaddexp(log_acc, ell * log_r)
    return ell


def crossing_index_closed_form(c: float, p: int) -> int:
    """Closed form for the crossing index.

    floor(log(1 + e^lambda (r - 1)) / log r) when r != 1, floor(e^lambda)
    when r = 1.  Kept as an independent cross-check of the scan; the floor
    is sensitive to float error near integer boundaries.
    """
    lam = math.exp(-c)
    r = p * lam
    if r == 1.0:
        return math.floor(math.exp(lam))
    x = math.exp(lam) * (r - 1.0)
    return math.floor(math.log1p(x) / math.log(r))


@dataclass(frozen=True)
class ProfilePoint:
    """One evaluation point of the limit profiles."""

    c: float
    p: int
    lam: float
    r: float
    w_star: int

    @classmethod
    def at(cls, c: float, p: int) -> "ProfilePoint":
        lam = math.exp(-c)
        return cls(c=c, p=p, lam=lam, r=p * lam, w_star=crossing_index(c, p))


def _log_one_minus_tv(c: float, p: int) -> float:
    """log(1 - tv_profile(c, p)) via the positive-sum complement.

    1 - f = e^-lam * sum_{u<w} lam^u/u!  +  (1 - s(w-1)) / (w! p^w),
    both terms nonnegative, each accumulated in log space.
    """
    lam = math.exp(-c)
    log_lam = -c
    log_r = math.log(p) - c
    w = crossing_index(c, p)
    log_cdf = _logsumexp([u * log_lam - math.lgamma(u + 1) - lam for u in range(w)])
    log_s_prev = _logsumexp([u * log_r - lam for u in range(w)])
    if log_s_prev >= 0.0:
        log_gap = -math.inf  # boundary tie s(w-1) = 1: the second term vanishes
    else:
        log_gap = _log1m_exp(log_s_prev) - math.lgamma(w + 1) - w * math.log(p)
    return _logaddexp(log_cdf, log_gap)


def tv_profile(c: float, p: int) -> float:
    """Limiting total-variation profile.

    Equals 1 - e^-lam sum_{u<w*} lam^u/u! + (e^-lam sum_{u<w*} r^u - 1)
    / (w*! p^w*); computed through the stable complement so values near 0
    and near 1 both keep full precision.
    """
    f = -math.expm1(_log_one_minus_tv(c, p))
    return min(1.0, max(0.0, f))


def sep_profile(c: float, p: int) -> float:
    """Limiting separation profile: 1 - e^-lam (1 + lam) for p = 1,
    1 - e^-lam for p >= 2."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    lam = math.exp(-c)
    if p == 1:
        return -math.expm1(-lam + math.log1p(lam))
    return -math.expm1(-lam)


def chi2_profile(c: float, p: int) -> float:
    """Limiting chi-squared profile, in closed form.

    ((r+1)/(r-1)) e^{-lam(2-r)} - (2/(r-1)) e^{-lam} - 1 away from r = 1;
    the r = 1 limit (2 lam + 1) e^{-lam} - 1 is used for |r - 1| <= 1e-8.
    Returns inf when the value exceeds float range.
    """
    lam = math.exp(-c)
    r = p * lam
    if abs(r - 1.0) <= 1e-8:
        return (2.0 * lam + 1.0) * math.exp(-lam) - 1.0
    try:
        return (
            (r + 1.0) / (r - 1.0) * math.exp(-lam * (2.0 - r))
            - 2.0 / (r - 1.0) * math.exp(-lam)
            - 1.0
        )
    except OverflowError:
        return math.inf


def linfty_profile(c: float, p: int) -> float:
    """Limiting L-infinity profile: e^-lam / (1 - r) - 1 for r < 1, else inf."""
    lam = math.exp(-c)
    r = p * lam
    if r < 1.0:
        return math.exp(-lam) / (1.0 - r) - 1.0
    return math.inf


def _series_sum(
    c: float,
    p: int,
    q_env: float,
    term_value: Callable[[float, float], float],
    ctrl: SeriesControl,
    env_scale: float = 1.0,
    level_tail_scale: float = 0.0,
) -> float:
    """Sum term_value(log_a, log_s) over levels ell = 0, 1, 2, ...

    Truncates when the current term is below tol and a provable tail bound
    is too.  With M = max(1, r), the envelope
    env_scale * (1 + sbar(ell))^q_env / (ell! p^ell), where
    sbar(ell) = e^-lam (ell+1) M^ell dominates s(ell), bounds the geometric
    part of every term, and decays by at least
    rho(ell) = (M (ell+2)/(ell+1))^q_env / ((ell+1) p) per level once rho
    drops below one.  level_tail_scale adds that multiple of the exact
    residual level mass sum_{j>ell} a_j = 1/((ell+1)! p^(ell+1)) for
    integrands with a bounded component.
    """
    lam = math.exp(-c)
    log_r = math.log(p) - c
    log_p = math.log(p)
    log_m = max(log_r, 0.0)
    acc = 0.0
    log_geo = 0.0  # log sum_{u<=ell} r^u
    ell = 0
    while True:
        num = (ell + 1) * p - 1
        log_a = (
            -math.inf
            if num == 0
            else math.log(num) - math.lgamma(ell + 2) - (ell + 1) * log_p
        )
        term = term_value(log_a, log_geo - lam)
        acc += term
        log_sbar1 = -lam + math.log(ell + 2) + (ell + 1) * log_m
        log_env1 = (
            q_env * _log1pexp(log_sbar1) - math.lgamma(ell + 2) - (ell + 1) * log_p
        )
        log_rho1 = q_env * (log_m + math.log((ell + 3) / (ell + 2))) - math.log(
            (ell + 2) * p
        )
        if log_rho1 < 0.0:
            tail = env_scale * math.exp(min(log_env1 - _log1m_exp(log_rho1), 700.0))
            if level_tail_scale:
                tail += level_tail_scale * math.exp(
                    -math.lgamma(ell + 2) - (ell + 1) * log_p
                )
            if abs(term) <= ctrl.tol and tail <= ctrl.tol:
                return acc
        else:
            tail = math.inf
        ell += 1
        if ell >= ctrl.max_terms:
            raise SeriesTruncationError(
                f"series did not meet tol={ctrl.tol} within {ctrl.max_terms} terms",
                acc,
                tail,
            )
        log_geo = _logaddexp(log_geo, ell * log_r)


def lq_profile(
    c: float, p: int, q: float, ctrl: Optional[SeriesControl] = None
) -> float:
    """Limiting q-th power L^q profile: sum_ell a_ell |s(ell) - 1|^q.

    Defined for 1 <= q < infinity; q = 1 is twice the TV profile and q = 2
    matches the chi-squared closed form.  Returns inf if any term exceeds
    float range (the series still truncates by its tail bound).
    """
    if q < 1 or math.isinf(q):
        raise ValueError(f"q must satisfy 1 <= q < inf, got {q}")
    control = ctrl if ctrl is not None else _DEFAULT_CONTROL

    def term(log_a: float, log_s: float) -> float:
        log_dev = _log_abs_expm1(log_s)
        if log_dev == -math.inf or log_a == -math.inf:
            return 0.0
        try:
            return math.exp(log_a + q * log_dev)
        except OverflowError:
            return math.inf

    return _series_sum(c, p, q, term, control)


def kl_profile(c: float, p: int, ctrl: Optional[SeriesControl] = None) -> float:
    """Limiting relative-entropy profile: sum_ell a_ell s(ell) log s(ell).

    Truncation uses |t log t| <= 1/e + 4 t^(5/4): the flat 1/e part is
    covered by the exact residual level mass and the power part by the
    usual geometric envelope at exponent 5/4, which keeps the scan short
    even when r is large.
    """
    control = ctrl if ctrl is not None else _DEFAULT_CONTROL

    def term(log_a: float, log_s: float) -> float:
        if log_a == -math.inf or log_s == 0.0:
            return 0.0
        return math.exp(log_a + log_s) * log_s

    return _series_sum(
        c, p, 1.25, term, control, env_scale=4.0, level_tail_scale=1.0 / math.e
    )


def tv_profile_series(
    c: float, p: int, ctrl: Optional[SeriesControl] = None
) -> float:
    """TV profile by its series form sum_ell a_ell (s(ell) - 1)_+.

    An independent route to tv_profile, used for cross-checks.
    """
    control = ctrl if ctrl is not None else _DEFAULT_CONTROL

    def term(log_a: float, log_s: float) -> float:
        if log_s <= 0.0 or log_a == -math.inf:
            return 0.0
        return math.exp(log_a + _log_abs_expm1(log_s))

    return _series_sum(c, p, 1.0, term, control)


def sep_mixing_time(eps: float, n: int, m: int, p: int) -> float:
    """Leading-order separation mixing time for p >= 2.

    (n/m) * (log n - log(-log(1 - eps))); accurate to o(n).  The p = 1 chain
    has no comparably simple closed form and is not supported.
    """
    if p < 2:
        raise ValueError("separation mixing-time asymptotics require p >= 2")
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if n < 1 or not 1 <= m <= n:
        raise ValueError(f"need n >= 1 and 1 <= m <= n, got n={n}, m={m}")
    return (n / m) * (math.log(n) - math.log(-math.log1p(-eps)))


@dataclass(frozen=True)
class DoublyExpPoint:
    """One grid point of the saturation diagnostic."""

    c: float
    ratio: float
    tv_limit: float
    saturated: bool


@dataclass(frozen=True)
class DoublyExpReport:
    """-log(1 - f_p(c)) / e^-c over a grid, plus a monotone-approach flag.

    The ratio tends to 1 as c -> -infinity (the TV profile approaches one
    doubly exponentially); approaches_one records whether |ratio - 1| is
    nonincreasing as c decreases over the non-saturated grid points.
    """

    p: int
    points: tuple[DoublyExpPoint, ...]
    approaches_one: bool


def doubly_exp_check(c_grid: Iterable[float], p: int) -> DoublyExpReport:
    """Evaluate the doubly-exponential saturation ratio on a c grid.

    A point is flagged saturated when 1 - f underflows double precision;
    the ratio itself is still reported from the log-space value.
    """
    points = []
    for c in sorted(c_grid):
        log_omf = _log_one_minus_tv(c, p)
        f = min(1.0, max(0.0, -math.expm1(log_omf)))
        ratio = -log_omf / math.exp(-c)
        points.append(
            DoublyExpPoint(
                c=c, ratio=ratio, tv_limit=f, saturated=log_omf < _LOG_FLOAT_MIN
            )
        )
    dists = [abs(pt.ratio - 1.0) for pt in points if not pt.saturated]
    approaches_one = all(
        dists[i] <= dists[i + 1] + 1e-12 for i in range(len(dists) - 1)
    )
    return DoublyExpReport(p=p, points=tuple(points), approaches_one=approaches_one)
