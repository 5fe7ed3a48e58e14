"""Command-line front end: CSV tables and certification runs.

Commands
  profile       limit-profile curves on a c grid
  exact         exact finite-n distances over a k range
  occupancy     exact occupied/never-chosen pmf for one (n, m, k)
  oracle-check  brute-force certification of the formula modules
  simulate      Monte Carlo tail-statistic law vs the exact uniform marginal

All tables are comma-separated with a header row and LF line endings;
floats carry 12 significant digits and identical configurations (including
the seed) produce byte-identical output.  Exit codes: 0 success, 1 usage
error, 2 certification failure, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from . import profiles
from .distances import MixtureSpec, distance_report, stat_level_mass
from .group import BudgetExceededError, GroupParams
from .profiles import SeriesTruncationError
from .occupancy import SamplingParams, subset_occupancy_law
from .oracle import mixture_certify, simulate_tail_law, tail_law_tv_estimate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERTIFICATION = 2
EXIT_BUDGET = 3

# soft cap on the decimal digits of the common denominator (n)_m^k used by
# `exact`; beyond it rows are dropped with a warning rather than ground out
MAX_EXACT_DENOMINATOR_DIGITS = 2_000_000


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage errors, not argparse's 2
        raise _UsageError(message)


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _fmt_rational(value, exact: bool) -> str:
    if isinstance(value, Fraction):
        if exact:
            return f"{value.numerator}/{value.denominator}"
        try:
            return _fmt_float(float(value))
        except OverflowError:
            return "inf"
    return _fmt_float(value)


def _write_csv(rows: Iterable[Sequence[str]], header: Sequence[str], out: IO[str]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(row) + "\n")


def _c_grid(c_min: float, c_max: float, c_step: float) -> list[float]:
    if c_step <= 0:
        raise _UsageError("--c-step must be positive")
    if c_max < c_min:
        raise _UsageError("--c-max must be >= --c-min")
    count = int(math.floor((c_max - c_min) / c_step + 1e-9)) + 1
    return [c_min + j * c_step for j in range(count)]


def cmd_profile(args, out: IO[str]) -> int:
    qs = args.q or []
    ctrl = profiles.SeriesControl(tol=args.tol)
    header = ["c", "lambda", "r", "w_star", "f_p", "s_p", "g_p", "h_p"]
    header += [f"H_{q:g}" for q in qs]
    header.append("H_inf")
    rows = []
    for c in _c_grid(args.c_min, args.c_max, args.c_step):
        lam = math.exp(-c)
        r = args.p * lam
        row = [
            _fmt_float(c),
            _fmt_float(lam),
            _fmt_float(r),
            str(profiles.crossing_index(c, args.p)),
            _fmt_float(profiles.tv_profile(c, args.p)),
            _fmt_float(profiles.sep_profile(c, args.p)),
            _fmt_float(profiles.chi2_profile(c, args.p)),
            _fmt_float(profiles.kl_profile(c, args.p, ctrl)),
        ]
        row += [_fmt_float(profiles.lq_profile(c, args.p, q, ctrl)) for q in qs]
        hinf = profiles.linfty_profile(c, args.p)
        row.append("" if math.isinf(hinf) else _fmt_float(hinf))
        rows.append(row)
    _write_csv(rows, header, out)
    return EXIT_OK


def _k_range(args) -> list[int]:
    if args.k is not None:
        if args.k_min is not None or args.k_max is not None:
            raise _UsageError("give either --k or --k-min/--k-max, not both")
        return [args.k]
    if args.k_min is None and args.k_max is None:
        raise _UsageError("need --k or --k-min/--k-max")
    k_min = args.k_min if args.k_min is not None else 0
    k_max = args.k_max if args.k_max is not None else k_min
    if k_min < 0 or k_max < k_min:
        raise _UsageError("need 0 <= k-min <= k-max")
    return list(range(k_min, k_max + 1))


def cmd_exact(args, out: IO[str]) -> int:
    g = GroupParams(args.n, args.p)
    qs = args.q or []
    ks = _k_range(args)
    if args.eps is not None:
        if args.p >= 2:
            prediction = profiles.sep_mixing_time(args.eps, args.n, args.m, args.p)
            print(
                f"predicted separation mixing time for eps={args.eps:g}: "
                f"{prediction:.6g} steps (leading order)",
                file=sys.stderr,
            )
        else:
            print(
                "separation mixing-time prediction requires p >= 2; ignoring --eps",
                file=sys.stderr,
            )
    header = ["k", "tv", "sep", "linfty", "chi2", "kl"]
    header += [f"lq_{q:g}" for q in qs]
    header.append("w_mu")
    digits_per_k = math.log10(math.perm(args.n, args.m)) if args.n > 1 else 0.0
    rows = []
    truncated = False
    for k in ks:
        if k * digits_per_k > MAX_EXACT_DENOMINATOR_DIGITS:
            print(
                f"warning: stopping at k={k}: denominator would exceed "
                f"{MAX_EXACT_DENOMINATOR_DIGITS} digits; emitting partial table",
                file=sys.stderr,
            )
            truncated = True
            break
        law = subset_occupancy_law(SamplingParams(args.n, args.m, k))
        rep = distance_report(MixtureSpec(g, law), q_list=qs)
        row = [str(k)]
        row += [
            _fmt_rational(v, args.exact_rationals)
            for v in (rep.tv, rep.sep, rep.linfty, rep.chi2)
        ]
        row.append(_fmt_float(rep.kl))
        row += [_fmt_float(rep.lq[q]) for q in qs]
        row.append("" if rep.w_mu is None else str(rep.w_mu))
        rows.append(row)
    _write_csv(rows, header, out)
    return EXIT_BUDGET if truncated else EXIT_OK


def cmd_occupancy(args, out: IO[str]) -> int:
    ks = _k_range(args)
    if len(ks) != 1:
        raise _UsageError("occupancy takes a single --k")
    law = subset_occupancy_law(SamplingParams(args.n, args.m, ks[0]))
    header = ["a", "mu", "u", "P"]
    rows = []
    for a in range(args.n + 1):
        w = law.weight(a)
        u = args.n - a
        rows.append(
            [
                str(a),
                _fmt_rational(w, args.exact_rationals),
                str(u),
                _fmt_rational(law.never_chosen(u), args.exact_rationals),
            ]
        )
    _write_csv(rows, header, out)
    return EXIT_OK


def cmd_oracle_check(args, out: IO[str]) -> int:
    ks = _k_range(args)
    k_max = max(ks)
    qs = args.q or [1.0, 2.0]
    report = mixture_certify(args.n, args.p, args.m, k_max, q_list=qs)
    out.write(
        f"oracle-check n={args.n} p={args.p} m={args.m} k_max={k_max}: "
        f"{report.checks} checks, {len(report.failures)} failures\n"
    )
    for f in report.failures:
        out.write(
            f"FAIL k={f.k} {f.kind} at {f.where}: expected {f.expected}, "
            f"got {f.actual}\n"
        )
    out.write("PASS\n" if report.ok else "FAIL\n")
    return EXIT_OK if report.ok else EXIT_CERTIFICATION


def cmd_simulate(args, out: IO[str]) -> int:
    g = GroupParams(args.n, args.p)
    ks = _k_range(args)
    if len(ks) != 1:
        raise _UsageError("simulate takes a single --k")
    if args.reps < 1:
        raise _UsageError("--reps must be >= 1")
    rng = np.random.default_rng(args.seed)
    counts = simulate_tail_law(g, args.m, ks[0], args.reps, rng)
    tv_est = tail_law_tv_estimate([int(v) for v in counts], g)
    header = ["ell", "count", "empirical", "exact", "tv_plugin"]
    rows = []
    tv_str = _fmt_float(tv_est)
    for ell in range(args.n + 1):
        rows.append(
            [
                str(ell),
                str(int(counts[ell])),
                _fmt_float(int(counts[ell]) / args.reps),
                _fmt_rational(stat_level_mass(g, ell), args.exact_rationals),
                tv_str,
            ]
        )
    _write_csv(rows, header, out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="wreathmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, *, needs_group: bool):
        if needs_group:
            sp.add_argument("--n", type=int, required=True)
            sp.add_argument("--p", type=int, default=1)
            sp.add_argument("--m", type=int, default=1)
        sp.add_argument("--q", type=float, action="append")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--exact-rationals", action="store_true")

    sp = sub.add_parser("profile", help="limit profiles on a c grid")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--c-min", type=float, required=True)
    sp.add_argument("--c-max", type=float, required=True)
    sp.add_argument("--c-step", type=float, required=True)
    add_common(sp, needs_group=False)
    sp.set_defaults(func=cmd_profile)

    for name, func, help_text in (
        ("exact", cmd_exact, "exact finite-n distances over a k range"),
        ("occupancy", cmd_occupancy, "exact occupancy pmf"),
        ("oracle-check", cmd_oracle_check, "brute-force certification"),
        ("simulate", cmd_simulate, "Monte Carlo tail-statistic law"),
    ):
        sp = sub.add_parser(name, help=help_text)
        add_common(sp, needs_group=True)
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--k-min", type=int, default=None)
        sp.add_argument("--k-max", type=int, default=None)
        if name == "exact":
            sp.add_argument("--eps", type=float, default=None)
        if name == "simulate":
            sp.add_argument("--reps", type=int, default=10000)
        sp.set_defaults(func=func)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.out:
            with open(args.out, "w", newline="") as handle:
                return args.func(args, handle)
        return args.func(args, sys.stdout)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SeriesTruncationError as exc:
        print(
            f"budget exceeded: {exc} (partial sum {exc.partial_sum:.6g}, "
            f"tail bound {exc.tail_bound:.3g})",
            file=sys.stderr,
        )
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
