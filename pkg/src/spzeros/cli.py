"""Command-line interface: problem files in, CSV tables and figures out.

A problem file is a strict JSON object naming the polynomial (coefficients
lowest-degree-first, complex numbers as [re, im] pairs), the fixed point
hint, and every truncation knob. Subcommands:

    zeros    all zeros g_sigma(0) up to the configured support
    invert   all solutions of f(z) = w, optionally for a circle of anchors
    moments  per-shell convergence of power sums against closed forms
    wh       three-route evaluation comparison at chosen points
    check    Hypothesis-1 probe plus the invariant suite

Exit codes: 0 success, 1 problem-file parse or validation failure, 2 numeric
failure (non-convergence, divergent moment, identity violation beyond its
budget), 3 Hypothesis-1 probe failure. Output ordering is fixed by the
padded address index (equivalently, digit-string lexicographic order), so
byte-identical output does not depend on SPZEROS_THREADS.
"""

import argparse
import cmath
import csv
import math
import sys as _sys
from dataclasses import replace

import numpy as np

from .branches import (
    W_NEAR_B,
    check_hypothesis1,
    sweep_products,
    sweep_solutions_at_b,
)
from .errors import ParseError, SPZerosError, ValidationError
from .factor import closed_form_momentum, moment_sum
from .pngwriter import scatter_png
from .problemfile import (
    ProblemSpec,
    check_enumeration_size,
    load_problem,
    parse_problem,
    serialize_problem,
    system_from_spec,
)
from .system import eval_f_batch, eval_f_direct, taylor_at_zero
from .verify import cross_check

# Slack added to computed tail bounds when a command judges an identity.
MOMENT_SLACK = 1e-8
WH_SLACK = 1e-6
ROUNDTRIP_TOL = 1e-7
# Tail estimates are first-order, not certified; measured overshoots reach
# ~3.5x, so the --verify budget grants this factor before flagging a row.
SLOPE_SLACK = 8.0
# Hypothesis-1 probe grid used by cmd_check and --check-hypothesis.
HYPOTHESIS_RADIUS = 10.0
HYPOTHESIS_COUNT = 64

__all__ = [
    "ProblemSpec",
    "load_problem",
    "main",
    "parse_problem",
    "serialize_problem",
    "system_from_spec",
]


def _fmt(x):
    return format(float(x), ".17g")


def _sigma_string(digits, d):
    if d <= 10:
        return "".join(str(v) for v in digits)
    return ",".join(str(v) for v in digits)


def _parse_complex(text):
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(
        f"expected 're' or 're,im', got {text!r}")


def _parse_png(text):
    parts = text.lower().split("x")
    if len(parts) == 2:
        try:
            width, height = int(parts[0]), int(parts[1])
            if width >= 1 and height >= 1:
                return width, height
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")


def _parse_circle(text):
    parts = text.split(",")
    if len(parts) == 2:
        try:
            radius, count = float(parts[0]), int(parts[1])
            if radius > 0 and count >= 1:
                return radius, count
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"expected 'radius,count' with radius > 0, got {text!r}")


def _parse_orders(text):
    try:
        orders = tuple(int(p) for p in text.split(","))
    except ValueError:
        orders = ()
    if not orders or any(m < 1 for m in orders):
        raise argparse.ArgumentTypeError(
            f"expected comma-separated orders >= 1, got {text!r}")
    return orders


class _Output:
    """Single-writer sink: a file path or '-' for stdout."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path == "-":
            self._fh = None
            return _sys.stdout
        self._fh = open(self.path, "w", newline="")
        return self._fh

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()
        return False


def _hypothesis_gate(sys_, spec):
    """Run the Hypothesis-1 probe; True when every orbit contracted."""
    report = check_hypothesis1(sys_, HYPOTHESIS_RADIUS, HYPOTHESIS_COUNT,
                               root_tolerance=spec.root_tolerance)
    ok = report.converged_points == report.sampled_points
    if not ok:
        print(
            f"hypothesis probe failed: {report.converged_points}/"
            f"{report.sampled_points} orbits contracted, worst point "
            f"{report.worst_point}", file=_sys.stderr)
    return ok


def _solution_table(sys_, spec, w):
    """Rows (digits, value, terms, estimate, converged, prefactor_exponent)
    for every address with support <= max_support, padded-index order."""
    N = spec.max_support
    d = sys_.d
    kwargs = dict(tol=spec.product_tolerance, n_cap=spec.n_cap,
                  root_tolerance=spec.root_tolerance)
    if abs(w - sys_.b) > W_NEAR_B:
        sweep = sweep_products(sys_, w, N, **kwargs)
        pref = [""] * sweep.values.size
        return sweep, sweep.values, sweep.terms_used, sweep.tail_estimate, \
            sweep.converged, pref
    # Degenerate anchor: index segment [d^(K-1), d^K) holds the addresses
    # with exactly N - K leading zeros; their values are a^(N-K) times the
    # ladder bases of the depth-K sweep, by the geometric ladder structure.
    size = d ** N
    values = np.zeros(size, dtype=np.complex128)
    terms = np.zeros(size, dtype=np.int64)
    est = np.zeros(size, dtype=np.float64)
    conv = np.ones(size, dtype=bool)
    pref = [""] * size
    for K in range(1, N + 1):
        sw = sweep_solutions_at_b(sys_, K, **kwargs)
        lo, hi = d ** (K - 1), d ** K
        values[lo:hi] = sys_.a ** (N - K) * sw.values
        terms[lo:hi] = sw.terms_used
        est[lo:hi] = sw.tail_estimate
        conv[lo:hi] = sw.converged
        exponent = str(N - K + 1)
        for i in range(lo, hi):
            pref[i] = exponent

    class _Padded:
        depth = N

        @staticmethod
        def indices():
            return np.arange(size, dtype=np.int64)

        @staticmethod
        def digits_of(index):
            digits = []
            j = int(index)
            for _ in range(N):
                digits.append(j % d)
                j //= d
            digits.reverse()
            while digits and digits[-1] == 0:
                digits.pop()
            return tuple(digits)

    return _Padded, values, terms, est, conv, pref


def cmd_zeros(spec, args):
    sys_ = system_from_spec(spec)
    if args.check_hypothesis and not _hypothesis_gate(sys_, spec):
        return 3
    sweep = sweep_products(sys_, 0j, spec.max_support,
                           tol=spec.product_tolerance, n_cap=spec.n_cap,
                           root_tolerance=spec.root_tolerance)
    all_ok = bool(np.all(sweep.converged))
    header = ["sigma", "re", "im", "terms_used", "tail_estimate"]
    if not all_ok:
        header.append("converged")
    with _Output(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for pos, idx in enumerate(sweep.indices()):
            sigma = _sigma_string(sweep.digits_of(idx), sys_.d)
            value = sweep.values[pos]
            row = [sigma, _fmt(value.real), _fmt(value.imag),
                   str(int(sweep.terms_used[pos])),
                   _fmt(sweep.tail_estimate[pos])]
            if not all_ok:
                row.append("true" if sweep.converged[pos] else "false")
            writer.writerow(row)
    if args.png is not None:
        width, height = args.png
        scatter_png(args.png_path or _default_png_path(args.output),
                    sweep.values, width, height)
    return 0 if all_ok else 2


def _default_png_path(output):
    if output == "-":
        return "zeros.png"
    return output + ".png" if not output.endswith(".csv") \
        else output[:-4] + ".png"


def _roundtrip_budget(sys_, spec, w, values, est):
    """Round-trip violations |f(g) - w| with per-row error budgets.

    Each solution carries a relative tail estimate; propagated through f it
    permits about |f'(g)| * |g| * est of round-trip error, so the budget
    scales with the local slope (measured by central differences) instead of
    holding deep, large-|g| rows to an absolute bar their requested product
    tolerance cannot meet.  ROUNDTRIP_TOL absorbs evaluator noise and the
    quadratic remainder at multiple zeros, where the slope vanishes.
    """
    kwargs = {"tol": spec.product_tolerance, "n_max": spec.n_cap}
    back = eval_f_batch(sys_, values, **kwargs)
    violation = np.abs(back - w)
    # The step must sit just above the position-error scale est*|g|: far
    # from the origin f oscillates on scales much smaller than |g|, and a
    # |g|-proportional step aliases the slope to near zero.
    h = np.clip(1e3 * est * np.abs(values), 1e-6, 1.0)
    slope = np.abs(eval_f_batch(sys_, values + h, **kwargs)
                   - eval_f_batch(sys_, values - h, **kwargs)) / (2.0 * h)
    budget = ROUNDTRIP_TOL + SLOPE_SLACK * slope * np.abs(values) * est
    return violation, budget


def cmd_invert(spec, args):
    sys_ = system_from_spec(spec)
    if args.check_hypothesis and not _hypothesis_gate(sys_, spec):
        return 3
    if args.circle is not None:
        radius, count = args.circle
        anchors = [radius * cmath.exp(2j * math.pi * k / count)
                   for k in range(count)]
    else:
        anchors = [args.w]

    blocks = []
    all_ok = True
    worst_excess = None  # (excess, violation, budget) at the worst row
    for w in anchors:
        table, values, terms, est, conv, pref = _solution_table(sys_, spec, w)
        all_ok = all_ok and bool(np.all(conv))
        if args.verify:
            violation, budget = _roundtrip_budget(sys_, spec, w, values, est)
            j = int(np.argmax(violation - budget))
            excess = float(violation[j] - budget[j])
            if worst_excess is None or excess > worst_excess[0]:
                worst_excess = (excess, float(violation[j]), float(budget[j]))
        blocks.append((w, table, values, terms, est, conv, pref))

    verified_ok = worst_excess is None or worst_excess[0] <= 0.0
    header = ["sigma", "w_re", "w_im", "re", "im", "terms_used",
              "tail_estimate", "prefactor_exponent"]
    if not all_ok:
        header.append("converged")
    with _Output(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for w, table, values, terms, est, conv, pref in blocks:
            for pos, idx in enumerate(table.indices()):
                sigma = _sigma_string(table.digits_of(idx), sys_.d)
                value = values[pos]
                row = [sigma, _fmt(w.real), _fmt(w.imag),
                       _fmt(value.real), _fmt(value.imag),
                       str(int(terms[pos])), _fmt(est[pos]), pref[pos]]
                if not all_ok:
                    row.append("true" if conv[pos] else "false")
                writer.writerow(row)
    if args.verify and not verified_ok:
        print(f"verification failed: worst |f(g) - w| = "
              f"{worst_excess[1]:.3e} exceeds its error budget "
              f"{worst_excess[2]:.3e}", file=_sys.stderr)
        return 2
    return 0 if all_ok else 2


def cmd_moments(spec, args):
    sys_ = system_from_spec(spec)
    failed = False
    with _Output(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["m", "shell", "partial_re", "partial_im",
                         "closed_re", "closed_im", "abs_error", "tail_bound"])
        for m in args.m:
            report = moment_sum(sys_, m, args.w, spec.max_support,
                                tol=spec.product_tolerance,
                                n_cap=spec.n_cap,
                                root_tolerance=spec.root_tolerance)
            closed = closed_form_momentum(sys_, m, args.w)
            for support, partial in report.shells:
                writer.writerow([
                    str(m), str(support),
                    _fmt(partial.real), _fmt(partial.imag),
                    _fmt(closed.real), _fmt(closed.imag),
                    _fmt(abs(partial - closed)),
                    _fmt(report.tail_bound),
                ])
            final_error = abs(report.computed_sum - closed)
            if final_error > report.tail_bound + MOMENT_SLACK:
                print(f"moment m={m}: |computed - closed form| = "
                      f"{final_error:.3e} exceeds tail bound "
                      f"{report.tail_bound:.3e} + {MOMENT_SLACK:.1e}",
                      file=_sys.stderr)
                failed = True
    return 2 if failed else 0


def cmd_wh(spec, args):
    sys_ = system_from_spec(spec)
    samples = np.array(args.z, dtype=np.complex128)
    report = cross_check(sys_, samples, spec.max_support, anchor=args.anchor,
                         tol=spec.product_tolerance, n_cap=spec.n_cap,
                         root_tolerance=spec.root_tolerance)
    failed = False
    with _Output(args.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["z_re", "z_im", "limit_re", "limit_im",
                         "anchored_re", "anchored_im", "ladder_re",
                         "ladder_im", "max_deviation", "claimed_budget"])
        for row in report.rows:
            budget = WH_SLACK + row.claimed_budget
            if row.max_deviation > budget:
                failed = True
            writer.writerow([
                _fmt(row.z.real), _fmt(row.z.imag),
                _fmt(row.direct.real), _fmt(row.direct.imag),
                _fmt(row.product_anchored.real),
                _fmt(row.product_anchored.imag),
                _fmt(row.product_ladder.real), _fmt(row.product_ladder.imag),
                _fmt(row.max_deviation), _fmt(row.claimed_budget),
            ])
    if failed:
        print("three-route deviation exceeded tail budget "
              f"+ {WH_SLACK:.1e}", file=_sys.stderr)
        return 2
    return 0


def cmd_check(spec, args):
    sys_ = system_from_spec(spec)
    lines = []
    code = 0

    hyp = check_hypothesis1(sys_, HYPOTHESIS_RADIUS, HYPOTHESIS_COUNT,
                            root_tolerance=spec.root_tolerance)
    hyp_ok = hyp.converged_points == hyp.sampled_points
    lines.append(
        f"hypothesis1: sampled={hyp.sampled_points} "
        f"converged={hyp.converged_points} "
        f"max_orbit={hyp.max_orbit_length} "
        f"{'PASS' if hyp_ok else 'FAIL'}")
    if not hyp_ok:
        code = 3

    if hyp_ok:
        # Deterministic sample ring; radius 2 stays inside every example's
        # comfortable evaluation zone while exercising both half-planes.
        grid = np.array([2.0 * cmath.exp(2j * math.pi * (k + 0.25) / 8) /
                         (1 + k % 3) for k in range(8)])
        report = cross_check(sys_, grid, min(spec.max_support, 12),
                             anchor=args.anchor,
                             tol=spec.product_tolerance, n_cap=spec.n_cap,
                             root_tolerance=spec.root_tolerance)
        worst_excess = max(r.max_deviation - (WH_SLACK + r.claimed_budget)
                           for r in report.rows)
        route_ok = worst_excess <= 0
        lines.append(f"three_routes: worst_deviation="
                     f"{report.worst_deviation:.3e} "
                     f"{'PASS' if route_ok else 'FAIL'}")

        rt_ok = report.worst_roundtrip <= ROUNDTRIP_TOL
        lines.append(f"roundtrip: worst={report.worst_roundtrip:.3e} "
                     f"{'PASS' if rt_ok else 'FAIL'}")

        fz = eval_f_batch(sys_, grid, tol=spec.product_tolerance)
        faz = eval_f_batch(sys_, sys_.a * grid, tol=spec.product_tolerance)
        resid = float(np.max(np.abs(faz - sys_.P.eval_array(fz))))
        scale = float(np.max(np.maximum(1.0, np.abs(faz))))
        eq_ok = resid <= 1e-9 * scale
        lines.append(f"functional_equation: residual={resid:.3e} "
                     f"{'PASS' if eq_ok else 'FAIL'}")

        d2 = taylor_at_zero(sys_, 2).derivative_at_zero(2)
        h = 1e-4
        fd = (eval_f_direct(sys_, h) - 2 * eval_f_direct(sys_, 0.0)
              + eval_f_direct(sys_, -h)) / h ** 2
        taylor_ok = abs(d2 - fd) <= 1e-5 * max(1.0, abs(d2))
        lines.append(f"taylor_d2: recursion={d2.real:.12g} "
                     f"difference={fd.real:.12g} "
                     f"{'PASS' if taylor_ok else 'FAIL'}")

        if not (route_ok and rt_ok and eq_ok and taylor_ok):
            code = 2

    with _Output(args.output) as fh:
        for line in lines:
            print(line, file=fh)
    return code


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spzeros",
        description="Zeros, inverse branches, and factorizations of entire "
                    "solutions of f(az) = P(f(z)).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", help="path to a JSON problem file")
        p.add_argument("-o", "--output", default="-",
                       help="output path ('-' for stdout)")
        p.add_argument("--max-support", type=int, default=None,
                       help="override the problem file's max_support")
        p.add_argument("--tol", type=float, default=None,
                       help="override the problem file's product_tolerance")

    p_zeros = sub.add_parser("zeros", help="enumerate zeros of f")
    common(p_zeros)
    p_zeros.add_argument("--png", type=_parse_png, default=None,
                         metavar="WxH", help="also write a scatter PNG")
    p_zeros.add_argument("--png-path", default=None,
                         help="path for the scatter PNG")
    p_zeros.add_argument("--check-hypothesis", action="store_true",
                         help="probe principal-orbit contraction first")
    p_zeros.set_defaults(func=cmd_zeros)

    p_inv = sub.add_parser("invert", help="enumerate solutions of f(z) = w")
    common(p_inv)
    p_inv.add_argument("--w", type=_parse_complex, default=0j,
                       metavar="RE,IM", help="anchor value (default 0)")
    p_inv.add_argument("--circle", type=_parse_circle, default=None,
                       metavar="R,K", help="sweep K anchors on |w| = R")
    p_inv.add_argument("--verify", action="store_true",
                       help="check f(g) = w on every row")
    p_inv.add_argument("--check-hypothesis", action="store_true",
                       help="probe principal-orbit contraction first")
    p_inv.set_defaults(func=cmd_invert)

    p_mom = sub.add_parser("moments", help="power sums of inverse solutions")
    common(p_mom)
    p_mom.add_argument("--m", type=_parse_orders, default=(1, 2),
                       metavar="M1,M2,...", help="orders (default 1,2)")
    p_mom.add_argument("--w", type=_parse_complex, default=0j,
                       metavar="RE,IM", help="anchor value (default 0)")
    p_mom.set_defaults(func=cmd_moments)

    p_wh = sub.add_parser("wh", help="three-route evaluation comparison")
    common(p_wh)
    p_wh.add_argument("--z", type=_parse_complex, action="append",
                      required=True, metavar="RE,IM",
                      help="evaluation point (repeatable)")
    p_wh.add_argument("--anchor", type=_parse_complex, default=0j,
                      metavar="RE,IM",
                      help="generic anchor for the factored route")
    p_wh.set_defaults(func=cmd_wh)

    p_chk = sub.add_parser("check", help="hypothesis probe + invariants")
    common(p_chk)
    p_chk.add_argument("--anchor", type=_parse_complex, default=0j,
                       metavar="RE,IM",
                       help="generic anchor for the factored route")
    p_chk.set_defaults(func=cmd_check)

    return parser


def _apply_overrides(spec, args):
    if args.max_support is not None:
        check_enumeration_size(spec.degree, args.max_support)
        spec = replace(spec, max_support=args.max_support)
    if args.tol is not None:
        if args.tol <= 0:
            raise ValidationError("product_tolerance must be positive")
        spec = replace(spec, product_tolerance=args.tol)
    return spec


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load_problem(args.problem)
        spec = _apply_overrides(spec, args)
        return args.func(spec, args)
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except SPZerosError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
