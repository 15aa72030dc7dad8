"""Hadamard-type products over branch addresses and momenta identities.

The genus-zero condition d < |a| makes the address values g_sigma(w) grow
fast enough that prod (1 - z / g_sigma(w)) converges absolutely; f is then
recovered as w + (b - w) times that product. Momenta are the power sums
sum_sigma ((w - b) / g_sigma(w))^m, which close in terms of the Taylor data
of f at 0.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .branches import (
    W_NEAR_B,
    geometric_tail,
    growth_floor,
    sweep_products,
    sweep_solutions_at_b,
)
from .errors import DivergentMoment, OrderTooLarge
from .system import bell_polynomial, taylor_at_zero


@dataclass(frozen=True)
class MomentReport:
    """Shell-by-shell trace of one momentum sum against its closed form.

    shells[k] = (support, cumulative partial sum through that shell);
    computed_sum is exactly the last entry. tail_bound bounds the modulus of
    the dropped part of the sum.
    """

    order_m: int
    w: complex
    computed_sum: complex
    closed_form_rhs: complex
    shells: tuple
    tail_bound: float


@dataclass(frozen=True)
class WHEvaluation:
    """One product-formula evaluation of f at z anchored at w_anchor."""

    z: complex
    w_anchor: complex
    product_value: complex
    factors_used: int
    tail_bound: float


@lru_cache(maxsize=4)
def _anchor_sweep(sys, w, max_support, tol, n_cap, root_tolerance):
    return sweep_products(sys, w, max_support, tol, n_cap, root_tolerance)


@lru_cache(maxsize=4)
def _base_sweep(sys, max_support, tol, n_cap, root_tolerance):
    return sweep_solutions_at_b(sys, max_support, tol, n_cap, root_tolerance)


def _complex_sum(values):
    """Exactly rounded complex sum (order independent)."""
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _pairwise_product(values):
    """Balanced tree product, deterministic for a fixed operand order."""
    x = np.asarray(values, dtype=np.complex128)
    if x.size == 0:
        return 1.0 + 0j
    while x.size > 1:
        if x.size % 2:
            x = np.concatenate([x, np.ones(1, dtype=np.complex128)])
        x = x[0::2] * x[1::2]
    return complex(x[0])


def closed_form_momentum(sys, m, w):
    """Right-hand side of the order-m momentum identity at anchor w.

    sum_{j=1}^{m} (w - b)^(m-j) ((j-1)!/(m-1)!) B_{m,j}(f'(0), ..., f^(m-j+1)(0)).

    For m = 1 this is f'(0) = 1 for every anchor.
    """
    if m < 1:
        raise ValueError("momentum order must be >= 1")
    taylor = taylor_at_zero(sys, m)
    raw = [taylor.derivative_at_zero(k) for k in range(m + 1)]
    total = 0j
    for j in range(1, m + 1):
        coeff = math.factorial(j - 1) / math.factorial(m - 1)
        total += ((w - sys.b) ** (m - j) * coeff
                  * bell_polynomial(m, j, raw[1:m - j + 2]))
    return total


def moment_sum(sys, m, w, max_support, tol=1e-12, n_cap=200,
               root_tolerance=1e-13):
    """Momentum sum_sigma ((w - b) / g_sigma(w))^m over support <= max_support.

    Shell sums are exactly rounded (compensated) and accumulated shell by
    shell in ascending support order. Requires w != b and absolute
    convergence d |a|^-m < 1.
    """
    if m < 1:
        raise ValueError("momentum order must be >= 1")
    w = complex(w)
    if abs(w - sys.b) <= W_NEAR_B:
        raise ValueError("momenta need an anchor away from the fixed point")
    a_abs = abs(sys.a)
    q = sys.d * a_abs ** (-m)
    if q >= 1.0:
        raise DivergentMoment(
            f"d |a|^-m = {q:.6f} >= 1: momentum of order {m} diverges"
        )
    sweep = _anchor_sweep(sys, w, max_support, tol, n_cap, root_tolerance)
    terms = ((w - sys.b) / sweep.values) ** m
    running = 0j
    shells = []
    for support in range(max_support + 1):
        block = terms[sweep.support == support]
        running = running + _complex_sum(block)
        shells.append((support, running))
    c_est = growth_floor(sweep, a_abs)
    bound = (abs(w - sys.b) ** m
             * geometric_tail(c_est, sys.d, a_abs, max_support + 1, m))
    return MomentReport(order_m=m, w=w, computed_sum=running,
                        closed_form_rhs=closed_form_momentum(sys, m, w),
                        shells=tuple(shells), tail_bound=bound)


def vieta_sums(sys, w, max_support, tol=1e-12, n_cap=200,
               root_tolerance=1e-13):
    """First two Viete aggregates of y_sigma = (w - b)/g_sigma(w).

    Returns (S1, S2) with S1 = sum y_sigma and S2 = sum over unordered pairs
    y_sigma y_tau = (S1^2 - sum y_sigma^2) / 2.
    """
    w = complex(w)
    if abs(w - sys.b) <= W_NEAR_B:
        raise ValueError("Viete sums need an anchor away from the fixed point")
    sweep = _anchor_sweep(sys, w, max_support, tol, n_cap, root_tolerance)
    y = (w - sys.b) / sweep.values
    p1 = _complex_sum(y)
    p2 = _complex_sum(y * y)
    return p1, (p1 * p1 - p2) / 2.0


def wh_eval(sys, z, w_anchor, max_support, tol=1e-12, n_cap=200,
            root_tolerance=1e-13):
    """Evaluate f(z) by its genus-zero product over branch addresses.

    For an anchor w != b:  f(z) = w + (b - w) prod (1 - z / g_sigma(w)).
    For w = b the solutions ladder in powers of a and the product becomes

        f(z) = b + z prod_{k>=0} prod_bases (1 - z / (a^k base)),

    with the rung cap k <= M chosen so every dropped factor is within
    0.5 tol of 1. Requires d < |a|; z = 0 returns b exactly.
    """
    a_abs = abs(sys.a)
    if sys.d >= a_abs:
        raise OrderTooLarge(
            f"product form needs d < |a|, got d = {sys.d}, |a| = {a_abs:.6f}"
        )
    z = complex(z)
    w = complex(w_anchor)
    if z == 0:
        return WHEvaluation(z=z, w_anchor=w, product_value=complex(sys.b),
                            factors_used=1, tail_bound=0.0)
    inv_a = 1.0 / a_abs

    if abs(w - sys.b) <= W_NEAR_B:
        sweep = _base_sweep(sys, max_support, tol, n_cap, root_tolerance)
        bases = sweep.values
        g_min = float(np.min(np.abs(bases)))
        # Smallest M with |z| |a|^-(M+1) <= 0.5 tol g_min; rung 0 always runs.
        need = abs(z) / (0.5 * tol * g_min)
        rungs = max(1, math.ceil(math.log(need, a_abs))) if need > 1 else 1
        total = 1.0 + 0j
        scaled = complex(z)
        for _ in range(rungs):
            total *= _pairwise_product(1.0 - scaled / bases)
            scaled /= sys.a
        c_est = growth_floor(sweep, a_abs)
        missing_bases = geometric_tail(c_est, sys.d, a_abs, max_support + 1, 1)
        enum_sum = math.fsum(1.0 / np.abs(bases))
        log_excess = abs(z) * (
            missing_bases / (1.0 - inv_a)
            + a_abs ** (-rungs) / (1.0 - inv_a) * (enum_sum + missing_bases)
        )
        bound = abs(z) * abs(total) * math.expm1(log_excess)
        return WHEvaluation(z=z, w_anchor=w,
                            product_value=sys.b + z * total,
                            factors_used=rungs * bases.size,
                            tail_bound=bound)

    sweep = _anchor_sweep(sys, w, max_support, tol, n_cap, root_tolerance)
    prod = _pairwise_product(1.0 - z / sweep.values)
    c_est = growth_floor(sweep, a_abs)
    log_excess = abs(z) * geometric_tail(c_est, sys.d, a_abs,
                                         max_support + 1, 1)
    bound = abs(sys.b - w) * abs(prod) * math.expm1(log_excess)
    return WHEvaluation(z=z, w_anchor=w,
                        product_value=w + (sys.b - w) * prod,
                        factors_used=sweep.values.size,
                        tail_bound=bound)
