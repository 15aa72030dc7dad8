"""Self-similar systems f(az) = P(f(z)) anchored at a repelling fixed point.

A system packages the polynomial P, its fixed point b with multiplier
a = P'(b) (|a| > 1), and the quotient Q(z) = (P(z) - b)/(z - b). The entire
solution f is normalized by f(0) = b, f'(0) = 1 and can be evaluated directly
as the limit of P composed n times with itself applied to b + a^-n z.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import dd
from .errors import (
    DegreeTooLow,
    InvalidIndices,
    NonConvergence,
    NoRepellingFixedPoint,
    ZeroFixedPoint,
)
from .poly import ComplexPolynomial, all_roots, q_polynomial

FIXED_POINT_TOLERANCE = 1e-12
# Direct evaluation: iterate depth grows in steps of this size until two
# consecutive depths agree.
DEPTH_STEP = 5
OVERFLOW_LIMIT = 1e150
# Absolute accuracy floor of a deep composition: the seed rounding eps |v_0|
# is amplified by the chain derivative product, so agreement below
# NOISE_EPS * that amplification cannot be demanded in doubles.
NOISE_EPS = 16 * 2.0 ** -52


@dataclass(frozen=True)
class SPSystem:
    """Polynomial P with repelling fixed point b != 0 and multiplier a.

    V is P conjugated to the fixed point, V(v) = P(b + v) - b, so V(0) = 0
    and V'(0) = a. Deep self-composition iterates V on the deviation from b
    rather than P on absolute points; this keeps full relative precision
    while the deviation is far below |b|.
    """

    P: ComplexPolynomial
    b: complex
    a: complex
    d: int
    Q: ComplexPolynomial
    V: ComplexPolynomial
    rho: float


@dataclass(frozen=True)
class TaylorCoefficients:
    """Taylor data of f at 0: values[m] = f^(m)(0) / m!."""

    values: tuple

    def derivative_at_zero(self, m):
        """Raw derivative f^(m)(0)."""
        return self.values[m] * math.factorial(m)


def build_system(P, fixed_point_hint, root_tolerance=1e-13,
                 fixed_point_tolerance=FIXED_POINT_TOLERANCE):
    """Locate the repelling fixed point nearest the hint and assemble a system.

    Parameters
    ----------
    P : ComplexPolynomial
        Degree d >= 2 polynomial.
    fixed_point_hint : complex
        The fixed point of P nearest this value is selected.

    Returns
    -------
    SPSystem

    Raises
    ------
    DegreeTooLow
        If deg P < 2.
    NoRepellingFixedPoint
        If the nearest fixed point has |P'(b)| <= 1.
    ZeroFixedPoint
        If the nearest fixed point is 0 (the construction needs b != 0).
    """
    d = P.degree
    if d < 2:
        raise DegreeTooLow(f"degree {d} < 2")
    hint = complex(fixed_point_hint)
    if not cmath.isfinite(hint):
        raise ValueError("non-finite fixed point hint")

    shifted = list(P.coefficients)
    shifted[1] = shifted[1] - 1
    fixed_points = all_roots(ComplexPolynomial(tuple(shifted)), 0j, root_tolerance)
    b = min(fixed_points, key=lambda r: (abs(r - hint), r.real, r.imag))

    # Newton polish on P(z) - z so the fixed point residual is at machine level.
    dP = P.derivative()
    for _ in range(3):
        denom = dP.eval(b) - 1.0
        if denom == 0:
            break
        b = b - (P.eval(b) - b) / denom

    if abs(b) <= fixed_point_tolerance:
        raise ZeroFixedPoint("fixed point at the origin is excluded")
    a = dP.eval(b)
    if abs(a) <= 1.0:
        raise NoRepellingFixedPoint(
            f"|P'(b)| = {abs(a):.6f} <= 1 at b = {b}; need a repelling fixed point"
        )
    Q = q_polynomial(P, b, fixed_point_tolerance)

    # Taylor shift: V(v) = P(b + v) - b with the constant pinned to 0 and the
    # linear coefficient pinned to a, so the conjugacy is exact at the origin.
    shifted = [0j, complex(a)]
    deriv = P.derivative()
    for j in range(2, d + 1):
        deriv = deriv.derivative()
        shifted.append(deriv.eval(b) / math.factorial(j))
    V = ComplexPolynomial(tuple(shifted))

    rho = math.log(d) / math.log(abs(a))
    return SPSystem(P=P, b=complex(b), a=complex(a), d=d, Q=Q, V=V, rho=rho)


def _iterate_from_scaled(sys, z, n, dV):
    """b + (V composed n times)(a^-n z) and its noise amplification.

    Iterating the conjugate V on the deviation avoids absorbing a^-n z into
    the floating point granularity of b, which would otherwise amplify into
    an O(|a|^n eps) error. The second return value is |a^-n z| times the
    chain derivative product along the orbit; times NOISE_EPS it is the
    absolute accuracy floor of the composition. Returns (None, None) on
    overflow.
    """
    v = sys.a ** (-n) * z
    damp = abs(v)
    for _ in range(n):
        damp *= abs(dV.eval(v))
        v = sys.V.eval(v)
        if abs(v) > OVERFLOW_LIMIT:
            return None, None
    return sys.b + v, damp


def eval_f_direct(sys, z, tol=1e-12, n_max=200):
    """Evaluate the entire solution f at z by deep self-composition.

    The depth starts at ceil(log_|a| |z|) + 10 and grows by DEPTH_STEP until
    two consecutive depths agree within tol (relative to max(1, |f|)) plus
    the absolute noise floor of the composition, which for large |z| caps
    what doubles can resolve at roughly eps |z| |f'(z)|.

    Raises
    ------
    NonConvergence
        If the depth cap is reached, or the orbit overflows; the exception
        carries the last two values and their gap.
    """
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError("non-finite evaluation point")
    az = abs(z)
    dV = sys.V.derivative()
    n = 10 + max(1, math.ceil(math.log(az, abs(sys.a)))) if az > 1 else 11
    prev, _ = _iterate_from_scaled(sys, z, n, dV)
    if prev is None:
        raise NonConvergence(f"orbit overflow at depth {n} for z = {z}")
    cur, gap = prev, math.inf
    while n + DEPTH_STEP <= n_max:
        n += DEPTH_STEP
        cur, damp = _iterate_from_scaled(sys, z, n, dV)
        if cur is None:
            raise NonConvergence(f"orbit overflow at depth {n} for z = {z}")
        gap = abs(cur - prev)
        if gap <= tol * max(1.0, abs(cur)) + NOISE_EPS * damp:
            return cur
        prev = cur
    raise NonConvergence(
        f"direct evaluation still moving at depth cap {n_max} for z = {z}",
        last=cur, previous=prev, gap=gap,
    )


def eval_f_batch(sys, z, tol=1e-12, n_max=200):
    """Vectorized eval_f_direct over an ndarray of points (shared depth).

    The composition is carried in double-double arithmetic, so the returned
    values do not suffer the plain-double noise floor of the scalar route:
    accuracy is limited by tol and the final rounding alone even at points
    of size 1e7 and beyond.
    """
    z = np.asarray(z, dtype=np.complex128)
    if z.size == 0:
        return z.copy()
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite evaluation point")
    az = float(np.max(np.abs(z)))
    coeffs = sys.V.coefficients
    n = 10 + max(1, math.ceil(math.log(az, abs(sys.a)))) if az > 1 else 11

    def run(depth):
        v = dd.cdd_div_exact_by(z, dd.cdd_power(sys.a, depth))
        for _ in range(depth):
            v = dd.cdd_horner(coeffs, v)
            if not np.all(np.abs(v[0]) + np.abs(v[2]) <= OVERFLOW_LIMIT):
                raise NonConvergence(f"orbit overflow at depth {depth}")
        return sys.b + dd.cdd_collapse(v)

    prev = run(n)
    gap = math.inf
    while n + DEPTH_STEP <= n_max:
        n += DEPTH_STEP
        cur = run(n)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return cur
        gap = float(np.max(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur))))
        prev = cur
    raise NonConvergence(f"direct evaluation still moving at depth cap {n_max}",
                         gap=gap)


def bell_polynomial(m, j, x):
    """Partial exponential Bell polynomial B_{m,j}(x_1, ..., x_{m-j+1}).

    Direct enumeration of the index multisets: over all k_1, ..., k_{m-j+1}
    with sum k_i = j and sum i k_i = m, add
    m! / (k_1! ... k_r!) * prod (x_i / i!)^{k_i}.
    """
    if not (isinstance(m, int) and isinstance(j, int)):
        raise InvalidIndices("m and j must be integers")
    if j < 1 or j > m:
        raise InvalidIndices(f"need 1 <= j <= m, got m={m}, j={j}")
    r = m - j + 1
    if len(x) < r:
        raise InvalidIndices(f"need at least {r} arguments, got {len(x)}")
    xs = [complex(v) for v in x[:r]]
    total = 0j

    def descend(i, count_left, weight_left, partial):
        nonlocal total
        if i > r:
            if count_left == 0 and weight_left == 0:
                total += partial
            return
        step = xs[i - 1] / math.factorial(i)
        k_max = min(count_left, weight_left // i)
        term = partial
        for k in range(k_max + 1):
            if k > 0:
                term = term * step / k
            descend(i + 1, count_left - k, weight_left - i * k, term)

    descend(1, j, m, 1.0 + 0j)
    return total * math.factorial(m)


def taylor_at_zero(sys, max_order):
    """Taylor coefficients of f at 0 through order max_order.

    Uses the recursion obtained by differentiating f(az) = P(f(z)) at 0:
    f''(0) = P''(b) / (a^2 - a), and for m >= 2

        f^(m)(0) = (a^m - a)^-1 sum_{j=2}^{m} P^(j)(b) B_{m,j}(f'(0), ...).
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    # P^(j)(b) for j = 0 .. d.
    derivs_at_b = []
    pj = sys.P
    for _ in range(sys.d + 1):
        derivs_at_b.append(pj.eval(sys.b))
        pj = pj.derivative()

    raw = [sys.b, 1.0 + 0j]
    for m in range(2, max_order + 1):
        acc = 0j
        for j in range(2, min(m, sys.d) + 1):
            acc += derivs_at_b[j] * bell_polynomial(m, j, raw[1:m - j + 2])
        raw.append(acc / (sys.a ** m - sys.a))
    values = tuple(raw[m] / math.factorial(m) for m in range(max_order + 1))
    return TaylorCoefficients(values=values)
