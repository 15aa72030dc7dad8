"""Inverse-branch orbits, digit addresses, and Viete-type infinite products.

Addresses are eventually-zero digit sequences sigma: position n picks which
inverse branch of P is applied at step n, digit 0 always meaning the
principal branch (the root nearest the fixed point b). The canonical form
strips trailing zeros; the support is the position of the last nonzero digit.

The value attached to an address at anchor w != b is

    g_sigma(w) = (w - b) * prod_{n>=1} a / Q(u_n),      u_0 = w,
    u_n = P_{sigma_n}^{-1}(u_{n-1}),

which enumerates all solutions of f(z) = w. At w = 0 these are the zeros of
f. The w = b case degenerates; solutions of f(z) = b instead come in
geometric ladders a^m * base over addresses whose first digit is nonzero.

Numerically the product is carried in telescoped form. Since
Q(u_n) = (u_{n-1} - b) / (u_n - b), the partial products collapse to

    (w - b) * prod_{n<=k} a / Q(u_n) = a^k (u_k - b),

so every node tracks its deviation v = u - b as the primary quantity:
principal steps update v <- v / Q(u) (well conditioned, since an orbit can
only approach a root of Q when its parent is near b, where Q is evaluated
near b instead), and nonzero-digit steps reset v = u - b at an O(1)
distance. Direct evaluation of Q at a point close to one of its roots, which
loses half the digits to cancellation exactly at the largest solutions,
never happens. Deep in the contraction ball the principal step inverts the
conjugate polynomial V(v) = P(b + v) - b by Newton iteration on deviations,
which needs no root finding and keeps the relative error of v at the
rounding level no matter how small v gets.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iter_product

import numpy as np

from .errors import (
    BasinEscape,
    DivergentTail,
    InvalidIndices,
    NonConvergence,
    SPZerosError,
    ValidationError,
    ZeroDenominator,
)
from .poly import all_roots, roots_batch

# |w - b| at or below this routes through the degenerate-anchor construction.
W_NEAR_B = 1e-12
# Tail stopping: factor within tol of 1 and this many consecutive orbit steps
# inside the certified contraction ball.
REGION_STREAK = 3
# Certified contraction ball: radii 2^-k are tried for k = 1 .. DELTA_MAX_K,
# sampling DELTA_CIRCLE points per circle against the midpoint ratio.
DELTA_MAX_K = 40
DELTA_CIRCLE = 32
# Batched sweeps expand the address tree in subtree chunks of at most this
# many leaves; chunk boundaries are fixed so thread count cannot reorder work.
CHUNK_LEAVES = 1 << 16


@dataclass(frozen=True)
class SigmaSequence:
    """Canonical digit address: finitely many nonzero digits, none trailing."""

    digits: tuple

    def __post_init__(self):
        digits = tuple(int(v) for v in self.digits)
        for v in digits:
            if v < 0:
                raise ValueError("digits must be nonnegative")
        if digits and digits[-1] == 0:
            raise ValueError("canonical form has no trailing zeros")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_digits(cls, seq):
        """Canonicalize by stripping trailing zeros."""
        digits = [int(v) for v in seq]
        while digits and digits[-1] == 0:
            digits.pop()
        return cls(tuple(digits))

    @property
    def support(self):
        """Position of the last nonzero digit (0 for the zero sequence)."""
        return len(self.digits)

    def first_nonzero(self):
        """1-based position of the first nonzero digit, or 0 if all zero."""
        for i, v in enumerate(self.digits):
            if v:
                return i + 1
        return 0


@dataclass(frozen=True)
class BranchProduct:
    """Truncated infinite product with an a-posteriori tail estimate."""

    value: complex
    terms_used: int
    tail_estimate: float
    converged: bool


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of probing principal-orbit convergence on a sample grid."""

    sampled_points: int
    converged_points: int
    max_orbit_length: int
    worst_point: complex
    passed: bool


def enumerate_sigma(d, max_support):
    """Yield canonical addresses grouped by support, lexicographic within.

    Shell 0 is the zero sequence alone; shell n > 0 holds the
    d^(n-1) * (d-1) addresses whose last digit is nonzero.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if max_support < 0:
        raise ValueError("max_support must be nonnegative")
    yield SigmaSequence(())
    for support in range(1, max_support + 1):
        for prefix in iter_product(range(d), repeat=support - 1):
            for last in range(1, d):
                yield SigmaSequence(prefix + (last,))


def thread_limit():
    """Worker cap from SPZEROS_THREADS; hardware default when unset."""
    raw = os.environ.get("SPZEROS_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"SPZEROS_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValidationError("SPZEROS_THREADS must be >= 1")
    return n


def _run_ordered(tasks, workers):
    """Run zero-argument tasks, results in task order regardless of workers."""
    if workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(lambda task: task(), tasks))


def labels_batch(sys, w, root_tolerance=1e-13):
    """All inverse branches at each point, principal first.

    Returns shape (B, d): column 0 is the root of P(z) = w nearest b (ties by
    smaller principal argument of root - b, then lexicographic (re, im));
    the remaining columns are sorted by that argument, same tie-break.
    """
    w = np.asarray(w, dtype=np.complex128)
    roots = roots_batch(sys.P, w, root_tolerance)
    rel = roots - sys.b
    dist = np.abs(rel)
    ang = np.angle(rel)
    by_dist = np.lexsort((rel.imag, rel.real, ang, dist), axis=-1)
    principal = by_dist[:, :1]
    by_angle = np.lexsort((rel.imag, rel.real, ang), axis=-1)
    rest = by_angle[by_angle != principal].reshape(w.shape[0], sys.d - 1)
    order = np.concatenate([principal, rest], axis=1)
    return np.take_along_axis(roots, order, axis=1)


def branch_labels(sys, w, root_tolerance=1e-13):
    """Deterministically ordered inverse branches at a single point."""
    row = labels_batch(sys, np.array([complex(w)]), root_tolerance)[0]
    return [complex(v) for v in row]


def principal_branch(sys, w, root_tolerance=1e-13):
    """The inverse branch fixing b: root of P(z) = w nearest b."""
    return branch_labels(sys, w, root_tolerance)[0]


@lru_cache(maxsize=64)
def contraction_delta(sys):
    """Largest certified radius on which the principal branch contracts.

    Scans radii 2^-k and accepts the first (largest) whose 32-point circle
    satisfies |P_0^{-1}(b + r e^{i t}) - b| / r <= (1 + |1/a|) / 2.
    """
    target = 0.5 * (1.0 + 1.0 / abs(sys.a))
    angles = np.exp(2j * np.pi * np.arange(DELTA_CIRCLE) / DELTA_CIRCLE)
    for k in range(1, DELTA_MAX_K + 1):
        r = 2.0 ** (-k)
        circle = sys.b + r * angles
        pulled = labels_batch(sys, circle)[:, 0]
        if float(np.max(np.abs(pulled - sys.b))) / r <= target:
            return r
    raise SPZerosError(
        "could not certify a contraction ball around the fixed point"
    )


def _coeff_scale(sys):
    return max(1.0, max(abs(c) for c in sys.P.coefficients))


@lru_cache(maxsize=64)
def _deep_radius(sys):
    """Radius below which deviations are stepped by Newton on V directly.

    Certifies, by halving, an r with (i) the nonlinear part of V' bounded by
    |a|/8 on |v| <= r, (ii) a crude Newton-Kantorovich bound for starting at
    v/a, and (iii) enough clearance from the contraction boundary and from
    the nonprincipal preimages of b. Returns 0.0 when certification fails,
    which simply keeps every step on the root-finding path.
    """
    a_abs = abs(sys.a)
    c = [abs(v) for v in sys.V.coefficients]  # c[0] = 0, c[1] = |a|
    degree = sys.V.degree
    rsep = min(abs(r - sys.b) for r in all_roots(sys.Q, sys.b))
    r = min(0.5 * contraction_delta(sys), 0.25 * rsep, 1.0)
    for _ in range(80):
        slope = sum(j * c[j] * r ** (j - 1) for j in range(2, degree + 1))
        resid = sum(c[j] * r ** j for j in range(2, degree + 1))
        curv = sum(j * (j - 1) * c[j] * r ** (j - 2)
                   for j in range(2, degree + 1))
        if slope <= a_abs / 8.0 and 2.0 * resid * curv <= (7.0 * a_abs / 8.0) ** 2:
            return r
        r *= 0.5
    return 0.0


def _conjugate_newton(sys, v_target, dV):
    """Principal inverse step on deviations: solve V(x) = v_target, x near
    v_target / a. Only valid inside the certified _deep_radius ball."""
    x = v_target / sys.a
    floor = 8e-16 * np.abs(v_target)
    for _ in range(4):
        res = sys.V.eval_array(x) - v_target
        if np.all(np.abs(res) <= floor):
            break
        d = dV.eval_array(x)
        d = np.where(np.abs(d) == 0.0, 1e-300, d)
        x = x - res / d
    return x


def _principal_step(sys, u, root_tolerance, delta):
    """One principal-branch step on an array of points.

    Points already deep inside the contraction ball take a warm-started
    Newton iteration (the linearization b + (u - b)/a starts inside the
    quadratic basin); everything else, and any Newton failure, falls back to
    the full simultaneous root solve.
    """
    out = np.empty_like(u)
    dist = np.abs(u - sys.b)
    near = dist < 0.5 * delta
    far = ~near
    if near.any():
        target = u[near]
        z = sys.b + (target - sys.b) / sys.a
        thresh = root_tolerance * np.maximum(
            np.maximum(1.0, np.abs(target)), _coeff_scale(sys)
        )
        dP = sys.P.derivative()
        live = np.arange(z.size)
        for _ in range(12):
            res = sys.P.eval_array(z[live]) - target[live]
            ok = np.abs(res) <= thresh[live]
            live = live[~ok]
            if live.size == 0:
                break
            deriv = dP.eval_array(z[live])
            deriv = np.where(np.abs(deriv) == 0.0, 1e-300, deriv)
            z[live] = z[live] - (sys.P.eval_array(z[live]) - target[live]) / deriv
        # One unconditional polish step: quadratic convergence takes the
        # position error from the residual threshold down to rounding level.
        deriv = dP.eval_array(z)
        deriv = np.where(np.abs(deriv) == 0.0, 1e-300, deriv)
        z = z - (sys.P.eval_array(z) - target) / deriv
        bad = np.zeros(z.size, dtype=bool)
        bad[live] = True
        # Contraction sanity: the step must not move away from b.
        bad |= np.abs(z - sys.b) > dist[near]
        if bad.any():
            z[bad] = labels_batch(sys, target[bad], root_tolerance)[:, 0]
        out[near] = z
    if far.any():
        out[far] = labels_batch(sys, u[far], root_tolerance)[:, 0]
    return out


def _expand_level(sys, v, root_tolerance):
    """Children of every node in digit order, deviation-tracked.

    Principal children (digit 0) update v by the exact quotient identity
    v / Q(child); nonzero digits land an O(1) distance from b, so plain
    subtraction is accurate there. Forming the parent point as b + v is
    lossless for the children: the principal child only uses Q near b, and
    a digit child's offset from its limit root scales with v itself.
    """
    labels = labels_batch(sys, sys.b + v, root_tolerance)
    qv = sys.Q.eval_array(labels[:, 0])
    if np.any(qv == 0):
        raise ZeroDenominator("Q vanished while expanding the address tree")
    v_next = labels - sys.b
    v_next[:, 0] = v / qv
    return v_next.reshape(-1)


def _tail_products(sys, v, tol, n_cap, root_tolerance):
    """Principal-branch tail factors for every deviation, element-wise stopping.

    Returns (tail, steps, tail_estimate, converged). An element retires once
    its current factor is within tol of 1, the orbit has spent
    REGION_STREAK consecutive steps inside the certified ball, and the
    geometric estimate |factor - 1| c / (1 - c) is itself at or below tol.

    Deviations outside the deep radius step through the root finder with the
    quotient update v / Q; inside it they step by Newton on the conjugate
    polynomial, where the factor a v_next / v_prev carries only rounding
    error.
    """
    delta = contraction_delta(sys)
    r_deep = _deep_radius(sys)
    dV = sys.V.derivative()
    a_abs = abs(sys.a)
    c_floor = 1.0 / a_abs
    c_cert = 0.5 * (1.0 + c_floor)

    size = v.size
    tail = np.ones(size, dtype=np.complex128)
    steps = np.full(size, 0, dtype=np.int32)
    est = np.zeros(size, dtype=np.float64)
    converged = np.zeros(size, dtype=bool)

    work = np.arange(size)
    cur = v.copy()
    prevdist = np.abs(cur)
    streak = np.zeros(size, dtype=np.int16)
    last_est = np.full(size, np.inf)

    for k in range(1, n_cap + 1):
        deep = np.abs(cur) < r_deep
        nxt = np.empty_like(cur)
        factor = np.empty_like(cur)
        if deep.any():
            x = _conjugate_newton(sys, cur[deep], dV)
            nxt[deep] = x
            factor[deep] = sys.a * x / cur[deep]
        shallow = ~deep
        if shallow.any():
            stepped = _principal_step(sys, sys.b + cur[shallow],
                                      root_tolerance, delta)
            qv = sys.Q.eval_array(stepped)
            if np.any(qv == 0):
                raise ZeroDenominator("Q vanished along a principal tail orbit")
            nxt[shallow] = cur[shallow] / qv
            factor[shallow] = sys.a / qv
        tail[work] *= factor
        dist = np.abs(nxt)
        streak = np.where(dist < delta, streak + 1, 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(prevdist > 0.0, dist / prevdist, 0.0)
        c_used = np.clip(ratio, c_floor, c_cert)
        gap = np.abs(factor - 1.0)
        cur_est = gap * c_used / (1.0 - c_used)
        retire = (gap <= tol) & (streak >= REGION_STREAK) & (cur_est <= tol)
        idx = work[retire]
        steps[idx] = k
        est[idx] = cur_est[retire]
        converged[idx] = True
        keep = ~retire
        work = work[keep]
        cur = nxt[keep]
        prevdist = dist[keep]
        streak = streak[keep]
        last_est = cur_est[keep]
        if work.size == 0:
            return tail, steps, est, converged
    # Stragglers at the cap: report the last estimate, flagged unconverged.
    steps[work] = n_cap
    est[work] = last_est
    return tail, steps, est, converged


def _supports_from_indices(idx, d, depth):
    """Support of each padded address index: depth minus trailing base-d zeros."""
    supp = np.full(idx.shape, depth, dtype=np.int16)
    j = idx.copy()
    for _ in range(depth):
        strip = (j % d == 0) & (supp > 0)
        if not strip.any():
            break
        j = np.where(strip, j // d, j)
        supp = np.where(strip, supp - 1, supp)
    return supp


@dataclass
class BranchSweep:
    """Product values for every address of support <= depth, in one pass.

    Addresses are indexed by padding to exactly `depth` digits and reading
    them as a base-d integer, most significant digit first; index j therefore
    runs over [offset, offset + values.size) and the canonical address is j
    with trailing zeros stripped. For an anchor sweep, values[j - offset] is
    g_sigma(anchor); for the degenerate-anchor sweep (anchor None) it is the
    ladder base attached to an address whose first digit is nonzero.
    Arrays are shared read-only; treat them as immutable.
    """

    depth: int
    d: int
    anchor: object  # complex, or None for the ladder-base sweep
    offset: int
    values: np.ndarray
    support: np.ndarray
    terms_used: np.ndarray
    tail_estimate: np.ndarray
    converged: np.ndarray

    def indices(self):
        return np.arange(self.values.size, dtype=np.int64) + self.offset

    def digits_of(self, index):
        """Canonical digit tuple of a padded address index."""
        digits = []
        j = int(index)
        for _ in range(self.depth):
            digits.append(j % self.d)
            j //= self.d
        digits.reverse()
        while digits and digits[-1] == 0:
            digits.pop()
        return tuple(digits)


def _sweep_from_seeds(sys, seeds_v, levels, depth, offset, tol, n_cap,
                      root_tolerance):
    """Expand seed deviations `levels` more levels, then tail every leaf.

    The telescoped value of a leaf is a^depth * v_leaf times its tail
    product, regardless of how the prefix interleaved principal and nonzero
    digits.
    """
    v = seeds_v
    # Serial expansion until one seed subtree fits a chunk.
    while levels > 0 and sys.d ** levels > CHUNK_LEAVES:
        v = _expand_level(sys, v, root_tolerance)
        levels -= 1
    leaves_per_seed = sys.d ** levels
    group = max(1, CHUNK_LEAVES // leaves_per_seed)
    spans = [(lo, min(lo + group, v.size)) for lo in range(0, v.size, group)]
    renorm = sys.a ** depth

    def chunk_task(lo, hi):
        cv = v[lo:hi]
        for _ in range(levels):
            cv = _expand_level(sys, cv, root_tolerance)
        tail, steps, est, conv = _tail_products(sys, cv, tol, n_cap,
                                                root_tolerance)
        return renorm * cv * tail, steps, est, conv

    results = _run_ordered(
        [lambda lo=lo, hi=hi: chunk_task(lo, hi) for lo, hi in spans],
        thread_limit(),
    )
    values = np.concatenate([r[0] for r in results])
    steps = np.concatenate([r[1] for r in results])
    est = np.concatenate([r[2] for r in results])
    conv = np.concatenate([r[3] for r in results])

    idx = np.arange(values.size, dtype=np.int64) + offset
    return BranchSweep(
        depth=depth,
        d=sys.d,
        anchor=None,
        offset=offset,
        values=values,
        support=_supports_from_indices(idx, sys.d, depth),
        terms_used=steps.astype(np.int32) + depth,
        tail_estimate=est,
        converged=conv,
    )


def sweep_products(sys, w, max_support, tol=1e-12, n_cap=200,
                   root_tolerance=1e-13):
    """Values g_sigma(w) for every address with support <= max_support.

    One batched pass over the padded address tree of the given depth; shared
    digit prefixes share their orbits and partial products. Requires w != b
    (the degenerate anchor has its own sweep).
    """
    w = complex(w)
    if abs(w - sys.b) <= W_NEAR_B:
        raise ValueError("anchor coincides with the fixed point; "
                         "use sweep_solutions_at_b")
    if max_support < 0:
        raise ValueError("max_support must be nonnegative")
    seeds_v = np.array([w - sys.b], dtype=np.complex128)
    sweep = _sweep_from_seeds(sys, seeds_v, max_support, max_support, 0,
                              tol, n_cap, root_tolerance)
    sweep.anchor = w
    return sweep


def sweep_solutions_at_b(sys, max_support, tol=1e-12, n_cap=200,
                         root_tolerance=1e-13):
    """Ladder bases for the degenerate anchor w = b.

    Every solution of f(z) = b is either 0 or a^k * base for some k >= 0,
    where base runs over the values returned here: for each address with
    first digit j != 0,

        base = a * (P_j^{-1}(b) - b) * prod_{n>=2} a / Q(u_n).

    Only addresses with nonzero leading digit occur, so padded indices start
    at offset d^(depth-1).
    """
    if max_support < 1:
        raise ValueError("max_support must be >= 1 for the degenerate anchor")
    first = labels_batch(sys, np.array([sys.b]), root_tolerance)[0]
    seeds_v = first[1:] - sys.b
    offset = sys.d ** (max_support - 1)
    return _sweep_from_seeds(sys, seeds_v, max_support - 1, max_support,
                             offset, tol, n_cap, root_tolerance)


def _scalar_product(sys, digits, v0, tol, n_cap, root_tolerance, label):
    """Scalar mirror of the batched sweep for a single address.

    Walks the deviation v = u - b along the digit prefix and then the
    principal tail; the telescoped partial value after n steps is a^n v_n,
    so no separate product accumulation is needed. Returns (value, terms,
    estimate) where estimate bounds the relative size of the retired tail.
    """
    for dig in digits:
        if dig >= sys.d:
            raise InvalidIndices(
                f"digit {dig} out of range for degree {sys.d}")
    delta = contraction_delta(sys)
    a_abs = abs(sys.a)
    c_floor = 1.0 / a_abs
    c_cert = 0.5 * (1.0 + c_floor)
    r_deep = _deep_radius(sys)
    dV = sys.V.derivative()

    v = complex(v0)
    prevdist = abs(v)
    streak = 0
    prefix = len(digits)
    n = 0
    while n < n_cap:
        dig = digits[n] if n < prefix else 0
        gap = None
        if dig == 0 and 0.0 < abs(v) < r_deep:
            x = complex(_conjugate_newton(sys, np.array([v]), dV)[0])
            gap = abs(sys.a * x / v - 1.0)
            v = x
        else:
            u = branch_labels(sys, sys.b + v, root_tolerance)[dig]
            if dig == 0:
                qv = sys.Q.eval(u)
                if qv == 0:
                    raise ZeroDenominator(f"{label}: Q vanished on the orbit")
                gap = abs(sys.a / qv - 1.0)
                v = v / qv
            else:
                v = u - sys.b
        n += 1
        dist = abs(v)
        streak = streak + 1 if dist < delta else 0
        ratio = dist / prevdist if prevdist > 0.0 else 0.0
        prevdist = dist
        if n > prefix and gap is not None:
            c_used = min(max(ratio, c_floor), c_cert)
            estimate = gap * c_used / (1.0 - c_used)
            if gap <= tol and streak >= REGION_STREAK and estimate <= tol:
                return sys.a ** n * v, n, estimate
    raise NonConvergence(f"{label}: tail stopping rule unmet after {n_cap} "
                         f"factors")


def _as_sigma(sigma):
    """Coerce a digit iterable to a canonical SigmaSequence."""
    if isinstance(sigma, SigmaSequence):
        return sigma
    return SigmaSequence.from_digits(tuple(sigma))


def zero_product(sys, sigma, tol=1e-12, n_cap=200, root_tolerance=1e-13):
    """Zero of f addressed by sigma, via the orbit walk started at w = 0."""
    sigma = _as_sigma(sigma)
    value, n, est = _scalar_product(sys, sigma.digits, -sys.b, tol, n_cap,
                                    root_tolerance, "zero_product")
    return BranchProduct(value=value, terms_used=n, tail_estimate=est,
                         converged=True)


def inverse_branch(sys, sigma, w, tol=1e-12, n_cap=200, root_tolerance=1e-13):
    """Solution of f(z) = w addressed by sigma.

    The walk starts from the deviation w - b and handles the degenerate
    anchor w = b transparently: leading zero digits hold v = 0 in place and
    the first nonzero digit jumps to a preimage label of b itself.
    """
    sigma = _as_sigma(sigma)
    w = complex(w)
    v0 = w - sys.b
    if abs(v0) <= W_NEAR_B:
        if sigma.support == 0:
            return BranchProduct(value=0j, terms_used=0, tail_estimate=0.0,
                                 converged=True)
        v0 = 0j
    value, n, est = _scalar_product(sys, sigma.digits, v0, tol, n_cap,
                                    root_tolerance, "inverse_branch")
    return BranchProduct(value=value, terms_used=n, tail_estimate=est,
                         converged=True)


def g0_and_derivative(sys, w, tol=1e-12, n_cap=200, root_tolerance=1e-13):
    """Principal inverse g_0 and its derivative at w.

    g_0(w) = (w - b) prod a/Q(u_n) and g_0'(w) = prod a/P'(u_n) along the
    principal orbit from w; at w = b both are exact: (0, 1).
    """
    w = complex(w)
    if abs(w - sys.b) <= W_NEAR_B:
        return 0j, 1.0 + 0j
    delta = contraction_delta(sys)
    a_abs = abs(sys.a)
    c_floor = 1.0 / a_abs
    c_cert = 0.5 * (1.0 + c_floor)
    dP = sys.P.derivative()
    dV = sys.V.derivative()
    r_deep = _deep_radius(sys)

    v = w - sys.b
    acc_d = 1.0 + 0j
    prevdist = abs(v)
    streak = 0
    for n in range(1, n_cap + 1):
        if 0.0 < abs(v) < r_deep:
            x = complex(_conjugate_newton(sys, np.array([v]), dV)[0])
            fq = sys.a * x / v
            v = x
        else:
            u = branch_labels(sys, sys.b + v, root_tolerance)[0]
            qv = sys.Q.eval(u)
            if qv == 0:
                raise ZeroDenominator("g0: orbit hit a zero of Q")
            fq = sys.a / qv
            v = v / qv
        pv = dP.eval(sys.b + v)
        if pv == 0:
            raise ZeroDenominator("g0: orbit hit a zero of P'")
        fd = sys.a / pv
        acc_d *= fd
        dist = abs(v)
        streak = streak + 1 if dist < delta else 0
        ratio = dist / prevdist if prevdist > 0.0 else 0.0
        prevdist = dist
        gap = max(abs(fq - 1.0), abs(fd - 1.0))
        c_used = min(max(ratio, c_floor), c_cert)
        estimate = gap * c_used / (1.0 - c_used)
        if gap <= tol and streak >= REGION_STREAK and estimate <= tol:
            return sys.a ** n * v, acc_d
    if prevdist >= delta:
        raise BasinEscape(f"principal orbit from {w} did not reach the "
                          f"contraction ball within {n_cap} steps")
    raise NonConvergence(f"g0: stopping rule unmet after {n_cap} steps")


def check_hypothesis1(sys, grid_radius, grid_count, orbit_cap=500,
                      root_tolerance=1e-13):
    """Probe principal-orbit convergence on concentric circles.

    Samples grid_count points on up to 8 circles of radius up to grid_radius
    centered at the origin and iterates the principal branch, counting steps
    until the orbit enters the certified contraction ball.
    """
    if grid_count < 1:
        raise ValueError("grid_count must be >= 1")
    if grid_radius <= 0:
        raise ValueError("grid_radius must be positive")
    circles = min(8, grid_count)
    base, extra = divmod(grid_count, circles)
    pts = []
    for i in range(1, circles + 1):
        m = base + (1 if i <= extra else 0)
        r = grid_radius * i / circles
        pts.extend(r * np.exp(2j * np.pi * (np.arange(m) + 0.5 * (i % 2)) / m))
    points = np.array(pts, dtype=np.complex128)

    delta = contraction_delta(sys)
    steps = np.full(points.size, -1, dtype=np.int64)
    inside0 = np.abs(points - sys.b) < delta
    steps[inside0] = 0
    work = np.flatnonzero(~inside0)
    u = points[work]
    for k in range(1, orbit_cap + 1):
        if work.size == 0:
            break
        u = _principal_step(sys, u, root_tolerance, delta)
        entered = np.abs(u - sys.b) < delta
        steps[work[entered]] = k
        work = work[~entered]
        u = u[~entered]

    converged = steps >= 0
    n_conv = int(converged.sum())
    if n_conv:
        max_len = int(steps[converged].max())
    else:
        max_len = 0
    if n_conv < points.size:
        worst = complex(points[np.flatnonzero(~converged)[0]])
    elif points.size:
        worst = complex(points[int(np.argmax(steps))])
    else:
        worst = 0j
    return HypothesisReport(
        sampled_points=points.size,
        converged_points=n_conv,
        max_orbit_length=max_len,
        worst_point=worst,
        passed=n_conv == points.size,
    )


def growth_floor(sweep, a_abs):
    """Empirical growth-floor constant: min |value| |a|^-support, support >= 1."""
    mask = sweep.support >= 1
    if not mask.any():
        raise ValueError("sweep holds no address with support >= 1")
    scaled = np.abs(sweep.values[mask]) * a_abs ** (-sweep.support[mask]
                                                   .astype(np.float64))
    return float(scaled.min())


def geometric_tail(c_est, d, a_abs, start_support, m):
    """Bound sum over support >= start_support of |g|^-m by a geometric sum."""
    q = d * a_abs ** (-m)
    if q >= 1.0:
        raise DivergentTail(f"d |a|^-m = {q:.6f} >= 1; tail diverges for m={m}")
    return c_est ** (-m) * q ** start_support / (1.0 - q)


def tail_bound(sys, N, m, w=0j, probe_support=6, tol=1e-10, n_cap=200,
               root_tolerance=1e-13):
    """Executable bound on sum over support >= N of |g_sigma(w)|^-m.

    The floor constant is measured on an enumerated probe sweep (supports up
    to probe_support) and extrapolated geometrically: the shell at support n
    contributes at most C^-m (d |a|^-m)^n.
    """
    a_abs = abs(sys.a)
    q = sys.d * a_abs ** (-m)
    if q >= 1.0:
        raise DivergentTail(f"d |a|^-m = {q:.6f} >= 1; tail diverges for m={m}")
    probe = max(1, min(probe_support,
                       max(2, int(math.log(50000, sys.d)))))
    w = complex(w)
    if abs(w - sys.b) <= W_NEAR_B:
        sweep = sweep_solutions_at_b(sys, probe, tol, n_cap, root_tolerance)
    else:
        sweep = sweep_products(sys, w, probe, tol, n_cap, root_tolerance)
    return geometric_tail(growth_floor(sweep, a_abs), sys.d, a_abs, N, m)
