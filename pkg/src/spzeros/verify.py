"""Cross-validation helpers: reference systems, zero clustering, route checks.

Three worked systems with known closed forms back the test suite:

* chebyshev: P(z) = 2z^2 - 1, b = 1, a = 4, where f(z) = cos(sqrt(-2z))
  extends to an entire function of z with zeros -(2k-1)^2 pi^2 / 8;
* golden:    P(z) = z^2 - 1 with b the golden ratio, a = 2b;
* cubic:     P(z) = z^3 - 6, b = 2, a = 12.

cross_check evaluates f along several independent routes (direct iteration,
the anchored product, the fixed-point ladder product) and reports the worst
pairwise disagreement together with the error budget the product routes
claim for themselves.
"""

import math
from dataclasses import dataclass

import numpy as np

from .branches import sweep_products
from .errors import AmbiguousClustering
from .factor import wh_eval
from .poly import ComplexPolynomial
from .system import build_system, eval_f_batch, eval_f_direct


def chebyshev_system():
    """P(z) = 2z^2 - 1 at b = 1: f(z) = cos(sqrt(-2z))."""
    return build_system(ComplexPolynomial((-1, 0, 2)), fixed_point_hint=1.0)


def golden_system():
    """P(z) = z^2 - 1 at the golden ratio: a = 2b = 1 + sqrt(5)."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    return build_system(ComplexPolynomial((-1, 0, 1)), fixed_point_hint=phi)


def cubic_system():
    """P(z) = z^3 - 6 at b = 2: a = 12, three-way branching."""
    return build_system(ComplexPolynomial((-6, 0, 0, 1)), fixed_point_hint=2.0)


def oracle_chebyshev(z):
    """cos(sqrt(-2z)) as the everywhere-convergent series sum (2z)^n/(2n)!."""
    z = complex(z)
    total = 1.0 + 0j
    term = 1.0 + 0j
    n = 0
    while True:
        n += 1
        term *= (2.0 * z) / ((2 * n) * (2 * n - 1))
        new = total + term
        if new == total and n > 4:
            return new
        total = new
        if n > 400:
            return total


@dataclass(frozen=True)
class ZeroCluster:
    """A group of address products agreeing to within the clustering radius."""

    center: complex
    multiplicity: int
    diameter: float
    members: tuple


def cluster_zeros(pairs, tol):
    """Single-linkage clustering of (address, value) pairs at radius tol.

    Distinct zeros of f can be reached through several addresses when a
    critical orbit makes an inverse step collapse; the multiplicity of a
    cluster counts those coincident addresses. Raises AmbiguousClustering
    when some inter-cluster gap is below 10 tol, since then the grouping
    depends on the radius. Quadratic in len(pairs).
    """
    pairs = list(pairs)
    n = len(pairs)
    if n == 0:
        return []
    values = np.array([complex(v) for _, v in pairs])
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(values[:, None] - values[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    roots = list(groups)
    for gi in range(len(roots)):
        for gj in range(gi + 1, len(roots)):
            gap = min(dist[i, j]
                      for i in groups[roots[gi]] for j in groups[roots[gj]])
            if gap < 10.0 * tol:
                raise AmbiguousClustering(
                    f"inter-cluster gap {gap:.3e} below 10 x tol = {10 * tol:.3e}"
                )

    clusters = []
    for members in groups.values():
        pts = values[members]
        center = complex(pts.mean())
        diameter = float(np.max(np.abs(pts[:, None] - pts[None, :]))) if len(members) > 1 else 0.0
        clusters.append(ZeroCluster(
            center=center,
            multiplicity=len(members),
            diameter=diameter,
            members=tuple(pairs[i][0] for i in members),
        ))
    clusters.sort(key=lambda c: (c.center.real, c.center.imag))
    return clusters


@dataclass(frozen=True)
class CrossCheckRow:
    """Values of f(z) along each route plus their worst disagreement."""

    z: complex
    direct: complex
    product_anchored: complex
    product_ladder: complex
    max_deviation: float
    claimed_budget: float


@dataclass(frozen=True)
class CrossCheckReport:
    rows: tuple
    roundtrips: tuple
    worst_deviation: float
    worst_roundtrip: float


def cross_check(sys, samples, max_support, anchor=0j, roundtrip_support=4,
                tol=1e-12, n_cap=200, root_tolerance=1e-13):
    """Evaluate f at each sample by three routes and round-trip the branches.

    Routes: direct functional iteration, the product anchored at `anchor`,
    and the fixed-point ladder product. The round-trip leg treats each sample
    as an anchor w (skipping w near b), inverts f through every address of
    support <= roundtrip_support, and confirms f(g_sigma(w)) = w by direct
    iteration.
    """
    rows = []
    for z in samples:
        z = complex(z)
        direct = eval_f_direct(sys, z, tol=tol)
        anchored = wh_eval(sys, z, anchor, max_support, tol=tol,
                           n_cap=n_cap, root_tolerance=root_tolerance)
        ladder = wh_eval(sys, z, sys.b, max_support, tol=tol,
                         n_cap=n_cap, root_tolerance=root_tolerance)
        trio = (direct, anchored.product_value, ladder.product_value)
        deviation = max(abs(x - y) for x in trio for y in trio)
        rows.append(CrossCheckRow(
            z=z, direct=direct,
            product_anchored=anchored.product_value,
            product_ladder=ladder.product_value,
            max_deviation=deviation,
            claimed_budget=anchored.tail_bound + ladder.tail_bound,
        ))

    roundtrips = []
    for z in samples:
        w = complex(z)
        if abs(w - sys.b) <= 1e-9:
            continue
        sweep = sweep_products(sys, w, roundtrip_support, tol=tol,
                               n_cap=n_cap, root_tolerance=root_tolerance)
        back = eval_f_batch(sys, sweep.values, tol=tol)
        roundtrips.append((w, float(np.max(np.abs(back - w)))))

    return CrossCheckReport(
        rows=tuple(rows),
        roundtrips=tuple(roundtrips),
        worst_deviation=max((r.max_deviation for r in rows), default=0.0),
        worst_roundtrip=max((e for _, e in roundtrips), default=0.0),
    )
