"""Root finding and the deflated Q-polynomial."""

import numpy as np
import pytest

from spzeros import ComplexPolynomial, all_roots, q_polynomial, roots_batch


def test_polynomial_eval_matches_numpy():
    rng = np.random.default_rng(7)
    for _ in range(20):
        deg = rng.integers(2, 7)
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        p = ComplexPolynomial(tuple(coeffs))
        z = rng.normal() + 1j * rng.normal()
        want = np.polyval(coeffs[::-1], z)
        assert abs(p.eval(z) - want) <= 1e-12 * max(1.0, abs(want))


def test_derivative_matches_finite_difference():
    p = ComplexPolynomial((1 + 2j, 0j, -3 + 0j, 2 + 0j))
    dp = p.derivative()
    h = 1e-7
    for z in (0.3 + 0.4j, -1.2 + 0j, 2j):
        fd = (p.eval(z + h) - p.eval(z - h)) / (2 * h)
        assert abs(dp.eval(z) - fd) <= 1e-5


def test_all_roots_cubic_with_known_roots():
    # (z - 1)(z - 2)(z - 3) = z^3 - 6 z^2 + 11 z - 6
    p = ComplexPolynomial((-6 + 0j, 11 + 0j, -6 + 0j, 1 + 0j))
    roots = all_roots(p, 0j)
    assert np.allclose(sorted(r.real for r in roots), [1, 2, 3], atol=1e-12)
    assert max(abs(r.imag) for r in roots) <= 1e-12


def test_all_roots_random_polynomials_have_small_residuals():
    rng = np.random.default_rng(42)
    for _ in range(25):
        deg = int(rng.integers(2, 8))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        p = ComplexPolynomial(tuple(coeffs))
        roots = all_roots(p, 0j)
        assert len(roots) == deg
        scale = max(1.0, max(abs(c) for c in coeffs))
        for r in roots:
            assert abs(p.eval(r)) <= 1e-9 * scale * max(1.0, abs(r)) ** deg


def test_roots_batch_square_roots_at_rounding_level():
    # p(z) = z^2, solving p = w gives +-sqrt(w); position error should sit
    # at rounding level, not at the residual threshold.
    p = ComplexPolynomial((0j, 0j, 1 + 0j))
    rng = np.random.default_rng(3)
    w = rng.normal(size=50) + 1j * rng.normal(size=50)
    roots = roots_batch(p, np.array(w), 1e-13)
    assert roots.shape == (50, 2)
    for i, wi in enumerate(w):
        want = np.sqrt(complex(wi))
        got = sorted(roots[i], key=lambda r: (r.real, r.imag))
        expect = sorted([want, -want], key=lambda r: (r.real, r.imag))
        for g, e in zip(got, expect):
            assert abs(g - e) <= 4e-16 * abs(e)


def test_roots_batch_residuals_random_targets():
    rng = np.random.default_rng(11)
    p = ComplexPolynomial((2 + 1j, -1 + 0j, 0.5 + 0j, 1 + 0j))
    w = 10 * (rng.normal(size=200) + 1j * rng.normal(size=200))
    roots = roots_batch(p, w, 1e-13)
    resid = np.abs(p.eval_array(roots) - w[:, None])
    assert float(resid.max()) <= 1e-10


def test_q_polynomial_divides_exactly():
    p = ComplexPolynomial((-1 + 0j, 0j, 2 + 0j))  # 2 z^2 - 1
    b = 1.0 + 0j
    q = q_polynomial(p, b)
    assert q.degree == 1
    rng = np.random.default_rng(5)
    for _ in range(20):
        z = rng.normal() + 1j * rng.normal()
        assert abs((p.eval(z) - b) - q.eval(z) * (z - b)) <= 1e-13 * (1 + abs(z)) ** 2
    # Q(b) equals the multiplier P'(b).
    assert abs(q.eval(b) - p.derivative().eval(b)) <= 1e-13


def test_q_polynomial_rejects_non_fixed_point():
    from spzeros import FixedPointViolation

    p = ComplexPolynomial((-1 + 0j, 0j, 2 + 0j))
    with pytest.raises(FixedPointViolation):
        q_polynomial(p, 0.4 + 0j)  # P(0.4) = -0.68 != 0.4
