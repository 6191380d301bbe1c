"""Tests for the pseudo big q-Jacobi system.

Three parameter sets are exercised throughout (reference lattice q = 1/2,
zeta = -+1):

* GRAM: conjugate pairs a = 1 + 0.5i, c = 16 + 8i with cdq/(ab) = 128 = q^-7,
  so n_max = 3.
* REALCD: conjugate numerator pair with real c = 120, d = 100 whose
  reciprocals share the open gap (q^7, q^6); n_max = 5.
* BOUNDED: the degenerate variant a = -1/4, b = 1/4 with 1/a, 1/b on the
  lattice; support is [-2, 2] and every degree is available.
"""

import math

import numpy as np
import pytest

from qzw.errors import InvalidParams, PoleInDenominator
from qzw.lattice import MINUS, PLUS, LatticePoint, TailSpec, interval_I_tilde
from qzw.pbqj import (
    CONJUGATE_PAIR,
    REAL_GAP_PAIR,
    REAL_LATTICE_PAIR,
    backward_shift_check,
    big_qjacobi_eval,
    classify_pair,
    leading_coeff,
    norm_h,
    norm_ratio_display,
    orthogonality_check,
    pbqj_eval,
    pbqj_params,
    poly_system,
    weight_w,
)


def gram_params(lat):
    return pbqj_params(1 + 0.5j, 1 - 0.5j, 16 + 8j, 16 - 8j, lat)


def realcd_params(lat):
    return pbqj_params(1 + 1j, 1 - 1j, 120.0, 100.0, lat)


def bounded_params(lat):
    return pbqj_params(-0.25, 0.25, 2 + 2j, 2 - 2j, lat)


DEEP_TAIL = None  # set per lattice in tests: inner q^64, outer q^-40


def deep_tail(lat):
    return TailSpec(cutoff=lat.q**64, cap=lat.q**-40)


def direct_weight_sum(params, degree=0, poly=None, tail=None):
    """Brute-force lattice sum of P^2 w (or x^degree w) for oracle use."""
    lat = params.lattice
    tail = tail or deep_tail(lat)
    total = []
    for p in interval_I_tilde(None, None, lat, tail):
        v = lat.value(p)
        w = weight_w(p, params)
        if w == 0.0:
            continue
        if poly is None:
            total.append(v**degree * w)
        else:
            total.append(complex(poly(v)).real * w)
    return math.fsum(total)


def test_classify_pairs(lat):
    assert classify_pair(1 + 2j, 1 - 2j, lat) == CONJUGATE_PAIR
    assert classify_pair(1.9, 1.7, lat) == REAL_GAP_PAIR
    assert classify_pair(120.0, 100.0, lat) == REAL_GAP_PAIR
    assert classify_pair(-0.25, 0.25, lat) == REAL_LATTICE_PAIR
    with pytest.raises(InvalidParams):
        classify_pair(1 + 2j, 1 + 2j, lat)  # nonreal, not conjugate
    with pytest.raises(InvalidParams):
        classify_pair(1.9, 2.3, lat)  # reciprocals in different gaps
    with pytest.raises(InvalidParams):
        classify_pair(-1.9, 1.7, lat)  # reciprocals on opposite sides of zero
    with pytest.raises(InvalidParams):
        classify_pair(0.25, 1.7, lat)  # one reciprocal on the lattice


def test_n_max(lat):
    assert gram_params(lat).n_max == 3
    assert realcd_params(lat).n_max == 5
    assert bounded_params(lat).n_max is None
    # level-1 reference quadruple: cdq/(ab) = 32 = q^-5 so n_max = 2
    assert pbqj_params(1 + 1j, 1 - 1j, 8 + 8j, 8 - 8j, lat).n_max == 2
    # equality at q^-6 fails the strict inequality at n = 3; the rounded
    # construction lands in the guard band and must warn
    with pytest.warns(UserWarning, match="guard band"):
        near = pbqj_params(1 + 1j, 1 - 1j, (8 + 8j) * math.sqrt(2), (8 - 8j) * math.sqrt(2), lat)
    assert near.n_max == 2
    # (c, d) reciprocals on the lattice put poles on the support
    with pytest.raises(InvalidParams):
        pbqj_params(1 + 1j, 1 - 1j, -4.0, 4.0, lat)


def test_weight_cancellation(lat):
    # a = c, b = d cancels everything except |x|; no polynomials exist
    params = pbqj_params(1 + 0.5j, 1 - 0.5j, 1 + 0.5j, 1 - 0.5j, lat)
    assert params.n_max == -1
    for p in [LatticePoint(MINUS, 2), LatticePoint(PLUS, 0), LatticePoint(PLUS, -3)]:
        v = lat.value(p)
        assert weight_w(p, params) == pytest.approx(abs(v), rel=1e-12)
    with pytest.raises(InvalidParams):
        norm_h(0, params)


def test_weight_positive(lat):
    for params in (gram_params(lat), realcd_params(lat)):
        for p in interval_I_tilde(None, None, lat, TailSpec(cutoff=lat.q**20, cap=lat.q**-12)):
            assert weight_w(p, params) > 0.0


def test_weight_bounded_support(lat):
    params = bounded_params(lat)
    # support is q/a <= x <= q/b, here [-2, 2]
    assert weight_w(LatticePoint(MINUS, -1), params) > 0.0  # x = -2
    assert weight_w(LatticePoint(PLUS, -1), params) > 0.0  # x = 2
    assert weight_w(LatticePoint(PLUS, 3), params) > 0.0
    assert weight_w(LatticePoint(MINUS, -2), params) == 0.0  # x = -4
    assert weight_w(LatticePoint(PLUS, -2), params) == 0.0  # x = 4
    assert weight_w(LatticePoint(PLUS, -5), params) == 0.0


def test_weight_asymptotic_ratio(lat):
    params = gram_params(lat)
    target = abs(
        params.a * params.b / (params.c * params.d * lat.q)
    )
    for branch in (MINUS, PLUS):
        n = 20
        r = weight_w(LatticePoint(branch, -n - 1), params) / weight_w(
            LatticePoint(branch, -n), params
        )
        assert r == pytest.approx(target, rel=2e-5)


def test_pbqj_degree_zero_and_one(lat):
    params = gram_params(lat)
    a, b, c, d, q = params.a, params.b, params.c, params.d, lat.q
    rng = np.random.default_rng(30)
    for _ in range(20):
        x = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        assert pbqj_eval(0, x, params) == 1.0
        # hand expansion of the two-term sum at n = 1
        term = (
            (1 - 1 / q)
            * (1 - c * d * q**2 / (a * b))
            * (1 - c * x)
            * q
            / ((1 - c * q / b) * (1 - c * q / a) * (1 - q))
        )
        assert pbqj_eval(1, x, params) == pytest.approx(1 + term, rel=1e-13)


def test_ab_symmetry_exact(lat):
    params = gram_params(lat)
    swapped = pbqj_params(params.b, params.a, params.c, params.d, lat)
    for n in range(4):
        for x in (0.7, -1.3, 0.2 + 0.9j):
            assert pbqj_eval(n, x, params) == pbqj_eval(n, x, swapped)


def test_monic_cd_symmetry(lat):
    params = gram_params(lat)
    swapped = pbqj_params(params.a, params.b, params.d, params.c, lat)
    rng = np.random.default_rng(31)
    for n in range(4):
        k1, k2 = leading_coeff(n, params), leading_coeff(n, swapped)
        for _ in range(5):
            x = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            m1 = pbqj_eval(n, x, params) / k1
            m2 = pbqj_eval(n, x, swapped) / k2
            assert m1 == pytest.approx(m2, rel=1e-10)


def test_bridge_to_big_qjacobi(lat):
    rng = np.random.default_rng(32)
    for params in (gram_params(lat), realcd_params(lat)):
        a, b, c, d = params.a, params.b, params.c, params.d
        A, B, C = c / b, d / a, c / a
        for _ in range(50):
            n = int(rng.integers(0, params.n_max + 1))
            x = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
            lhs = pbqj_eval(n, x, params)
            rhs = big_qjacobi_eval(n, c * x, A, B, C, lat.q)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_leading_coeff_against_interpolation(lat):
    params = gram_params(lat)
    assert leading_coeff(0, params) == 1.0
    # degree one: slope from two points
    p0, p1 = pbqj_eval(1, 0.0, params), pbqj_eval(1, 1.0, params)
    assert leading_coeff(1, params) == pytest.approx(p1 - p0, rel=1e-12)
    for n in (2, 3):
        nodes = np.linspace(-1.0, 1.0, n + 1)
        vals = [pbqj_eval(n, float(t), params) for t in nodes]
        coeffs = np.polyfit(nodes, vals, n)
        assert coeffs[0] == pytest.approx(leading_coeff(n, params), rel=1e-11)


def test_degree_reduction(lat):
    # P_n - k_n x^n has degree <= n-1
    params = gram_params(lat)
    for n in (1, 2, 3):
        kn = leading_coeff(n, params)
        nodes = np.linspace(-1.0, 1.0, n + 1)
        vals = [pbqj_eval(n, float(t), params) - kn * t**n for t in nodes]
        coeffs = np.polyfit(nodes, vals, n)
        assert abs(coeffs[0]) < 1e-10 * abs(kn)


def test_h0_closed_form_vs_direct_sum(lat):
    for params in (gram_params(lat), realcd_params(lat), bounded_params(lat)):
        direct = direct_weight_sum(params)
        assert norm_h(0, params) == pytest.approx(direct, rel=1e-10)


def test_norm_ratio_vs_direct_sum(lat):
    # the closed-form ratio reproduces the complex raw sums P_n^2 w, and the
    # monic norms reproduce the real monic sums
    params = gram_params(lat)
    tail = deep_tail(lat)
    pts = [
        (lat.value(p), weight_w(p, params))
        for p in interval_I_tilde(None, None, lat, tail)
    ]
    h0 = math.fsum(w for _, w in pts)
    for n in range(1, 4):
        raw = sum(pbqj_eval(n, v, params) ** 2 * w for v, w in pts)
        assert norm_ratio_display(n, params) * h0 == pytest.approx(raw, rel=1e-8)
        kn = leading_coeff(n, params)
        monic = math.fsum(((pbqj_eval(n, v, params) / kn) ** 2).real * w for v, w in pts)
        assert norm_h(n, params) == pytest.approx(monic, rel=1e-8)


def test_norms_positive(lat):
    sys_gram = poly_system(gram_params(lat))
    assert len(sys_gram.h) == 4
    assert all(hn > 0 for hn in sys_gram.h)
    sys_bounded = poly_system(bounded_params(lat), max_degree=6)
    assert all(hn > 0 for hn in sys_bounded.h)
    sys_realcd = poly_system(realcd_params(lat))
    assert len(sys_realcd.h) == 6


def test_orthogonality(lat):
    tail = None
    for params in (gram_params(lat), realcd_params(lat)):
        hs = [norm_h(n, params) for n in range(4)]
        for m in range(4):
            for n in range(m, 4):
                ip = orthogonality_check(m, n, params, tail)
                if m == n:
                    assert ip == pytest.approx(hs[n], rel=1e-8)
                else:
                    assert abs(ip) <= 1e-8 * math.sqrt(hs[m] * hs[n])


def test_orthogonality_bounded_support(lat):
    params = bounded_params(lat)
    h2 = norm_h(2, params)
    assert orthogonality_check(2, 2, params) == pytest.approx(h2, rel=1e-8)
    assert abs(orthogonality_check(0, 1, params)) <= 1e-8 * math.sqrt(
        norm_h(0, params) * norm_h(1, params)
    )


def test_gram_schmidt_oracle(lat):
    # monic polynomials from raw moments match P_n / k_n for n <= 3
    params = gram_params(lat)
    mom = [direct_weight_sum(params, degree=j) for j in range(8)]
    for n in range(1, 4):
        g = np.array([[mom[i + j] for j in range(n)] for i in range(n)])
        rhs = -np.array([mom[n + i] for i in range(n)])
        low = np.linalg.solve(g, rhs)  # coefficients of 1, x, ..., x^{n-1}
        kn = leading_coeff(n, params)
        for x in (-1.1, -0.3, 0.45, 0.8, 1.6):
            monic = x**n + sum(low[j] * x**j for j in range(n))
            assert pbqj_eval(n, x, params) / kn == pytest.approx(monic, rel=1e-7)


def test_backward_shift_generic(lat):
    params = gram_params(lat)
    ys = [LatticePoint(MINUS, -3), LatticePoint(MINUS, 2), LatticePoint(PLUS, 4),
          LatticePoint(PLUS, 0), LatticePoint(PLUS, -4)]
    for n in range(3):
        for y in ys:
            lhs, rhs = backward_shift_check(n, y, params, pointwise_checks=5)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-13)


def test_backward_shift_limits(lat):
    params = gram_params(lat)
    scale = norm_h(0, params)
    # y deep on the negative side: both sides nearly vanish
    lhs, rhs = backward_shift_check(1, LatticePoint(MINUS, -38), params,
                                    tail=deep_tail(lat), pointwise_checks=5)
    assert abs(lhs) < 1e-10 * scale and abs(rhs) < 1e-10 * scale
    # y at the top of the window: the sum is the full pairing with constants
    lhs, _ = backward_shift_check(1, LatticePoint(PLUS, -39), params,
                                  tail=deep_tail(lat), pointwise_checks=5)
    assert abs(lhs) < 1e-9 * scale


def test_backward_shift_precondition(lat):
    with pytest.raises(InvalidParams):
        backward_shift_check(1, LatticePoint(PLUS, 0), bounded_params(lat))
    with pytest.raises(InvalidParams):
        backward_shift_check(9, LatticePoint(PLUS, 0), gram_params(lat))


def test_eval_errors(lat):
    params = gram_params(lat)
    with pytest.raises(InvalidParams):
        pbqj_eval(4, 0.3, params)
    with pytest.raises(PoleInDenominator):
        big_qjacobi_eval(3, 0.7, 0.5**-3, 0.3, 0.4, 0.5)
