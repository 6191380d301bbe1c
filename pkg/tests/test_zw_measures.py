"""Tests for the N-particle ensembles, kernels, coherency, and samplers.

Reference quadruple throughout: alpha = 1+i, beta = 1-i, gamma = 8+8i,
delta = 8-8i on the lattice q = 1/2, zeta = -+1.  Then alpha*beta = 2,
gamma*delta = 128, and the level-N polynomial family has n_max = N+1.
"""

import math
from itertools import combinations

import numpy as np
import pytest
import scipy.stats

from qzw.errors import DuplicatePoints, InvalidParams
from qzw.lattice import (
    MINUS,
    PLUS,
    Configuration,
    LatticePoint,
    TailSpec,
    config,
    interval_I_tilde,
)
from qzw.pbqj import weight_value
from qzw.zw_measures import (
    DEGENERATE_EXA,
    NONDEGENERATE,
    EnsembleN,
    _adaptive_window,
    _kernel_matrix,
    cd_kernel_N,
    coherency_check,
    correlation_N,
    ensemble,
    kernel_sum_form,
    measure_weight,
    param_quadruple,
    sample_ensemble,
)


def ref_quad(lat):
    return param_quadruple(1 + 1j, 1 - 1j, 8 + 8j, 8 - 8j, lat)


def gram_quad(lat):
    return param_quadruple(1 + 0.5j, 1 - 0.5j, 16 + 8j, 16 - 8j, lat)


def realcd_quad(lat):
    return param_quadruple(1 + 1j, 1 - 1j, 120.0, 100.0, lat)


def exa_quad(lat):
    return param_quadruple(-0.25, 0.25, 2 + 2j, 2 - 2j, lat)


def window_points(lat, cutoff_exp=40, cap_exp=16):
    tail = TailSpec.default(lat, cutoff_exponent=cutoff_exp, cap_exponent=cap_exp)
    return list(interval_I_tilde(None, None, lat, tail))


def test_param_quadruple_classification(lat):
    assert ref_quad(lat).classification == NONDEGENERATE
    assert ref_quad(lat).kernel_regime  # 2 < q^2 * 128 = 32
    assert realcd_quad(lat).classification == NONDEGENERATE
    assert exa_quad(lat).classification == DEGENERATE_EXA
    assert exa_quad(lat).kernel_regime
    # gamma*delta*q = 160 but alpha*beta = 1.25: regime flag needs < q^2*320 = 80
    assert gram_quad(lat).kernel_regime
    with pytest.raises(InvalidParams):
        param_quadruple(2 + 2j, 2 - 2j, 1 + 1j, 1 - 1j, lat)  # gd*q = 1 < ab = 8
    with pytest.raises(InvalidParams):
        # unsupported degenerate subcase: lattice reciprocals + real gap pair
        param_quadruple(-0.25, 0.25, 120.0, 100.0, lat)


def test_ensemble_construction(lat):
    for n in (1, 2, 3):
        ens = ensemble(ref_quad(lat), n)
        assert ens.pb.n_max == n + 1
        assert ens.z_n > 0
        assert len(ens.poly.h) == n
    with pytest.raises(InvalidParams):
        ensemble(ref_quad(lat), 0)


def test_measure_n1_normalization(lat):
    # M_1 = w/h_0 sums to one over the truncated lattice
    ens = ensemble(ref_quad(lat), 1)
    total = math.fsum(
        measure_weight(Configuration(lat, (p,)), ens) for p in window_points(lat)
    )
    assert total == pytest.approx(1.0, abs=1e-10)


def test_measure_weight_ratio_independent_of_z(lat):
    ens = ensemble(ref_quad(lat), 2)
    x1 = config(lat, [(MINUS, 0), (PLUS, 0)])
    x2 = config(lat, [(MINUS, 1), (PLUS, 1)])
    got = measure_weight(x1, ens) / measure_weight(x2, ens)
    def raw(c):
        vals = c.values()
        return (
            weight_value(vals[0], ens.pb)
            * weight_value(vals[1], ens.pb)
            * (vals[1] - vals[0]) ** 2
        )
    assert got == pytest.approx(raw(x1) / raw(x2), rel=1e-12)


def test_measure_n2_normalization_checks_z(lat):
    # brute-force pair sum against Z_2 = h_0 h_1: independent check of the
    # product formula for the normalization constant
    for quad in (ref_quad(lat), exa_quad(lat)):
        ens = ensemble(quad, 2)
        pts = window_points(lat)
        vals = [lat.value(p) for p in pts]
        w = [weight_value(v, ens.pb) for v in vals]
        total = math.fsum(
            w[i] * w[j] * (vals[j] - vals[i]) ** 2
            for i, j in combinations(range(len(pts)), 2)
        )
        assert total / ens.z_n == pytest.approx(1.0, abs=1e-8)


def test_kernel_symmetry_and_dual_form(lat):
    ens = ensemble(ref_quad(lat), 3)
    rng = np.random.default_rng(40)
    pts = window_points(lat, cutoff_exp=20, cap_exp=8)
    for _ in range(100):
        i, j = rng.integers(0, len(pts), size=2)
        x, y = pts[int(i)], pts[int(j)]
        if x == y:
            continue
        k1 = cd_kernel_N(x, y, ens)
        assert k1 == cd_kernel_N(y, x, ens)
        assert k1 == pytest.approx(kernel_sum_form(x, y, ens), rel=1e-11, abs=1e-300)


def test_kernel_diagonal_matches_sum_form(lat):
    ens = ensemble(ref_quad(lat), 2)
    for p in [LatticePoint(MINUS, 2), LatticePoint(PLUS, 0), LatticePoint(PLUS, 5)]:
        assert cd_kernel_N(p, p, ens) == pytest.approx(kernel_sum_form(p, p, ens), rel=1e-12)


def test_kernel_trace(lat):
    for n in (1, 2, 3):
        ens = ensemble(ref_quad(lat), n)
        tr = math.fsum(cd_kernel_N(p, p, ens) for p in window_points(lat, 48, 20))
        assert tr == pytest.approx(n, abs=1e-8)


def test_kernel_projection_spectrum(lat):
    for n in (1, 2):
        ens = ensemble(ref_quad(lat), n)
        pts, diag = _adaptive_window(ens)
        evals = np.linalg.eigvalsh(_kernel_matrix(ens, pts, diag))
        assert evals.min() > -1e-6
        assert evals.max() < 1 + 1e-6
        assert int((evals > 0.5).sum()) == n


def test_correlation_n1_is_measure(lat):
    ens = ensemble(ref_quad(lat), 1)
    for p in [LatticePoint(MINUS, 1), LatticePoint(PLUS, 2)]:
        rho = correlation_N([p], ens)
        assert rho == pytest.approx(measure_weight(Configuration(lat, (p,)), ens), rel=1e-10)


def test_correlation_vs_bruteforce_n2(lat):
    ens = ensemble(ref_quad(lat), 2)
    pts = window_points(lat)
    vals = [lat.value(p) for p in pts]
    w = [weight_value(v, ens.pb) for v in vals]
    def m2(i, j):
        return w[i] * w[j] * (vals[j] - vals[i]) ** 2 / ens.z_n
    targets = [(LatticePoint(MINUS, 0), LatticePoint(PLUS, 1)),
               (LatticePoint(PLUS, 3), LatticePoint(PLUS, 0)),
               (LatticePoint(MINUS, 2), LatticePoint(MINUS, 0))]
    index = {p: k for k, p in enumerate(pts)}
    for x, y in targets:
        i, j = index[x], index[y]
        brute2 = m2(min(i, j), max(i, j))
        assert correlation_N([x, y], ens) == pytest.approx(brute2, rel=1e-6)
        brute1 = math.fsum(m2(min(i, k), max(i, k)) for k in range(len(pts)) if k != i)
        assert correlation_N([x], ens) == pytest.approx(brute1, rel=1e-6)


def test_negative_association(lat):
    ens = ensemble(ref_quad(lat), 3)
    rng = np.random.default_rng(41)
    pts = window_points(lat, cutoff_exp=16, cap_exp=6)
    for _ in range(30):
        i, j = rng.integers(0, len(pts), size=2)
        if i == j:
            continue
        x, y = pts[int(i)], pts[int(j)]
        rho2 = correlation_N([x, y], ens)
        assert rho2 <= correlation_N([x], ens) * correlation_N([y], ens) + 1e-12


def test_correlation_duplicate_points(lat):
    ens = ensemble(ref_quad(lat), 2)
    with pytest.raises(DuplicatePoints):
        correlation_N([LatticePoint(PLUS, 0), LatticePoint(PLUS, 0)], ens)


def test_coherency_n1(lat):
    ens2 = ensemble(ref_quad(lat), 2)
    y = Configuration(lat, (LatticePoint(PLUS, 0),))
    lhs, rhs, err = coherency_check(ens2, y)
    assert lhs == pytest.approx(rhs, rel=1e-7)
    assert err < 1e-7 * abs(rhs) + 1e-12


def test_coherency_sums_to_one(lat):
    ens2 = ensemble(ref_quad(lat), 2)
    total = math.fsum(
        coherency_check(ens2, Configuration(lat, (p,)),
                        TailSpec.default(lat, 48, 20))[0]
        for p in window_points(lat)
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_coherency_random_y(lat):
    rng = np.random.default_rng(42)
    from conftest import random_config
    for quad in (ref_quad(lat), gram_quad(lat), realcd_quad(lat)):
        for n_up in (2, 3):
            ens = ensemble(quad, n_up)
            for _ in range(3):
                y = random_config(lat, n_up - 1, rng, lo=-3, hi=7, max_gap=3)
                lhs, rhs, err = coherency_check(ens, y)
                assert lhs == pytest.approx(rhs, rel=1e-6)


def test_coherency_exa(lat):
    ens = ensemble(exa_quad(lat), 2)
    y = Configuration(lat, (LatticePoint(PLUS, 2),))
    lhs, rhs, err = coherency_check(ens, y)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_sample_shapes(lat):
    ens = ensemble(ref_quad(lat), 3)
    rng = np.random.default_rng(43)
    for method in ("dpp", "gibbs"):
        x = sample_ensemble(ens, rng, method=method)
        assert isinstance(x, Configuration)
        assert len(x) == 3  # Configuration enforces strict increase


def test_sample_n1_chisquare(lat):
    ens = ensemble(ref_quad(lat), 1)
    rng = np.random.default_rng(44)
    draws = 20000
    counts: dict = {}
    for _ in range(draws):
        x = sample_ensemble(ens, rng, method="dpp")
        counts[x.points[0]] = counts.get(x.points[0], 0) + 1
    pts = sorted(counts, key=lambda p: -counts[p])[:12]
    expected = np.array(
        [measure_weight(Configuration(lat, (p,)), ens) for p in pts]
    )
    observed = np.array([counts[p] for p in pts], dtype=float)
    rest_e, rest_o = 1.0 - expected.sum(), draws - observed.sum()
    chi2 = scipy.stats.chisquare(
        np.append(observed, rest_o), np.append(expected, rest_e) * draws
    )
    assert chi2.pvalue > 0.001


def test_sample_dpp_vs_gibbs(lat):
    ens = ensemble(ref_quad(lat), 2)
    rng = np.random.default_rng(45)
    draws = 8000
    freq: dict = {"dpp": {}, "gibbs": {}}
    for method in ("dpp", "gibbs"):
        for _ in range(draws):
            x = sample_ensemble(ens, rng, method=method, sweeps=12)
            freq[method][x.points] = freq[method].get(x.points, 0) + 1
    keys = set(freq["dpp"]) | set(freq["gibbs"])
    tv = 0.5 * sum(
        abs(freq["dpp"].get(k, 0) - freq["gibbs"].get(k, 0)) / draws for k in keys
    )
    assert tv < 0.05


def test_sample_exa_support(lat):
    ens = ensemble(exa_quad(lat), 2)
    rng = np.random.default_rng(46)
    for _ in range(50):
        x = sample_ensemble(ens, rng, method="dpp")
        for v in x.values():
            assert -2.0 <= v <= 2.0  # support window [q/alpha, q/beta]
