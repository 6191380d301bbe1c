"""The acceptance suite: one check per criterion, shared by CLI and tests.

Every check constructs its own inputs from an explicit seed, measures a
worst-case error, and compares it against the pinned tolerance, so the
command-line runner and the test suite cannot drift apart.  All checks run
on the reference lattice q = 1/2, zeta = -+1; parameter sets are the
reference quadruple and the three polynomial parameter sets used
throughout the tests.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boundary_approx import BoundaryPoint, lln_check
from .graph_links import (
    Signature,
    branching_identity_check,
    dim_recurrence_check,
    geometric_summation_check,
    link_row_mass,
)
from .lattice import (
    MINUS,
    PLUS,
    Configuration,
    LatticeParams,
    LatticePoint,
    TailSpec,
    VariationalSeries,
    interval_I,
    interval_I_tilde,
)
from .limit_kernel import (
    BoundaryKernel,
    F_r,
    boundary_kernel,
    h_frak,
    phi32_limit_check,
    scaled_kernel_N,
    scaled_norm_finite,
    scaled_weighted_poly,
)
from .pbqj import (
    backward_shift_check,
    norm_h,
    orthogonality_check,
    pbqj_params,
    weight_w,
)
from .zw_measures import (
    coherency_check,
    ensemble,
    measure_weight,
    param_quadruple,
    sample_ensemble,
)


def reference_lattice() -> LatticeParams:
    return LatticeParams(q=0.5, zeta_minus=-1.0, zeta_plus=1.0)


def reference_quad(lat: LatticeParams | None = None):
    lat = lat or reference_lattice()
    return param_quadruple(1 + 1j, 1 - 1j, 8 + 8j, 8 - 8j, lat)


def random_config(lat, n, rng, lo=-4, hi=10, max_gap=3):
    """A random n-point configuration with bounded exponent gaps.

    Points are drawn branch by branch with consecutive same-branch
    exponent gaps of at most ``max_gap`` so that downstream interval
    enumerations stay small.
    """
    n_minus = int(rng.integers(0, n + 1))
    pts = []
    for branch, count in ((MINUS, n_minus), (PLUS, n - n_minus)):
        if count == 0:
            continue
        start = int(rng.integers(lo, hi))
        exps = [start]
        while len(exps) < count:
            exps.append(exps[-1] + int(rng.integers(1, max_gap + 1)))
        pts.extend(LatticePoint(branch, m) for m in exps)
    return Configuration(lat, tuple(sorted(pts)))


def interlacing_child(x, rng):
    """A uniformly random Y with Y interlacing X (finite intervals only near 0)."""
    lat = x.lattice
    tail = TailSpec.default(lat, cutoff_exponent=24)
    ys = []
    for a, b in zip(x.points, x.points[1:]):
        pts = interval_I(a, b, lat, tail).points
        ys.append(pts[rng.integers(0, len(pts))])
    return Configuration(lat, tuple(ys))


@dataclass(frozen=True)
class CheckResult:
    index: int
    name: str
    passed: bool
    tolerance: float
    measured: float
    seconds: float
    detail: str


def _result(index, name, t0, tolerance, measured, detail, extra_ok=True):
    return CheckResult(
        index=index,
        name=name,
        passed=bool(measured <= tolerance and extra_ok),
        tolerance=tolerance,
        measured=float(measured),
        seconds=time.perf_counter() - t0,
        detail=detail,
    )


# ---------------------------------------------------------------------------
# the fourteen checks
# ---------------------------------------------------------------------------


def check_link_stochasticity(seed: int = 0) -> CheckResult:
    """Enumerated link-row mass within 1e-10 of 1 minus the certified tail."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    rows = 0
    for n in range(2, 7):
        for _ in range(50):
            x = random_config(lat, n, rng)
            mass, bound = link_row_mass(x)
            worst = max(worst, abs(mass - 1.0) - bound)
            rows += 1
    return _result(1, "link-stochasticity", t0, 1e-10, worst,
                   f"worst |mass-1|-tail over {rows} random rows")


def check_dim_recurrence(seed: int = 0) -> CheckResult:
    """Dim X = sum wt(X, Y) Dim Y over interlacing Y, to 1e-10 relative."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    rng = np.random.default_rng([seed, 2])
    worst = 0.0
    for _ in range(50):
        x = random_config(lat, int(rng.integers(2, 6)), rng)
        lhs, rhs, bound = dim_recurrence_check(x)
        worst = max(worst, (abs(lhs - rhs) - bound) / abs(lhs))
    return _result(2, "dim-recurrence", t0, 1e-10, worst,
                   "worst relative recurrence gap over 50 random X, N <= 5")


def check_geometric_summation(seed: int = 0) -> CheckResult:
    """b^n - a^n = (1-q^n) sum |c| c^(n-1) over I(a,b), to 1e-12."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    rng = np.random.default_rng([seed, 3])
    worst = 0.0
    done = 0
    while done < 200:
        pts = sorted(
            LatticePoint(int(rng.choice((MINUS, PLUS))), int(rng.integers(-6, 12)))
            for _ in range(2)
        )
        if pts[0] == pts[1]:
            continue
        n = int(rng.integers(1, 4))
        lhs, rhs, bound = geometric_summation_check(pts[0], pts[1], n, lat)
        worst = max(worst, (abs(lhs - rhs) - bound) / max(1.0, abs(lhs)))
        done += 1
    return _result(3, "geometric-summation", t0, 1e-12, worst,
                   "worst relative gap over 200 random (a, b, n)")


def _partitions_up_to(weight: int) -> list[tuple[int, ...]]:
    def gen(w, head):
        if w == 0:
            yield ()
            return
        for h in range(min(w, head), 0, -1):
            for rest in gen(w - h, h):
                yield (h,) + rest

    return [p for w in range(1, weight + 1) for p in gen(w, w)]


def check_schur_branching(seed: int = 0) -> CheckResult:
    """Averaged normalized Schur over composed rows, all |nu| <= 4, N <= 4."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    rng = np.random.default_rng([seed, 4])
    tail = TailSpec(cutoff=lat.q**48, cap=lat.q**-8)
    partitions = _partitions_up_to(4)
    worst = 0.0
    cases = 0
    for n in (2, 3, 4):
        for k in range(1, n):
            for _ in range(2):
                # plus-branch sources keep every interlacing interval finite
                start = int(rng.integers(0, 3))
                gaps = rng.integers(1, 3, size=n - 1)
                exps = np.concatenate(([start], start + np.cumsum(gaps)))
                x = Configuration(
                    lat, tuple(sorted(LatticePoint(PLUS, int(m)) for m in exps))
                )
                for parts in partitions:
                    if len(parts) > k:
                        continue
                    lhs, rhs = branching_identity_check(
                        x, k, Signature(parts), tail=tail
                    )
                    worst = max(worst, abs(lhs - rhs) / abs(rhs))
                    cases += 1
    return _result(4, "schur-branching", t0, 1e-9, worst,
                   f"worst relative gap over {cases} (X, K, nu) cases")


def _poly_param_sets(lat):
    return (
        pbqj_params(1 + 0.5j, 1 - 0.5j, 16 + 8j, 16 - 8j, lat),
        pbqj_params(1 + 1j, 1 - 1j, 120.0, 100.0, lat),
        pbqj_params(-0.25, 0.25, 2 + 2j, 2 - 2j, lat),
    )


def check_pbqj_orthogonality(seed: int = 0) -> CheckResult:
    """Gram matrix of P_0..P_3 against diag(h_n), 1e-8 relative."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    worst = 0.0
    for params in _poly_param_sets(lat)[:2]:
        hs = [norm_h(n, params) for n in range(4)]
        for m in range(4):
            for n in range(m, 4):
                ip = orthogonality_check(m, n, params)
                if m == n:
                    worst = max(worst, abs(ip - hs[n]) / hs[n])
                else:
                    worst = max(worst, abs(ip) / math.sqrt(hs[m] * hs[n]))
    return _result(5, "pbqj-orthogonality", t0, 1e-8, worst,
                   "worst Gram deviation, degrees 0..3, two parameter sets")


def check_dougall_h0(seed: int = 0) -> CheckResult:
    """h_0 closed form against the direct lattice sum, 1e-10 relative."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    tail = TailSpec(cutoff=lat.q**64, cap=lat.q**-40)
    worst = 0.0
    for params in _poly_param_sets(lat):
        direct = math.fsum(
            weight_w(p, params)
            for p in interval_I_tilde(None, None, lat, tail)
        )
        closed = norm_h(0, params)
        worst = max(worst, abs(closed - direct) / abs(closed))
    return _result(6, "dougall-h0", t0, 1e-10, worst,
                   "three parameter sets including the bounded-support one")


def check_backward_shift(seed: int = 0) -> CheckResult:
    """Summed backward-shift identity at 20 points x 3 degrees, 1e-9."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    params = _poly_param_sets(lat)[0]
    ys = [LatticePoint(MINUS, m) for m in range(-4, 6)]
    ys += [LatticePoint(PLUS, m) for m in range(1, 11)]
    worst = 0.0
    for n in range(3):
        for y in ys:
            lhs, rhs = backward_shift_check(n, y, params, pointwise_checks=5)
            # the 1e-4 floor makes this |l-r| <= max(tol |rhs|, 1e-13);
            # right-tail sums cancel down to ~1e-13 absolute
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-4))
    return _result(7, "backward-shift", t0, 1e-9, worst,
                   f"worst relative gap over {len(ys)} points, n = 0..2")


def check_coherency(seed: int = 0) -> CheckResult:
    """Level-(N+1) measures push through the links onto level N, 1e-6."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    quad = reference_quad(lat)
    rng = np.random.default_rng([seed, 8])
    worst = 0.0
    tail_seen = 0.0
    for n_y in (1, 2, 3):
        ens = ensemble(quad, n_y + 1)
        for _ in range(10):
            y = random_config(lat, n_y, rng, lo=-3, hi=6, max_gap=2)
            lhs, rhs, err = coherency_check(ens, y)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
            tail_seen = max(tail_seen, err / abs(rhs))
    return _result(8, "coherency", t0, 1e-6, worst,
                   f"10 random Y per level 1..3; max truncation est {tail_seen:.1e}")


def check_phi32_asymptotics(seed: int = 0) -> CheckResult:
    """Terminating 3phi2 against its 2phi1 limit form, 1e-3 at n = 25."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    rows = phi32_limit_check([5, 10, 15, 20, 25], 2.3, 0.7, 3.1, 1.7, lat.q)
    errs = [abs(ratio - 1.0) for _, _, _, ratio in rows]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return _result(9, "phi32-asymptotics", t0, 1e-3, errs[-1],
                   f"|ratio-1| by n: {', '.join(f'{e:.2e}' for e in errs)}",
                   extra_ok=decreasing)


_LIMIT_SCHEDULE = (10, 15, 20, 25, 30)


def check_polynomial_limit(seed: int = 0) -> CheckResult:
    """Rescaled weighted polynomials against F_r at 10 points, 1e-3 at N = 30."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    quad = reference_quad(lat)
    points = [LatticePoint(b, m) for b in (MINUS, PLUS) for m in (-2, 0, 2, 4, 6)]
    errs = []
    for N in _LIMIT_SCHEDULE:
        worst = 0.0
        for r in (0, 1):
            for pt in points:
                f = F_r(r, pt, quad).real
                worst = max(worst, abs(scaled_weighted_poly(r, pt, quad, N) - f) / abs(f))
        errs.append(worst)
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return _result(10, "polynomial-limit", t0, 1e-3, errs[-1],
                   f"worst relative error by N: {', '.join(f'{e:.2e}' for e in errs)}",
                   extra_ok=decreasing)


def check_norm_limit(seed: int = 0) -> CheckResult:
    """Rescaled monic norms against the closed-form limit, same schedule."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    quad = reference_quad(lat)
    errs = []
    for N in _LIMIT_SCHEDULE:
        worst = 0.0
        for r in (0, 1, 2):
            hf = h_frak(r, quad)
            worst = max(worst, abs(scaled_norm_finite(r, quad, N) - hf) / hf)
        errs.append(worst)
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return _result(11, "norm-limit", t0, 1e-3, errs[-1],
                   f"worst relative error by N: {', '.join(f'{e:.2e}' for e in errs)}",
                   extra_ok=decreasing)


def check_kernel_validity(seed: int = 0) -> CheckResult:
    """Kernel convergence at N = 30, minor positivity, and the intensity match."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    quad = reference_quad(lat)
    bk = BoundaryKernel(quad)
    rng = np.random.default_rng([seed, 12])
    # same-sign pairs: the rescaled level-30 kernel against the limit
    pairs = [
        (LatticePoint(PLUS, 0), LatticePoint(PLUS, 3)),
        (LatticePoint(MINUS, 1), LatticePoint(MINUS, 4)),
        (LatticePoint(PLUS, 2), LatticePoint(PLUS, 2)),
    ]
    worst = 0.0
    for x, y in pairs:
        worst = max(worst, abs(scaled_kernel_N(x, y, quad, 30) - boundary_kernel(x, y, bk)))
    # intensity: rho^1 from the limit kernel against the level-30 diagonal
    for pt in (LatticePoint(PLUS, 1), LatticePoint(MINUS, 2), LatticePoint(PLUS, 5)):
        worst = max(
            worst,
            abs(boundary_kernel(pt, pt, bk) - scaled_kernel_N(pt, pt, quad, 30)),
        )
    # determinant minors of the limit kernel are probabilities
    universe = [LatticePoint(b, m) for b in (MINUS, PLUS) for m in range(-3, 9)]
    lo_det, hi_det = 1.0, 0.0
    for _ in range(200):
        size = int(rng.integers(1, 5))
        idx = rng.choice(len(universe), size=size, replace=False)
        pts = [universe[i] for i in idx]
        mat = np.empty((size, size))
        for i in range(size):
            mat[i, i] = boundary_kernel(pts[i], pts[i], bk)
            for j in range(i + 1, size):
                val = boundary_kernel(pts[i], pts[j], bk)
                mat[i, j] = mat[j, i] = val
        det = float(np.linalg.det(mat))
        lo_det, hi_det = min(lo_det, det), max(hi_det, det)
    minors_ok = lo_det >= -1e-8 and hi_det <= 1.0 + 1e-8
    return _result(12, "kernel-validity", t0, 1e-3, worst,
                   f"200 random minors in [{lo_det:.2e}, {hi_det:.6f}]",
                   extra_ok=minors_ok)


def check_sampler_validity(seed: int = 0) -> CheckResult:
    """DPP sampler at N = 2 against the brute-force law, TV < 0.02 at 1e5 draws."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    quad = reference_quad(lat)
    ens = ensemble(quad, 2)
    rng = np.random.default_rng([seed, 13])
    draws = 100_000
    counts: dict = {}
    for _ in range(draws):
        x = sample_ensemble(ens, rng, method="dpp")
        counts[x.points] = counts.get(x.points, 0) + 1
    window = list(interval_I_tilde(None, None, lat, TailSpec.default(lat, 48, 20)))
    exact: dict = {}
    for i, a in enumerate(window):
        for b in window[i + 1:]:
            pts = tuple(sorted((a, b)))
            w = measure_weight(Configuration(lat, pts), ens)
            if w > 1e-12:
                exact[pts] = w
    keys = set(counts) | set(exact)
    tv = 0.5 * sum(
        abs(counts.get(k, 0) / draws - exact.get(k, 0.0)) for k in keys
    )
    return _result(13, "sampler-validity", t0, 0.02, tv,
                   f"TV against enumeration over {len(exact)} configurations")


def check_lln_trend(seed: int = 0) -> CheckResult:
    """Empirical P[y_(1) = x_(1)] exceeds 0.99 at the deepest level."""
    t0 = time.perf_counter()
    lat = reference_lattice()
    pts = tuple(
        LatticePoint(PLUS if j % 2 == 0 else MINUS, j) for j in range(12)
    )
    bp = BoundaryPoint(VariationalSeries(lat, pts))
    rows = lln_check(bp, 1, [4, 7, 10], 900, rng=np.random.default_rng([seed, 14]))
    trend_ok = all(
        e2 >= e1 - 2.0 * math.hypot(s1, s2)
        for (_, e1, s1), (_, e2, s2) in zip(rows, rows[1:])
    )
    est = [e for _, e, _ in rows]
    return _result(14, "lln-trend", t0, 0.01, 1.0 - rows[-1][1],
                   f"estimates by L: {', '.join(f'{e:.4f}' for e in est)}",
                   extra_ok=trend_ok)


CHECKS = (
    check_link_stochasticity,
    check_dim_recurrence,
    check_geometric_summation,
    check_schur_branching,
    check_pbqj_orthogonality,
    check_dougall_h0,
    check_backward_shift,
    check_coherency,
    check_phi32_asymptotics,
    check_polynomial_limit,
    check_norm_limit,
    check_kernel_validity,
    check_sampler_validity,
    check_lln_trend,
)


def run_all(
    seed: int = 0, only: list[int] | None = None, threads: int = 1
) -> list[CheckResult]:
    """Run the acceptance checks (all, or the 1-based subset in ``only``)."""
    selected = [
        fn for i, fn in enumerate(CHECKS, start=1) if only is None or i in only
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda fn: fn(seed), selected))
    else:
        results = [fn(seed) for fn in selected]
    return sorted(results, key=lambda r: r.index)
