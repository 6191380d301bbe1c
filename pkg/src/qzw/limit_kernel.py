"""Boundary correlation kernel of the particle ensembles.

At a fixed pair of lattice points the level-N projection kernel converges
once the weighted polynomial of degree N - r is rescaled by
(gamma*delta)^((N-1)/2) / q^(N(N-1)/2) and a sign (sgn x)^(N-1).  The limit
is built from a one-parameter family of basic hypergeometric functions
``F_r`` and their squared norms ``h_frak``; the kernel itself is a 2x2
combination of F_0 and F_1 divided by x - y.

Every finite-N quantity entering the limit is evaluated with exponents
carried in log space: at N = 30 the bare prefactor q^(N(N-1)/2) and the
level-N weight sit hundreds of orders of magnitude outside binary64 range,
even though each assembled quantity is O(1).  The rescaling prefactors
cancel analytically in the kernel combination, so none of them is ever
exponentiated on its own.

The diagonal of the limit kernel is a removable singularity.  It is
computed by averaging the analytically extended kernel over a small circle
around the point (Cauchy's formula), at two node counts, and cross-checked
against a central finite-difference evaluation of the same limit; a
disagreement beyond 1e-6 relative is raised as an error rather than
silently returned.

Only the regime alpha*beta < q^2 gamma*delta is supported.  Analytic
continuation of the kernel to the remaining admissible parameters is out
of scope and rejected at construction.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CheckFailed,
    DuplicatePoints,
    HypothesisViolated,
    InvalidParams,
    NegativeUnderSqrt,
    NoConvergentRepresentation,
    PoleInDenominator,
    QuadratureDisagreement,
)
from .lattice import LatticeParams, LatticePoint
from .qspecial import (
    QBase,
    _log1m,
    log_qpochhammer_finite,
    log_qpochhammer_infinite,
    log_theta,
    phi21,
    phi32_terminating,
    qpochhammer_infinite,
    theta_q,
)
from .zw_measures import ParamQuadruple

_CONV_MARGIN = 1e-9
_QPOWER_GUARD = 1e-9


def _exp_real(L: complex, what: str, tol: float = 1e-6) -> float:
    """exp(L) for a log whose imaginary part must sit on a multiple of pi.

    The logs assembled here are sums of principal logs of individual
    factors, so the branch is only determined mod 2*pi*i; a real result
    shows up as an imaginary part near k*pi.  The parity of k is the sign.
    """
    k = round(L.imag / math.pi)
    res = L.imag - k * math.pi
    if abs(res) > tol:
        raise CheckFailed(f"{what}: assembled log has imaginary residue {res!r}")
    mag = math.exp(L.real)
    return -mag if k % 2 else mag


def _as_real(z: complex, what: str, tol: float = 1e-8) -> float:
    if abs(z.imag) > tol * max(abs(z), 1e-300):
        raise CheckFailed(f"{what} should be real, got {z!r}")
    return z.real


# ---------------------------------------------------------------------------
# the boundary functions F_r and their norms
# ---------------------------------------------------------------------------


def _representations(r: int, quad: ParamQuadruple) -> list[tuple[complex, ...]]:
    """Parameter orderings whose series representation of F_r converges.

    F_r is symmetric under swapping the numerator pair and under swapping
    the denominator pair, but its series needs |q^(r-1) b/g| < 1 for the
    ordering (a, b, g, d) actually used.  Returns the convergent orderings,
    best-converging first.
    """
    q = quad.lattice.q
    al, be, ga, de = quad.alpha, quad.beta, quad.gamma, quad.delta
    reps = []
    for a_, b_ in ((al, be), (be, al)):
        for g_, d_ in ((ga, de), (de, ga)):
            z = q ** (r - 1) * b_ / g_
            if abs(z) < 1.0 - _CONV_MARGIN:
                reps.append((abs(z), a_, b_, g_, d_))
    if not reps:
        raise NoConvergentRepresentation(
            f"no ordering of the parameter pairs makes the series for F_{r} converge"
        )
    reps.sort(key=lambda t: t[0])
    return [t[1:] for t in reps]


def F_r(r: int, x: LatticePoint | complex, quad: ParamQuadruple) -> complex:
    """Boundary function of index r at a lattice point or close to one.

    At a lattice point the value is real and the whole product is assembled
    in log space, which keeps the evaluation stable arbitrarily deep into
    either lattice tail.  For complex x near a lattice point the analytic
    extension is returned: |x| is replaced by s*x where s is the sign of
    the nearby lattice point, and all factors are evaluated linearly so the
    result is continuous on small contours.
    """
    if isinstance(x, LatticePoint):
        v = quad.lattice.value(x)
        return complex(_f_lattice(r, v, quad))
    xv = complex(x)
    if xv.real == 0.0:
        raise InvalidParams("complex evaluation needs a point near the real lattice")
    return _f_complex(r, xv, 1.0 if xv.real > 0.0 else -1.0, quad)


def _f_lattice(r: int, v: float, quad: ParamQuadruple, rep: tuple | None = None) -> float:
    q = quad.lattice.q
    if rep is None:
        rep = _representations(r, quad)[0]
    al, be, ga, de = rep
    # square-root factor first: it must be a positive real on the lattice
    try:
        lsq = (
            math.log(abs(v))
            + log_qpochhammer_infinite(v * al, q)
            + log_qpochhammer_infinite(v * be, q)
            - log_theta(v * ga, q)
            - log_theta(v * de, q)
        )
    except ValueError:
        return 0.0  # a numerator factor is exactly zero: outside the support
    ksq = round(lsq.imag / math.pi)
    if abs(lsq.imag - ksq * math.pi) > 1e-6:
        raise CheckFailed(f"square-root factor of F_{r} is not real at x = {v}")
    if ksq % 2:
        raise NegativeUnderSqrt(f"square-root factor of F_{r} is negative at x = {v}")
    L = complex(0.5 * lsq.real)
    L += (1 - r) * cmath.log(complex(v))
    L += log_qpochhammer_infinite(be / ga * q ** (r - 1), q)
    L += log_qpochhammer_infinite(q**r / (de * v), q)
    L -= log_qpochhammer_infinite(al * be / (ga * de) * q ** (2 * r - 2), q)
    phi = phi21(al * q ** (r - 1) / de, q / (be * v), q**r / (de * v), q ** (r - 1) * be / ga, q)
    out = phi.value * cmath.exp(L - 1j * math.floor(L.imag / (2.0 * math.pi)) * 2.0 * math.pi)
    return _as_real(out, f"F_{r} at lattice point {v}", tol=1e-7)


def _f_complex(r: int, xv: complex, s0: float, quad: ParamQuadruple) -> complex:
    q = quad.lattice.q
    al, be, ga, de = _representations(r, quad)[0]
    num = qpochhammer_infinite(xv * al, q).value * qpochhammer_infinite(xv * be, q).value
    den = theta_q(xv * ga, q).value * theta_q(xv * de, q).value
    sq = cmath.sqrt(s0 * xv * num / den)
    pre = (
        qpochhammer_infinite(be / ga * q ** (r - 1), q).value
        * qpochhammer_infinite(q**r / (de * xv), q).value
        / qpochhammer_infinite(al * be / (ga * de) * q ** (2 * r - 2), q).value
    )
    phi = phi21(al * q ** (r - 1) / de, q / (be * xv), q**r / (de * xv), q ** (r - 1) * be / ga, q)
    return sq * xv ** (1 - r) * pre * phi.value


def h_frak(r: int, quad: ParamQuadruple, lat: LatticeParams | None = None) -> float:
    """Squared norm of F_r on the lattice with counting measure, closed form."""
    if lat is None:
        lat = quad.lattice
    q = lat.q
    al, be, ga, de = quad.alpha, quad.beta, quad.gamma, quad.delta
    zm, zp = lat.zeta_minus, lat.zeta_plus
    gd = ga * de
    ab = al * be
    out = complex(zp) * gd**r / ab * q ** (2 - r * r) / (q ** (3 - 2 * r) * gd / ab - 1.0)
    out *= theta_q(zm / zp, q).value * theta_q(gd * zm * zp, q).value
    out /= (
        theta_q(ga * zm, q).value
        * theta_q(de * zm, q).value
        * theta_q(ga * zp, q).value
        * theta_q(de * zp, q).value
    )
    num = qpochhammer_infinite(q, q).value ** 2
    for u in (al / de, al / ga, be / de, be / ga):
        num *= qpochhammer_infinite(u * q ** (r - 1), q).value
    den = qpochhammer_infinite(ab / gd * q ** (2 * r - 2), q).value ** 2
    out *= num / den
    return _as_real(out, f"h_frak({r})", tol=1e-9)


# ---------------------------------------------------------------------------
# the limit kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryKernel:
    params: ParamQuadruple
    h1: float = field(init=False)
    # F values and diagonal entries are reused across matrix assembly
    cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.params.kernel_regime:
            raise InvalidParams(
                "boundary kernel needs alpha*beta < q^2 gamma*delta; analytic "
                "continuation to the rest of the admissible range is unsupported"
            )
        object.__setattr__(self, "h1", h_frak(1, self.params))


def _boundary_F(bk: BoundaryKernel, r: int, pt: LatticePoint) -> float:
    key = (r, pt.branch, pt.exponent)
    out = bk.cache.get(key)
    if out is None:
        out = _f_lattice(r, bk.params.lattice.value(pt), bk.params)
        bk.cache[key] = out
    return out


def boundary_kernel(x: LatticePoint, y: LatticePoint, bk: BoundaryKernel) -> float:
    """Limit kernel K(x, y); the diagonal is the removable-singularity value."""
    if x == y:
        return _diagonal(x, bk)
    lat = bk.params.lattice
    vx, vy = lat.value(x), lat.value(y)
    f0x, f1x = _boundary_F(bk, 0, x), _boundary_F(bk, 1, x)
    f0y, f1y = _boundary_F(bk, 0, y), _boundary_F(bk, 1, y)
    return (f0x * f1y - f1x * f0y) / ((vx - vy) * bk.h1)


def _circle_mean(
    vx: float, f0x: float, f1x: float, rho: float, nodes: int, bk: BoundaryKernel
) -> complex:
    # mean of the extended kernel over the circle = its value at the center
    s0 = 1.0 if vx > 0.0 else -1.0
    acc = complex(0.0)
    for k in range(nodes):
        z = vx + rho * cmath.exp(2j * math.pi * k / nodes)
        f0z = _f_complex(0, z, s0, bk.params)
        f1z = _f_complex(1, z, s0, bk.params)
        acc += (f0x * f1z - f1x * f0z) / (vx - z)
    return acc / (nodes * bk.h1)


def _central_diff(r: int, vx: float, s0: float, h: float, bk: BoundaryKernel) -> complex:
    up = _f_complex(r, vx + h, s0, bk.params)
    dn = _f_complex(r, vx - h, s0, bk.params)
    return (up - dn) / (2.0 * h)


def _diag_fd(vx: float, f0x: float, f1x: float, rho: float, bk: BoundaryKernel) -> complex:
    # central finite difference of the same removable limit, with one
    # Richardson step: the h^2 truncation at h = rho/64 alone is too coarse
    # for the cross-check tolerance
    s0 = 1.0 if vx > 0.0 else -1.0
    h = rho / 64.0
    d0 = (4.0 * _central_diff(0, vx, s0, h / 2.0, bk) - _central_diff(0, vx, s0, h, bk)) / 3.0
    d1 = (4.0 * _central_diff(1, vx, s0, h / 2.0, bk) - _central_diff(1, vx, s0, h, bk)) / 3.0
    return (f1x * d0 - f0x * d1) / bk.h1


def _diagonal(x: LatticePoint, bk: BoundaryKernel) -> float:
    key = ("diag", x.branch, x.exponent)
    out = bk.cache.get(key)
    if out is not None:
        return out
    lat = bk.params.lattice
    vx = lat.value(x)
    f0x = _boundary_F(bk, 0, x)
    f1x = _boundary_F(bk, 1, x)
    # the circle stays inside the gap to the neighbouring lattice points
    rho = (1.0 - lat.q) * abs(vx) / 4.0
    c64 = _circle_mean(vx, f0x, f1x, rho, 64, bk)
    c128 = _circle_mean(vx, f0x, f1x, rho, 128, bk)
    fd = _diag_fd(vx, f0x, f1x, rho, bk)
    scale = max(abs(c128), abs(fd), 1e-6)
    if abs(c64 - c128) > 1e-6 * scale:
        raise QuadratureDisagreement(
            f"contour averages at 64 and 128 nodes differ at x = {vx}: {c64!r} vs {c128!r}"
        )
    if abs(c128 - fd) > 1e-6 * scale:
        raise QuadratureDisagreement(
            f"contour average {c128!r} vs finite difference {fd!r} at x = {vx}"
        )
    out = c128.real
    bk.cache[key] = out
    return out


def boundary_correlation(points: list[LatticePoint], bk: BoundaryKernel) -> float:
    """Probability that the limit configuration contains all given points."""
    if len(set(points)) != len(points):
        raise DuplicatePoints("correlation points must be distinct")
    n = len(points)
    mat = np.empty((n, n))
    for i in range(n):
        mat[i, i] = boundary_kernel(points[i], points[i], bk)
        for j in range(i + 1, n):
            val = boundary_kernel(points[i], points[j], bk)
            mat[i, j] = val
            mat[j, i] = val
    det = float(np.linalg.det(mat))
    if det < -1e-8 or det > 1.0 + 1e-8:
        warnings.warn(f"correlation determinant {det} outside [0, 1]", stacklevel=2)
    return min(max(det, 0.0), 1.0)


# ---------------------------------------------------------------------------
# rescaled finite-N quantities
#
# These take the parameter quadruple and the level directly instead of an
# EnsembleN: at N ~ 30 the ensemble's norms and weights are not
# representable in binary64, so the linear-space constructors cannot run.
# ---------------------------------------------------------------------------


def _level_params(quad: ParamQuadruple, N: int) -> tuple[complex, complex, complex, complex]:
    q = quad.lattice.q
    return quad.alpha, quad.beta, quad.gamma * q ** (1 - N), quad.delta * q ** (1 - N)


def _log_k(n: int, a: complex, b: complex, c: complex, d: complex, q: float) -> complex:
    # log of the leading coefficient c^n (cdq^(n+1)/(ab); q)_n / ((cq/b, cq/a; q)_n)
    s = n * cmath.log(c)
    s += log_qpochhammer_finite(c * d * q ** (n + 1) / (a * b), n, q)
    s -= log_qpochhammer_finite(c * q / b, n, q)
    s -= log_qpochhammer_finite(c * q / a, n, q)
    return s


def _log_norm_ratio(n: int, a: complex, b: complex, c: complex, d: complex, q: float) -> complex:
    # log of the closed-form h_n/h_0 ratio of raw squared norms
    s = n * cmath.log(-c * c / (a * b)) + (n * (n - 1) // 2 + 2 * n) * math.log(q)
    s += log_qpochhammer_finite(q, n, q)
    s += log_qpochhammer_finite(q * d / a, n, q)
    s += log_qpochhammer_finite(q * d / b, n, q)
    s -= log_qpochhammer_finite(q * c * d / (a * b), n, q)
    s -= log_qpochhammer_finite(q * c / a, n, q)
    s -= log_qpochhammer_finite(q * c / b, n, q)
    u = c * d / (a * b)
    s += _log1m(q * u) - _log1m(q ** (2 * n + 1) * u)
    return s


def _log_h0(a: complex, b: complex, c: complex, d: complex, lat: LatticeParams) -> complex:
    q = lat.q
    zm, zp = lat.zeta_minus, lat.zeta_plus
    s = cmath.log(complex(zp))
    for u in (q, a / c, a / d, b / c, b / d):
        s += log_qpochhammer_infinite(u, q)
    s -= log_qpochhammer_infinite(a * b / (q * c * d), q)
    s += log_theta(zm / zp, q) + log_theta(c * d * zm * zp, q)
    s -= log_theta(c * zm, q) + log_theta(d * zm, q)
    s -= log_theta(c * zp, q) + log_theta(d * zp, q)
    return s


def _log_scaled_norm(r: int, quad: ParamQuadruple, N: int) -> complex:
    n = N - r
    if n < 0:
        raise InvalidParams(f"degree N - r = {n} is negative")
    a, b, c, d = _level_params(quad, N)
    lat = quad.lattice
    q = lat.q
    gd = _as_real(quad.gamma * quad.delta, "gamma*delta")
    L = _log_h0(a, b, c, d, lat) + _log_norm_ratio(n, a, b, c, d, q)
    L -= 2.0 * _log_k(n, a, b, c, d, q)
    L += (N - 1) * math.log(gd) - N * (N - 1) * math.log(q)
    return L


def scaled_norm_finite(r: int, quad: ParamQuadruple, N: int) -> float:
    """(gamma*delta)^(N-1) q^(-N(N-1)) times the monic squared norm at degree N - r.

    Converges to h_frak(r) as N grows; the rescaling exponents are combined
    with the norm's own log before anything is exponentiated.
    """
    out = _exp_real(_log_scaled_norm(r, quad, N), f"scaled norm at degree {N - r}")
    if out <= 0.0:
        raise InvalidParams(f"nonpositive scaled norm {out} at degree {N - r}")
    return out


def _monic_log_sum(
    n: int, v: float, a: complex, b: complex, c: complex, d: complex, q: float
) -> complex:
    """Monic polynomial value P_n(v)/k_n with every term carried as a log.

    The terminating series is summed term by term, each term exponentiated
    only after dividing out log k_n, so no partial product leaves binary64
    range even when k_n itself would.
    """
    B = c * d * q ** (n + 1) / (a * b)
    D = c * q / b
    E = c * q / a
    lt = -_log_k(n, a, b, c, d, q)
    total = cmath.exp(lt)
    for j in range(1, n + 1):
        qj = q ** (j - 1)
        den = (1.0 - D * qj) * (1.0 - E * qj) * (1.0 - q**j)
        if den == 0.0:
            raise PoleInDenominator(f"denominator factor vanished at term {j} of degree {n}")
        num = (1.0 - q ** (j - 1 - n)) * (1.0 - B * qj) * (1.0 - c * v * qj) * q
        if num == 0.0:
            break  # a vanished numerator factor propagates to every later term
        lt += cmath.log(num / den)
        total += cmath.exp(lt)
    return total


def _log_scaled_poly(r: int, x: LatticePoint, quad: ParamQuadruple, N: int) -> complex | None:
    """Log of the rescaled weighted polynomial at x, or None where it vanishes.

    A negative value carries an imaginary part near an odd multiple of pi;
    the (sgn x)^(N-1) front sign is folded into the log the same way.
    """
    n = N - r
    if n < 0:
        raise InvalidParams(f"degree N - r = {n} is negative")
    lat = quad.lattice
    v = lat.value(x)
    a, b, c, d = _level_params(quad, N)
    q = lat.q
    try:
        lw = (
            math.log(abs(v))
            + log_qpochhammer_infinite(v * a, q)
            + log_qpochhammer_infinite(v * b, q)
            - log_qpochhammer_infinite(v * c, q)
            - log_qpochhammer_infinite(v * d, q)
        )
    except ValueError:
        return None  # a numerator factor is exactly zero: outside the support
    kw = round(lw.imag / math.pi)
    if abs(lw.imag - kw * math.pi) > 1e-6 or kw % 2:
        raise CheckFailed(f"level-{N} weight is not a positive real at x = {v}")
    monic = _monic_log_sum(n, v, a, b, c, d, q)
    if monic == 0.0:
        return None
    gd = _as_real(quad.gamma * quad.delta, "gamma*delta")
    L = cmath.log(monic)
    L += 0.5 * lw.real + 0.5 * (N - 1) * math.log(gd) - 0.5 * N * (N - 1) * math.log(q)
    if v < 0.0 and (N - 1) % 2:
        L += 1j * math.pi
    return L


def scaled_weighted_poly(r: int, x: LatticePoint, quad: ParamQuadruple, N: int) -> float:
    """Rescaled weighted polynomial whose large-N limit is F_r(x).

    (sgn x)^(N-1) (gamma*delta)^((N-1)/2) q^(-N(N-1)/2) sqrt(w_N(x)) P_(N-r)(x)/k_(N-r),
    with w_N the level-N weight.  Returns 0 where the weight vanishes.
    """
    L = _log_scaled_poly(r, x, quad, N)
    if L is None:
        return 0.0
    lat = quad.lattice
    return _exp_real(L, f"rescaled weighted polynomial at x = {lat.value(x)}")


def scaled_kernel_N(x: LatticePoint, y: LatticePoint, quad: ParamQuadruple, N: int) -> float:
    """Level-N kernel assembled from the rescaled quantities.

    Equals (sgn x * sgn y)^(N-1) times the level-N projection kernel: the
    rescaling prefactors cancel between the polynomial pair and the norm,
    and only the sign survives.  For same-sign pairs this converges to
    boundary_kernel; for mixed signs only the absolute value converges.

    Each degree's contribution is exponentiated as a single combined log:
    the separate factors grow like q^(-r^2) in the degree offset r even
    though every contribution is bounded.
    """
    acc = 0.0
    for r in range(1, N + 1):
        lx = _log_scaled_poly(r, x, quad, N)
        if lx is None:
            continue
        ly = lx if y == x else _log_scaled_poly(r, y, quad, N)
        if ly is None:
            continue
        term = lx + ly - _log_scaled_norm(r, quad, N)
        acc += _exp_real(term, f"kernel term at degree {N - r}")
    return acc


def kernel_convergence_table(
    x: LatticePoint,
    y: LatticePoint,
    quad: ParamQuadruple,
    n_list: list[int],
    bk: BoundaryKernel | None = None,
) -> list[tuple[int, float, float, float]]:
    """Rows (N, rescaled level-N kernel, limit kernel, gap).

    The gap compares absolute values when the two points sit on opposite
    sides of zero, since the finite-N kernel then carries an oscillating
    sign relative to its limit.
    """
    if bk is None:
        bk = BoundaryKernel(quad)
    limit = boundary_kernel(x, y, bk)
    lat = quad.lattice
    mixed = (lat.value(x) > 0.0) != (lat.value(y) > 0.0)
    rows = []
    for N in n_list:
        fin = scaled_kernel_N(x, y, quad, N)
        gap = abs(abs(fin) - abs(limit)) if mixed else abs(fin - limit)
        rows.append((N, fin, limit, gap))
    return rows


# ---------------------------------------------------------------------------
# the asymptotic identity behind the polynomial limit
# ---------------------------------------------------------------------------


def _is_q_power(u: complex, q: float) -> bool:
    if abs(u.imag) > 1e-12 * max(abs(u), 1e-300) or u.real <= 0.0:
        return False
    t = math.log(u.real) / math.log(q)
    return abs(t - round(t)) < _QPOWER_GUARD


def phi32_limit_check(
    n_list: list[int],
    B: complex,
    C: complex,
    D: complex,
    E: complex,
    q: QBase | float,
) -> list[tuple[int, complex, complex, complex]]:
    """Terminating 3phi2 with all parameters scaled by q^(-n) vs its large-n form.

    For each n returns (n, lhs, rhs, lhs/rhs) where lhs is the terminating
    sum and rhs the product (BC/(DE))^n (-1)^n q^(-n(n-1)/2)
    (DE/(BC); q)_oo / (q/E; q)_oo * 2phi1(D/B, D/C; DE/(BC) | q/D).
    The ratio tends to 1 geometrically.  Requires |D| > q and D, E not
    powers of q, which keeps the denominator factors away from zero and the
    2phi1 argument inside the unit disk.
    """
    qv = q.q if isinstance(q, QBase) else float(q)
    B, C, D, E = complex(B), complex(C), complex(D), complex(E)
    if not abs(D) > qv:
        raise HypothesisViolated(f"need |D| > q, got |D| = {abs(D)} with q = {qv}")
    if _is_q_power(D, qv) or _is_q_power(E, qv):
        raise HypothesisViolated("D and E must stay off the integer powers of q")
    tail = (
        qpochhammer_infinite(D * E / (B * C), qv).value
        / qpochhammer_infinite(qv / E, qv).value
        * phi21(D / B, D / C, D * E / (B * C), qv / D, qv).value
    )
    rows = []
    for n in n_list:
        qn = qv ** (-n)
        lhs = phi32_terminating(n, B * qn, C * qn, D * qn, E * qn, qv, qv)
        rhs = (B * C / (D * E)) ** n * (-1) ** n * qv ** (-(n * (n - 1)) // 2) * tail
        rows.append((n, lhs, rhs, lhs / rhs))
    return rows
