"""Pseudo big q-Jacobi polynomials.

A quadruple (a, b, c, d) with admissible pairs (a, b) and (c, d) defines a
weight on the double q-lattice,

    w(x) = |x| (ax; q)_inf (bx; q)_inf / ((cx; q)_inf (dx; q)_inf),

whose orthogonal polynomials P_n are terminating 3phi2 sums.  The weight has
finitely many moments, so the family is finite: degrees run up to the largest
n with cdq/(ab) > q^(-2n).  The one supported degenerate variant has (a, b)
real with reciprocals on the lattice; the weight then vanishes outside a
bounded window and every degree is available.

Squared norms come from a theta-function closed form for h_0 (the bilateral
q-Dougall sum) times an explicit ratio.  The raw ratio carries the phase of
k_n^2 because the leading coefficients are complex; the library reports the
monic squared norms, which are real and positive.  All physically real
quantities are computed in complex arithmetic; the imaginary residue must
stay below 1e-10 relative and is asserted before being discarded.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

from .errors import CheckFailed, InvalidParams, PoleAtPoint, PoleInC, PoleInDenominator
from .lattice import MINUS, PLUS, LatticeParams, LatticePoint, TailSpec, interval_I_tilde
from .qspecial import (
    QBase,
    log_qpochhammer_infinite,
    phi32_terminating,
    qpochhammer_infinite,
    theta_q,
)

_GUARD = 1e-9
_REAL_RESIDUE = 1e-10

CONJUGATE_PAIR = "conjugate"
REAL_GAP_PAIR = "real_gap"
REAL_LATTICE_PAIR = "real_lattice"


def _require_real(z: complex, what: str) -> float:
    if abs(z.imag) > _REAL_RESIDUE * max(abs(z), 1e-300):
        raise CheckFailed(f"{what} should be real, got imaginary residue {z.imag!r}")
    return z.real


def _lattice_exponent(lat: LatticeParams, v: float) -> tuple[int, float]:
    """Branch and real exponent e with v = zeta_branch * q^e."""
    if v == 0:
        raise InvalidParams("zero is not on the lattice")
    branch = MINUS if v < 0 else PLUS
    scale = lat.zeta_minus if branch == MINUS else lat.zeta_plus
    return branch, math.log(v / scale) / math.log(lat.q)


def classify_pair(u1: complex, u2: complex, lat: LatticeParams) -> str:
    """Admissibility class of a parameter pair.

    Either a nonreal complex-conjugate pair, a real pair whose reciprocals sit
    in one open gap between neighboring lattice points, or a real pair whose
    reciprocals are themselves lattice points (the bounded-support case).
    """
    u1, u2 = complex(u1), complex(u2)
    if u1 == 0 or u2 == 0:
        raise InvalidParams("pair parameters must be nonzero")
    if abs(u1.imag) > _REAL_RESIDUE * abs(u1) or abs(u2.imag) > _REAL_RESIDUE * abs(u2):
        if abs(u1 - u2.conjugate()) <= 1e-12 * (abs(u1) + abs(u2)):
            return CONJUGATE_PAIR
        raise InvalidParams("nonreal pair must be complex-conjugate")
    exps = []
    on_lattice = []
    for u in (u1.real, u2.real):
        branch, e = _lattice_exponent(lat, 1.0 / u)
        near = abs(e - round(e)) < _GUARD
        exps.append((branch, e))
        on_lattice.append(near)
    if all(on_lattice):
        return REAL_LATTICE_PAIR
    if any(on_lattice):
        raise InvalidParams("one reciprocal on the lattice, the other off: unsupported")
    (b1, e1), (b2, e2) = exps
    if b1 != b2 or math.floor(e1) != math.floor(e2):
        raise InvalidParams("real pair reciprocals must share one open lattice gap")
    return REAL_GAP_PAIR


def _degree_bound(a: complex, b: complex, c: complex, d: complex, q: float) -> int:
    """Largest n with cdq/(ab) > q^(-2n), via integer arithmetic on exponents."""
    r = _require_real(c * d * q / (a * b), "cdq/(ab)")
    if r <= 1.0:
        return -1  # weight is fine but has too few moments for any polynomial
    t = math.log(r) / math.log(1.0 / q)
    k = round(t)
    if abs(t - k) < _GUARD:
        if t != k:
            warnings.warn("cdq/(ab) within guard band of a q-power; degree bound may be off by one")
        return (k - 1) // 2
    return math.ceil(t / 2.0) - 1


@dataclass(frozen=True)
class PBQJParams:
    a: complex
    b: complex
    c: complex
    d: complex
    q: QBase
    lattice: LatticeParams
    numerator_kind: str = field(init=False)
    denominator_kind: str = field(init=False)
    n_max: int | None = field(init=False)

    def __post_init__(self) -> None:
        if abs(self.q.q - self.lattice.q) > 1e-15:
            raise InvalidParams("q and lattice.q disagree")
        nk = classify_pair(self.a, self.b, self.lattice)
        dk = classify_pair(self.c, self.d, self.lattice)
        if dk == REAL_LATTICE_PAIR:
            raise InvalidParams("reciprocals of (c, d) on the lattice put poles on the support")
        object.__setattr__(self, "numerator_kind", nk)
        object.__setattr__(self, "denominator_kind", dk)
        if nk == REAL_LATTICE_PAIR:
            ra, rb = self.a.real, self.b.real
            if not ra < 0 < rb:
                raise InvalidParams("lattice-reciprocal pair must straddle zero")
            # bounded support [q/a, q/b]: every moment is finite
            object.__setattr__(self, "n_max", None)
        else:
            object.__setattr__(
                self, "n_max", _degree_bound(self.a, self.b, self.c, self.d, self.q.q)
            )

    @property
    def bounded_support(self) -> bool:
        return self.numerator_kind == REAL_LATTICE_PAIR

    def degree_ok(self, n: int) -> bool:
        return n >= 0 and (self.n_max is None or n <= self.n_max)

    def shifted(self) -> "PBQJParams":
        """Parameters (a, b, c/q, d/q) of the backward-shift companion system."""
        return PBQJParams(self.a, self.b, self.c / self.q.q, self.d / self.q.q, self.q, self.lattice)


def pbqj_params(a: complex, b: complex, c: complex, d: complex, lat: LatticeParams) -> PBQJParams:
    return PBQJParams(a, b, c, d, QBase(lat.q), lat)


def weight_w(x: LatticePoint, params: PBQJParams) -> float:
    """w(x) = |x| (ax, bx; q)_inf / ((cx, dx; q)_inf), real and nonnegative."""
    return weight_value(params.lattice.value(x), params)


def weight_value(v: float, params: PBQJParams) -> float:
    """Weight at a raw lattice value; see weight_w."""
    q = params.q.q
    a, b, c, d = params.a, params.b, params.c, params.d
    if abs(v) * max(abs(a), abs(b), abs(c), abs(d)) > 1e8:
        # far out on the lattice the individual products overflow while the
        # ratio stays modest; balance the four factors in log space
        try:
            total = complex(math.log(abs(v)))
            total += log_qpochhammer_infinite(a * v, q)
            total += log_qpochhammer_infinite(b * v, q)
        except ValueError:
            return 0.0  # a numerator factor is an exact zero: outside the support
        total -= log_qpochhammer_infinite(c * v, q)
        total -= log_qpochhammer_infinite(d * v, q)
        w = cmath.exp(total)
    else:
        num_a = qpochhammer_infinite(a * v, q)
        num_b = qpochhammer_infinite(b * v, q)
        den_c = qpochhammer_infinite(c * v, q)
        den_d = qpochhammer_infinite(d * v, q)
        den = den_c.value * den_d.value
        if den == 0 or den_c.near_zero_warning or den_d.near_zero_warning:
            raise PoleAtPoint(f"weight denominator vanishes at x = {v}")
        if num_a.value == 0 or num_b.value == 0:
            return 0.0
        w = abs(v) * num_a.value * num_b.value / den
    w = _require_real(w, "weight")
    # rounding can leave a tiny negative residue where a numerator factor is zero
    return max(w, 0.0) if w > -1e-12 else w


def pbqj_eval(n: int, x: complex, params: PBQJParams, formal: bool = False) -> complex:
    """P_n(x) as a terminating 3phi2 with argument q; degree n in x.

    formal=True skips the degree cap: the terminating sum is a perfectly good
    polynomial beyond n_max, it just stops being square integrable.  The
    Christoffel-Darboux form needs exactly one such degree.
    """
    if not (formal or params.degree_ok(n)):
        raise InvalidParams(f"degree {n} exceeds n_max = {params.n_max}")
    a, b = params.a, params.b
    # fix an order on the symmetric pair so a<->b invariance is exact in floats
    if (a.real, a.imag) > (b.real, b.imag):
        a, b = b, a
    q = params.q.q
    c, d = params.c, params.d
    try:
        return phi32_terminating(
            n, c * d / (a * b) * q ** (n + 1), c * x, c * q / b, c * q / a, q, q
        )
    except PoleInC as exc:
        raise PoleInDenominator(str(exc)) from exc


def big_qjacobi_eval(n: int, u: complex, A: complex, B: complex, C: complex, q: float) -> complex:
    """Classical big q-Jacobi polynomial, a terminating 3phi2 with argument q."""
    try:
        return phi32_terminating(n, A * B * q ** (n + 1), u, A * q, C * q, q, q)
    except PoleInC as exc:
        raise PoleInDenominator(str(exc)) from exc


def leading_coeff(n: int, params: PBQJParams, formal: bool = False) -> complex:
    """k_n = c^n (cdq^(n+1)/(ab); q)_n / ((cq/b; q)_n (cq/a; q)_n)."""
    if not (formal or params.degree_ok(n)):
        raise InvalidParams(f"degree {n} exceeds n_max = {params.n_max}")
    a, b, c, d, q = params.a, params.b, params.c, params.d, params.q.q
    num = 1.0 + 0.0j
    den = 1.0 + 0.0j
    for j in range(n):
        num *= 1.0 - c * d * q ** (n + 1) / (a * b) * q**j
        den *= (1.0 - c * q / b * q**j) * (1.0 - c * q / a * q**j)
    return c**n * num / den


def norm_ratio_display(n: int, params: PBQJParams) -> complex:
    """The closed-form ratio h_n/h_0 of raw squared norms sum P_n^2 w.

    Complex in general: P_n has a complex leading coefficient, and the raw
    square (no conjugation) carries the phase of k_n^2.
    """
    a, b, c, d, q = params.a, params.b, params.c, params.d, params.q.q
    ratio = (-1) ** n * (c * c / (a * b)) ** n * q ** (n * (n - 1) // 2) * q ** (2 * n)
    ratio = complex(ratio)
    for j in range(n):
        ratio *= (1.0 - q * d / a * q**j) * (1.0 - q * d / b * q**j) * (1.0 - q * q**j)
        ratio /= (
            (1.0 - q * c * d / (a * b) * q**j)
            * (1.0 - q * c / a * q**j)
            * (1.0 - q * c / b * q**j)
        )
    ratio *= (1.0 - q * c * d / (a * b)) / (1.0 - q ** (2 * n + 1) * c * d / (a * b))
    return ratio


def norm_h(n: int, params: PBQJParams) -> float:
    """Squared norm of the monic polynomial of degree n, real and positive.

    The raw squared norm sum P_n^2 w equals k_n^2 times this value; dividing
    out the leading coefficient is what keeps the quantity real, and it is
    the combination h_n/k_n^2 that every downstream formula consumes.
    """
    if not params.degree_ok(n):
        raise InvalidParams(f"degree {n} exceeds n_max = {params.n_max}")
    h0 = _norm_h0(params)
    if n == 0:
        return h0
    monic = norm_ratio_display(n, params) / leading_coeff(n, params) ** 2
    h = _require_real(monic, "h_n/(h_0 k_n^2)") * h0
    if h <= 0:
        raise InvalidParams(f"nonpositive squared norm h_{n} = {h}")
    return h


def _norm_h0(params: PBQJParams) -> float:
    a, b, c, d, q = params.a, params.b, params.c, params.d, params.q.q
    zm, zp = params.lattice.zeta_minus, params.lattice.zeta_plus
    num = 1.0 + 0.0j
    for u in (q, a / c, a / d, b / c, b / d):
        num *= qpochhammer_infinite(u, q).value
    num /= qpochhammer_infinite(a * b / (q * c * d), q).value
    thetas = theta_q(zm / zp, q).value * theta_q(c * d * zm * zp, q).value
    thetas /= (
        theta_q(c * zm, q).value
        * theta_q(d * zm, q).value
        * theta_q(c * zp, q).value
        * theta_q(d * zp, q).value
    )
    h0 = _require_real(zp * num * thetas, "h_0")
    if h0 <= 0:
        raise InvalidParams(f"nonpositive h_0 = {h0}")
    return h0


@dataclass(frozen=True)
class PolySystem:
    params: PBQJParams
    h: tuple[float, ...]
    k: tuple[complex, ...]

    def __post_init__(self) -> None:
        for n, hn in enumerate(self.h):
            if not hn > 0:
                raise InvalidParams(f"h_{n} = {hn} is not positive")
        for n, kn in enumerate(self.k):
            if kn == 0:
                raise InvalidParams(f"k_{n} vanishes")


def poly_system(params: PBQJParams, max_degree: int | None = None) -> PolySystem:
    """Norms and leading coefficients for degrees 0..n_max (or max_degree)."""
    if max_degree is None:
        if params.n_max is None:
            raise InvalidParams("unbounded family: pass max_degree explicitly")
        max_degree = params.n_max
    if not params.degree_ok(max_degree):
        raise InvalidParams(f"degree {max_degree} exceeds n_max = {params.n_max}")
    h = tuple(norm_h(n, params) for n in range(max_degree + 1))
    k = tuple(leading_coeff(n, params) for n in range(max_degree + 1))
    return PolySystem(params, h, k)


def _support_points(params: PBQJParams, tail: TailSpec | None) -> list[LatticePoint]:
    if tail is None:
        tail = TailSpec.default(params.lattice)
    pts = list(interval_I_tilde(None, None, params.lattice, tail))
    return pts


def orthogonality_check(
    m: int, n: int, params: PBQJParams, tail: TailSpec | None = None
) -> float:
    """Truncated lattice inner product of the monic polynomials m and n.

    Monic normalization keeps the summands real; at m = n the result is
    norm_h(n) up to the truncation error.
    """
    if not (params.degree_ok(m) and params.degree_ok(n)):
        raise InvalidParams(f"degrees ({m}, {n}) exceed n_max = {params.n_max}")
    lat = params.lattice
    km, kn = leading_coeff(m, params), leading_coeff(n, params)
    total = []
    for p in _support_points(params, tail):
        v = lat.value(p)
        w = weight_value(v, params)
        if w == 0.0:
            continue
        pm = pbqj_eval(m, v, params) / km
        pn = pbqj_eval(n, v, params) / kn
        total.append(_require_real(pm * pn, "monic P_m * P_n on the lattice") * w)
    return math.fsum(total)


def backward_shift_check(
    n: int,
    y: LatticePoint,
    params: PBQJParams,
    tail: TailSpec | None = None,
    pointwise_checks: int = 50,
) -> tuple[complex, complex]:
    """Both sides of the summed backward-shift identity at a lattice point y.

    Left side: sum of w*(x) P*_{n+1}(x) over lattice x below y (weakly below
    when y < 0), with (c, d) replaced by (c/q, d/q).  Right side: the closed
    form cq/((b-c)(a-c)) * w(y) P_n(y)/|y|.  Both sides are complex: the
    polynomials have complex coefficients.  Also spot-checks the pointwise
    backward-shift identity of the classical polynomials; a failure there
    raises CheckFailed.
    """
    if params.n_max is None or n > params.n_max:
        raise InvalidParams("backward shift needs cdq/(ab) > q^(-2n)")
    lat = params.lattice
    q = params.q.q
    star = params.shifted()
    terms = []
    for p in interval_I_tilde(None, y, lat, tail or TailSpec.default(lat)):
        v = lat.value(p)
        w = weight_value(v, star)
        if w == 0.0:
            continue
        terms.append(w * complex(pbqj_eval(n + 1, v, star)))
    lhs = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    a, b, c = params.a, params.b, params.c
    vy = lat.value(y)
    scale = c * q / ((b - c) * (a - c))
    rhs = scale * pbqj_eval(n, vy, params) * weight_value(vy, params) / abs(vy)
    _pointwise_backward_shift(n, params, pointwise_checks)
    return lhs, rhs


def _pointwise_backward_shift(n: int, params: PBQJParams, count: int) -> None:
    # deterministic u grid; avoids u = 1 and the parameter points
    a, b, c, d, q = params.a, params.b, params.c, params.d, params.q.q
    A, B, C = c / b, d / a, c / a
    for i in range(count):
        u = complex(-1.3 + 2.7 * (i + 0.5) / count, 0.4 * math.sin(3.7 * i + 0.5))
        lhs = (1 - A) * (1 - C) * u * big_qjacobi_eval(n + 1, u, A / q, B / q, C / q, q)
        rhs = (u - A) * (u - C) * big_qjacobi_eval(n, u, A, B, C, q)
        rhs -= A * (u - 1) * (B * u - C) * big_qjacobi_eval(n, u * q, A, B, C, q)
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs), abs(rhs)):
            raise CheckFailed(
                f"pointwise backward-shift identity off at u = {u}: {lhs} vs {rhs}"
            )
