"""Certified q-series primitives.

Everything downstream reduces to the building blocks in this module:
finite and infinite q-Pochhammer symbols, the multiplicative theta
function, and the basic hypergeometric sums 2phi1 / 3phi2.  Every
truncated quantity is returned as a :class:`SeriesResult` carrying a
certified bound on the truncation error, so callers can budget their
tolerances instead of guessing.

Conventions
-----------
* ``0 < q < 1`` throughout; wrap the base in :class:`QBase` or pass a
  bare float.
* ``(a; q)_n = prod_{m=0}^{n-1} (1 - a q^m)`` and ``(a; q)_oo`` is its
  ``n -> oo`` limit.
* ``theta_q(u) = (u; q)_oo (q/u; q)_oo``, the convention for which
  ``theta_q(q u) = -u^{-1} theta_q(u)`` holds identically.
* ``phi21(a, b; c | z) = sum_n (a;q)_n (b;q)_n / ((c;q)_n (q;q)_n) z^n``
  and ``phi32`` is the analogous sum with three upper and two lower
  parameters.  A series *terminates* when an upper parameter equals
  ``q^{-k}`` for a nonnegative integer ``k``.

Tail certificates
-----------------
For the infinite product, once ``|a| q^M <= 1/2`` the remaining factors
satisfy ``|log(1 - a q^m)| <= 2 |a| q^m``, so the log of the tail is
bounded by the geometric sum ``2 |a| q^M / (1 - q)``.  For the
hypergeometric sums, the term ratio at index ``n`` is bounded by

    rho_n = |z| (1 + |a| q^n)(1 + |b| q^n) / ((1 - |c| q^n)(1 - q^{n+1}))

which is decreasing in ``n`` once ``|c| q^n < 1``, giving the geometric
tail bound ``|t_n| rho_n / (1 - rho_n)`` when ``rho_n < 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import Nonconvergent, PoleInC, ZeroArgument

_EPS = 2.220446049250313e-16
_DEFAULT_TOL = 1e-14
_MAX_TERMS = 20000

# Accumulation mode for long sums: plain Kahan compensation by default,
# double-double behind a flag for stress experiments.
_ACCUMULATION_MODE = "kahan"


def set_accumulation_mode(mode: str) -> None:
    """Select the series accumulator: ``"kahan"`` (default) or ``"dd"``."""
    global _ACCUMULATION_MODE
    if mode not in ("kahan", "dd"):
        raise ValueError(f"unknown accumulation mode {mode!r}")
    _ACCUMULATION_MODE = mode


def get_accumulation_mode() -> str:
    return _ACCUMULATION_MODE


@dataclass(frozen=True)
class QBase:
    """Base of the q-deformation, constrained to the open interval (0, 1)."""

    q: float

    def __post_init__(self) -> None:
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0, 1), got {self.q}")


def _as_q(q: QBase | float) -> float:
    if isinstance(q, QBase):
        return q.q
    q = float(q)
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q}")
    return q


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated series/product plus a certified error bound.

    ``abs_error_bound`` bounds the modulus of the discarded tail (and for
    products, the induced absolute error).  ``near_zero_warning`` is set
    when some factor ``1 - a q^m`` came within ``10 eps`` of zero, which
    makes the relative accuracy of the *value* unreliable even though the
    tail bound still holds.
    """

    value: complex
    abs_error_bound: float
    terms_used: int
    near_zero_warning: bool = False


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    t = s - a
    return s, (a - (s - t)) + (b - t)


class _Sum:
    """Compensated accumulator for complex series terms."""

    __slots__ = ("_re_hi", "_re_lo", "_im_hi", "_im_lo", "_mode")

    def __init__(self) -> None:
        self._mode = _ACCUMULATION_MODE
        self._re_hi = self._re_lo = 0.0
        self._im_hi = self._im_lo = 0.0

    def add(self, x: complex) -> None:
        if self._mode == "kahan":
            # Kahan: the compensation lives in the *_lo slots.
            y = x.real - self._re_lo
            t = self._re_hi + y
            self._re_lo = (t - self._re_hi) - y
            self._re_hi = t
            y = x.imag - self._im_lo
            t = self._im_hi + y
            self._im_lo = (t - self._im_hi) - y
            self._im_hi = t
        else:
            s, e = _two_sum(self._re_hi, x.real)
            self._re_lo += e
            self._re_hi, self._re_lo = _two_sum(s, self._re_lo)
            s, e = _two_sum(self._im_hi, x.imag)
            self._im_lo += e
            self._im_hi, self._im_lo = _two_sum(s, self._im_lo)

    def total(self) -> complex:
        if self._mode == "kahan":
            return complex(self._re_hi, self._im_hi)
        return complex(self._re_hi + self._re_lo, self._im_hi + self._im_lo)


def qpochhammer_finite(a: complex, n: int, q: QBase | float) -> complex:
    """(a; q)_n by direct product; (a; q)_0 = 1."""
    qv = _as_q(q)
    if n < 0:
        raise ValueError(f"finite q-Pochhammer needs n >= 0, got {n}")
    p = complex(1.0)
    aq = complex(a)
    for _ in range(n):
        p *= 1.0 - aq
        aq *= qv
    return p


def qpochhammer_infinite(
    a: complex, q: QBase | float, tol: float = _DEFAULT_TOL
) -> SeriesResult:
    """(a; q)_oo with a certified truncation bound.

    Factors are multiplied until the geometric log-tail bound drives the
    remaining relative error below ``tol``.
    """
    qv = _as_q(q)
    p = complex(1.0)
    aq = complex(a)
    near_zero = False
    m = 0
    while True:
        mag = abs(aq)
        if mag <= 0.5:
            t = 2.0 * mag / (1.0 - qv)
            bound = abs(p) * math.expm1(t)
            if bound <= tol:
                return SeriesResult(p, bound, m, near_zero)
        factor = 1.0 - aq
        if abs(factor) < 10.0 * _EPS * max(1.0, mag):
            near_zero = True
        p *= factor
        aq *= qv
        m += 1
        if m > _MAX_TERMS:
            raise Nonconvergent(
                f"(a;q)_oo with a={a!r}, q={qv} did not certify after {m} factors"
            )


def theta_q(u: complex, q: QBase | float, tol: float = _DEFAULT_TOL) -> SeriesResult:
    """Multiplicative theta function theta_q(u) = (u; q)_oo (q/u; q)_oo.

    Satisfies theta_q(q u) = -u^{-1} theta_q(u); vanishes exactly on the
    geometric progression u in q^Z.
    """
    qv = _as_q(q)
    if u == 0:
        raise ZeroArgument("theta_q is undefined at u = 0")
    r1 = qpochhammer_infinite(u, qv, tol / 2)
    r2 = qpochhammer_infinite(qv / u, qv, tol / 2)
    bound = (
        abs(r1.value) * r2.abs_error_bound
        + abs(r2.value) * r1.abs_error_bound
        + r1.abs_error_bound * r2.abs_error_bound
    )
    return SeriesResult(
        r1.value * r2.value,
        bound,
        r1.terms_used + r2.terms_used,
        r1.near_zero_warning or r2.near_zero_warning,
    )


def _terminates_at(p: complex, q: float) -> int | None:
    """Smallest k >= 0 with p = q^{-k}, detected within 1e-8 relative slack."""
    if abs(p.imag) > 1e-12 * max(1.0, abs(p)):
        return None
    x = p.real
    if x < 1.0 - 1e-8:
        return None
    k = round(math.log(x) / -math.log(q)) if x > 0 else None
    if k is None or k < 0:
        return None
    if abs(x * q**k - 1.0) <= 1e-8:
        return k
    return None


def _finite_sum(
    uppers: list[complex],
    lowers: list[complex],
    z: complex,
    q: float,
    k: int,
    exact_first: bool,
) -> SeriesResult:
    """Sum a terminating series through index k.

    When ``exact_first`` is set the first upper parameter is taken to be
    exactly q^{-k} and its factors are formed as 1 - q^{j-k}, avoiding
    the drift of repeated multiplication by q.
    """
    acc = _Sum()
    t = complex(1.0)
    acc.add(t)
    abs_sum = 1.0
    for j in range(k):
        num = complex(1.0)
        if exact_first:
            num *= 1.0 - q ** (j - k)
            rest = uppers[1:]
        else:
            rest = uppers
        for p in rest:
            num *= 1.0 - p * q**j
        den = complex(1.0)
        for p in lowers:
            f = 1.0 - p * q**j
            if abs(f) < 10.0 * _EPS * max(1.0, abs(p) * q**j):
                raise PoleInC(
                    f"lower parameter {p!r} hits q^-{j} before termination"
                )
            den *= f
        den *= 1.0 - q ** (j + 1)
        t = t * num / den * z
        acc.add(t)
        abs_sum += abs(t)
    # terminating: no analytic tail, only accumulated rounding noise
    bound = abs_sum * (k + 4) * 4.0 * _EPS
    return SeriesResult(acc.total(), bound, k + 1)


def _phi_general(
    uppers: list[complex],
    lowers: list[complex],
    z: complex,
    q: float,
    tol: float,
    max_terms: int,
) -> SeriesResult:
    term_orders = [_terminates_at(p, q) for p in uppers]
    orders = [k for k in term_orders if k is not None]
    if orders:
        k = min(orders)
        exact_first = term_orders[0] == k
        if not exact_first:
            # rotate the detected parameter to the front for exact factors
            i = term_orders.index(k)
            uppers = [uppers[i]] + uppers[:i] + uppers[i + 1 :]
        return _finite_sum(uppers, lowers, z, q, k, exact_first=True)
    if abs(z) >= 1.0:
        raise Nonconvergent(
            f"|z| = {abs(z)} >= 1 and no upper parameter is q^-k: series diverges"
        )
    acc = _Sum()
    t = complex(1.0)
    acc.add(t)
    n = 0
    while n < max_terms:
        qn = q**n
        num = complex(1.0)
        for p in uppers:
            num *= 1.0 - p * qn
        den = complex(1.0)
        for p in lowers:
            f = 1.0 - p * qn
            if abs(f) < 10.0 * _EPS * max(1.0, abs(p) * qn):
                raise PoleInC(f"lower parameter {p!r} hits q^-{n}")
            den *= f
        den *= 1.0 - q ** (n + 1)
        t = t * num / den * z
        n += 1
        acc.add(t)
        # certified geometric tail once the ratio bound drops below 1
        qn1 = q**n
        grow = 1.0
        for p in uppers:
            grow *= 1.0 + abs(p) * qn1
        shrink = 1.0 - q ** (n + 1)
        ok = True
        for p in lowers:
            f = 1.0 - abs(p) * qn1
            if f <= 0.0:
                ok = False
                break
            shrink *= f
        if ok:
            rho = abs(z) * grow / shrink
            if rho < 1.0:
                bound = abs(t) * rho / (1.0 - rho)
                if bound <= tol:
                    return SeriesResult(acc.total(), bound, n + 1)
    raise Nonconvergent(
        f"series did not certify tol={tol} within {max_terms} terms (|z|={abs(z)})"
    )


def phi21(
    a: complex,
    b: complex,
    c: complex,
    z: complex,
    q: QBase | float,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _MAX_TERMS,
) -> SeriesResult:
    """Basic hypergeometric sum 2phi1(a, b; c | z)."""
    qv = _as_q(q)
    return _phi_general([complex(a), complex(b)], [complex(c)], complex(z), qv, tol, max_terms)


def phi32(
    a: complex,
    b: complex,
    c: complex,
    d: complex,
    e: complex,
    z: complex,
    q: QBase | float,
    tol: float = _DEFAULT_TOL,
    max_terms: int = _MAX_TERMS,
) -> SeriesResult:
    """Basic hypergeometric sum 3phi2(a, b, c; d, e | z)."""
    qv = _as_q(q)
    return _phi_general(
        [complex(a), complex(b), complex(c)],
        [complex(d), complex(e)],
        complex(z),
        qv,
        tol,
        max_terms,
    )


def phi32_terminating(
    k: int,
    b: complex,
    c: complex,
    d: complex,
    e: complex,
    z: complex,
    q: QBase | float,
) -> complex:
    """3phi2(q^{-k}, b, c; d, e | z) with the terminating order given exactly.

    Preferred over :func:`phi32` whenever the caller knows k, since it
    sidesteps the floating-point detection of q^{-k} upper parameters.
    """
    qv = _as_q(q)
    if k < 0:
        raise ValueError(f"terminating order must be >= 0, got {k}")
    res = _finite_sum(
        [complex(qv ** (-k)), complex(b), complex(c)],
        [complex(d), complex(e)],
        complex(z),
        qv,
        k,
        exact_first=True,
    )
    return res.value


def phi32_transform_III11(
    n: int,
    b: complex,
    c: complex,
    d: complex,
    e: complex,
    q: QBase | float,
) -> tuple[complex, complex]:
    """Both sides of the terminating 3phi2 transformation (Gasper-Rahman III.11).

    Left side:  3phi2(q^{-n}, b q^{-n}, c q^{-n}; d q^{-n}, e q^{-n} | q).
    Right side: (de/(bc); q)_n (bc/d)^n q^{-n^2} / (e q^{-n}; q)_n
                x 3phi2(q^{-n}, d/b, d/c; d q^{-n}, de/(bc) | q).

    Returns the pair (left, right); they agree identically.
    """
    qv = _as_q(q)
    qn = qv ** (-n)
    lhs = phi32_terminating(n, b * qn, c * qn, d * qn, e * qn, qv, qv)
    pre = (
        qpochhammer_finite(d * e / (b * c), n, qv)
        * (b * c / d) ** n
        * qv ** (-n * n)
        / qpochhammer_finite(e * qn, n, qv)
    )
    rhs = pre * phi32_terminating(n, d / b, d / c, d * qn, d * e / (b * c), qv, qv)
    return lhs, rhs


def pochhammer_inversion(e: complex, n: int, q: QBase | float) -> tuple[complex, complex]:
    """Both sides of (e q^{-n}; q)_n = e^n (-1)^n q^{-n(n+1)/2} (q/e; q)_n."""
    qv = _as_q(q)
    lhs = qpochhammer_finite(e * qv ** (-n), n, qv)
    rhs = e**n * (-1.0) ** n * qv ** (-n * (n + 1) // 2) * qpochhammer_finite(qv / e, n, qv)
    return lhs, rhs


# ---------------------------------------------------------------------------
# log-space variants
#
# The convergence experiments at N ~ 30 need products whose individual
# factors overflow/underflow binary64 even though the assembled quantity
# is O(1).  These helpers return complex logarithms; the caller sums the
# logs and exponentiates once at the end.
# ---------------------------------------------------------------------------


def _log1m(u: complex) -> complex:
    """log(1 - u), accurate for small |u| and stable for huge |u|."""
    mag = abs(u)
    if mag < 1e-3:
        # series: -(u + u^2/2 + ...), truncation below 1e-16 relative
        s = complex(0.0)
        p = u
        for j in range(1, 7):
            s -= p / j
            p *= u
        return s
    if mag > 2.0:
        return cmath.log(-u) + _log1m(1.0 / u)
    return cmath.log(1.0 - u)


def log_qpochhammer_finite(a: complex, n: int, q: QBase | float) -> complex:
    """log (a; q)_n as a sum of factor logs (branch: sum of principal logs)."""
    qv = _as_q(q)
    if n < 0:
        raise ValueError(f"finite q-Pochhammer needs n >= 0, got {n}")
    s = complex(0.0)
    aq = complex(a)
    for _ in range(n):
        s += _log1m(aq)
        aq *= qv
    return s


def log_qpochhammer_infinite(
    a: complex, q: QBase | float, tol: float = _DEFAULT_TOL
) -> complex:
    """log (a; q)_oo with the same geometric tail certificate as the product form."""
    qv = _as_q(q)
    s = complex(0.0)
    aq = complex(a)
    m = 0
    while True:
        mag = abs(aq)
        if mag <= 0.5 and 2.0 * mag / (1.0 - qv) <= tol:
            return s
        s += _log1m(aq)
        aq *= qv
        m += 1
        if m > _MAX_TERMS:
            raise Nonconvergent(f"log (a;q)_oo with a={a!r} did not certify")


def log_theta(u: complex, q: QBase | float, tol: float = _DEFAULT_TOL) -> complex:
    """log theta_q(u) = log (u; q)_oo + log (q/u; q)_oo."""
    qv = _as_q(q)
    if u == 0:
        raise ZeroArgument("theta_q is undefined at u = 0")
    return log_qpochhammer_infinite(u, qv, tol) + log_qpochhammer_infinite(qv / u, qv, tol)
