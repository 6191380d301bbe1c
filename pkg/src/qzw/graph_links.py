"""Stochastic links between adjacent levels of the branching graph.

A level-N vertex is an N-point configuration X on the double q-lattice.
Y at level N-1 is linked to X when Y interlaces X, and the link weight is

    L(X, Y) = prod_i |y_i| * (q;q)_{N-1} * Vdm(Y) / Vdm(X),

where Vdm is the Vandermonde product of the point values.  Rows are
stochastic; the mass lost to the near-zero truncation is certified via
the moment-determinant identity: by multilinearity of the determinant in
its rows, the row mass over a product of disjoint intervals equals
det[ sum_{y in I_i} |y| y^{k-1} ], and the untruncated interval moments
have the closed geometric form (b^k - a^k)/(1 - q^k).

Schur polynomials enter through the branching identity: averaging the
normalized Schur evaluation over a composed link row reproduces the
evaluation at the source configuration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadOrder, SizeMismatch
from .lattice import (
    MINUS,
    PLUS,
    Configuration,
    IntervalPoints,
    LatticeParams,
    LatticePoint,
    TailSpec,
    interlace,
    interval_I,
)

_ROUND_SLOP = 4e-13


@dataclass(frozen=True)
class Signature:
    """A weakly decreasing tuple of integers."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise BadOrder(f"signature parts must weakly decrease, got {parts}")

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self.parts) > n:
            raise SizeMismatch(f"signature {self.parts} has more than {n} parts")
        return self.parts + (0,) * (n - len(self.parts))


@dataclass
class LinkRow:
    """One (possibly composed) row of link probabilities out of ``source``.

    ``tail_mass_bound`` bounds the probability mass outside the
    enumerated entries.  Monte-Carlo rows carry per-entry standard
    errors instead of a deterministic tail certificate.
    """

    source: Configuration
    entries: dict[Configuration, float]
    tail_mass_bound: float
    standard_errors: dict[Configuration, float] | None = None

    @property
    def mass(self) -> float:
        return math.fsum(self.entries.values())


def weight_wt(x: Configuration, y: Configuration) -> float:
    """prod_i |y_i| when y interlaces x, else 0."""
    if not interlace(x, y):
        return 0.0
    return float(np.prod(np.abs(y.values())))


def _qq_factorial(q: float, n: int) -> float:
    # (q;q)_1 (q;q)_2 ... (q;q)_n
    out = 1.0
    p = 1.0
    for k in range(1, n + 1):
        p *= 1.0 - q**k
        out *= p
    return out


def _qq_poch(q: float, n: int) -> float:
    # (q;q)_n
    p = 1.0
    for k in range(1, n + 1):
        p *= 1.0 - q**k
    return p


def _vandermonde(vals: np.ndarray) -> float:
    out = 1.0
    n = len(vals)
    for i in range(n):
        for j in range(i + 1, n):
            out *= vals[j] - vals[i]
    return float(out)


def dim(x: Configuration) -> float:
    """Number-of-paths weight of x: Vdm(X) / ((q;q)_1 ... (q;q)_{N-1})."""
    vals = x.values()
    return _vandermonde(vals) / _qq_factorial(x.lattice.q, len(vals) - 1)


def _support_intervals(x: Configuration, tail: TailSpec) -> list[IntervalPoints]:
    lat = x.lattice
    return [interval_I(a, b, lat, tail) for a, b in zip(x.points, x.points[1:])]


def _grid_values(intervals: list[IntervalPoints], lat: LatticeParams) -> np.ndarray:
    """All interlacing value-tuples as an (M, k) array (row-major product order)."""
    vals = [lat.values(iv.points) for iv in intervals]
    grids = np.meshgrid(*vals, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _row_weights(x: Configuration, v: np.ndarray) -> np.ndarray:
    """Link weights for every row of the value grid v."""
    n = v.shape[1]
    w = np.prod(np.abs(v), axis=1)
    for i in range(n):
        for j in range(i + 1, n):
            w *= v[:, j] - v[:, i]
    w *= _qq_poch(x.lattice.q, n) / _vandermonde(x.values())
    return w


def _moment_det_mass(x: Configuration, tail: TailSpec | None) -> float:
    """Row mass via det[interval moments]; tail=None gives the exact value.

    Exact moments come from the geometric summation identity
    sum_{c in I(a,b)} |c| c^{k-1} = (b^k - a^k)/(1 - q^k).
    """
    lat = x.lattice
    n = len(x) - 1
    xv = x.values()
    m = np.empty((n, n))
    if tail is None:
        for k in range(1, n + 1):
            m[:, k - 1] = (xv[1:] ** k - xv[:-1] ** k) / (1.0 - lat.q**k)
    else:
        for i, iv in enumerate(_support_intervals(x, tail)):
            yv = lat.values(iv.points)
            ay = np.abs(yv)
            for k in range(1, n + 1):
                m[i, k - 1] = float(np.sum(ay * yv ** (k - 1)))
    det = float(np.linalg.det(m))
    return det * _qq_poch(lat.q, n) / _vandermonde(xv)


def row_tail_bound(x: Configuration, tail: TailSpec) -> float:
    """Certified bound on the link-row mass lost to truncation."""
    gap = _moment_det_mass(x, None) - _moment_det_mass(x, tail)
    return max(gap, 0.0) + _ROUND_SLOP


def link_row_mass(x: Configuration, tail: TailSpec | None = None) -> tuple[float, float]:
    """(enumerated row mass, certified tail bound) without building entries.

    The mass is a direct vectorized sum over the truncated interlacing
    set; the bound certifies what truncation discarded.
    """
    if len(x) < 2:
        raise SizeMismatch("a link row needs a source with at least 2 points")
    if tail is None:
        tail = TailSpec.default(x.lattice)
    v = _grid_values(_support_intervals(x, tail), x.lattice)
    mass = float(np.sum(_row_weights(x, v)))
    return mass, row_tail_bound(x, tail)


def link_row(x: Configuration, tail: TailSpec | None = None) -> LinkRow:
    """Enumerate the truncated link row out of x with entry probabilities."""
    if len(x) < 2:
        raise SizeMismatch("a link row needs a source with at least 2 points")
    if tail is None:
        tail = TailSpec.default(x.lattice)
    lat = x.lattice
    intervals = _support_intervals(x, tail)
    v = _grid_values(intervals, lat)
    w = _row_weights(x, v)
    entries: dict[Configuration, float] = {}
    for pts, wt in zip(itertools.product(*(iv.points for iv in intervals)), w):
        entries[Configuration(lat, pts)] = float(wt)
    return LinkRow(x, entries, row_tail_bound(x, tail))


def dim_recurrence_check(
    x: Configuration, tail: TailSpec | None = None
) -> tuple[float, float, float]:
    """(dim x, truncated sum of wt * dim over interlacing y, certified tail bound)."""
    if tail is None:
        tail = TailSpec.default(x.lattice)
    lat = x.lattice
    v = _grid_values(_support_intervals(x, tail), lat)
    n = v.shape[1]
    w = np.prod(np.abs(v), axis=1)
    for i in range(n):
        for j in range(i + 1, n):
            w *= v[:, j] - v[:, i]
    rhs = float(np.sum(w)) / _qq_factorial(lat.q, n - 1)
    lhs = dim(x)
    # tail of the recurrence sum = dim(x) * (row mass tail)
    return lhs, rhs, abs(lhs) * row_tail_bound(x, tail)


def geometric_summation_check(
    a: LatticePoint,
    b: LatticePoint,
    n: int,
    lat: LatticeParams,
    tail: TailSpec | None = None,
) -> tuple[float, float, float]:
    """(b^n - a^n, (1-q^n) * truncated sum over I(a,b) of |c| c^{n-1}, tail bound)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if tail is None:
        tail = TailSpec.default(lat)
    iv = interval_I(a, b, lat, tail)
    cv = lat.values(iv.points)
    rhs = (1.0 - lat.q**n) * float(np.sum(np.abs(cv) * cv ** (n - 1)))
    lhs = lat.value(b) ** n - lat.value(a) ** n
    # dropped |c| < cutoff terms: two geometric strands summing below 2 cutoff^n
    bound = 2.0 * tail.cutoff**n if iv.truncated else 0.0
    return lhs, rhs, bound + _ROUND_SLOP


def link_compose(
    x: Configuration,
    k: int,
    strategy: str = "exact",
    tail: TailSpec | None = None,
    rng: np.random.Generator | None = None,
    paths: int = 100_000,
    sweeps: int = 8,
) -> LinkRow:
    """Composed link row from level N = |x| down to level k.

    ``exact`` composes enumerated rows level by level (practical for
    N - k <= 3); ``monte_carlo`` estimates the row by sampling descent
    paths and reports per-entry standard errors.
    """
    n = len(x)
    if not 1 <= k < n:
        raise SizeMismatch(f"need 1 <= k < |x| = {n}, got k = {k}")
    if tail is None:
        tail = TailSpec.default(x.lattice)
    if strategy == "exact":
        rows: dict[Configuration, float] = {x: 1.0}
        tail_total = 0.0
        cache: dict[Configuration, LinkRow] = {}
        for _ in range(n - k):
            nxt: dict[Configuration, float] = {}
            for cfg, p in rows.items():
                row = cache.get(cfg)
                if row is None:
                    row = cache[cfg] = link_row(cfg, tail)
                tail_total += p * row.tail_mass_bound
                for y, py in row.entries.items():
                    nxt[y] = nxt.get(y, 0.0) + p * py
            rows = nxt
        return LinkRow(x, rows, tail_total)
    if strategy == "monte_carlo":
        if rng is None:
            raise ValueError("monte_carlo composition needs an rng")
        counts: dict[Configuration, int] = {}
        for _ in range(paths):
            cfg = x
            for _ in range(n - k):
                cfg = link_sample(cfg, rng, tail=tail, sweeps=sweeps)
            counts[cfg] = counts.get(cfg, 0) + 1
        entries = {c: cnt / paths for c, cnt in counts.items()}
        errs = {
            c: math.sqrt(max(p * (1.0 - p), 1.0 / paths) / paths)
            for c, p in entries.items()
        }
        return LinkRow(x, entries, 0.0, standard_errors=errs)
    raise ValueError(f"unknown strategy {strategy!r}")


def link_sample(
    x: Configuration,
    rng: np.random.Generator,
    method: str = "gibbs",
    sweeps: int = 8,
    tail: TailSpec | None = None,
) -> Configuration:
    """Draw one y from the link row out of x.

    ``gibbs`` runs single-site sweeps with exact inverse-CDF conditionals
    per interval, initialized at the per-interval mode; ``exact`` builds
    the truncated row and inverts its CDF (enumeration oracle, use at
    small sizes).
    """
    if tail is None:
        tail = TailSpec.default(x.lattice)
    lat = x.lattice
    if method == "exact":
        row = link_row(x, tail)
        cfgs = list(row.entries.keys())
        probs = np.array([row.entries[c] for c in cfgs])
        probs = np.maximum(probs, 0.0)
        probs /= probs.sum()
        return cfgs[int(rng.choice(len(cfgs), p=probs))]
    if method != "gibbs":
        raise ValueError(f"unknown method {method!r}")
    intervals = _support_intervals(x, tail)
    pts = [iv.points for iv in intervals]
    vals = [lat.values(p) for p in pts]
    # per-interval mode of the single-site factor |y|: the largest |value|
    state_idx = [int(np.argmax(np.abs(v))) for v in vals]
    state = np.array([v[i] for v, i in zip(vals, state_idx)])
    k = len(intervals)
    for _ in range(sweeps):
        for i in range(k):
            cand = vals[i]
            w = np.abs(cand)
            for j in range(k):
                if j != i:
                    w = w * np.abs(cand - state[j])
            tot = w.sum()
            if tot <= 0.0:
                continue
            c = np.cumsum(w)
            u = rng.uniform() * tot
            idx = int(np.searchsorted(c, u))
            idx = min(idx, len(cand) - 1)
            state_idx[i] = idx
            state[i] = cand[idx]
    chosen = tuple(pts[i][state_idx[i]] for i in range(k))
    return Configuration(lat, chosen)


# ---------------------------------------------------------------------------
# Schur polynomials
# ---------------------------------------------------------------------------


def schur_eval(nu: Signature, u: np.ndarray, method: str = "det") -> float:
    """Rational Schur function S_{nu|N}(u_1, ..., u_N).

    ``det`` uses the bialternant ratio det[u_j^(nu_i + N - i)] / prod_{i<j}(u_i - u_j);
    ``branch`` recurses over interlacing signatures (independent oracle).
    """
    u = np.asarray(u, dtype=float)
    n = len(u)
    parts = nu.padded(n)
    if method == "det":
        # integer exponents: numpy nans out negative bases under float powers
        expo = np.array([parts[i] + n - 1 - i for i in range(n)], dtype=np.int64)
        m = u[None, :] ** expo[:, None]
        denom = 1.0
        for i in range(n):
            for j in range(i + 1, n):
                denom *= u[i] - u[j]
        return float(np.linalg.det(m)) / denom
    if method == "branch":
        return _schur_branch(parts, tuple(u))
    raise ValueError(f"unknown method {method!r}")


def _schur_branch(parts: tuple[int, ...], u: tuple[float, ...]) -> float:
    n = len(u)
    if n == 1:
        return u[0] ** parts[0]
    total = 0.0
    size = sum(parts)
    ranges = [range(parts[i + 1], parts[i] + 1) for i in range(n - 1)]
    for mu in itertools.product(*ranges):
        total += _schur_branch(mu, u[:-1]) * u[-1] ** (size - sum(mu))
    return total


def schur_q_spec(nu: Signature, n: int, q: float) -> float:
    """Principal specialization S_{nu|N}(1, q, ..., q^{N-1}), exact product form."""
    parts = nu.padded(n)
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            num = q ** (parts[j] + n - 1 - j) - q ** (parts[i] + n - 1 - i)
            den = q ** (n - 1 - j) - q ** (n - 1 - i)
            out *= num / den
    return out


def schur_tilde(nu: Signature, x: Configuration) -> float:
    """Schur evaluation normalized by its principal q-specialization."""
    return schur_eval(nu, x.values()) / schur_q_spec(nu, len(x), x.lattice.q)


def config_from_signature(lat: LatticeParams, nu: Signature, n: int) -> Configuration:
    """Embed a signature at level n: x_i = zeta_+ q^(nu_i + n - i)."""
    parts = nu.padded(n)
    # larger exponent means smaller value on the plus branch, so i = 0 goes last
    pts = tuple(LatticePoint(PLUS, parts[i] + n - 1 - i) for i in range(n))
    return Configuration(lat, pts)


def branching_identity_check(
    x: Configuration,
    k: int,
    nu: Signature,
    tail: TailSpec | None = None,
    strategy: str = "exact",
    rng: np.random.Generator | None = None,
    paths: int = 100_000,
) -> tuple[float, float]:
    """(averaged normalized Schur over the composed row, direct evaluation at x)."""
    n = len(x)
    if len(nu) > k:
        raise SizeMismatch(f"signature length {len(nu)} exceeds target level {k}")
    row = (
        link_row(x, tail)
        if k == n - 1
        else link_compose(x, k, strategy=strategy, tail=tail, rng=rng, paths=paths)
    )
    lhs = math.fsum(p * schur_tilde(nu, y) for y, p in row.entries.items())
    rhs = schur_tilde(nu, x)
    return lhs, rhs


def interlace_det(x: Configuration, y: Configuration) -> int:
    """0/1 determinant detector of interlacing.

    A(u, v) = 1 iff u is admissibly below v (strictly below a positive v,
    weakly below a negative v); the (N+1) x (N+1) matrix over x_i against
    y_1, ..., y_N, +oo has determinant 1 exactly when y interlaces x.
    """
    if len(x) != len(y) + 1:
        raise SizeMismatch(f"need |X| = |Y| + 1, got {len(x)}, {len(y)}")
    n = len(y)
    m = np.zeros((n + 1, n + 1))
    for i, xp in enumerate(x.points):
        for j, yp in enumerate(y.points):
            if yp.branch == PLUS:
                m[i, j] = 1.0 if xp < yp else 0.0
            else:
                m[i, j] = 1.0 if xp <= yp else 0.0
        m[i, n] = 1.0
    return int(round(float(np.linalg.det(m))))
