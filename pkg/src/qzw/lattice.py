"""The double q-lattice and its combinatorics.

The state space is the two-sided geometric lattice

    L = { zeta_- q^m : m in Z }  u  { zeta_+ q^n : n in Z },

with 0 < q < 1 and zeta_- < 0 < zeta_+.  Points are represented exactly
by (branch, integer exponent); order comparisons never go through
floating point, and |value| comparisons reduce to integer comparisons
plus a single logarithmic offset between the two branches, with an
exactness guard for ties.

Interval conventions (both kinds partition consecutive stretches of L,
with endpoint inclusion depending on the sign pattern):

    I(a, b)  = [a, b) n L   if a < b < 0
             = [a, b] n L   if a < 0 < b
             = (a, b] n L   if 0 < a < b

    It(a, b) = (a, b] n L   if a < b < 0      (a = -oo allowed)
             = (a, b) n L   if a < 0 < b
             = [a, b) n L   if 0 < a < b      (b = +oo allowed)

Intervals that accumulate at 0 (or stretch to +-oo for the second kind)
are enumerated up to a :class:`TailSpec` truncation and flagged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cmp_to_key, total_ordering
from typing import Iterator

import numpy as np

from .errors import BadOrder, DuplicatePoints, SizeMismatch
from .qspecial import QBase, _as_q

MINUS = -1
PLUS = +1

# slack, in units of the q-exponent, for cross-branch |value| comparisons
_EXP_GUARD = 1e-9


@total_ordering
@dataclass(frozen=True)
class LatticePoint:
    """A lattice point zeta_branch * q^exponent, stored exactly."""

    branch: int
    exponent: int

    def __post_init__(self) -> None:
        if self.branch not in (MINUS, PLUS):
            raise ValueError(f"branch must be -1 or +1, got {self.branch}")

    def __lt__(self, other: "LatticePoint") -> bool:
        # every minus-branch value is negative, every plus-branch positive;
        # within a branch the value is monotone in the exponent
        if self.branch != other.branch:
            return self.branch < other.branch
        if self.branch == MINUS:
            return self.exponent < other.exponent
        return self.exponent > other.exponent


@dataclass(frozen=True)
class LatticeParams:
    """Geometric data of the double q-lattice."""

    q: float
    zeta_minus: float
    zeta_plus: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", _as_q(self.q))
        if not (self.zeta_minus < 0.0 < self.zeta_plus):
            raise ValueError(
                f"need zeta_minus < 0 < zeta_plus, got {self.zeta_minus}, {self.zeta_plus}"
            )

    @property
    def base(self) -> QBase:
        return QBase(self.q)

    def value(self, p: LatticePoint) -> float:
        zeta = self.zeta_minus if p.branch == MINUS else self.zeta_plus
        return zeta * self.q**p.exponent

    def values(self, points) -> np.ndarray:
        return np.array([self.value(p) for p in points], dtype=float)

    def point(self, branch: int, exponent: int) -> LatticePoint:
        return LatticePoint(branch, exponent)

    def _branch_offset(self, branch: int) -> float:
        # |zeta_b q^m| = zeta_+ q^(m + offset_b); offset is 0 on the plus branch
        if branch == PLUS:
            return 0.0
        return math.log(abs(self.zeta_minus) / self.zeta_plus) / math.log(self.q)

    def abs_scale(self, p: LatticePoint) -> float:
        """Exponent s with |value(p)| = zeta_+ q^s (real-valued for the minus branch)."""
        return p.exponent + self._branch_offset(p.branch)

    def abs_cmp(self, p1: LatticePoint, p2: LatticePoint, shift2: int = 0) -> int:
        """Compare |value(p1)| against |value(p2)| * q^shift2 exactly.

        Returns -1, 0, +1; ties are detected on the exponent scale with a
        guard band, so equal magnitudes across branches compare as 0.
        """
        if p1.branch == p2.branch:
            d = (p2.exponent + shift2) - p1.exponent
        else:
            s1 = self.abs_scale(p1)
            s2 = self.abs_scale(p2) + shift2
            df = s2 - s1
            if abs(df) <= _EXP_GUARD:
                return 0
            d = df
        if d > 0:
            return 1
        if d < 0:
            return -1
        return 0

    # exponent windows for |value| in [lo, hi] on one branch
    def max_exponent_abs_geq(self, branch: int, v: float) -> int:
        zeta = abs(self.zeta_minus) if branch == MINUS else self.zeta_plus
        return math.floor(math.log(v / zeta) / math.log(self.q) + _EXP_GUARD)

    def min_exponent_abs_leq(self, branch: int, v: float) -> int:
        zeta = abs(self.zeta_minus) if branch == MINUS else self.zeta_plus
        return math.ceil(math.log(v / zeta) / math.log(self.q) - _EXP_GUARD)


@dataclass(frozen=True)
class TailSpec:
    """Truncation window for intervals that are infinite on the lattice.

    ``cutoff`` is the smallest |value| kept when an interval accumulates
    at 0; ``cap`` is the largest |value| kept when an interval of the
    second kind stretches to +-oo.
    """

    cutoff: float
    cap: float

    def __post_init__(self) -> None:
        if not (0.0 < self.cutoff < self.cap):
            raise ValueError(f"need 0 < cutoff < cap, got {self.cutoff}, {self.cap}")

    @classmethod
    def default(
        cls,
        lat: LatticeParams,
        cutoff_exponent: int = 64,
        cap_exponent: int = 32,
    ) -> "TailSpec":
        scale_small = min(abs(lat.zeta_minus), lat.zeta_plus)
        scale_big = max(abs(lat.zeta_minus), lat.zeta_plus)
        return cls(
            cutoff=scale_small * lat.q**cutoff_exponent,
            cap=scale_big * lat.q ** (-cap_exponent),
        )


@dataclass(frozen=True)
class Configuration:
    """A strictly increasing tuple of lattice points."""

    lattice: LatticeParams
    points: tuple[LatticePoint, ...]

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for p, r in zip(pts, pts[1:]):
            if p == r:
                raise DuplicatePoints(f"repeated point {p}")
            if not p < r:
                raise BadOrder(f"points not strictly increasing at {p}, {r}")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[LatticePoint]:
        return iter(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    def values(self) -> np.ndarray:
        return self.lattice.values(self.points)

    def to_json(self) -> str:
        return json.dumps(
            {
                "q": self.lattice.q,
                "zeta_minus": self.lattice.zeta_minus,
                "zeta_plus": self.lattice.zeta_plus,
                "points": [
                    {"branch": "-" if p.branch == MINUS else "+", "m": p.exponent}
                    for p in self.points
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Configuration":
        d = json.loads(text)
        lat = LatticeParams(d["q"], d["zeta_minus"], d["zeta_plus"])
        pts = tuple(
            LatticePoint(MINUS if e["branch"] == "-" else PLUS, int(e["m"]))
            for e in d["points"]
        )
        return cls(lat, pts)


def config(lat: LatticeParams, spec: list[tuple[int, int]]) -> Configuration:
    """Build a configuration from (branch, exponent) pairs, sorting them."""
    pts = sorted(LatticePoint(b, m) for b, m in spec)
    return Configuration(lat, tuple(pts))


@dataclass(frozen=True)
class IntervalPoints:
    """Lattice points of an interval, ascending by value, plus a truncation flag."""

    points: tuple[LatticePoint, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[LatticePoint]:
        return iter(self.points)


def _minus_range(m_from: int, m_to: int) -> list[LatticePoint]:
    # ascending value = ascending exponent on the minus branch
    return [LatticePoint(MINUS, m) for m in range(m_from, m_to + 1)]


def _plus_range(n_hi: int, n_lo: int) -> list[LatticePoint]:
    # ascending value = descending exponent on the plus branch
    return [LatticePoint(PLUS, n) for n in range(n_hi, n_lo - 1, -1)]


def interval_I(
    a: LatticePoint,
    b: LatticePoint,
    lat: LatticeParams,
    tail: TailSpec | None = None,
) -> IntervalPoints:
    """Points of the first-kind interval I(a, b); requires a < b."""
    if not a < b:
        raise BadOrder(f"interval needs a < b, got {a}, {b}")
    if tail is None:
        tail = TailSpec.default(lat)
    if a.branch == MINUS and b.branch == MINUS:
        return IntervalPoints(tuple(_minus_range(a.exponent, b.exponent - 1)), False)
    if a.branch == PLUS and b.branch == PLUS:
        return IntervalPoints(tuple(_plus_range(a.exponent - 1, b.exponent)), False)
    # a < 0 < b: both endpoints included, interval accumulates at 0
    m_hi = lat.max_exponent_abs_geq(MINUS, tail.cutoff)
    n_hi = lat.max_exponent_abs_geq(PLUS, tail.cutoff)
    pts = _minus_range(a.exponent, m_hi) + _plus_range(n_hi, b.exponent)
    return IntervalPoints(tuple(pts), True)


def interval_I_tilde(
    a: LatticePoint | None,
    b: LatticePoint | None,
    lat: LatticeParams,
    tail: TailSpec | None = None,
) -> IntervalPoints:
    """Points of the second-kind interval It(a, b); None stands for -oo / +oo."""
    if a is not None and b is not None and not a < b:
        raise BadOrder(f"interval needs a < b, got {a}, {b}")
    if tail is None:
        tail = TailSpec.default(lat)
    m_small = lat.max_exponent_abs_geq(MINUS, tail.cutoff)
    n_small = lat.max_exponent_abs_geq(PLUS, tail.cutoff)
    m_cap = lat.min_exponent_abs_leq(MINUS, tail.cap)
    n_cap = lat.min_exponent_abs_leq(PLUS, tail.cap)

    if a is None and b is None:
        pts = _minus_range(m_cap, m_small) + _plus_range(n_small, n_cap)
        return IntervalPoints(tuple(pts), True)
    if a is None:
        if b.branch == MINUS:  # (-oo, b]
            return IntervalPoints(tuple(_minus_range(m_cap, b.exponent)), True)
        # (-oo, b) with b > 0
        pts = _minus_range(m_cap, m_small) + _plus_range(n_small, b.exponent + 1)
        return IntervalPoints(tuple(pts), True)
    if b is None:
        if a.branch == PLUS:  # [a, +oo)
            return IntervalPoints(tuple(_plus_range(a.exponent, n_cap)), True)
        # (a, +oo) with a < 0
        pts = _minus_range(a.exponent + 1, m_small) + _plus_range(n_small, n_cap)
        return IntervalPoints(tuple(pts), True)
    if a.branch == MINUS and b.branch == MINUS:  # (a, b]
        return IntervalPoints(tuple(_minus_range(a.exponent + 1, b.exponent)), False)
    if a.branch == PLUS and b.branch == PLUS:  # [a, b)
        return IntervalPoints(tuple(_plus_range(a.exponent, b.exponent + 1)), False)
    # a < 0 < b: open on both sides, accumulates at 0
    pts = _minus_range(a.exponent + 1, m_small) + _plus_range(n_small, b.exponent + 1)
    return IntervalPoints(tuple(pts), True)


def _in_interval_I(y: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool:
    if a.branch == MINUS and b.branch == MINUS:
        return a <= y < b
    if a.branch == PLUS and b.branch == PLUS:
        return a < y <= b
    return a <= y <= b


def _in_interval_I_tilde(
    x: LatticePoint, a: LatticePoint | None, b: LatticePoint | None
) -> bool:
    if a is None and b is None:
        return True
    if a is None:
        return x <= b if b.branch == MINUS else x < b
    if b is None:
        return x >= a if a.branch == PLUS else x > a
    if a.branch == MINUS and b.branch == MINUS:
        return a < x <= b
    if a.branch == PLUS and b.branch == PLUS:
        return a <= x < b
    return a < x < b


def interlace(x: Configuration, y: Configuration) -> bool:
    """Whether y interlaces x, i.e. y_i in I(x_i, x_{i+1}) for every i.

    Pure order logic on exact lattice points; no truncation is involved.
    """
    if len(x) != len(y) + 1:
        raise SizeMismatch(f"need |X| = |Y| + 1, got {len(x)}, {len(y)}")
    xs = x.points
    return all(
        _in_interval_I(yi, xs[i], xs[i + 1]) for i, yi in enumerate(y.points)
    )


def interlace_via_tilde(x: Configuration, y: Configuration) -> bool:
    """Equivalent test: every It(y_{i-1}, y_i) holds exactly one point of x."""
    if len(x) != len(y) + 1:
        raise SizeMismatch(f"need |X| = |Y| + 1, got {len(x)}, {len(y)}")
    ys: list[LatticePoint | None] = [None, *y.points, None]
    for i in range(len(y) + 1):
        hits = sum(1 for p in x.points if _in_interval_I_tilde(p, ys[i], ys[i + 1]))
        if hits != 1:
            return False
    return True


@dataclass(frozen=True)
class VariationalSeries:
    """Points of a configuration ordered by decreasing |value|.

    Magnitude ties (one point per branch) put the positive point first.
    Any finite configuration obeys the two-sided geometric bound
    |x_(2n)| <= |x_(1)| q^(n-1), |x_(2n+1)| <= |x_(1)| q^n; the
    constructor asserts it.
    """

    lattice: LatticeParams
    points: tuple[LatticePoint, ...]

    def __post_init__(self) -> None:
        lat = self.lattice
        pts = self.points
        for p, r in zip(pts, pts[1:]):
            c = lat.abs_cmp(p, r)
            if c < 0:
                raise BadOrder(f"|values| not decreasing at {p}, {r}")
            if c == 0 and not (lat.value(p) > 0 > lat.value(r)):
                raise BadOrder(f"magnitude tie not resolved positive-first at {p}, {r}")
        if pts:
            top = pts[0]
            for j, p in enumerate(pts[1:], start=2):
                shift = (j - 1) // 2  # |x_(2n)| <= |x_(1)| q^(n-1), |x_(2n+1)| <= |x_(1)| q^n
                if lat.abs_cmp(p, top, shift2=shift) > 0:
                    raise BadOrder(
                        f"geometric envelope violated at position {j}: {p} vs {top} q^{shift}"
                    )

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[LatticePoint]:
        return iter(self.points)

    def values(self) -> np.ndarray:
        return self.lattice.values(self.points)


def variational_series(x: Configuration) -> VariationalSeries:
    """Order the points of x by decreasing |value|, positive first on ties."""
    lat = x.lattice

    def cmp(p: LatticePoint, r: LatticePoint) -> int:
        c = lat.abs_cmp(p, r)
        if c != 0:
            return -1 if c > 0 else 1
        if p.branch == r.branch:
            return 0
        return -1 if p.branch == PLUS else 1

    pts = sorted(x.points, key=cmp_to_key(cmp))
    return VariationalSeries(lat, tuple(pts))
