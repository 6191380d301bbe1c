"""Finite-level approximation of boundary measures.

A point of the boundary is an infinite bounded configuration, represented
here by a finite prefix of its variational series.  The measure it induces
at a fixed level K is approached by the link rows out of the truncated
configurations X(N) as N runs up the prefix; this module computes those
rows with stabilization metrics, checks the moment identities that pin the
limit measure down uniquely, estimates the law-of-large-numbers event
probabilities by Monte-Carlo descent, and compares finite-level ensemble
correlations against the limit-kernel correlations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PrefixTooShort, SizeMismatch
from .graph_links import LinkRow, Signature, link_compose, link_sample, schur_tilde
from .lattice import (
    Configuration,
    LatticePoint,
    TailSpec,
    VariationalSeries,
    variational_series,
)
from .limit_kernel import BoundaryKernel, boundary_correlation, scaled_kernel_N
from .zw_measures import ParamQuadruple

# reporting convention, not a mathematical claim: two consecutive TV gaps
# below this declare the row sequence stabilized
STABILIZATION_TV = 1e-3


@dataclass(frozen=True)
class BoundaryPoint:
    """Finite prefix of the variational series of an infinite configuration.

    ``tail_bound`` bounds the absolute value of every omitted term: the
    geometric envelope |x_(2n)| <= |x_(1)| q^(n-1), |x_(2n+1)| <= |x_(1)| q^n
    holds for any variational series, so everything past a prefix of
    length P sits below |x_(1)| q^(floor((P-1)/2)).
    """

    prefix: VariationalSeries
    tail_bound: float = field(init=False)

    def __post_init__(self) -> None:
        p = len(self.prefix)
        if p < 1:
            raise PrefixTooShort("a boundary point needs a nonempty prefix")
        lat = self.prefix.lattice
        top = abs(lat.value(self.prefix.points[0]))
        object.__setattr__(self, "tail_bound", top * lat.q ** ((p - 1) // 2))

    def __len__(self) -> int:
        return len(self.prefix)

    def config(self, n: int) -> Configuration:
        """First n prefix terms as a level-n configuration."""
        if not 1 <= n <= len(self.prefix):
            raise PrefixTooShort(
                f"prefix of length {len(self.prefix)} cannot provide X({n})"
            )
        return Configuration(
            self.prefix.lattice, tuple(sorted(self.prefix.points[:n]))
        )


def boundary_point(x: Configuration | VariationalSeries) -> BoundaryPoint:
    if isinstance(x, Configuration):
        x = variational_series(x)
    return BoundaryPoint(x)


def tv_distance(a: LinkRow, b: LinkRow) -> float:
    """Total-variation distance between two link rows over the union support."""
    keys = set(a.entries) | set(b.entries)
    return 0.5 * math.fsum(
        abs(a.entries.get(y, 0.0) - b.entries.get(y, 0.0)) for y in keys
    )


@dataclass(frozen=True)
class LinkApproximation:
    """Link rows at a fixed level for increasing prefix truncations.

    ``tv_gaps[i]`` is the total-variation distance between the rows for
    ``schedule[i]`` and ``schedule[i+1]``; ``stabilized`` records whether
    two consecutive gaps fell below STABILIZATION_TV.
    """

    level: int
    schedule: tuple[int, ...]
    rows: tuple[LinkRow, ...]
    tv_gaps: tuple[float, ...]
    stabilized: bool


def approx_boundary_link(
    bp: BoundaryPoint,
    K: int,
    N_schedule: list[int],
    strategy: str = "auto",
    tail: TailSpec | None = None,
    rng: np.random.Generator | None = None,
    paths: int = 20_000,
    sweeps: int = 8,
) -> LinkApproximation:
    """Rows of the level-K boundary measure approximants along a schedule.

    For each N the row is the composed link out of X(N), enumerated
    exactly when N - K <= 3 and estimated by Monte-Carlo descent sampling
    otherwise (``strategy`` forces one or the other).  The sequence of
    rows converges to the boundary measure; the TV distances between
    successive rows are the stabilization diagnostic.
    """
    if not N_schedule:
        raise SizeMismatch("empty schedule")
    if any(b <= a for a, b in zip(N_schedule, N_schedule[1:])):
        raise SizeMismatch(f"schedule must increase, got {N_schedule}")
    if not 1 <= K < N_schedule[0]:
        raise SizeMismatch(f"need 1 <= K < min(schedule), got K = {K}")
    if N_schedule[-1] > len(bp):
        raise PrefixTooShort(
            f"schedule reaches N = {N_schedule[-1]} but the prefix has "
            f"{len(bp)} terms"
        )
    rows = []
    for n in N_schedule:
        strat = strategy
        if strategy == "auto":
            strat = "exact" if n - K <= 3 else "monte_carlo"
        rows.append(
            link_compose(
                bp.config(n), K, strategy=strat, tail=tail,
                rng=rng, paths=paths, sweeps=sweeps,
            )
        )
    gaps = tuple(tv_distance(a, b) for a, b in zip(rows, rows[1:]))
    stable = any(
        g1 < STABILIZATION_TV and g2 < STABILIZATION_TV
        for g1, g2 in zip(gaps, gaps[1:])
    )
    return LinkApproximation(K, tuple(N_schedule), tuple(rows), gaps, stable)


def _partitions(max_weight: int) -> list[tuple[int, ...]]:
    # nonempty partitions of every weight up to max_weight, decreasing parts
    out: list[tuple[int, ...]] = []

    def grow(rest: int, cap: int, acc: tuple[int, ...]) -> None:
        if acc:
            out.append(acc)
        for part in range(min(rest, cap), 0, -1):
            grow(rest - part, part, acc + (part,))

    grow(max_weight, max_weight, ())
    return sorted(set(out), key=lambda p: (sum(p), len(p), p))


def moment_residuals(
    row: LinkRow, source: Configuration, max_weight: int = 3
) -> dict[tuple[int, ...], float]:
    """Residuals of the moment identities that characterize the limit measure.

    For each partition nu with |nu| <= max_weight the averaged normalized
    Schur function over the row must reproduce its value at the source
    configuration; the limit measure is the unique probability law with
    this property at every nu.  Residuals are relative to max(1, |rhs|).
    """
    level = min(len(y) for y in row.entries)
    out: dict[tuple[int, ...], float] = {}
    for parts in _partitions(max_weight):
        if len(parts) > level:
            continue
        nu = Signature(parts)
        lhs = math.fsum(p * schur_tilde(nu, y) for y, p in row.entries.items())
        rhs = schur_tilde(nu, source)
        out[parts] = abs(lhs - rhs) / max(1.0, abs(rhs))
    return out


def lln_check(
    bp: BoundaryPoint,
    k: int,
    L_schedule: list[int],
    sample_budget: int,
    rng: np.random.Generator | None = None,
    tail: TailSpec | None = None,
    sweeps: int = 8,
) -> list[tuple[int, float, float]]:
    """Empirical P[y_(k) = x_(k)] under the level-L approximants.

    For each scheduled L the full prefix configuration is descended to
    level L by Monte-Carlo link sampling and the k-th variational-series
    term of the result is compared with the prefix.  The event
    probability tends to 1 as L grows.  Returns rows
    (L, estimate, standard error); the budget is split evenly over the
    schedule.
    """
    if not L_schedule:
        raise SizeMismatch("empty schedule")
    if any(b <= a for a, b in zip(L_schedule, L_schedule[1:])):
        raise SizeMismatch(f"schedule must increase, got {L_schedule}")
    if not 1 <= k <= L_schedule[0]:
        raise SizeMismatch(f"need 1 <= k <= min(schedule), got k = {k}")
    p = len(bp)
    if L_schedule[-1] >= p:
        raise PrefixTooShort(
            f"descent to level {L_schedule[-1]} needs a prefix longer than "
            f"{L_schedule[-1]}, got {p}"
        )
    if rng is None:
        rng = np.random.default_rng(0)
    target = bp.prefix.points[k - 1]
    top = bp.config(p)
    per_level = max(1, sample_budget // len(L_schedule))
    rows = []
    for level in L_schedule:
        hits = 0
        for _ in range(per_level):
            cfg = top
            for _ in range(p - level):
                cfg = link_sample(cfg, rng, tail=tail, sweeps=sweeps)
            if variational_series(cfg).points[k - 1] == target:
                hits += 1
        est = hits / per_level
        se = math.sqrt(max(est * (1.0 - est), 1.0 / per_level) / per_level)
        rows.append((level, est, se))
    return rows


def correlation_convergence(
    quad: ParamQuadruple,
    points: list[LatticePoint],
    n_schedule: list[int],
    bk: BoundaryKernel | None = None,
) -> list[tuple[int, float, float, float]]:
    """Level-N correlation functions against the limit-kernel correlation.

    Rows (N, level-N determinant, limit determinant, gap).  The level-N
    kernel matrix is assembled from the rescaled log-space quantities, so
    the schedule may run far past the range where the level-N ensemble
    itself is representable in floating point.  The rescaled kernel
    differs from the true one by a diag(+-1) conjugation, which cancels
    in determinants, so the comparison is safe for mixed-sign points.
    """
    if bk is None:
        bk = BoundaryKernel(quad)
    limit = boundary_correlation(points, bk)
    n = len(points)
    rows = []
    for N in n_schedule:
        mat = np.empty((n, n))
        for i in range(n):
            mat[i, i] = scaled_kernel_N(points[i], points[i], quad, N)
            for j in range(i + 1, n):
                val = scaled_kernel_N(points[i], points[j], quad, N)
                mat[i, j] = val
                mat[j, i] = val
        det = float(np.linalg.det(mat))
        rows.append((N, det, limit, abs(det - limit)))
    return rows
