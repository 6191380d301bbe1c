"""N-particle ensembles on the double q-lattice.

The level-N measure puts mass proportional to prod w_N(x_i) * Vandermonde^2
on N-point configurations, where w_N is the polynomial weight at parameters
(alpha, beta, gamma q^(1-N), delta q^(1-N)).  This is an orthogonal
polynomial ensemble, so its correlation functions are determinants of a
rank-N projection kernel built from the first N monic polynomials.

Admissibility: both parameter pairs must pass the pair classification, and
gamma*delta*q > alpha*beta.  One degenerate variant is supported, where
(alpha, beta) are real with reciprocals on the lattice and the support
collapses to the window [q/alpha, q/beta]; every other degenerate regime is
rejected.

The coherency check verifies that pushing the level-(N+1) measure through
the canonical stochastic links reproduces the level-N measure.  Enumeration
of the X above a given Y uses the interval structure: X interlaces Y exactly
when each of the N+1 second-kind intervals of Y holds one X-particle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    DuplicatePoints,
    InvalidParams,
    SizeMismatch,
    WindowTooSmall,
)
from .lattice import (
    Configuration,
    LatticeParams,
    LatticePoint,
    TailSpec,
    interval_I_tilde,
)
from .pbqj import (
    CONJUGATE_PAIR,
    PBQJParams,
    REAL_LATTICE_PAIR,
    _require_real,
    classify_pair,
    leading_coeff,
    pbqj_eval,
    pbqj_params,
    poly_system,
    weight_value,
)

NONDEGENERATE = "nondegenerate"
DEGENERATE_EXA = "degenerate_exA"


@dataclass(frozen=True)
class ParamQuadruple:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    lattice: LatticeParams
    classification: str = field(init=False)
    kernel_regime: bool = field(init=False)

    def __post_init__(self) -> None:
        lat = self.lattice
        nk = classify_pair(self.alpha, self.beta, lat)
        dk = classify_pair(self.gamma, self.delta, lat)
        if dk == REAL_LATTICE_PAIR:
            raise InvalidParams("(gamma, delta) reciprocals on the lattice are poles")
        if nk == REAL_LATTICE_PAIR:
            if dk != CONJUGATE_PAIR:
                raise InvalidParams(
                    "only one degenerate subcase is supported: real (alpha, beta) "
                    "with lattice reciprocals and conjugate (gamma, delta)"
                )
            cls = DEGENERATE_EXA
            ab = _require_real(self.alpha * self.beta, "alpha*beta")
        else:
            cls = NONDEGENERATE
            ab = _require_real(self.alpha * self.beta, "alpha*beta")
        gd = _require_real(self.gamma * self.delta, "gamma*delta")
        if not gd * lat.q > ab:
            raise InvalidParams("admissibility needs gamma*delta*q > alpha*beta")
        object.__setattr__(self, "classification", cls)
        object.__setattr__(self, "kernel_regime", ab < lat.q**2 * gd)


def param_quadruple(
    alpha: complex, beta: complex, gamma: complex, delta: complex, lat: LatticeParams
) -> ParamQuadruple:
    return ParamQuadruple(alpha, beta, gamma, delta, lat)


@dataclass(frozen=True)
class EnsembleN:
    params: ParamQuadruple
    N: int
    pb: PBQJParams
    poly: object
    z_n: float
    # sampling window and eigenbasis are expensive; memoized per instance
    cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def weight_one(self, v: float) -> float:
        return weight_value(v, self.pb)

    def monic_k(self, n: int) -> complex:
        if n < len(self.poly.k):
            return self.poly.k[n]
        key = ("k", n)
        if key not in self.cache:
            self.cache[key] = leading_coeff(n, self.pb, formal=True)
        return self.cache[key]


def ensemble(params: ParamQuadruple, N: int) -> EnsembleN:
    """Level-N ensemble with its polynomial system and normalization Z_N."""
    if N < 1:
        raise InvalidParams(f"need N >= 1, got {N}")
    lat = params.lattice
    q = lat.q
    pb = pbqj_params(
        params.alpha, params.beta, params.gamma * q ** (1 - N), params.delta * q ** (1 - N), lat
    )
    if pb.n_max is not None and pb.n_max < N - 1:
        raise InvalidParams(f"level {N} needs {N} square-integrable degrees, n_max = {pb.n_max}")
    poly = poly_system(pb, max_degree=N - 1)
    z_n = math.prod(poly.h)
    return EnsembleN(params, N, pb, poly, z_n)


def measure_weight(x: Configuration, ens: EnsembleN) -> float:
    """Probability of the configuration under the level-N measure."""
    if len(x) != ens.N:
        raise SizeMismatch(f"configuration size {len(x)} != N = {ens.N}")
    vals = x.values()
    out = 1.0 / ens.z_n
    for v in vals:
        out *= weight_value(v, ens.pb)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            out *= (vals[j] - vals[i]) ** 2
    return out


def _monic_values(n: int, v: float, ens: EnsembleN) -> float:
    return _require_real(pbqj_eval(n, v, ens.pb, formal=True) / ens.monic_k(n), "monic P_n")


def cd_kernel_N(x: LatticePoint, y: LatticePoint, ens: EnsembleN) -> float:
    """Projection kernel of the level-N ensemble at two lattice points.

    Diagonal by the exact sum over degrees; off-diagonal by the
    Christoffel-Darboux form in the monic normalization.
    """
    lat = ens.params.lattice
    vx, vy = lat.value(x), lat.value(y)
    wx = weight_value(vx, ens.pb)
    wy = wx if x == y else weight_value(vy, ens.pb)
    if wx == 0.0 or wy == 0.0:
        return 0.0
    root = math.sqrt(wx * wy)
    if x == y:
        s = math.fsum(
            _monic_values(n, vx, ens) ** 2 / ens.poly.h[n] for n in range(ens.N)
        )
        return root * s
    pn_x = _monic_values(ens.N, vx, ens)
    pm_x = _monic_values(ens.N - 1, vx, ens)
    pn_y = _monic_values(ens.N, vy, ens)
    pm_y = _monic_values(ens.N - 1, vy, ens)
    return root * (pn_x * pm_y - pm_x * pn_y) / (ens.poly.h[ens.N - 1] * (vx - vy))


def kernel_sum_form(x: LatticePoint, y: LatticePoint, ens: EnsembleN) -> float:
    """sqrt(w w) sum_{n<N} monic_n(x) monic_n(y) / h_n; cross-check route."""
    lat = ens.params.lattice
    vx, vy = lat.value(x), lat.value(y)
    wx, wy = weight_value(vx, ens.pb), weight_value(vy, ens.pb)
    if wx == 0.0 or wy == 0.0:
        return 0.0
    s = math.fsum(
        _monic_values(n, vx, ens) * _monic_values(n, vy, ens) / ens.poly.h[n]
        for n in range(ens.N)
    )
    return math.sqrt(wx * wy) * s


def correlation_N(points: list[LatticePoint], ens: EnsembleN) -> float:
    """det [K_N(x_i, x_j)] over the given distinct points, clamped to [0, 1]."""
    if len(set(points)) != len(points):
        raise DuplicatePoints(f"correlation points must be distinct: {points}")
    n = len(points)
    mat = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            mat[i, j] = mat[j, i] = cd_kernel_N(points[i], points[j], ens)
    det = float(np.linalg.det(mat))
    if det < -1e-10 or det > 1 + 1e-10:
        warnings.warn(f"correlation determinant {det} outside [0, 1]; clamping")
    return min(max(det, 0.0), 1.0)


def coherency_check(
    ens_up: EnsembleN, y: Configuration, tail: TailSpec | None = None
) -> tuple[float, float, float]:
    """Mass of the level-(N+1) measure pushed through the links onto Y.

    Returns (lhs, rhs, err): lhs enumerates all X interlacing Y (one
    X-particle per second-kind interval of Y), rhs is the level-N weight of
    Y, err is a truncation estimate from re-running lhs on a deeper window.
    """
    if len(y) != ens_up.N - 1:
        raise SizeMismatch(f"Y has size {len(y)}, expected {ens_up.N - 1}")
    lat = ens_up.params.lattice
    if tail is None:
        tail = TailSpec.default(lat)
    deeper = TailSpec(cutoff=tail.cutoff * lat.q**8, cap=tail.cap / lat.q**4)
    lhs_shallow = _push_forward_mass(ens_up, y, tail)
    lhs = _push_forward_mass(ens_up, y, deeper)
    ens_down = ensemble(ens_up.params, ens_up.N - 1)
    rhs = measure_weight(y, ens_down)
    err = abs(lhs - lhs_shallow) + 1e-13 * max(abs(lhs), abs(rhs))
    return lhs, rhs, err


def _push_forward_mass(ens_up: EnsembleN, y: Configuration, tail: TailSpec) -> float:
    lat = ens_up.params.lattice
    q = lat.q
    n_up = ens_up.N
    bounds = [None, *y, None]
    grids = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        pts = list(interval_I_tilde(lo, hi, lat, tail))
        if not pts:
            return 0.0
        vals = np.array([lat.value(p) for p in pts])
        w = np.array([weight_value(v, ens_up.pb) for v in vals])
        grids.append((vals, w))
    y_vals = np.array(y.values())
    qq_n = math.prod(1.0 - q**k for k in range(1, n_up))
    vdm_y = 1.0
    for i in range(len(y_vals)):
        for j in range(i + 1, len(y_vals)):
            vdm_y *= y_vals[j] - y_vals[i]
    const = math.prod(np.abs(y_vals)) * qq_n * vdm_y / ens_up.z_n
    # sum over the product grid of prod w(x_i) * Vdm(X): the squared
    # Vandermonde of the measure cancels one power against the link
    total = 0.0
    mesh = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    wmesh = np.meshgrid(*[g[1] for g in grids], indexing="ij")
    xs = np.stack([m.ravel() for m in mesh], axis=-1)
    ws = np.stack([m.ravel() for m in wmesh], axis=-1)
    wprod = np.prod(ws, axis=-1)
    vdm = np.ones_like(wprod)
    for i in range(n_up):
        for j in range(i + 1, n_up):
            vdm *= xs[:, j] - xs[:, i]
    total = float(np.sum(wprod * vdm))
    return const * total


def _adaptive_window(ens: EnsembleN, tol: float = 1e-6) -> tuple[list[LatticePoint], np.ndarray]:
    """Lattice window whose kernel trace captures N - tol, plus the diagonal."""
    lat = ens.params.lattice
    cutoff_exp, cap_exp = 32, 12
    for _ in range(6):
        tail = TailSpec.default(lat, cutoff_exponent=cutoff_exp, cap_exponent=cap_exp)
        pts = list(interval_I_tilde(None, None, lat, tail))
        diag = np.array([cd_kernel_N(p, p, ens) for p in pts])
        if ens.N - float(diag.sum()) < tol:
            return pts, diag
        cutoff_exp += 16
        cap_exp += 8
    raise WindowTooSmall(f"kernel trace never reached N - {tol}")


def sample_ensemble(
    ens: EnsembleN,
    rng: np.random.Generator,
    method: str = "dpp",
    sweeps: int = 30,
) -> Configuration:
    """Draw one configuration; projection-DPP chain rule or Gibbs sweeps."""
    if "window" not in ens.cache:
        ens.cache["window"] = _adaptive_window(ens)
    pts, diag = ens.cache["window"]
    if method == "dpp":
        if "dpp_basis" not in ens.cache:
            ens.cache["dpp_basis"] = _projection_basis(ens, pts, diag)
        idx = _sample_dpp(ens.cache["dpp_basis"], rng)
    elif method == "gibbs":
        if "gibbs_w" not in ens.cache:
            lat = ens.params.lattice
            vals = np.array([lat.value(p) for p in pts])
            ens.cache["gibbs_w"] = (vals, np.array([weight_value(v, ens.pb) for v in vals]))
        idx = _sample_gibbs(ens, *ens.cache["gibbs_w"], rng, sweeps)
    else:
        raise InvalidParams(f"unknown sampling method {method!r}")
    chosen = sorted(pts[i] for i in idx)
    return Configuration(ens.params.lattice, tuple(chosen))


def _kernel_matrix(ens: EnsembleN, pts: list[LatticePoint], diag: np.ndarray) -> np.ndarray:
    m = len(pts)
    mat = np.empty((m, m))
    np.fill_diagonal(mat, diag)
    for i in range(m):
        for j in range(i + 1, m):
            mat[i, j] = mat[j, i] = cd_kernel_N(pts[i], pts[j], ens)
    return mat


def _projection_basis(ens: EnsembleN, pts: list[LatticePoint], diag: np.ndarray) -> np.ndarray:
    mat = _kernel_matrix(ens, pts, diag)
    evals, evecs = np.linalg.eigh(mat)
    keep = evals > 0.5
    if int(keep.sum()) != ens.N:
        raise WindowTooSmall(
            f"window supports {int(keep.sum())} near-unit kernel eigenvalues, need {ens.N}"
        )
    return evecs[:, keep]


def _sample_dpp(basis: np.ndarray, rng: np.random.Generator) -> list[int]:
    # chain rule on the rank-N eigenbasis of the window kernel
    v = basis.copy()
    chosen: list[int] = []
    while v.shape[1] > 0:
        p = np.einsum("ij,ij->i", v, v)
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        i = int(rng.choice(len(p), p=p))
        chosen.append(i)
        j = int(np.argmax(np.abs(v[i])))
        col = v[:, j].copy()
        v = v - np.outer(col, v[i] / v[i, j])
        v = np.delete(v, j, axis=1)
        if v.shape[1] > 0:
            v, _ = np.linalg.qr(v)
    return chosen


def _sample_gibbs(
    ens: EnsembleN,
    vals: np.ndarray,
    w: np.ndarray,
    rng: np.random.Generator,
    sweeps: int,
) -> list[int]:
    m = len(vals)
    n = ens.N
    # spread the initial state over the intensity profile
    intensity = w * np.abs(vals) ** (2 * (n - 1)) if n > 1 else w.copy()
    intensity /= intensity.sum()
    state = sorted(rng.choice(m, size=n, replace=False, p=intensity).tolist())
    for _ in range(sweeps):
        for i in range(n):
            others = [state[j] for j in range(n) if j != i]
            lo = state[i - 1] if i > 0 else -1
            hi = state[i + 1] if i < n - 1 else m
            sl = slice(lo + 1, hi)
            cond = w[sl].copy()
            for o in others:
                cond *= (vals[sl] - vals[o]) ** 2
            total = cond.sum()
            if total <= 0:
                continue
            state[i] = lo + 1 + int(rng.choice(hi - lo - 1, p=cond / total))
    return state
