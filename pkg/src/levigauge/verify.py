"""Numerical certification of weight families on the strip S_delta.

The pipeline samples ``S_delta = {-delta < r < 0}`` near the origin, takes
the smallest eigenvalue of each Levi form (the sharp constant of the
quadratic form over all directions), fits the power of ``1/delta`` along a
ladder of deltas and runs boundedness and globalization diagnostics.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy import stats
from scipy.stats import qmc

from .domain import ValidatedDomain, eval_r
from .errors import EmptySample, NonFiniteHessian, NonPositiveEigen, TooFewDeltas
from .index import frac_str
from .weights import (
    E_MINUS_2,
    THETA_SHIFT,
    Normalization,
    WeightFamily,
    smooth_cutoff,
)

log = logging.getLogger(__name__)

LOG_DEPTH_FLOOR = 1e-6
PSH_TOLERANCE = 1e-9


class DepthDistribution(str, Enum):
    UNIFORM = "UNIFORM"
    LOG = "LOG"


@dataclass(frozen=True)
class StripSample:
    points: np.ndarray  # (N, n+1) complex
    delta: float
    radius: float
    seed: int
    depth_distribution: DepthDistribution

    def __len__(self):
        return len(self.points)


def _unit_cube(dim: int, n: int, seed: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, dim))
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(n)
    return np.clip(u, 1e-12, 1 - 1e-12)


def _points_at_depth(vd: ValidatedDomain, u: np.ndarray, delta: float, radius: float, depth_fraction: np.ndarray):
    """Points with ``r = -depth_fraction * delta``; z drawn area-uniformly on the polydisc."""
    n = vd.n
    z = radius * np.sqrt(u[:, :n]) * np.exp(2j * np.pi * u[:, n:2 * n])
    s = np.sum(np.abs(vd.f_values(z)) ** 2, axis=1) if len(z) else np.zeros(0)
    target = -depth_fraction * delta
    w = (target - s) / 2.0 + 1j * radius * (2.0 * u[:, 2 * n + 1] - 1.0)
    return np.concatenate([z, w[:, None]], axis=1)


def sample_strip(
    vd: ValidatedDomain,
    delta: float,
    n_samples: int,
    radius: float = 0.5,
    seed: int = 0,
    depth_distribution: DepthDistribution = DepthDistribution.LOG,
) -> StripSample:
    """Deterministic low-discrepancy sample of S_delta over the polydisc |z_i| <= radius.

    The z-part depends only on (seed, n_samples, radius), so a fixed seed
    probes the same tangential positions at every delta of a ladder.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < radius <= 1:
        raise ValueError("radius must lie in (0, 1]")
    depth_distribution = DepthDistribution(depth_distribution)
    n = vd.n
    u = _unit_cube(2 * n + 2, n_samples, seed)
    if depth_distribution is DepthDistribution.UNIFORM:
        frac = u[:, 2 * n]
    else:
        frac = LOG_DEPTH_FLOOR ** u[:, 2 * n]
    pts = _points_at_depth(vd, u, delta, radius, frac)
    if n_samples:
        r = eval_r(vd, pts)
        bad = ~((r > -delta) & (r < 0))
        if bad.any():
            frac = np.where(bad, 0.5, frac)
            pts = _points_at_depth(vd, u, delta, radius, frac)
            r = eval_r(vd, pts)
            assert np.all((r > -delta) & (r < 0))
    return StripSample(points=pts, delta=delta, radius=radius, seed=seed, depth_distribution=depth_distribution)


# --- eigenvalues -----------------------------------------------------------


def structured_min_eigenvalues(T: np.ndarray, v: np.ndarray, rho: np.ndarray, iterations: int = 200) -> np.ndarray:
    """Smallest eigenvalue of ``diag(T, 0) + rho v v^H`` for a batch.

    ``T`` is (N, n, n) Hermitian, ``v`` is (N, n+1), ``rho`` is (N,) positive.
    After diagonalizing T the problem is a rank-one update of a diagonal
    matrix, whose smallest eigenvalue is the smallest root of the secular
    function ``1/rho + sum_k zeta_k / (e_k - lam)``; it is bracketed by the
    two smallest poles and located by bisection.  This keeps relative
    accuracy when rho (~ delta^-2) dwarfs the tangential block.
    """
    N, n, _ = T.shape
    d, Q = np.linalg.eigh(T)
    zt = np.einsum("pij,pi->pj", Q.conj(), v[:, :n])
    e = np.concatenate([d, np.zeros((N, 1))], axis=1)
    zeta = np.concatenate([np.abs(zt) ** 2, np.abs(v[:, n:]) ** 2], axis=1)
    live = zeta > 0
    deflated = np.where(live, np.inf, e).min(axis=1)
    e_live = np.where(live, e, np.inf)
    order = np.argsort(e_live, axis=1)
    e_sorted = np.take_along_axis(e_live, order, axis=1)
    lo = e_sorted[:, 0]
    second = e_sorted[:, 1] if e.shape[1] > 1 else np.full(N, np.inf)
    hi = np.minimum(second, lo + rho * zeta.sum(axis=1))
    has_live = np.isfinite(lo)
    lo = np.where(has_live, lo, 0.0)
    hi = np.where(has_live, hi, 0.0)
    inv_rho = 1.0 / rho
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        diff = e - mid[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(live, zeta / diff, 0.0)
        g = inv_rho + terms.sum(axis=1)
        go_up = g < 0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    root = np.where(has_live, 0.5 * (lo + hi), np.inf)
    return np.minimum(root, deflated)


def hermitian_min_eigenvalues(H: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(H)[..., 0]


@dataclass
class LeviStats:
    delta: float
    n_samples: int
    min_eig: float
    q01_eig: float
    argmin: list
    n_nonpositive: int
    eigs: np.ndarray = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "n_samples": self.n_samples,
            "min_eig": self.min_eig,
            "q01_eig": self.q01_eig,
            "n_nonpositive": self.n_nonpositive,
            "argmin": [[p.real, p.imag] for p in self.argmin],
        }


def min_levi_eigen(wf: WeightFamily, sample: StripSample) -> LeviStats:
    if len(sample) == 0:
        raise EmptySample("strip sample is empty")
    ev = wf.evaluate(sample.delta, sample.points)
    finite = np.isfinite(ev.tangential).all(axis=(1, 2)) & np.isfinite(ev.normal_vec).all(axis=1)
    if not finite.all():
        raise NonFiniteHessian(sample.points[np.argmin(finite)].tolist())
    eigs = structured_min_eigenvalues(ev.tangential, ev.normal_vec, ev.rho)
    k = int(np.argmin(eigs))
    return LeviStats(
        delta=sample.delta,
        n_samples=len(sample),
        min_eig=float(eigs[k]),
        q01_eig=float(np.quantile(eigs, 0.01)),
        argmin=[complex(x) for x in sample.points[k]],
        n_nonpositive=int(np.sum(eigs <= 0)),
        eigs=eigs,
    )


# --- scaling fit -------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(deltas, min_eigs, points=None) -> FitResult:
    """Least-squares fit of log(min_eig) against log(1/delta)."""
    deltas = np.asarray(deltas, dtype=float)
    min_eigs = np.asarray(min_eigs, dtype=float)
    if len(np.unique(deltas)) < 3:
        raise TooFewDeltas(f"need >= 3 distinct deltas, got {len(np.unique(deltas))}")
    bad = np.flatnonzero(~(min_eigs > 0))
    if len(bad):
        k = int(bad[0])
        raise NonPositiveEigen(float(deltas[k]), float(min_eigs[k]), None if points is None else points[k])
    res = stats.linregress(np.log(1.0 / deltas), np.log(min_eigs))
    return FitResult(slope=float(res.slope), intercept=float(res.intercept), r_squared=float(res.rvalue**2))


# --- boundedness ------------------------------------------------------------------


@dataclass
class BoundedStats:
    delta: float
    sup_abs_raw: float
    unit_min: float | None  # None when delta lies beyond the UNIT_RANGE delta_max
    unit_max: float | None
    raw_bound: float
    exceeds_bound: bool
    unit_out_of_range: bool

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "sup_abs_raw": self.sup_abs_raw,
            "unit_min": self.unit_min,
            "unit_max": self.unit_max,
            "raw_bound": self.raw_bound,
            "exceeds_bound": self.exceeds_bound,
            "unit_out_of_range": self.unit_out_of_range,
        }


def _twin(wf: WeightFamily, normalization: Normalization) -> WeightFamily:
    if wf.params.normalization is normalization:
        return wf
    return WeightFamily(wf.vd, replace(wf.params, normalization=normalization), index=wf.index)


def check_bounded(wf: WeightFamily, samples: list[StripSample]) -> tuple[list[BoundedStats], bool]:
    """Sup of |phi| (RAW) and the UNIT_RANGE range per delta.

    Returns the per-delta stats and a growth flag, set when the RAW sup grows
    by more than a factor 2 along the ladder.
    """
    raw = _twin(wf, Normalization.RAW)
    unit = _twin(wf, Normalization.UNIT_RANGE)
    out = []
    for s in samples:
        if len(s) == 0:
            continue
        v_raw = raw.values(s.delta, s.points)
        sup = float(np.max(np.abs(v_raw)))
        if s.delta > unit.params.delta_max * (1 + 1e-12):
            v_unit = None
        else:
            v_unit = unit.values(s.delta, s.points)
        out.append(
            BoundedStats(
                delta=s.delta,
                sup_abs_raw=sup,
                unit_min=None if v_unit is None else float(v_unit.min()),
                unit_max=None if v_unit is None else float(v_unit.max()),
                raw_bound=raw.bound,
                exceeds_bound=bool(sup > raw.bound),
                unit_out_of_range=v_unit is not None and bool(v_unit.min() < 0 or v_unit.max() > 1),
            )
        )
    sups = [b.sup_abs_raw for b in out]
    grows = bool(sups) and max(sups) > 2.0 * sups[0]
    return out, grows


# --- globalization --------------------------------------------------------------

ZONES = ("inner", "transition", "exterior")
_ZONE_DEPTH = {"inner": (0.0, 0.5), "transition": (0.5, 1.0), "exterior": (1.0, 3.0)}


@dataclass
class GlobalCheck:
    delta: float
    zone: str
    points: np.ndarray
    value: np.ndarray
    hessian: np.ndarray
    psi: np.ndarray
    hess_psi: np.ndarray
    min_eig: np.ndarray


@dataclass
class PshReport:
    delta: float
    checks: dict
    violations: list  # (zone, point, lambda_min)
    exterior_exact_zero: bool
    inner_affine_max_error: float

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "n_violations": len(self.violations),
            "violations_by_zone": {z: sum(1 for v in self.violations if v[0] == z) for z in ZONES},
            "worst_violations": [
                {"zone": z, "point": [[p.real, p.imag] for p in pt], "min_eig": lam}
                for z, pt, lam in sorted(self.violations, key=lambda v: v[2])[:5]
            ],
            "exterior_exact_zero": self.exterior_exact_zero,
            "inner_affine_max_error": self.inner_affine_max_error,
        }


def sample_zone(vd: ValidatedDomain, delta: float, zone: str, n_samples: int, radius: float = 0.5, seed: int = 0):
    """Points with -r/delta uniform in the zone's depth band."""
    lo, hi = _ZONE_DEPTH[zone]
    u = _unit_cube(2 * vd.n + 2, n_samples, seed)
    frac = lo + (hi - lo) * u[:, 2 * vd.n]
    return _points_at_depth(vd, u, delta, radius, frac)


def check_psh_global(wf: WeightFamily, delta: float, n_samples: int, radius: float = 0.5, seed: int = 0) -> PshReport:
    checks = {}
    violations = []
    for zone in ZONES:
        pts = sample_zone(wf.vd, delta, zone, n_samples, radius, seed)
        if not len(pts):
            continue
        value, hess, psi, hess_psi = wf.evaluate_global(delta, pts)
        lam = hermitian_min_eigenvalues(hess)
        norm = np.abs(hess).max(axis=(1, 2))
        checks[zone] = GlobalCheck(delta, zone, pts, value, hess, psi, hess_psi, lam)
        for k in np.flatnonzero(lam < -PSH_TOLERANCE * (1.0 + norm)):
            violations.append((zone, [complex(x) for x in pts[k]], float(lam[k])))
        if zone == "transition" and len(violations):
            log.info("%d transition-band psh violations at delta=%g", len(violations), delta)
    ext = checks.get("exterior")
    exterior_zero = ext is None or bool(np.all(ext.value == 0) and np.all(ext.hessian == 0))
    inner = checks.get("inner")
    affine_err = 0.0
    if inner is not None:
        affine_err = float(
            max(
                np.max(np.abs(inner.value - (inner.psi - THETA_SHIFT))),
                np.max(np.abs(inner.hessian - inner.hess_psi)),
            )
        )
    return PshReport(delta, checks, violations, exterior_zero, affine_err)


# --- term decomposition -----------------------------------------------------------


@dataclass
class TermDecomposition:
    A: np.ndarray  # (n,)
    B: list  # B[j-1][h-1] for h = 1..H_j
    C: np.ndarray  # (n,)
    D: np.ndarray  # (n,)
    comparison: np.ndarray  # delta^-gamma_j |u_j|^2


def decompose_terms(wf: WeightFamily, delta: float, point, u) -> TermDecomposition:
    """Per-j contributions A_j, B_j^h, C_j and D_j = A_j + sum_h B_j^h + c C_j along u."""
    vd = wf.vd
    n = vd.n
    point = np.asarray(point, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("u must be a unit vector")
    r = float(eval_r(vd, point))
    if not delta - r > 0:
        from .errors import NonPositiveLogArgument

        raise NonPositiveLogArgument("-r + delta <= 0")
    z = point[None, :n]
    A = np.empty(n)
    for j in range(n):
        grad = np.array([d(z)[0] for d in wf.grad_f[j]])
        A[j] = abs(grad @ u) ** 2 / delta
    B = [[] for _ in range(n)]
    for t in wf.log_terms:
        grad = np.array([d(z)[0] for d in t.dg])
        B[t.j - 1].append(delta ** (-t.power * t.gamma) * abs(grad @ u) ** 2)
    C = np.empty(n)
    comparison = np.empty(n)
    for k in range(n):
        eps = delta ** wf.gammas[k]
        s = abs(point[k]) ** 2 / eps
        chi, d1, d2 = smooth_cutoff(s)
        L = math.log1p(s)
        F1 = d1 * L + chi / (1 + s)
        F2 = d2 * L + 2 * d1 / (1 + s) - chi / (1 + s) ** 2
        C[k] = (F1 + s * F2) / eps * abs(u[k]) ** 2
        comparison[k] = eps ** -1 * abs(u[k]) ** 2
    D = A + np.array([sum(b) for b in B]) + wf.params.c * C
    return TermDecomposition(A=A, B=B, C=C, D=D, comparison=comparison)


# --- finite-difference self test ----------------------------------------------------

FD_STEP_FRACTION = 2e-2


def _length_scales(wf: WeightFamily, delta: float, Z: np.ndarray) -> np.ndarray:
    """Per complex coordinate, a distance over which phi^delta changes by O(1)."""
    vd = wf.vd
    n = vd.n
    z = Z[:, :n]
    ev = wf.evaluate(delta, Z)
    gap = delta - ev.r
    tiny = 1e-300
    DF = np.stack([np.stack([d(z) for d in row], axis=1) for row in wf.grad_f], axis=1)
    L = np.empty((len(Z), n + 1))
    L[:, n] = gap / 2.0
    for k in range(n):
        cand = [
            gap / (2.0 * np.abs(ev.normal_vec[:, k]) + tiny),
            np.sqrt(gap / (np.sum(np.abs(DF[:, :, k]) ** 2, axis=1) + tiny)),
            np.full(len(Z), 1.0),
        ]
        eps = delta ** wf.gammas[k]
        cand.append(0.1 * eps / (np.abs(z[:, k]) + math.sqrt(eps)))
        for t in wf.log_terms:
            a = math.exp(t.log_a(delta))
            G = t.g(z)
            dG = t.dg[k](z)
            cand.append(np.sqrt(np.abs(G) ** 2 + a) / (np.abs(dG) + tiny))
        L[:, k] = np.min(np.stack(cand, axis=1), axis=1)
    return L


def _fd_levi(wf: WeightFamily, delta: float, Z: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Central-difference Levi forms from real second derivatives.

    ``d_i dbar_j phi = (phi_{x_i x_j} + phi_{y_i y_j} + i(phi_{x_i y_j} - phi_{y_i x_j})) / 4``.
    """
    N, n1 = Z.shape
    R = 2 * n1
    # real coordinate a -> (complex index, unit step)
    dirs = [(a // 2, 1.0 if a % 2 == 0 else 1j) for a in range(R)]
    h = np.stack([steps[:, a // 2] for a in range(R)], axis=1)  # (N, R)

    def shift(coeffs):
        dz = np.zeros((N, n1), dtype=np.complex128)
        for a, s in coeffs:
            idx, unit = dirs[a]
            dz[:, idx] += s * h[:, a] * unit
        return Z + dz

    pts = [Z]
    index = {}
    for a in range(R):
        for sa in (1, -1):
            index[(a, sa)] = len(pts)
            pts.append(shift([(a, sa)]))
    for a in range(R):
        for b in range(a + 1, R):
            for sa in (1, -1):
                for sb in (1, -1):
                    index[(a, sa, b, sb)] = len(pts)
                    pts.append(shift([(a, sa), (b, sb)]))
    vals = wf.values(delta, np.concatenate(pts, axis=0)).reshape(len(pts), N)
    f0 = vals[0]
    Hr = np.empty((N, R, R))
    for a in range(R):
        Hr[:, a, a] = (vals[index[(a, 1)]] - 2 * f0 + vals[index[(a, -1)]]) / h[:, a] ** 2
        for b in range(a + 1, R):
            v = (
                vals[index[(a, 1, b, 1)]]
                - vals[index[(a, 1, b, -1)]]
                - vals[index[(a, -1, b, 1)]]
                + vals[index[(a, -1, b, -1)]]
            ) / (4 * h[:, a] * h[:, b])
            Hr[:, a, b] = Hr[:, b, a] = v
    X = lambda i: 2 * i  # noqa: E731
    Y = lambda i: 2 * i + 1  # noqa: E731
    L = np.empty((N, n1, n1), dtype=np.complex128)
    for i in range(n1):
        for j in range(n1):
            L[:, i, j] = 0.25 * (
                Hr[:, X(i), X(j)] + Hr[:, Y(i), Y(j)] + 1j * (Hr[:, X(i), Y(j)] - Hr[:, Y(i), X(j)])
            )
    return L


def levi_relative_error(exact: np.ndarray, approx: np.ndarray) -> np.ndarray:
    """Entrywise error scaled by ``sqrt(R_i R_j)``, R_i the largest |entry| of row i."""
    rows = np.abs(exact).max(axis=2)
    scale = np.sqrt(rows[:, :, None] * rows[:, None, :])
    scale = np.where(scale > 0, scale, 1.0)
    return (np.abs(exact - approx) / scale).max(axis=(1, 2))


def fd_levi(wf: WeightFamily, delta: float, Z) -> np.ndarray:
    """Richardson-extrapolated finite-difference Levi forms at a batch of points."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
    steps = FD_STEP_FRACTION * _length_scales(wf, delta, Z)
    coarse = _fd_levi(wf, delta, Z, steps)
    fine = _fd_levi(wf, delta, Z, steps / 2)
    return (4.0 * fine - coarse) / 3.0


def fd_self_test(wf: WeightFamily, delta: float, n_points: int, seed: int = 0, radius: float = 0.5) -> float:
    """Worst relative disagreement between closed-form and finite-difference Levi forms."""
    if n_points == 0:
        log.warning("fd_self_test called with n_points=0; reporting error 0")
        return 0.0
    sample = sample_strip(wf.vd, delta, n_points, radius=radius, seed=seed)
    exact = wf.levi_batch(delta, sample.points)
    approx = fd_levi(wf, delta, sample.points)
    return float(levi_relative_error(exact, approx).max())


# --- pipeline -----------------------------------------------------------------------


@dataclass
class VerificationReport:
    per_delta: list
    fit: FitResult | None
    target_slope: Fraction
    bounded: list
    bounded_grows: bool
    psh: PshReport | None
    fit_error: str | None = None

    @property
    def all_positive(self) -> bool:
        return all(s.n_nonpositive == 0 for s in self.per_delta)

    @property
    def passed(self) -> bool:
        return (
            self.fit is not None
            and self.all_positive
            and self.fit.slope >= 0.9 * float(self.target_slope)
        )

    def to_json(self) -> dict:
        return {
            "per_delta": [s.to_json() for s in self.per_delta],
            "fitted_slope": None if self.fit is None else self.fit.slope,
            "fitted_intercept": None if self.fit is None else self.fit.intercept,
            "r_squared": None if self.fit is None else self.fit.r_squared,
            "fit_error": self.fit_error,
            "target_slope": frac_str(self.target_slope),
            "slope_threshold": 0.9 * float(self.target_slope),
            "all_strip_eigenvalues_positive": self.all_positive,
            "passed": self.passed,
            "bounded": [b.to_json() for b in self.bounded],
            "bounded_grows": self.bounded_grows,
            "psh_global": None if self.psh is None else self.psh.to_json(),
        }


def run_verification(
    wf: WeightFamily,
    deltas,
    samples_per_delta: int = 2000,
    radius: float = 0.5,
    seed: int = 0,
    depth_distribution: DepthDistribution = DepthDistribution.LOG,
    psh_samples: int | None = None,
) -> VerificationReport:
    deltas = sorted((float(d) for d in deltas), reverse=True)
    samples = [sample_strip(wf.vd, d, samples_per_delta, radius, seed, depth_distribution) for d in deltas]
    if samples_per_delta == 0:
        raise EmptySample("samples_per_delta is 0")
    per_delta = [min_levi_eigen(wf, s) for s in samples]
    fit = None
    fit_error = None
    try:
        fit = fit_exponent(deltas, [s.min_eig for s in per_delta], [s.argmin for s in per_delta])
    except (NonPositiveEigen, TooFewDeltas) as exc:
        fit_error = str(exc)
    bounded, grows = check_bounded(wf, samples)
    psh = None
    if wf.params.normalization is Normalization.UNIT_RANGE:
        psh = check_psh_global(wf, deltas[0], psh_samples or samples_per_delta, radius, seed)
    return VerificationReport(
        per_delta=per_delta,
        fit=fit,
        target_slope=2 * wf.index.epsilon,
        bounded=bounded,
        bounded_grows=grows,
        psh=psh,
        fit_error=fit_error,
    )


__all__ = [
    "DepthDistribution",
    "StripSample",
    "sample_strip",
    "structured_min_eigenvalues",
    "min_levi_eigen",
    "fit_exponent",
    "check_bounded",
    "check_psh_global",
    "decompose_terms",
    "fd_self_test",
    "run_verification",
    "VerificationReport",
    "E_MINUS_2",
]
