"""Weight families phi^delta and their closed-form Levi forms.

The weight is a sum of three kinds of terms, evaluated at points
``Z = (z_1, ..., z_n, z_{n+1})``:

(a) ``-log((delta - r)/delta)`` -- the strip term;
(b) ``log(|g|^2 + a) / |log a|`` for ``g = d^h f_j / dz_j^h`` and
    ``a = delta^{(m_j-h) gamma_j} / |log delta|^{(m_j-h) alpha_j}`` -- the
    log-derivative terms, present for ``1 <= h <= H_j``;
(c) ``c * chi(|z_j|^2/delta^gamma_j) * log(1 + |z_j|^2/delta^gamma_j)`` -- cutoffs.

``H_j`` is ``m_j - 1`` in mode T21, ``0`` in T22 and ``k_j`` in T23.

Every Levi form is assembled as ``T (+) 0 + rho * v v^H`` where ``T`` is the
n x n tangential block, ``v = dr`` and ``rho = 1/(delta - r)^2``; keeping the
pieces apart lets the eigenvalue code avoid cancellation between the
``delta^-2`` normal entries and the much smaller tangential ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .domain import ValidatedDomain
from .errors import NonPositiveLogArgument
from .index import IndexReport, Mode, compute_gammas
from .poly import CompiledPolynomial, wirtinger_derivative

THETA_LO = 2.0 * math.exp(-2.0)
THETA_HI = math.exp(-1.0)
THETA_SHIFT = 0.5 * (THETA_LO + THETA_HI)
E_MINUS_2 = math.exp(-2.0)


class Normalization(str, Enum):
    RAW = "RAW"
    UNIT_RANGE = "UNIT_RANGE"

    @classmethod
    def parse(cls, text: str) -> Normalization:
        key = text.strip().lower()
        if key == "raw":
            return cls.RAW
        if key in ("unit", "unit_range"):
            return cls.UNIT_RANGE
        raise ValueError(f"unknown normalization {text!r}")


# --- one-dimensional profiles ---------------------------------------------


def _g(s):
    s = np.asarray(s, dtype=float)
    pos = s > 0
    safe = np.where(pos, s, 1.0)
    return np.where(pos, np.exp(-1.0 / safe), 0.0), safe, pos


def smooth_cutoff(t):
    """C-infinity cutoff: 1 for t <= 1, 0 for t >= 2.

    Returns ``(chi, chi', chi'')`` with the same shape as ``t``.
    """
    t = np.asarray(t, dtype=float)
    a, sa, pa = _g(2.0 - t)
    b, sb, pb = _g(t - 1.0)
    # g' = g/s^2, g'' = g (1/s^4 - 2/s^3)
    da = -np.where(pa, a / sa**2, 0.0)
    db = np.where(pb, b / sb**2, 0.0)
    d2a = np.where(pa, a * (1.0 / sa**4 - 2.0 / sa**3), 0.0)
    d2b = np.where(pb, b * (1.0 / sb**4 - 2.0 / sb**3), 0.0)
    s = a + b
    band = (t > 1.0) & (t < 2.0)
    ss = np.where(band, s, 1.0)
    num = da * b - a * db
    chi = np.where(t <= 1.0, 1.0, np.where(band, a / ss, 0.0))
    d1 = np.where(band, num / ss**2, 0.0)
    d2 = np.where(band, (d2a * b - a * d2b) / ss**2 - 2.0 * num * (da + db) / ss**3, 0.0)
    if chi.ndim == 0:
        return float(chi), float(d1), float(d2)
    return chi, d1, d2


def smooth_theta(t):
    """Convex C^2 ramp: 0 for t <= 2e^-2, ``t - THETA_SHIFT`` for t >= e^-1.

    theta' rises from 0 to 1 on the band through the smoothstep 3x^2 - 2x^3.
    Returns ``(theta, theta', theta'')``.
    """
    t = np.asarray(t, dtype=float)
    w = THETA_HI - THETA_LO
    x = np.clip((t - THETA_LO) / w, 0.0, 1.0)
    band = (t > THETA_LO) & (t < THETA_HI)
    val = np.where(t >= THETA_HI, t - THETA_SHIFT, np.where(band, w * (x**3 - 0.5 * x**4), 0.0))
    d1 = np.where(t >= THETA_HI, 1.0, np.where(band, 3 * x**2 - 2 * x**3, 0.0))
    d2 = np.where(band, (6 * x - 6 * x**2) / w, 0.0)
    if val.ndim == 0:
        return float(val), float(d1), float(d2)
    return val, d1, d2


# --- weight family ---------------------------------------------------------


def hermitize(M: np.ndarray) -> np.ndarray:
    """Exactly Hermitian part of a batch of matrices.

    Complex outer products are Hermitian only up to rounding (fused
    multiply-adds leave ~1e-16 relative residues), so every assembled Levi
    form passes through here.
    """
    return 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))


@dataclass(frozen=True)
class WeightParams:
    c: float = 0.25
    alpha: Fraction = Fraction(1)
    mode: Mode = Mode.T23
    normalization: Normalization = Normalization.UNIT_RANGE
    radius: float = 0.5  # polydisc on which the UNIT_RANGE bound is guaranteed
    delta_max: float = 1e-2  # largest delta for which the UNIT_RANGE bound is guaranteed

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if Fraction(self.alpha) < 1:
            raise ValueError("alpha must be >= 1")
        if not 0 < self.delta_max < 1:
            raise ValueError("delta_max must lie in (0, 1)")


@dataclass(frozen=True)
class LogTerm:
    j: int  # 1-based
    h: int
    power: int  # m_j - h
    gamma: float
    alpha: float
    g: CompiledPolynomial
    dg: tuple[CompiledPolynomial, ...]

    def log_a(self, delta: float) -> float:
        return self.power * (self.gamma * math.log(delta) - self.alpha * math.log(abs(math.log(delta))))


@dataclass
class LeviForm:
    """Levi form ``matrix[i, j] = d_i dbar_j phi`` at one point.

    ``tangential``, ``normal_vec`` and ``rho`` hold the decomposition
    ``matrix = tangential (+) 0 + rho * normal_vec normal_vec^H`` when it
    is available.
    """

    point: np.ndarray
    matrix: np.ndarray
    tangential: np.ndarray | None = None
    normal_vec: np.ndarray | None = None
    rho: float | None = None

    def __post_init__(self):
        herm = np.abs(self.matrix - self.matrix.conj().T).max(initial=0.0)
        scale = max(1.0, np.abs(self.matrix).max(initial=0.0))
        assert herm <= 1e-12 * scale, "Levi form not Hermitian"

    def quadratic(self, u) -> float:
        u = np.asarray(u, dtype=complex)
        return float(np.real(u @ self.matrix @ u.conj()))


@dataclass
class WeightEval:
    """Batched evaluation of phi^delta (already normalized) and derivatives."""

    r: np.ndarray  # (N,)
    value: np.ndarray  # (N,)
    grad: np.ndarray  # (N, n+1), d_i phi
    tangential: np.ndarray  # (N, n, n)
    normal_vec: np.ndarray  # (N, n+1), dr
    rho: np.ndarray  # (N,)
    hess_r: np.ndarray = field(repr=False, default=None)  # (N, n, n)

    def matrices(self) -> np.ndarray:
        n1 = self.normal_vec.shape[1]
        out = np.zeros((len(self.r), n1, n1), dtype=np.complex128)
        out[:, :-1, :-1] = self.tangential
        out += self.rho[:, None, None] * self.normal_vec[:, :, None] * self.normal_vec.conj()[:, None, :]
        return hermitize(out)


class WeightFamily:
    """phi^delta for one validated domain, mode and parameter set.

    Polynomial derivative caches are built once; all evaluation methods are
    pure and accept batches of points of shape (N, n+1).
    """

    def __init__(self, vd: ValidatedDomain, params: WeightParams | None = None, index: IndexReport | None = None):
        self.vd = vd
        self.params = params or WeightParams()
        self.index = index or compute_gammas(vd.orders, self.params.mode, self.params.alpha)
        n = vd.n
        m = vd.orders.m
        mode = self.index.mode
        if mode is Mode.T21:
            self.h_ranges = tuple(mj - 1 for mj in m)
        elif mode is Mode.T22:
            self.h_ranges = (0,) * n
        else:
            self.h_ranges = tuple(vd.orders.k)
        self.gammas = tuple(float(g) for g in self.index.gammas)
        self.grad_f = tuple(
            tuple(CompiledPolynomial(wirtinger_derivative(f, i, 1)) for i in range(n)) for f in vd.spec.functions
        )
        terms = []
        for j, f in enumerate(vd.spec.functions, start=1):
            for h in range(1, self.h_ranges[j - 1] + 1):
                g = wirtinger_derivative(f, j - 1, h)
                terms.append(
                    LogTerm(
                        j=j,
                        h=h,
                        power=m[j - 1] - h,
                        gamma=float(self.index.gammas[j - 1]),
                        alpha=float(self.index.alphas[j - 1]),
                        g=CompiledPolynomial(g),
                        dg=tuple(CompiledPolynomial(wirtinger_derivative(g, i, 1)) for i in range(n)),
                    )
                )
        self.log_terms = tuple(terms)
        self.offset = math.log(2.0) + len(terms)
        self.bound = self._range_bound()

    def _range_bound(self) -> float:
        p = self.params
        positive = 0.0
        for t in self.log_terms:
            la = t.log_a(p.delta_max)
            sup = t.g.abs_bound(p.radius)
            top = np.logaddexp(2.0 * math.log(sup), la) if sup > 0 else la
            positive += max(0.0, top / abs(la))
        return math.log(2.0) + len(self.log_terms) + p.c * self.vd.n * math.log(3.0) + positive

    @property
    def scale(self) -> float:
        return 1.0 / self.bound if self.params.normalization is Normalization.UNIT_RANGE else 1.0

    def _check_delta(self, delta: float):
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.params.normalization is Normalization.UNIT_RANGE and delta > self.params.delta_max * (1 + 1e-12):
            raise ValueError(f"delta={delta} exceeds delta_max={self.params.delta_max} of the UNIT_RANGE bound")

    def evaluate(self, delta: float, Z) -> WeightEval:
        self._check_delta(delta)
        Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
        n = self.vd.n
        N = Z.shape[0]
        z = Z[:, :n]
        F = self.vd.f_values(z)  # (N, n) indexed [point, j]
        DF = np.stack([np.stack([d(z) for d in row], axis=1) for row in self.grad_f], axis=1)  # [pt, j, i]
        r = 2.0 * Z[:, n].real + np.sum(np.abs(F) ** 2, axis=1)
        gap = delta - r
        if np.any(~(gap > 0)):
            raise NonPositiveLogArgument(f"-r + delta <= 0 at {int(np.sum(~(gap > 0)))} point(s)")

        dr = np.empty((N, n + 1), dtype=np.complex128)
        dr[:, :n] = np.einsum("pj,pji->pi", F.conj(), DF)
        dr[:, n] = 1.0
        hess_r = np.einsum("pki,pkj->pij", DF, DF.conj())

        value = -np.log1p(-r / delta)
        grad = dr / gap[:, None]
        T = hess_r / gap[:, None, None]

        log_delta = math.log(delta)
        for t in self.log_terms:
            la = t.log_a(delta)
            lam = abs(la)
            G = t.g(z)
            DG = np.stack([d(z) for d in t.dg], axis=1)
            with np.errstate(divide="ignore"):
                lg2 = np.log(np.abs(G) ** 2)
            ldenom = np.logaddexp(lg2, la)
            value = value + ldenom / lam
            grad[:, :n] += (G.conj() * np.exp(-ldenom))[:, None] * DG / lam
            coef = np.exp(la - 2.0 * ldenom) / lam
            T = T + coef[:, None, None] * DG[:, :, None] * DG.conj()[:, None, :]

        c = self.params.c
        for k in range(n):
            eps = math.exp(self.gammas[k] * log_delta)
            zk = z[:, k]
            s = np.abs(zk) ** 2 / eps
            chi, d1, d2 = smooth_cutoff(s)
            L = np.log1p(s)
            F0 = chi * L
            F1 = d1 * L + chi / (1 + s)
            F2 = d2 * L + 2 * d1 / (1 + s) - chi / (1 + s) ** 2
            value = value + c * F0
            grad[:, k] += c * F1 * zk.conj() / eps
            T[:, k, k] += c * (F1 + s * F2) / eps

        T = hermitize(T)
        sc = self.scale
        if self.params.normalization is Normalization.UNIT_RANGE:
            value = (value + self.offset) * sc
        return WeightEval(
            r=r,
            value=value,
            grad=grad * sc,
            tangential=T * sc,
            normal_vec=dr,
            rho=sc / gap**2,
            hess_r=hess_r,
        )

    def values(self, delta: float, Z) -> np.ndarray:
        return self.evaluate(delta, Z).value

    def levi_batch(self, delta: float, Z) -> np.ndarray:
        return self.evaluate(delta, Z).matrices()

    def evaluate_global(self, delta: float, Z):
        """``theta(exp(2r/delta) + e^-2 phi)`` and its Levi forms for a batch.

        Returns ``(value, hessian, psi, hess_psi)``; the Hessians have shape (N, n+1, n+1).
        """
        if self.params.normalization is not Normalization.UNIT_RANGE:
            raise ValueError("globalization needs UNIT_RANGE normalization")
        ev = self.evaluate(delta, Z)
        n = self.vd.n
        E = np.exp(2.0 * ev.r / delta)
        psi = E + E_MINUS_2 * ev.value
        dpsi = (E * 2.0 / delta)[:, None] * ev.normal_vec + E_MINUS_2 * ev.grad
        hess_r_full = np.zeros((len(E), n + 1, n + 1), dtype=np.complex128)
        hess_r_full[:, :n, :n] = ev.hess_r
        vv = ev.normal_vec[:, :, None] * ev.normal_vec.conj()[:, None, :]
        hess_psi = E[:, None, None] * ((2.0 / delta) * hess_r_full + (4.0 / delta**2) * vv)
        hess_psi = hess_psi + E_MINUS_2 * ev.matrices()
        th, th1, th2 = smooth_theta(psi)
        hess_psi = hermitize(hess_psi)
        hess = hermitize(th2[:, None, None] * dpsi[:, :, None] * dpsi.conj()[:, None, :] + th1[:, None, None] * hess_psi)
        return np.asarray(th), hess, psi, hess_psi


def _as_batch(point):
    return np.atleast_2d(np.asarray(point, dtype=np.complex128))


def eval_weight(wf: WeightFamily, delta: float, point) -> float:
    return float(wf.values(delta, _as_batch(point))[0])


def levi_form(wf: WeightFamily, delta: float, point) -> LeviForm:
    ev = wf.evaluate(delta, _as_batch(point))
    return LeviForm(
        point=_as_batch(point)[0],
        matrix=ev.matrices()[0],
        tangential=ev.tangential[0],
        normal_vec=ev.normal_vec[0],
        rho=float(ev.rho[0]),
    )


def eval_global(wf: WeightFamily, delta: float, point) -> tuple[float, LeviForm]:
    value, hess, _, _ = wf.evaluate_global(delta, _as_batch(point))
    return float(value[0]), LeviForm(point=_as_batch(point)[0], matrix=hess[0])
