"""Exact subellipticity indices from order data.

Three recursions are available:

* ``T21`` -- product rule, gamma_j = min_{i<j} gamma_i / m_j = 1/(m_1...m_j);
* ``T22`` -- vanishing-order rule, gamma_j = min_{i<j} (l_j^i / m_j) gamma_i,
  valid only when no remainder carries a low power of its own variable;
* ``T23`` -- per-j choice between the two, keyed on k_j != 0.

All arithmetic is in :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .domain import OrderData
from .errors import ModeHypothesisViolated


class Mode(str, Enum):
    T21 = "T21"
    T22 = "T22"
    T23 = "T23"

    @classmethod
    def parse(cls, text: str) -> Mode:
        text = text.strip().upper()
        if text == "AUTO":
            return cls.T23
        return cls(text)


class Branch(str, Enum):
    BASE = "BASE"
    PURE = "PURE"  # remainder contains a z_j power below m_j: divide by m_j only
    MIXED = "MIXED"  # vanishing-order rule with l_j^i


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class IndexReport:
    mode: Mode
    gammas: tuple[Fraction, ...]
    epsilon: Fraction
    multiplicity: int
    alphas: tuple[Fraction, ...]
    branch: tuple[Branch, ...]
    base_alpha: Fraction = Fraction(1)

    @property
    def gamma(self) -> Fraction:
        return self.gammas[-1]

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "gammas": [frac_str(g) for g in self.gammas],
            "epsilon": frac_str(self.epsilon),
            "multiplicity": self.multiplicity,
            "alpha": frac_str(self.base_alpha),
            "alphas": [frac_str(a) for a in self.alphas],
            "branch": [b.value for b in self.branch],
        }


def multiplicity(orders: OrderData) -> int:
    return math.prod(orders.m)


def alpha_exponents(orders: OrderData, alpha=1) -> tuple[Fraction, ...]:
    """``alpha_j = alpha * m_{j+1} * ... * m_n``."""
    alpha = Fraction(alpha)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    m = orders.m
    alphas = tuple(alpha * math.prod(m[j + 1:]) for j in range(len(m)))
    # telescoping identity used to chain the log-derivative estimates
    for j in range(1, len(m)):
        assert (alphas[j - 1] - 1) - alphas[j] * (m[j] - 1) == alphas[j] - 1
    return alphas


def compute_gammas(orders: OrderData, mode: Mode = Mode.T23, alpha=1) -> IndexReport:
    mode = Mode(mode)
    m = orders.m
    n = len(m)
    if mode is Mode.T22:
        for j in range(2, n + 1):
            if orders.k[j - 1] != 0:
                raise ModeHypothesisViolated(mode.value, j)

    gammas = [Fraction(1, m[0])]
    branch = [Branch.BASE]
    for j in range(2, n + 1):
        mj = m[j - 1]
        pure = min(gammas[i - 1] for i in range(1, j)) / mj
        if mode is Mode.T21 or (mode is Mode.T23 and orders.k[j - 1] != 0):
            gammas.append(pure)
            branch.append(Branch.PURE)
            continue
        candidates = [
            Fraction(orders.l[(j, i)], mj) * gammas[i - 1]
            for i in range(1, j)
            if orders.l[(j, i)] != math.inf
        ]
        if candidates:
            gammas.append(min(candidates))
            branch.append(Branch.MIXED)
        else:
            # only z_j-powers of degree >= m_j beyond the pure term: product rule
            gammas.append(pure)
            branch.append(Branch.PURE)

    for j, g in enumerate(gammas):
        assert 0 < g <= Fraction(1, m[j])
    for (j, i), l in orders.l.items():
        assert l == math.inf or l * gammas[i - 1] <= 1
    mult = multiplicity(orders)
    assert gammas[-1] >= Fraction(1, mult)
    return IndexReport(
        mode=mode,
        gammas=tuple(gammas),
        epsilon=gammas[-1] / 2,
        multiplicity=mult,
        alphas=alpha_exponents(orders, alpha),
        branch=tuple(branch),
        base_alpha=Fraction(alpha),
    )
