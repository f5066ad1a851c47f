"""Exact orders of contact along monomial curves.

A curve ``tau -> (c_1 tau^{a_1}, ..., c_n tau^{a_n}, 0)`` meets the
boundary with contact ``ord(r o curve) / ord(curve)``; since the normal
component vanishes, ``r o curve = sum_j |f_j o curve|^2`` and its order is
``2 min_j ord(f_j o curve)`` (no cancellation between squared moduli).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .domain import ValidatedDomain
from .errors import CurveError
from .index import IndexReport, frac_str
from .poly import GaussianRational, compose_monomial_curve

log = logging.getLogger(__name__)

OMITTED = 0
UNIT_COEFFS = (
    GaussianRational(1),
    GaussianRational(-1),
    GaussianRational(0, 1),
    GaussianRational(0, -1),
)


@dataclass(frozen=True)
class MonomialCurve:
    """``z_i = coeffs[i] * tau^exps[i]``, with exponent 0 meaning ``z_i = 0``."""

    exps: tuple[int, ...]
    coeffs: tuple[GaussianRational, ...] | None = None

    def __post_init__(self):
        if any((not isinstance(a, int)) or a < 0 for a in self.exps):
            raise CurveError("curve exponents must be non-negative integers")
        if all(a == OMITTED for a in self.exps):
            raise CurveError("all-zero curve: every component is omitted")
        if self.coeffs is not None:
            if len(self.coeffs) != len(self.exps):
                raise CurveError("coefficient vector length must match exponents")
            if any(not GaussianRational.coerce(c) for c in self.coeffs):
                raise CurveError("curve coefficients must be nonzero")

    @classmethod
    def parse(cls, text: str, n: int) -> MonomialCurve:
        try:
            exps = tuple(int(part) for part in text.split(","))
        except ValueError as exc:
            raise CurveError(f"malformed exponent list {text!r}") from exc
        if len(exps) != n:
            raise CurveError(f"expected {n} exponents, got {len(exps)}")
        return cls(exps)

    @property
    def order(self) -> int:
        return min(a for a in self.exps if a != OMITTED)

    def scaled(self, k: int) -> MonomialCurve:
        return MonomialCurve(tuple(a * k for a in self.exps), self.coeffs)

    def to_json(self) -> dict:
        out = {"exponents": list(self.exps)}
        if self.coeffs is not None:
            out["coefficients"] = [str(GaussianRational.coerce(c)) for c in self.coeffs]
        return out


def canonical_curve(index: IndexReport) -> MonomialCurve:
    """Exponents ``gamma_i / gamma_n`` made integral by their common denominator."""
    g = index.gammas
    ratios = [gi / g[-1] for gi in g]
    lcd = math.lcm(*(q.denominator for q in ratios))
    return MonomialCurve(tuple(int(q * lcd) for q in ratios))


def contact_order(vd: ValidatedDomain, curve: MonomialCurve) -> Fraction | float:
    """Exact contact order; ``math.inf`` when the curve lies in ``{f = 0}``."""
    if len(curve.exps) != vd.n:
        raise CurveError(f"curve has {len(curve.exps)} components, domain has {vd.n}")
    orders = [compose_monomial_curve(f, curve.exps, curve.coeffs).order() for f in vd.spec.functions]
    finite = [o for o in orders if o is not None]
    if not finite:
        return math.inf
    return Fraction(2 * min(finite), curve.order)


def _format_contact(c) -> str:
    return "inf" if c == math.inf else frac_str(c)


@dataclass
class TypeReport:
    lower_bound_D: Fraction | None
    upper_bound_D: int
    tested_curves: list = field(default_factory=list)  # (label, curve, contact)
    epsilon_consistency: bool = True
    canonical_contact: Fraction | float | None = None
    two_over_gamma: Fraction | None = None
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lower_bound_D": None if self.lower_bound_D is None else frac_str(self.lower_bound_D),
            "upper_bound_D": self.upper_bound_D,
            "epsilon_consistency": self.epsilon_consistency,
            "canonical_contact": None if self.canonical_contact is None else _format_contact(self.canonical_contact),
            "two_over_gamma": None if self.two_over_gamma is None else frac_str(self.two_over_gamma),
            "tested_curves": [
                {"label": label, **curve.to_json(), "contact": _format_contact(c)}
                for label, curve, c in self.tested_curves
            ],
            "warnings": list(self.warnings),
        }


def unit_coefficient_curves(curve: MonomialCurve):
    """The curve with every coefficient pattern in {1, -1, i, -i}, last live slot fixed to 1."""
    live = [i for i, a in enumerate(curve.exps) if a != OMITTED]
    for combo in itertools.product(UNIT_COEFFS, repeat=len(live) - 1):
        coeffs = [GaussianRational(1)] * len(curve.exps)
        for i, c in zip(live[:-1], combo):
            coeffs[i] = c
        yield MonomialCurve(curve.exps, tuple(coeffs))


def type_report(
    vd: ValidatedDomain,
    index: IndexReport,
    extra_curves=(),
    unit_search: bool = False,
) -> TypeReport:
    """Contact orders of the canonical curve, the axes and any extra curves.

    With ``unit_search`` the canonical exponents are also tried with all
    fourth-root-of-unity coefficient patterns, which can cancel leading
    terms that unit coefficients leave alive.
    """
    n = vd.n
    canon = canonical_curve(index)
    tested = [("canonical", canon, contact_order(vd, canon))]
    for i in range(n):
        axis = MonomialCurve(tuple(1 if k == i else OMITTED for k in range(n)))
        tested.append((f"axis_{i + 1}", axis, contact_order(vd, axis)))
    for curve in extra_curves:
        tested.append(("extra", curve, contact_order(vd, curve)))
    if unit_search:
        best = None
        for curve in unit_coefficient_curves(canon):
            c = contact_order(vd, curve)
            if best is None or c > best[1]:
                best = (curve, c)
        tested.append(("canonical_unit_search", *best))
    warnings = []
    finite = []
    for label, curve, c in tested:
        if c == math.inf:
            msg = f"curve {label} {list(curve.exps)} lies in the variety f = 0 (infinite contact)"
            log.warning("%s", msg)
            warnings.append(msg)
        else:
            finite.append(c)
    lower = max(finite) if finite else None
    consistency = lower is None or index.epsilon * lower <= 1
    if not consistency:
        msg = (
            f"epsilon {frac_str(index.epsilon)} times contact {frac_str(lower)} exceeds 1: "
            "the gamma recursion overestimates here"
        )
        log.warning("%s", msg)
        warnings.append(msg)
    return TypeReport(
        lower_bound_D=lower,
        upper_bound_D=2 * index.multiplicity,
        tested_curves=tested,
        epsilon_consistency=consistency,
        canonical_contact=tested[0][2],
        two_over_gamma=2 / index.gamma,
        warnings=warnings,
    )
