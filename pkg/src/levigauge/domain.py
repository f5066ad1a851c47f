"""Regular coordinate domains ``2 Re z_{n+1} + sum_j |f_j(z)|^2 < 0``.

A domain is given by a triangular system ``f_j = f_j(z_1, ..., z_j)`` of
polynomials.  :func:`validate` checks the structural hypotheses and reads
off the order data that the index recursions consume.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import LeviGaugeError, NonzeroConstantTerm, NoPurePower, NotTriangular, SchemaError
from .poly import CompiledPolynomial, GaussianRational, Polynomial, format_poly, parse_poly, support_orders

log = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class DomainSpec:
    n: int
    functions: tuple[Polynomial, ...]
    label: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise SchemaError("n must be a positive integer")
        if len(self.functions) != self.n:
            raise SchemaError(f"expected {self.n} functions, got {len(self.functions)}")
        for j, f in enumerate(self.functions, start=1):
            if f.n_vars != self.n:
                raise SchemaError(f"f_{j} lives in {f.n_vars} variables, expected {self.n}")
            if f.is_zero():
                raise SchemaError(f"f_{j} is the zero polynomial")

    def to_json(self) -> dict:
        out = {"n": self.n, "functions": [format_poly(f) for f in self.functions]}
        if self.label is not None:
            out["label"] = self.label
        return out


@dataclass(frozen=True)
class ClampWarning:
    j: int
    i: int
    raw: int
    clamped: int

    def __str__(self):
        return f"l_{self.j}^{self.i} = {self.raw} exceeds m_{self.i}; clamped to {self.clamped}"


@dataclass(frozen=True)
class OrderData:
    """Vanishing orders; indices in ``l`` are 1-based as ``l[(j, i)]`` for i < j.

    ``l`` entries are ints or ``math.inf``.
    """

    m: tuple[int, ...]
    k: tuple[int, ...]
    l: dict = field(default_factory=dict)
    clamp_warnings: tuple[ClampWarning, ...] = ()

    @property
    def n(self) -> int:
        return len(self.m)

    def row(self, j: int) -> list:
        """``[l_j^1, ..., l_j^{j-1}]``."""
        return [self.l[(j, i)] for i in range(1, j)]


@dataclass(frozen=True, eq=False)
class ValidatedDomain:
    spec: DomainSpec
    orders: OrderData
    leading_coeffs: tuple[GaussianRational, ...]
    warnings: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.spec.n

    @cached_property
    def compiled(self) -> tuple[CompiledPolynomial, ...]:
        return tuple(CompiledPolynomial(f) for f in self.spec.functions)

    def f_values(self, z: np.ndarray) -> np.ndarray:
        """Values of all f_j at points ``z`` of shape (N, n); returns (N, n)."""
        z = np.atleast_2d(np.asarray(z, dtype=np.complex128))
        return np.stack([f(z) for f in self.compiled], axis=1)


def load_spec(document) -> DomainSpec:
    """Build a :class:`DomainSpec` from JSON text, a parsed dict, or a path."""
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("spec must be a JSON object")
    unknown = set(document) - {"n", "functions", "label"}
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    n = document.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'n' must be a positive integer")
    funcs = document.get("functions")
    if not isinstance(funcs, list) or not all(isinstance(s, str) for s in funcs):
        raise SchemaError("'functions' must be a list of strings")
    if len(funcs) != n:
        raise SchemaError(f"'functions' must have exactly n={n} entries, got {len(funcs)}")
    label = document.get("label")
    if label is not None and not isinstance(label, str):
        raise SchemaError("'label' must be a string")
    polys = []
    for j, text in enumerate(funcs, start=1):
        try:
            polys.append(parse_poly(text, n))
        except LeviGaugeError as exc:
            exc.function_index = j
            exc.args = (f"function {j}: {exc}",)
            raise
    return DomainSpec(n=n, functions=tuple(polys), label=label)


def extract_orders(spec: DomainSpec) -> OrderData:
    """Read m_j, k_j and l_j^i off a triangular system with pure powers."""
    n = spec.n
    m = []
    for j, f in enumerate(spec.functions, start=1):
        pm = support_orders(f, j - 1).pure_min
        if pm is None:
            raise NoPurePower(j)
        m.append(pm)
    k = []
    l = {}
    warnings = []
    for j, f in enumerate(spec.functions, start=1):
        pure = [0] * n
        pure[j - 1] = m[j - 1]
        remainder = Polynomial(n, {e: c for e, c in f.items() if e != tuple(pure)})
        k.append(support_orders(remainder, j - 1).max_below(m[j - 1] - 1))
        for i in range(1, j):
            raw = support_orders(remainder, i - 1).min_positive
            if raw is None:
                l[(j, i)] = INF
            elif raw > m[i - 1]:
                w = ClampWarning(j, i, raw, m[i - 1])
                warnings.append(w)
                log.warning("%s", w)
                l[(j, i)] = m[i - 1]
            else:
                l[(j, i)] = raw
    return OrderData(m=tuple(m), k=tuple(k), l=l, clamp_warnings=tuple(warnings))


def validate(spec: DomainSpec) -> ValidatedDomain:
    for j, f in enumerate(spec.functions, start=1):
        late = sorted(v + 1 for v in f.variables() if v + 1 > j)
        if late:
            raise NotTriangular(j, late[0])
        if f.constant_term():
            raise NonzeroConstantTerm(j)
        if support_orders(f, j - 1).pure_min is None:
            raise NoPurePower(j)
    orders = extract_orders(spec)
    leading = []
    warnings = [str(w) for w in orders.clamp_warnings]
    for j, f in enumerate(spec.functions, start=1):
        exps = [0] * spec.n
        exps[j - 1] = orders.m[j - 1]
        c = f.terms[tuple(exps)]
        leading.append(c)
        if c != 1:
            msg = f"coefficient of z{j}^{orders.m[j - 1]} in f_{j} is {c}, not 1 (indices are scale invariant)"
            log.warning("%s", msg)
            warnings.append(msg)
    return ValidatedDomain(spec=spec, orders=orders, leading_coeffs=tuple(leading), warnings=tuple(warnings))


def eval_r(vd: ValidatedDomain, point) -> float | np.ndarray:
    """Defining function ``r = 2 Re z_{n+1} + sum |f_j|^2``.

    Accepts a single point of length n+1 or a batch of shape (N, n+1).
    """
    pts = np.asarray(point, dtype=np.complex128)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != vd.n + 1:
        raise ValueError(f"points must have {vd.n + 1} coordinates")
    fv = vd.f_values(pts[:, : vd.n])
    r = 2.0 * pts[:, vd.n].real + np.sum(np.abs(fv) ** 2, axis=1)
    return float(r[0]) if single else r


def load_domain(path) -> ValidatedDomain:
    return validate(load_spec(Path(path)))
