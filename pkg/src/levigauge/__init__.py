"""Exact subellipticity indices and numerically certified weights for regular coordinate domains."""

from .domain import DomainSpec, OrderData, ValidatedDomain, eval_r, extract_orders, load_domain, load_spec, validate
from .index import Branch, IndexReport, Mode, alpha_exponents, compute_gammas, multiplicity
from .poly import GaussianRational, Polynomial, parse_poly
from .weights import Normalization, WeightFamily, WeightParams

SCHEMA = "levi-gauge/1"
__version__ = "0.1.0"

__all__ = [
    "SCHEMA",
    "Branch",
    "DomainSpec",
    "GaussianRational",
    "IndexReport",
    "Mode",
    "Normalization",
    "OrderData",
    "Polynomial",
    "ValidatedDomain",
    "WeightFamily",
    "WeightParams",
    "alpha_exponents",
    "compute_gammas",
    "eval_r",
    "extract_orders",
    "load_domain",
    "load_spec",
    "multiplicity",
    "parse_poly",
    "validate",
]
