"""Command-line front end.

Exit codes: 0 success, 1 verification failure (a numerical claim is not
met), 2 usage or validation error.  JSON output carries a top-level
``"schema": "levi-gauge/1"`` and writes every exact rational as "p/q".
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import SCHEMA, __version__
from .curves import MonomialCurve, canonical_curve, contact_order, type_report
from .domain import ValidatedDomain, load_spec, validate
from .errors import EmptySample, LeviGaugeError
from .index import Mode, compute_gammas, frac_str
from .verify import run_verification
from .weights import Normalization, WeightFamily, WeightParams

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

DEFAULT_DELTAS = tuple(float(10.0 ** (-k / 2)) for k in range(4, 11))


@dataclass
class RunConfig:
    spec_path: str
    mode: Mode = Mode.T23
    deltas: tuple = DEFAULT_DELTAS
    samples_per_delta: int = 2000
    radius: float = 0.5
    c: float = 0.25
    alpha: Fraction = Fraction(1)
    seed: int = 0
    normalization: Normalization = Normalization.UNIT_RANGE
    output: str | None = None

    def __post_init__(self):
        if any(not 0 < d < 1 for d in self.deltas):
            raise ValueError("every delta must lie in (0, 1)")
        if any(a <= b for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly decreasing")
        if self.samples_per_delta < 0:
            raise ValueError("samples must be >= 0")

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "deltas": list(self.deltas),
            "samples_per_delta": self.samples_per_delta,
            "radius": self.radius,
            "c": self.c,
            "alpha": frac_str(self.alpha),
            "seed": self.seed,
            "normalization": self.normalization.value,
        }


def _dumps(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, allow_nan=False) + "\n"


def _emit(obj, out: str | None):
    text = _dumps(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(config: RunConfig) -> ValidatedDomain:
    path = Path(config.spec_path)
    if not path.is_file():
        raise FileNotFoundError(f"spec file not found: {path}")
    return validate(load_spec(path))


def _family(vd: ValidatedDomain, config: RunConfig) -> WeightFamily:
    params = WeightParams(c=config.c, alpha=config.alpha, mode=config.mode, normalization=config.normalization)
    return WeightFamily(vd, params)


def _analysis(vd: ValidatedDomain, config: RunConfig) -> dict:
    index = compute_gammas(vd.orders, config.mode, config.alpha)
    types = type_report(vd, index)
    return {
        "spec": vd.spec.to_json(),
        "orders": {
            "m": list(vd.orders.m),
            "k": list(vd.orders.k),
            "l": {f"{j},{i}": (None if v == float("inf") else v) for (j, i), v in sorted(vd.orders.l.items())},
        },
        "index": index.to_json(),
        "type": types.to_json(),
        "warnings": list(vd.warnings) + types.warnings,
    }


def _verification(vd: ValidatedDomain, config: RunConfig):
    if config.samples_per_delta == 0:
        raise EmptySample("samples_per_delta must be positive for verification")
    wf = _family(vd, config)
    return wf, run_verification(wf, config.deltas, config.samples_per_delta, config.radius, config.seed)


def run_analyze(config: RunConfig) -> int:
    vd = _load(config)
    _emit(_analysis(vd, config), config.output)
    return EXIT_OK


def run_verify(config: RunConfig) -> int:
    vd = _load(config)
    wf, report = _verification(vd, config)
    body = {"spec": vd.spec.to_json(), "config": config.to_json(), "epsilon": frac_str(wf.index.epsilon)}
    body["verification"] = report.to_json()
    _emit(body, config.output)
    slope = "n/a" if report.fit is None else f"{report.fit.slope:.4f}"
    print(
        f"slope {slope} vs target 2eps = {frac_str(report.target_slope)} "
        f"(threshold {0.9 * float(report.target_slope):.4f}); "
        f"non-positive strip eigenvalues: {sum(s.n_nonpositive for s in report.per_delta)}",
        file=sys.stderr,
    )
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def run_curve(config: RunConfig, curve_arg: str) -> int:
    vd = _load(config)
    if curve_arg.strip().lower() == "canonical":
        curve = canonical_curve(compute_gammas(vd.orders, config.mode, config.alpha))
    else:
        curve = MonomialCurve.parse(curve_arg, vd.n)
    contact = contact_order(vd, curve)
    _emit({"curve": curve.to_json(), "contact": "inf" if contact == float("inf") else frac_str(contact)}, config.output)
    return EXIT_OK


def run_report(config: RunConfig) -> int:
    try:
        vd = _load(config)
        body = {"tool_version": __version__, "config": config.to_json()}
        body.update(_analysis(vd, config))
        _, report = _verification(vd, config)
    except (LeviGaugeError, ValueError, FileNotFoundError) as exc:
        if config.output:
            _emit({"tool_version": __version__, "error": {"type": type(exc).__name__, "message": str(exc)}}, config.output)
        raise
    body["verification"] = report.to_json()
    _emit(body, config.output)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _positive_real(text: str) -> float:
    value = float(_fraction(text)) if "/" in text else float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levi-gauge", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--spec", required=True, help="domain spec JSON file")
        p.add_argument("--mode", default="auto", help="auto | t21 | t22 | t23 (auto = t23)")
        p.add_argument("--alpha", type=_fraction, default=Fraction(1), help="log exponent base alpha >= 1")
        p.add_argument("--out", required=out_required, help="output JSON path (default stdout)")

    def numeric(p):
        p.add_argument("--deltas", type=_positive_real, nargs="+", default=list(DEFAULT_DELTAS))
        p.add_argument("--samples", type=int, default=2000, help="strip samples per delta")
        p.add_argument("--radius", type=_positive_real, default=0.5, help="polydisc radius for sampling")
        p.add_argument("--c", type=_positive_real, default=0.25, help="cutoff amplitude")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--norm", choices=["unit", "raw"], default="unit")

    common(sub.add_parser("analyze", help="exact indices, branch trace and contact bounds"))
    p = sub.add_parser("verify", help="delta-ladder Levi scaling certification")
    common(p)
    numeric(p)
    p = sub.add_parser("curve", help="exact contact order along a monomial curve")
    common(p)
    p.add_argument("--exponents", required=True, help='"a1,...,an" (0 = omitted) or "canonical"')
    p = sub.add_parser("report", help="bundle analysis, curves and verification into one JSON file")
    common(p, out_required=True)
    numeric(p)
    return parser


def _config(args) -> RunConfig:
    kwargs = dict(spec_path=args.spec, mode=Mode.parse(args.mode), alpha=args.alpha, output=args.out)
    if hasattr(args, "deltas"):
        kwargs.update(
            deltas=tuple(args.deltas),
            samples_per_delta=args.samples,
            radius=args.radius,
            c=args.c,
            seed=args.seed,
            normalization=Normalization.parse(args.norm),
        )
    return RunConfig(**kwargs)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        if args.command == "analyze":
            return run_analyze(config)
        if args.command == "verify":
            return run_verify(config)
        if args.command == "curve":
            return run_curve(config, args.exponents)
        return run_report(config)
    except (LeviGaugeError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
