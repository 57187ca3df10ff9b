"""Command-line front end.

Example (the 4F3 with rational parameters at z = 1/2)::

    epsexp --upper="-4*eps,-1/2-eps,-3/2-2*eps,1/2-3*eps" \\
           --lower="-1/2+2*eps,-1/2+4*eps,1/2+6*eps" --z 1/2 --order 10 --trunc 50

Parameter strings that start with ``-`` must be attached with ``=``.
Exit status: 0 on success, 1 for invalid input, 2 for numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import TextIO

from .engine import (
    Adaptive,
    Appell4Request,
    ExpansionRequest,
    Fixed,
    LaurentSeries,
    LinearParam,
    classify_lower,
    expand_appell_f4,
    expand_pfq,
)
from .errors import EpsExpError, InputError, NumericalError, ParseError
from .numerics import COMPLEX, DEFAULT_PRECISION, EXACT, Backend, from_literal, to_decimal_string
from .oracle import OracleConfig, direct_appell_f4_value, direct_series_value, finite_difference_coeffs

_COEFF = r"(?:\d+\*?)?pi(?:/\d+)?|\d+/\d+|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(
    rf"(?P<sign>[+-])(?P<coeff>{_COEFF})?(?:(?P<istar>\*)?(?P<imag>i(?!\w)))?(?P<estar>\*)?(?P<eps>eps)?"
)


def parse_param(text: str, backend: str | Backend = EXACT, precision: int = DEFAULT_PRECISION) -> LinearParam:
    """Parse ``"A + a*eps"`` style text, e.g. ``"-3/2-2*eps"`` or ``"-pi/2+eps"``.

    Terms are integers, fractions, decimals or pi multiples, optionally times
    ``eps``; in the complex backend a term may also carry the unit ``i``.
    """
    if not isinstance(backend, Backend):
        backend = Backend(backend, precision)
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError(f"empty parameter {text!r}")
    if s[0] not in "+-":
        s = "+" + s
    constant = backend.zero()
    slope = backend.zero()
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos + 1 or not (m["coeff"] or m["imag"] or m["eps"]):
            raise ParseError(f"cannot parse parameter {text!r} at {s[pos:]!r}")
        if (m["istar"] and not m["coeff"]) or (m["estar"] and not (m["coeff"] or m["imag"])):
            raise ParseError(f"misplaced '*' in parameter {text!r}")
        if m["istar"] and m["eps"] and not m["estar"]:
            raise ParseError(f"missing '*' between i and eps in {text!r}")
        value = from_literal(m["coeff"], backend) if m["coeff"] else backend.one()
        if m["imag"]:
            if backend.kind != COMPLEX:
                raise ParseError(f"imaginary unit needs the complex backend: {text!r}")
            value = value * backend.ctx.mpc(0, 1)
        if m["sign"] == "-":
            value = -value
        if m["eps"]:
            slope = slope + value
        else:
            constant = constant + value
        pos = m.end()
    return LinearParam(constant, slope)


def parse_scalar(text: str, backend: Backend):
    """A variable such as ``z``: a parameter string without eps terms."""
    param = parse_param(text, backend)
    if param.slope != 0:
        raise ParseError(f"variable must not depend on eps: {text!r}")
    return param.constant


@dataclass
class CliConfig:
    kind: str = "pfq"
    upper: list = field(default_factory=list)
    lower: list = field(default_factory=list)
    z: str | None = None
    x1: str | None = None
    x2: str | None = None
    order: int = 6
    backend: str = EXACT
    precision: int = DEFAULT_PRECISION
    trunc: str = "auto"
    tol: str = "1e-20"
    m_cap: int = 4096
    m_start: int = 16
    format: str = "text"
    digits: int = 15
    oracle_check: bool = False
    formal: bool = False


def _split_list(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part for part in (p.strip() for p in str(value).split(",")) if part]


def build_request(config: CliConfig):
    if config.kind not in ("pfq", "appell4"):
        raise InputError(f"unknown function kind {config.kind!r}")
    if config.digits < 1:
        raise InputError("--digits must be >= 1")
    backend = Backend(config.backend, config.precision)
    upper = [parse_param(t, backend) for t in _split_list(config.upper)]
    lower = [parse_param(t, backend) for t in _split_list(config.lower)]
    if str(config.trunc).lower() == "auto":
        truncation = Adaptive(M_start=config.m_start, tol=Fraction(str(config.tol)), M_cap=config.m_cap)
    else:
        try:
            truncation = Fixed(int(config.trunc))
        except ValueError:
            raise InputError(f"--trunc must be an integer or 'auto', got {config.trunc!r}") from None
    common = dict(n_max=config.order, truncation=truncation, backend=config.backend, precision=config.precision)
    if config.kind == "pfq":
        if config.z is None:
            raise InputError("pfq needs --z")
        return ExpansionRequest(upper, lower, parse_scalar(config.z, backend), **common)
    if len(upper) != 2 or len(lower) != 2:
        raise InputError("appell4 needs exactly two upper and two lower parameters")
    if config.x1 is None or config.x2 is None:
        raise InputError("appell4 needs --x1 and --x2")
    return Appell4Request(
        upper,
        lower,
        parse_scalar(config.x1, backend),
        parse_scalar(config.x2, backend),
        formal_mode=config.formal,
        **common,
    )


# --------------------------------------------------------------------------
# oracle cross-checks


def _agreement_digits(a, b) -> float:
    diff = abs(a - b)
    if diff == 0:
        return math.inf
    scale = max(abs(a), abs(b))
    if scale == 0:
        return math.inf
    return -math.log10(float(diff / scale))


def oracle_report(request, series: LaurentSeries) -> dict:
    """Finite-difference agreement digits and the Laurent remainder ratio."""
    M = series.m_used if series.m_used else 1
    M = max(M, 1)
    report: dict = {}
    has_pole = isinstance(request, ExpansionRequest) and classify_lower(request.lower)[1]
    if has_pole:
        report["fd_agreement_digits"] = None
    else:
        n_fd = min(request.n_max, 3)
        probe = _with_order(request, n_fd)
        fd = finite_difference_coeffs(probe, OracleConfig(M=M, precision=max(request.precision, 256)))
        report["fd_agreement_digits"] = {
            n: _agreement_digits(_as_float_backend(series[n], fd[n]), fd[n]) for n in range(n_fd + 1)
        }
    backend = request.scalar_backend
    ratios = []
    try:
        remainders = []
        for eps in (Fraction(1, 64), Fraction(1, 128)):
            e = backend.convert(eps)
            remainders.append(abs(_direct_value(request, e, M) - series.evaluate(e)))
        ratios = remainders
    except NumericalError:
        ratios = []
    if len(ratios) == 2 and ratios[1] != 0:
        report["laurent_remainder_ratio"] = float(ratios[0] / ratios[1])
    else:
        report["laurent_remainder_ratio"] = None
    report["expected_ratio"] = 2 ** (request.n_max + 1)
    return report


def _with_order(request, n_max: int):
    from dataclasses import replace

    return replace(request, n_max=n_max)


def _as_float_backend(value, like):
    # engine values may be exact; compare in the oracle's float backend
    if isinstance(value, Fraction):
        return like.context.mpf(value.numerator) / value.denominator
    return value


def _direct_value(request, eps, M: int):
    if isinstance(request, Appell4Request):
        return direct_appell_f4_value(request.upper, request.lower, request.x1, request.x2, eps, M)
    return direct_series_value(request.upper, request.lower, request.z, eps, M)


# --------------------------------------------------------------------------
# rendering


def _imag_part(value):
    return value.imag if hasattr(value, "_mpc_") else None


def _text_value(value, digits: int) -> str:
    if isinstance(value, Fraction) and value.denominator == 1:
        return str(value.numerator)
    return to_decimal_string(value, digits)


def render_text(series: LaurentSeries, digits: int, oracle: dict | None = None) -> str:
    lines = []
    for n, c in series:
        lines.append(f"{'eps^' + str(n):<9} {_text_value(c, digits)}")
    if oracle is not None:
        lines.append("")
        lines.extend(_oracle_lines(oracle))
    return "\n".join(lines) + "\n"


def _fmt_digits(d: float) -> str:
    return "exact" if math.isinf(d) else f"{d:.1f}"


def _oracle_lines(oracle: dict) -> list[str]:
    lines = ["# oracle check"]
    fd = oracle["fd_agreement_digits"]
    if fd is None:
        lines.append("# finite differences: n/a (singular lower parameters)")
    else:
        for n, d in fd.items():
            lines.append(f"# finite-difference agreement eps^{n}: {_fmt_digits(d)} digits")
    ratio = oracle["laurent_remainder_ratio"]
    shown = "n/a" if ratio is None else f"{ratio:.3f}"
    lines.append(f"# laurent remainder ratio (1/64 -> 1/128): {shown} (ideal {oracle['expected_ratio']})")
    return lines


def render_json(series: LaurentSeries, digits: int, oracle: dict | None = None) -> str:
    rows = []
    for n, c in series:
        im = _imag_part(c)
        rows.append(
            {
                "order": n,
                "exact": str(c) if isinstance(c, Fraction) else None,
                "decimal": to_decimal_string(c.real if im is not None else c, digits),
                "imag_decimal": to_decimal_string(im, digits) if im is not None else None,
            }
        )
    meta = series.meta
    payload = {
        "min_order": series.min_order,
        "coefficients": rows,
        "meta": {
            "M_used": series.m_used,
            "backend": meta["backend"],
            "precision_bits": 0 if meta["backend"] == EXACT else meta["precision_bits"],
            "p": meta["p"],
            "q": meta["q"],
            "coincident_thresholds": meta["coincident_thresholds"],
        },
    }
    if oracle is not None:
        fd = oracle["fd_agreement_digits"]
        payload["oracle"] = {
            "fd_agreement_digits": None if fd is None else {str(n): _fmt_digits(d) for n, d in fd.items()},
            "laurent_remainder_ratio": None
            if oracle["laurent_remainder_ratio"] is None
            else f"{oracle['laurent_remainder_ratio']:.6g}",
            "expected_ratio": oracle["expected_ratio"],
        }
    return canonical_json(payload)


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def render_csv(series: LaurentSeries, digits: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    is_complex = any(_imag_part(c) is not None for _, c in series)
    writer.writerow(["order", "decimal", "imag_decimal"] if is_complex else ["order", "decimal"])
    for n, c in series:
        im = _imag_part(c)
        if is_complex:
            writer.writerow([n, to_decimal_string(c.real, digits), to_decimal_string(im, digits)])
        else:
            writer.writerow([n, to_decimal_string(c, digits)])
    return buf.getvalue()


# --------------------------------------------------------------------------
# driver


def run(config: CliConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        request = build_request(config)
        if isinstance(request, Appell4Request):
            series = expand_appell_f4(request)
        else:
            series = expand_pfq(request)
        oracle = oracle_report(request, series) if config.oracle_check else None
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except (NumericalError, EpsExpError) as exc:
        print(f"numerical failure: {exc}", file=err)
        return 2
    if config.format == "json":
        out.write(render_json(series, config.digits, oracle))
    elif config.format == "csv":
        out.write(render_csv(series, config.digits))
        if oracle is not None:
            err.write("\n".join(_oracle_lines(oracle)) + "\n")
    else:
        out.write(render_text(series, config.digits, oracle))
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="epsexp",
        description="eps-expansion of pFq and Appell F4 functions",
        epilog="Attach values that start with '-' using '=', e.g. --upper=-4*eps,1/2-3*eps.",
    )
    p.add_argument("--config", metavar="FILE", help="JSON file mirroring these flags")
    p.add_argument("--kind", choices=["pfq", "appell4"])
    p.add_argument("--upper", help="comma-separated upper parameters, e.g. \"-4*eps,1/2-3*eps\"")
    p.add_argument("--lower", help="comma-separated lower parameters")
    p.add_argument("--z")
    p.add_argument("--x1")
    p.add_argument("--x2")
    p.add_argument("--order", type=int, help="highest eps order (default 6)")
    p.add_argument("--backend", choices=["exact", "float", "complex"])
    p.add_argument("--precision", type=int, help="float working precision in bits (default 256)")
    p.add_argument("--trunc", help="summation bound M, or 'auto' (default)")
    p.add_argument("--tol", help="relative tolerance for --trunc auto (default 1e-20)")
    p.add_argument("--m-cap", type=int, dest="m_cap", help="largest M tried by --trunc auto")
    p.add_argument("--m-start", type=int, dest="m_start", help="first M tried by --trunc auto")
    p.add_argument("--format", choices=["text", "json", "csv"])
    p.add_argument("--digits", type=int, help="significant digits (default 15)")
    p.add_argument("--oracle-check", action="store_true", default=None, dest="oracle_check")
    p.add_argument("--formal", action="store_true", default=None, help="sum F4 outside its convergence domain")
    return p


def config_from_args(argv: list[str] | None = None) -> CliConfig:
    args = make_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(loaded, dict):
            raise InputError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            values[key] = value
    known = {f.name for f in fields(CliConfig)}
    unknown = set(values) - known
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    for key in ("upper", "lower"):
        if key in values:
            values[key] = _split_list(values[key])
    return CliConfig(**values)


def main(argv: list[str] | None = None) -> int:
    try:
        config = config_from_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
