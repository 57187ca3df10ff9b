"""Scalar backends: exact rationals and arbitrary-precision real/complex floats.

Scalars are plain Python objects so that the hot loops elsewhere can use the
ordinary arithmetic operators:

* ``exact``   -> :class:`fractions.Fraction`
* ``float``   -> ``mpf`` of a private :class:`mpmath.ctx_mp.MPContext`
* ``complex`` -> ``mpc`` of the same kind of context

Every float context has a fixed precision, so values carry their precision with
them (``x.context.prec``).  Python ``int`` is accepted as a backend-neutral
integer literal by all operations.

The checked operations in this module (:func:`add`, :func:`mul`, ...) refuse to
mix backends; nothing is ever promoted silently.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

from mpmath.ctx_mp import MPContext

from .errors import BackendMismatch, DivisionByZero, ParseError, PiNotExact

EXACT = "exact"
FLOAT = "float"
COMPLEX = "complex"
BACKENDS = (EXACT, FLOAT, COMPLEX)

DEFAULT_PRECISION = 256
MIN_PRECISION = 64

Scalar = Union[int, Fraction, "mpf", "mpc"]  # noqa: F821


@functools.lru_cache(maxsize=None)
def float_context(precision: int) -> MPContext:
    """Shared, never-mutated mpmath context working at ``precision`` bits."""
    if precision < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {precision}")
    ctx = MPContext()
    ctx.prec = precision
    return ctx


@dataclass(frozen=True)
class Backend:
    """A backend tag plus (for float backends) its working precision."""

    kind: str = EXACT
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.kind not in BACKENDS:
            raise ValueError(f"unknown backend {self.kind!r}; expected one of {BACKENDS}")
        if self.kind != EXACT and self.precision < MIN_PRECISION:
            raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {self.precision}")

    @property
    def ctx(self) -> MPContext:
        return float_context(self.precision)

    @property
    def is_exact(self) -> bool:
        return self.kind == EXACT

    def convert(self, x) -> Scalar:
        """Explicitly convert ``x`` into this backend.

        Exact rationals and ints convert into every backend; floats never
        convert into the exact backend and complex values only fit ``complex``.
        """
        if self.kind == EXACT:
            if isinstance(x, bool):
                raise TypeError("bool is not a scalar")
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise BackendMismatch(f"cannot represent {x!r} exactly")
        if isinstance(x, Fraction):
            value = self.ctx.mpf(x.numerator) / x.denominator
        elif _is_mpc(x) or isinstance(x, complex):
            if self.kind != COMPLEX:
                raise BackendMismatch(f"complex value {x!r} in real float backend")
            value = self.ctx.mpc(x)
        else:
            value = self.ctx.mpf(x)
        if self.kind == COMPLEX:
            return self.ctx.mpc(value)
        return value

    def zero(self) -> Scalar:
        return self.convert(0)

    def one(self) -> Scalar:
        return self.convert(1)

    def pi(self) -> Scalar:
        if self.kind == EXACT:
            raise PiNotExact("pi has no exact rational representation")
        return self.convert(self.ctx.pi)

    def contains(self, x) -> bool:
        """True if ``x`` may enter a computation on this backend."""
        other = backend_of(x)
        if other is None:
            return True
        if other.kind != self.kind:
            return False
        return self.kind == EXACT or other.precision == self.precision


def _is_mpf(x) -> bool:
    return hasattr(x, "_mpf_")


def _is_mpc(x) -> bool:
    return hasattr(x, "_mpc_")


def backend_of(x) -> Backend | None:
    """Backend of a scalar; ``None`` for plain ints (which fit every backend)."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return None
    if isinstance(x, Fraction):
        return Backend(EXACT)
    if _is_mpc(x):
        return Backend(COMPLEX, x.context.prec)
    if _is_mpf(x):
        return Backend(FLOAT, x.context.prec)
    raise BackendMismatch(f"{type(x).__name__} is not a supported scalar type")


def common_backend(*values) -> Backend | None:
    """The single backend shared by ``values``.

    Float operands of different precision are reconciled to the larger
    precision; different backend kinds raise :class:`BackendMismatch`.
    """
    found: Backend | None = None
    for v in values:
        b = backend_of(v)
        if b is None:
            continue
        if found is None:
            found = b
        elif b.kind != found.kind:
            raise BackendMismatch(f"cannot mix {found.kind} and {b.kind} scalars")
        elif b.precision > found.precision:
            found = b
    return found


def _lift(a, b):
    backend = common_backend(a, b)
    if backend is None or backend.is_exact:
        return a, b
    return backend.convert(a), backend.convert(b)


def add(a, b):
    a, b = _lift(a, b)
    return a + b


def sub(a, b):
    a, b = _lift(a, b)
    return a - b


def mul(a, b):
    a, b = _lift(a, b)
    return a * b


def div(a, b):
    a, b = _lift(a, b)
    if b == 0:
        raise DivisionByZero("division by zero")
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def neg(a):
    backend_of(a)
    return -a


def power(a, n: int):
    """``a`` to the integer power ``n`` (negative ``n`` requires ``a != 0``)."""
    backend_of(a)
    if n < 0:
        if a == 0:
            raise DivisionByZero("zero to a negative power")
        if isinstance(a, int):
            a = Fraction(a)
    return a**n


def is_integer(x) -> bool:
    """True if ``x`` is (exactly) a real integer."""
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if _is_mpc(x):
        return x.imag == 0 and is_integer(x.real)
    ctx = x.context
    return bool(ctx.isint(x))


def to_fraction(x) -> Fraction:
    """Exact rational value of a real scalar (binary floats are exact dyadics)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if _is_mpc(x):
        raise TypeError("complex scalar has no single rational value")
    ctx = x.context
    if not ctx.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    sign, man, exp, _ = x._mpf_
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def magnitude(x):
    """``|x|`` in the scalar's own backend (exact stays exact)."""
    return abs(x)


# --------------------------------------------------------------------------
# literals

_PI_RE = re.compile(r"(?:(?P<mul>\d+)\*?)?pi(?:/(?P<div>\d+))?")
_FRAC_RE = re.compile(r"(?P<num>\d+)/(?P<den>\d+)")
_DEC_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")


def from_literal(text: str, backend: str | Backend = EXACT, precision: int = DEFAULT_PRECISION):
    """Parse a signed numeric literal into a scalar of the requested backend.

    Accepted forms: ``7``, ``-3/2``, ``0.125``, ``1e-3``, ``pi``, ``-pi/2``,
    ``3*pi/4``.  Decimals are taken at their exact rational value in the exact
    backend; pi is rejected there.
    """
    if not isinstance(backend, Backend):
        backend = Backend(backend, precision)
    s = text.strip().replace(" ", "")
    sign = 1
    while s[:1] in ("+", "-"):
        if s[0] == "-":
            sign = -sign
        s = s[1:]
    if not s:
        raise ParseError(f"empty numeric literal in {text!r}")
    m = _PI_RE.fullmatch(s)
    if m:
        value = backend.pi()
        if m.group("mul"):
            value = value * int(m.group("mul"))
        if m.group("div"):
            d = int(m.group("div"))
            if d == 0:
                raise ParseError(f"zero denominator in {text!r}")
            value = value / d
        return value if sign > 0 else -value
    m = _FRAC_RE.fullmatch(s)
    if m:
        den = int(m.group("den"))
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
        exact = Fraction(int(m.group("num")), den)
    elif _DEC_RE.fullmatch(s):
        exact = Fraction(Decimal(s))
    else:
        raise ParseError(f"not a numeric literal: {text!r}")
    return backend.convert(sign * exact)


# --------------------------------------------------------------------------
# rendering


def _digits_of(q: Fraction, digits: int) -> tuple[int, int]:
    """(significand, exponent) with ``10**(digits-1) <= significand < 10**digits``.

    ``|q|`` is approximately ``significand * 10**(exponent - digits + 1)``,
    rounded half to even.
    """
    q = abs(q)
    num, den = q.numerator, q.denominator
    e = len(str(num)) - len(str(den))
    # enforce 10**e <= q < 10**(e+1)
    if num * 10 ** max(-e, 0) < den * 10 ** max(e, 0):
        e -= 1
    scaled = q * Fraction(10) ** (digits - 1 - e)
    sig = round(scaled)  # Fraction.__round__ rounds half to even
    if sig == 10**digits:
        sig //= 10
        e += 1
    return sig, e


def _real_decimal(q: Fraction, digits: int) -> str:
    if q == 0:
        return "0" if digits == 1 else "0." + "0" * (digits - 1)
    sign = "-" if q < 0 else ""
    sig, e = _digits_of(q, digits)
    s = str(sig)
    if -5 <= e < digits:
        if e >= 0:
            body = s[: e + 1] + ("." + s[e + 1 :] if e + 1 < digits else "")
        else:
            body = "0." + "0" * (-e - 1) + s
    else:
        body = s[0] + ("." + s[1:] if digits > 1 else "") + f"e{e:+03d}"
    return sign + body


def to_decimal_string(x, digits: int = 15) -> str:
    """Render ``x`` with ``digits`` significant digits, rounding half to even.

    Fixed notation is used for decimal exponents in ``[-5, digits)``,
    scientific otherwise.  Complex values render as ``"re + im i"``.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if _is_mpc(x):
        re_s = to_decimal_string(x.real, digits)
        im = x.imag
        op = "-" if im < 0 else "+"
        return f"{re_s} {op} {to_decimal_string(abs(im), digits)}i"
    if _is_mpf(x):
        ctx = x.context
        if ctx.isnan(x):
            return "nan"
        if ctx.isinf(x):
            return "inf" if x > 0 else "-inf"
    return _real_decimal(to_fraction(x), digits)
