"""Reference computations that share no code path with the engine.

* direct summation of the hypergeometric series at a concrete eps,
* central finite differences of that sum in eps,
* plain power-series evaluators for Li_s and the Nielsen S_{1,2},
* the closed-form harmonic-sum coefficients of the Gauss and Appell fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from sympy import Rational
from sympy.calculus.finite_diff import finite_diff_weights

from .engine import Appell4Request, ExpansionRequest, LinearParam, classify_lower
from .errors import DivergentSeries, InputError, PoleAtEps
from .numerics import COMPLEX, Backend


@dataclass(frozen=True)
class OracleConfig:
    M: int = 50
    precision: int = 256
    h: Fraction = Fraction(1, 10**12)

    def __post_init__(self):
        if self.M < 1:
            raise InputError("oracle M must be >= 1")
        if self.precision < 128:
            raise InputError("finite differences need precision >= 128 bits")
        h = self.h if isinstance(self.h, Fraction) else Fraction(str(self.h))
        if not 0 < h < 1:
            raise InputError("finite-difference step must lie in (0, 1)")
        object.__setattr__(self, "h", h)


def _one(x):
    return Fraction(1) if isinstance(x, (int, Fraction)) else x * 0 + 1


def direct_series_value(upper: Sequence[LinearParam], lower: Sequence[LinearParam], z, eps, M: int):
    """``sum_{m=0}^{M} prod (alpha_i)_m / prod (beta_j)_m z^m / m!`` at ``eps``."""
    alphas = [p.at(eps) for p in upper]
    betas = [p.at(eps) for p in lower]
    term = _one(z)
    total = term
    for m in range(M):
        num = z * term
        den = m + 1
        for a in alphas:
            num = num * (a + m)
        for b in betas:
            if b + m == 0:
                raise PoleAtEps(f"lower parameter {b} + {m} vanishes at eps={eps}")
            den = den * (b + m)
        term = num / den
        total = total + term
    return total


def direct_appell_f4_value(upper, lower, x1, x2, eps, M: int):
    """``F4`` double sum over ``m1 + m2 <= M`` at ``eps``."""
    a1, a2 = (p.at(eps) for p in upper)
    b1, b2 = (p.at(eps) for p in lower)
    one = _one(x1)
    col = [one]  # x1^m / ((b1)_m m!)
    for m in range(M):
        if b1 + m == 0:
            raise PoleAtEps(f"lower parameter {b1} + {m} vanishes at eps={eps}")
        col.append(col[-1] * x1 / ((b1 + m) * (m + 1)))
    row = [one]
    for m in range(M):
        if b2 + m == 0:
            raise PoleAtEps(f"lower parameter {b2} + {m} vanishes at eps={eps}")
        row.append(row[-1] * x2 / ((b2 + m) * (m + 1)))
    total = one * 0
    upper_poch = one
    for s in range(M + 1):
        if s > 0:
            upper_poch = upper_poch * (a1 + s - 1) * (a2 + s - 1)
        diag = one * 0
        for m1 in range(s + 1):
            diag = diag + col[m1] * row[s - m1]
        total = total + upper_poch * diag
    return total


def _float_params(params, backend: Backend):
    return [LinearParam(backend.convert(p.constant), backend.convert(p.slope)) for p in params]


def _fd_backend(request, precision: int) -> Backend:
    kind = COMPLEX if request.backend == COMPLEX else "float"
    return Backend(kind, precision)


def finite_difference_coeffs(request, config: OracleConfig) -> list:
    """Taylor coefficients ``0 .. n_max`` from central differences in eps.

    Order ``n`` uses the ``2n+1`` point stencil ``-n h .. n h`` (no Richardson
    extrapolation), evaluated with the direct series at ``config.precision``.
    Accuracy degrades as ``n`` grows.
    """
    backend = _fd_backend(request, config.precision)
    upper = _float_params(request.upper, backend)
    lower = _float_params(request.lower, backend)
    if isinstance(request, ExpansionRequest):
        _, thresholds = classify_lower(request.lower)
        if thresholds:
            raise InputError("finite differences cannot see Laurent poles; all lower parameters must be regular")
        z = backend.convert(request.z)

        def value(eps):
            return direct_series_value(upper, lower, z, eps, config.M)

    elif isinstance(request, Appell4Request):
        x1, x2 = backend.convert(request.x1), backend.convert(request.x2)

        def value(eps):
            return direct_appell_f4_value(upper, lower, x1, x2, eps, config.M)

    else:
        raise InputError(f"unsupported request type {type(request).__name__}")
    return finite_difference_from(value, request.n_max, config.h, backend)


def finite_difference_from(value: Callable, n_max: int, h: Fraction, backend: Backend) -> list:
    ctx = backend.ctx
    step = ctx.mpf(h.numerator) / h.denominator
    samples = {j: value(step * j) for j in range(-n_max, n_max + 1)}
    coeffs = []
    for n in range(n_max + 1):
        grid = [Rational(j) for j in range(-n, n + 1)]
        weights = finite_diff_weights(n, grid, 0)[n][-1]
        acc = backend.zero()
        for j, w in zip(range(-n, n + 1), weights):
            if w != 0:
                acc += samples[j] * ctx.mpf(int(w.p)) / int(w.q)
        coeffs.append(acc / (step**n * math.factorial(n)))
    return coeffs


# --------------------------------------------------------------------------
# series for the closed-form fixtures


def _check_disk(z):
    if not abs(z) < 1:
        raise DivergentSeries(f"series needs |z| < 1, got {z}")


def polylog(s: int, z, M: int):
    """Partial sum ``sum_{m=1}^{M} z^m / m^s``."""
    if s < 2:
        raise InputError("polylog order must be >= 2")
    _check_disk(z)
    total = _one(z) * 0
    zm = _one(z)
    for m in range(1, M + 1):
        zm = zm * z
        total += zm / m**s
    return total


def nielsen_s12(z, M: int):
    """Partial sum ``sum_{m=2}^{M} z^m H_{m-1} / m^2``."""
    _check_disk(z)
    total = _one(z) * 0
    zm = _one(z) * z
    h = Fraction(0)
    for m in range(2, M + 1):
        zm = zm * z
        h += Fraction(1, m - 1)
        total += zm * _like(h, z) / m**2
    return total


def _like(q: Fraction, x):
    # a rational in the backend of x
    if isinstance(x, (int, Fraction)):
        return q
    return _one(x) * q.numerator / q.denominator


def gauss_c2_c3_reference(a1, a2, b1, z, M: int):
    """Order 2 and 3 coefficients of ``2F1(a1 eps, a2 eps; 1 + b1 eps; z)``."""
    li2 = polylog(2, z, M)
    li3 = polylog(3, z, M)
    s12 = nielsen_s12(z, M)
    c2 = a1 * a2 * li2
    c3 = a1 * a2 * (-b1 * li3 + (a1 + a2 - b1) * s12)
    return c2, c3


def _harmonics(n: int) -> list[Fraction]:
    out = [Fraction(0)]
    for l in range(1, n + 1):
        out.append(out[-1] + Fraction(1, l))
    return out


def appell_c_reference(n: int, x1, x2, M: int):
    """Order ``n`` (0, 1 or 2) coefficient of ``F4(1, 1+eps; 1+eps, 1+eps; x1, x2)``.

    Direct double sums over ``m1 + m2 <= M`` of binomial squares weighted by
    harmonic-number expressions.  The order-2 weight is::

        sum_{l=2}^{s} H_{l-1}/l - H_s (H_{m1} + H_{m2}) + H_{m1} H_{m2}
            + sum_{l=1}^{m1} (-1)^(l-1) C(m1, l)/l^2 + (same for m2)

    with ``s = m1 + m2``.
    """
    if n not in (0, 1, 2):
        raise InputError("closed forms exist for orders 0, 1, 2 only")
    H = _harmonics(M)
    nested = [Fraction(0)]  # sum_{l=2}^{s} H_{l-1}/l
    for s in range(1, M + 1):
        nested.append(nested[-1] + (H[s - 1] / s if s >= 2 else 0))
    alt = []  # sum_{l=1}^{m} (-1)^(l-1) C(m, l)/l^2
    for m in range(M + 1):
        alt.append(sum((Fraction((-1) ** (l - 1) * math.comb(m, l), l * l) for l in range(1, m + 1)), Fraction(0)))

    total = _one(x1) * 0
    for m1 in range(M + 1):
        for m2 in range(M + 1 - m1):
            s = m1 + m2
            if n == 0:
                w = Fraction(1)
            elif n == 1:
                w = H[s] - H[m1] - H[m2]
            else:
                w = nested[s] - H[s] * (H[m1] + H[m2]) + alt[m1] + H[m1] * H[m2] + alt[m2]
            if w == 0:
                continue
            total += _like(math.comb(s, m1) ** 2 * w, x1) * x1**m1 * x2**m2
    return total
