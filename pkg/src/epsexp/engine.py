"""Assembly of eps-expansion coefficients for pFq and Appell F4.

Every parameter is linear in eps, ``A + a*eps``.  For each summation index the
Taylor vector of each Pochhammer factor is ``[a**k * P(A, m, k)]`` (upper) or
``[b**k * Q(B, m, k)]`` (lower), and the Taylor vector of the whole term is
their truncated Cauchy product.  Lower parameters ``-N + b*eps`` with ``b != 0``
are *singular*: once ``m > N`` their reciprocal Pochhammer symbol carries a
``1/(b*eps)`` pole, which is split off and the remaining regularized symbol is
expanded instead.  A term with ``j`` split-off poles shifts its contribution
down by ``j`` orders and divides it by the product of the ``j`` slopes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import (
    BackendMismatch,
    DivergentSeries,
    InputError,
    TruncationNotConverged,
    UnresolvablePole,
)
from .numerics import DEFAULT_PRECISION, EXACT, FLOAT, Backend, common_backend, is_integer
from .pochhammer import p_initial_row, p_row_next, p_deriv_row, q_deriv_row, q_hat_row, q_row_next


@dataclass(frozen=True)
class LinearParam:
    """The parameter ``constant + slope * eps``."""

    constant: object
    slope: object = 0

    def at(self, eps):
        return self.constant + self.slope * eps

    def __str__(self):
        return f"{self.constant} + {self.slope}*eps"


@dataclass(frozen=True)
class LowerClassification:
    kind: str  # "regular" or "singular"
    threshold: int | None = None

    @property
    def singular(self) -> bool:
        return self.kind == "singular"


REGULAR = LowerClassification("regular")


@dataclass(frozen=True)
class Fixed:
    """Sum the series up to and including index ``M``."""

    M: int = 50

    def __post_init__(self):
        if self.M < 1:
            raise InputError("truncation M must be >= 1")


@dataclass(frozen=True)
class Adaptive:
    """Double ``M`` from ``M_start`` until every coefficient settles to ``tol``."""

    M_start: int = 16
    tol: Fraction = Fraction(1, 10**20)
    M_cap: int = 4096

    def __post_init__(self):
        tol = self.tol
        if not isinstance(tol, Fraction):
            tol = Fraction(str(tol)) if isinstance(tol, (float, str)) else Fraction(tol)
            object.__setattr__(self, "tol", tol)
        if self.M_start < 8:
            raise InputError("adaptive M_start must be >= 8")
        if self.M_cap < self.M_start:
            raise InputError("adaptive M_cap must be >= M_start")
        if tol <= 0:
            raise InputError("adaptive tol must be positive")


TruncationPolicy = Union[Fixed, Adaptive]


def _nonpositive_integer(x) -> int | None:
    """``N`` if ``x == -N`` for a nonnegative integer ``N``, else None."""
    if is_integer(x):
        value = x.real if hasattr(x, "_mpc_") else x
        if value <= 0:
            return int(-value)
    return None


def classify_lower(lower: Sequence[LinearParam]) -> tuple[list[LowerClassification], list[int]]:
    """Tag each lower parameter and return the sorted singular thresholds."""
    classes = []
    for i, param in enumerate(lower):
        N = _nonpositive_integer(param.constant)
        if N is None:
            classes.append(REGULAR)
        elif param.slope == 0:
            raise UnresolvablePole(
                f"lower parameter {i + 1} equals {param.constant} independently of eps"
            )
        else:
            classes.append(LowerClassification("singular", N))
    thresholds = sorted(c.threshold for c in classes if c.singular)
    return classes, thresholds


def termination_index(upper: Sequence[LinearParam]) -> int | None:
    """Smallest ``K`` such that some upper parameter is the constant ``-K``."""
    ks = [
        _nonpositive_integer(p.constant)
        for p in upper
        if p.slope == 0 and _nonpositive_integer(p.constant) is not None
    ]
    return min(ks) if ks else None


def _normalize(params, backend: Backend) -> tuple[LinearParam, ...]:
    out = []
    for p in params:
        if not isinstance(p, LinearParam):
            p = LinearParam(*p) if isinstance(p, tuple) else LinearParam(p)
        out.append(LinearParam(_in_backend(p.constant, backend), _in_backend(p.slope, backend)))
    return tuple(out)


def _in_backend(x, backend: Backend):
    if not backend.contains(x):
        raise BackendMismatch(f"{x!r} does not belong to the {backend.kind} backend")
    return backend.convert(x) if isinstance(x, int) else x


@dataclass(frozen=True)
class ExpansionRequest:
    """Expansion of ``pFq(upper; lower; z)`` to order ``eps**n_max``.

    Parameters may be given as :class:`LinearParam`, ``(constant, slope)``
    tuples or bare constants.  Python ints are accepted in any backend; every
    other scalar must already belong to ``backend`` at ``precision``.
    """

    upper: Sequence[LinearParam]
    lower: Sequence[LinearParam]
    z: object
    n_max: int = 6
    truncation: TruncationPolicy = field(default_factory=Fixed)
    backend: str = EXACT
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        sb = Backend(self.backend, self.precision)
        object.__setattr__(self, "upper", _normalize(self.upper, sb))
        object.__setattr__(self, "lower", _normalize(self.lower, sb))
        object.__setattr__(self, "z", _in_backend(self.z, sb))
        if self.n_max < 0:
            raise InputError("n_max must be nonnegative")
        classify_lower(self.lower)
        p, q = self.p, self.q
        if termination_index(self.upper) is None:
            if p == q + 1 and not abs(self.z) < 1:
                raise DivergentSeries(f"{p}F{q} series needs |z| < 1, got |z| = {abs(self.z)}")
            if p > q + 1 and self.z != 0:
                raise DivergentSeries(f"{p}F{q} series diverges for z != 0 unless it terminates")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def scalar_backend(self) -> Backend:
        return Backend(self.backend, self.precision)


@dataclass(frozen=True)
class Appell4Request:
    """Expansion of ``F4(upper; lower; x1, x2)`` to order ``eps**n_max``."""

    upper: Sequence[LinearParam]
    lower: Sequence[LinearParam]
    x1: object
    x2: object
    n_max: int = 2
    truncation: TruncationPolicy = field(default_factory=Fixed)
    backend: str = EXACT
    precision: int = DEFAULT_PRECISION
    formal_mode: bool = False

    def __post_init__(self):
        sb = Backend(self.backend, self.precision)
        object.__setattr__(self, "upper", _normalize(self.upper, sb))
        object.__setattr__(self, "lower", _normalize(self.lower, sb))
        object.__setattr__(self, "x1", _in_backend(self.x1, sb))
        object.__setattr__(self, "x2", _in_backend(self.x2, sb))
        if len(self.upper) != 2 or len(self.lower) != 2:
            raise InputError("Appell F4 takes exactly two upper and two lower parameters")
        if self.n_max < 0:
            raise InputError("n_max must be nonnegative")
        classes, _ = classify_lower(self.lower)
        if any(c.singular for c in classes):
            raise InputError("singular lower parameters are not supported for Appell F4")
        if not self.formal_mode and termination_index(self.upper) is None:
            a, b = abs(self.x1), abs(self.x2)
            rest = 1 - a - b
            # sqrt(a) + sqrt(b) < 1, squared twice
            if not (rest > 0 and 4 * a * b < rest * rest):
                raise DivergentSeries(
                    "F4 series needs sqrt|x1| + sqrt|x2| < 1; set formal_mode to sum anyway"
                )

    @property
    def p(self) -> int:
        return 2

    @property
    def q(self) -> int:
        return 2

    @property
    def scalar_backend(self) -> Backend:
        return Backend(self.backend, self.precision)


@dataclass(frozen=True)
class LaurentSeries:
    """Coefficients for orders ``min_order .. n_max`` of an eps-expansion."""

    min_order: int
    coeffs: tuple
    m_used: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_max(self) -> int:
        return self.min_order + len(self.coeffs) - 1

    @property
    def orders(self) -> range:
        return range(self.min_order, self.n_max + 1)

    def __getitem__(self, order: int):
        if not self.min_order <= order <= self.n_max:
            raise KeyError(order)
        return self.coeffs[order - self.min_order]

    def __iter__(self):
        return iter(zip(self.orders, self.coeffs))

    def evaluate(self, eps):
        """Truncated Laurent sum at ``eps``."""
        total = 0
        for n, c in self:
            total += c * eps**n
        return total


# --------------------------------------------------------------------------
# factor vectors


def _scaled(row: list, powers: list) -> list:
    return [r * s for r, s in zip(row, powers)]


def _powers(x, n: int, one) -> list:
    out = [one]
    for _ in range(n):
        out.append(out[-1] * x)
    return out


def factor_vector(param: LinearParam, role: str, m: int, n_max: int, N: int | None = None) -> list:
    """Taylor vector in eps (orders ``0..n_max``) of one factor of term ``m``.

    ``role`` is ``"upper"`` for ``(A + a eps)_m``, ``"lower"`` for
    ``1/(B + b eps)_m`` with regular ``B``, and ``"singular"`` for the
    regularized ``b eps/(-N + b eps)_m`` with ``m > N``.
    """
    A, a = param.constant, param.slope
    one = p_initial_row(A, 0)[0]
    if role == "upper":
        row = p_deriv_row(A, m, n_max)
    elif role == "lower":
        row = q_deriv_row(A, m, n_max)
    elif role == "singular":
        if N is None:
            raise InputError("singular role needs a threshold N")
        row = q_hat_row(N, A, m, n_max)
    else:
        raise InputError(f"unknown factor role {role!r}")
    return _scaled(row, _powers(a, n_max, one))


def _cauchy(u: list, v: list) -> list:
    n = len(u)
    out = []
    for k in range(n):
        acc = u[0] * v[k]
        for j in range(1, k + 1):
            acc += u[j] * v[k - j]
        out.append(acc)
    return out


def combine_factors(vectors: Sequence[Sequence]) -> list:
    """Truncated product of Taylor vectors that all have the same length."""
    if not vectors:
        raise InputError("need at least one vector")
    length = len(vectors[0])
    if any(len(v) != length for v in vectors):
        raise InputError("factor vectors must have equal length")
    common_backend(*(x for v in vectors for x in v))
    out = list(vectors[0])
    for v in vectors[1:]:
        out = _cauchy(out, list(v))
    return out


# --------------------------------------------------------------------------
# pFq


class _LowerStepper:
    """Taylor row of one lower factor, advanced one ``m`` at a time."""

    __slots__ = ("beta", "N", "row", "powers", "m")

    def __init__(self, param: LinearParam, cls: LowerClassification, width: int, one):
        self.beta = param.constant
        self.N = cls.threshold
        self.row = p_initial_row(param.constant, width - 1)
        self.powers = _powers(param.slope, width - 1, one)
        self.m = 0

    def advance(self):
        m = self.m
        # the regularized row at N+1 equals the plain row at N
        if self.N is None or m != self.N:
            self.row = q_row_next(self.row, self.beta, m)
        self.m = m + 1

    def vector(self):
        return _scaled(self.row, self.powers)


class _UpperStepper:
    __slots__ = ("alpha", "row", "powers", "m")

    def __init__(self, param: LinearParam, width: int, one):
        self.alpha = param.constant
        self.row = p_initial_row(param.constant, width - 1)
        self.powers = _powers(param.slope, width - 1, one)
        self.m = 0

    def advance(self):
        self.row = p_row_next(self.row, self.alpha, self.m)
        self.m += 1

    def vector(self):
        return _scaled(self.row, self.powers)


def _effective_limit(M: int, upper, z) -> int:
    K = termination_index(upper)
    if K is not None:
        M = min(M, K)
    if z == 0:
        M = 0
    return M


def _pfq_partial_sums(req: ExpansionRequest, stops: Sequence[int]) -> Iterator[tuple[int, list]]:
    """Yield ``(M, coeffs)`` for each ``M`` in the increasing list ``stops``."""
    sb = req.scalar_backend
    one, zero = sb.one(), sb.zero()
    classes, thresholds = classify_lower(req.lower)
    r = len(thresholds)
    width = req.n_max + r + 1
    uppers = [_UpperStepper(p, width, one) for p in req.upper]
    lowers = [_LowerStepper(p, c, width, one) for p, c in zip(req.lower, classes)]
    singular = [(c.threshold, p.slope) for p, c in zip(req.lower, classes) if c.singular]

    limit = _effective_limit(stops[-1], req.upper, req.z)
    unit = [one] + [zero] * (width - 1)
    acc = [zero] * (req.n_max + r + 1)  # acc[i] holds order i - r
    z_term = one
    stop_iter = iter(stops)
    stop = next(stop_iter)
    m = 0
    while True:
        if m > 0:
            for s in uppers:
                s.advance()
            for s in lowers:
                s.advance()
            z_term = z_term * req.z / m
        prod = unit
        for s in uppers + lowers:
            prod = _cauchy(prod, s.vector())
        j = 0
        divisor = one
        for N, b in singular:
            if N < m:
                j += 1
                divisor = divisor * b
        weight = z_term / divisor
        for k in range(width - r + j):
            acc[k - j + r] += weight * prod[k]
        while m >= stop or m >= limit:
            yield stop, list(acc)
            stop = next(stop_iter, None)
            if stop is None:
                return
            if m >= limit:
                continue
            break
        m += 1


def _series(req, coeffs: list, M: int, m_used: int) -> LaurentSeries:
    thresholds = []
    if isinstance(req, ExpansionRequest):
        _, thresholds = classify_lower(req.lower)
    meta = {
        "M_requested": M,
        "backend": req.backend,
        "precision_bits": req.precision,
        "p": req.p,
        "q": req.q,
        "singular_thresholds": thresholds,
        "coincident_thresholds": len(set(thresholds)) < len(thresholds),
    }
    return LaurentSeries(-len(thresholds), tuple(coeffs), m_used, meta)


def _sums(req, stops):
    if isinstance(req, Appell4Request):
        return _appell_partial_sums(req, stops)
    return _pfq_partial_sums(req, stops)


def _limit(req, M: int) -> int:
    if isinstance(req, Appell4Request):
        K = termination_index(req.upper)
        if req.x1 == 0 and req.x2 == 0:
            return 0
        return M if K is None else min(M, K)
    return _effective_limit(M, req.upper, req.z)


def _fixed(req, M: int) -> LaurentSeries:
    (_, coeffs), = list(_sums(req, [M]))
    return _series(req, coeffs, M, _limit(req, M))


def expand_pfq(request: ExpansionRequest) -> LaurentSeries:
    """Laurent coefficients of ``pFq`` for orders ``-r .. n_max``."""
    if not isinstance(request, ExpansionRequest):
        raise InputError("expand_pfq takes an ExpansionRequest")
    if isinstance(request.truncation, Adaptive):
        return run_adaptive(request)[0]
    return _fixed(request, request.truncation.M)


def expand_appell_f4(request: Appell4Request) -> LaurentSeries:
    """Taylor coefficients of Appell ``F4`` for orders ``0 .. n_max``.

    The truncation bound applies to ``m1 + m2``.
    """
    if not isinstance(request, Appell4Request):
        raise InputError("expand_appell_f4 takes an Appell4Request")
    if isinstance(request.truncation, Adaptive):
        return run_adaptive(request)[0]
    return _fixed(request, request.truncation.M)


def _settled(new: list, old: list, tol) -> bool:
    for a, b in zip(new, old):
        change = abs(a - b)
        size = abs(a)
        if size < tol:
            if not change < tol:
                return False
        elif not change < tol * size:
            return False
    return True


def run_adaptive(request) -> tuple[LaurentSeries, int]:
    """Sum with ``M = M_start, 2 M_start, ...`` until consecutive rounds agree.

    Returns the series of the last round and the ``M`` it used.
    """
    policy = request.truncation
    if not isinstance(policy, Adaptive):
        raise InputError("run_adaptive needs an Adaptive truncation policy")
    stops = [policy.M_start]
    while stops[-1] * 2 <= policy.M_cap:
        stops.append(stops[-1] * 2)
    if stops[-1] < policy.M_cap:
        stops.append(policy.M_cap)
    # compared against magnitudes, so the tolerance stays real
    tol = policy.tol if request.backend == EXACT else Backend(FLOAT, request.precision).convert(policy.tol)
    # index of the last nonzero term when the series is a finite sum
    exact_limit = _limit(request, sys.maxsize)
    previous = None
    for M, coeffs in _sums(request, stops):
        if M >= exact_limit:
            # the series is a finite sum and M covers it
            return _series(request, coeffs, M, exact_limit), exact_limit
        if previous is not None and _settled(coeffs, previous, tol):
            return _series(request, coeffs, M, M), M
        previous = coeffs
    raise TruncationNotConverged(
        f"coefficients did not settle to tol={policy.tol} by M_cap={policy.M_cap}",
        m_used=policy.M_cap,
    )


# --------------------------------------------------------------------------
# Appell F4


def _appell_partial_sums(req: Appell4Request, stops: Sequence[int]) -> Iterator[tuple[int, list]]:
    sb = req.scalar_backend
    one, zero = sb.one(), sb.zero()
    width = req.n_max + 1
    uppers = [_UpperStepper(p, width, one) for p in req.upper]
    regular = LowerClassification("regular")
    steppers = [_LowerStepper(p, regular, width, one) for p in req.lower]
    lower_vecs: list[list] = [[s.vector()] for s in steppers]
    x_terms = [[one], [one]]  # x**m / m!
    xs = (req.x1, req.x2)

    limit = _limit(req, stops[-1])
    acc = [zero] * width
    stop_iter = iter(stops)
    stop = next(stop_iter)
    s = 0
    while True:
        if s > 0:
            for u in uppers:
                u.advance()
            for i, st in enumerate(steppers):
                st.advance()
                lower_vecs[i].append(st.vector())
                x_terms[i].append(x_terms[i][-1] * xs[i] / s)
        upper_prod = _cauchy(uppers[0].vector(), uppers[1].vector())
        for m1 in range(s + 1):
            m2 = s - m1
            weight = x_terms[0][m1] * x_terms[1][m2]
            if weight == 0:
                continue
            prod = _cauchy(_cauchy(upper_prod, lower_vecs[0][m1]), lower_vecs[1][m2])
            for k in range(width):
                acc[k] += weight * prod[k]
        while s >= stop or s >= limit:
            yield stop, list(acc)
            stop = next(stop_iter, None)
            if stop is None:
                return
            if s >= limit:
                continue
            break
        s += 1
