"""Pochhammer symbols and their derivatives with respect to the argument.

All derivative kernels are k!-normalized, i.e. Taylor coefficients::

    P(alpha, m, k)   = 1/k! d^k/dalpha^k (alpha)_m
    Q(beta, m, k)    = 1/k! d^k/dbeta^k  1/(beta)_m
    Qhat(N, beta, m, k) = 1/k! d^k/dbeta^k (beta + N)/(beta)_m      (m > N)

The last one is the regularized reciprocal symbol: for ``beta = -N + b*eps`` the
factor ``b*eps`` cancels the vanishing factor of ``(beta)_m``.

Each kernel comes twice: an alternating closed form (``*_deriv``) and a
stable recurrence over ``m`` (``*_row``).  The float backends should use the
rows; the closed forms lose digits to cancellation at large ``m`` and are kept
for exact cross-checks.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from .errors import OutOfRange, PoleAtBeta


class StirlingTable:
    """Signed Stirling numbers of the first kind ``s(n, k)`` for ``n <= n_max``.

    Built with ``s(n+1, k) = s(n, k-1) - n s(n, k)``.  Instances are never
    mutated after construction.
    """

    __slots__ = ("n_max", "entries")

    def __init__(self, n_max: int):
        if n_max < 0:
            raise OutOfRange("n_max must be nonnegative")
        rows = [[1]]
        for n in range(n_max):
            prev = rows[-1]
            row = [0] * (n + 2)
            for k in range(1, n + 2):
                left = prev[k - 1]
                right = prev[k] if k <= n else 0
                row[k] = left - n * right
            rows.append(row)
        self.n_max = n_max
        self.entries = tuple(tuple(r) for r in rows)

    def __call__(self, n: int, k: int) -> int:
        return stirling(n, k, self)

    def __repr__(self):
        return f"StirlingTable(n_max={self.n_max})"


@functools.lru_cache(maxsize=8)
def stirling_table(n_max: int) -> StirlingTable:
    return StirlingTable(n_max)


def stirling(n: int, k: int, table: StirlingTable | None = None) -> int:
    """Signed Stirling number of the first kind ``s(n, k)``."""
    if table is None:
        table = stirling_table(max(n, 0))
    if not 0 <= k <= n <= table.n_max:
        raise OutOfRange(f"s({n}, {k}) outside table with n_max={table.n_max}")
    return table.entries[n][k]


def harmonic(m: int) -> Fraction:
    """``H_m = 1 + 1/2 + ... + 1/m`` as an exact rational."""
    if m < 0:
        raise OutOfRange("harmonic number of negative index")
    return sum((Fraction(1, l) for l in range(1, m + 1)), Fraction(0))


def _one_like(x):
    if isinstance(x, int):
        return Fraction(1)
    return x * 0 + 1


def pochhammer(alpha, m: int):
    """Rising factorial ``alpha (alpha+1) ... (alpha+m-1)``."""
    if m < 0:
        raise OutOfRange("Pochhammer index must be nonnegative")
    result = _one_like(alpha)
    for l in range(m):
        result *= alpha + l
    return result


# --------------------------------------------------------------------------
# Pochhammer derivatives


def p_deriv(alpha, m: int, k: int, table: StirlingTable | None = None):
    """``P(alpha, m, k)`` from the binomial/Stirling closed form."""
    if m < 0 or k < 0:
        raise OutOfRange("m and k must be nonnegative")
    if table is None:
        table = stirling_table(m)
    if table.n_max < m:
        raise OutOfRange(f"Stirling table too small for m={m}")
    zero = _one_like(alpha) * 0
    if k > m:
        return zero
    total = zero
    poch = _one_like(alpha)
    for l in range(m - k + 1):
        term = math.comb(m, l) * table.entries[m - l][k] * poch
        total = total - term if l % 2 else total + term
        poch *= alpha + l
    return total if (m - k) % 2 == 0 else -total


def p_row_next(row: list, alpha, m: int) -> list:
    """Row ``m+1`` of ``P(alpha, ., k)`` from row ``m``."""
    shift = alpha + m
    out = [row[0] * shift]
    for k in range(1, len(row)):
        out.append(row[k] * shift + row[k - 1])
    return out


def p_initial_row(alpha, k_max: int) -> list:
    one = _one_like(alpha)
    return [one] + [one * 0] * k_max


def p_deriv_row(alpha, m: int, k_max: int) -> list:
    """``[P(alpha, m, k) for k in 0..k_max]`` via the recurrence in ``m``."""
    if m < 0 or k_max < 0:
        raise OutOfRange("m and k_max must be nonnegative")
    row = p_initial_row(alpha, k_max)
    for j in range(m):
        row = p_row_next(row, alpha, j)
    return row


# --------------------------------------------------------------------------
# reciprocal Pochhammer derivatives


def _check_poles(beta, m: int, skip: int | None = None):
    for l in range(m):
        if l != skip and beta + l == 0:
            raise PoleAtBeta(f"beta + {l} vanishes (beta={beta}, m={m})")


def _partial_fraction_weight(one, l: int, m: int):
    # residue of 1/(beta)_m at beta = -l, in the backend of ``one``
    w = one / (math.factorial(l) * math.factorial(m - 1 - l))
    return -w if l % 2 else w


def q_deriv(beta, m: int, k: int):
    """``Q(beta, m, k)`` from the partial-fraction closed form."""
    if m < 0 or k < 0:
        raise OutOfRange("m and k must be nonnegative")
    one = _one_like(beta)
    if m == 0:
        return one if k == 0 else one * 0
    _check_poles(beta, m)
    if k == 0:
        return one / pochhammer(beta, m)
    total = one * 0
    for l in range(m):
        total += _partial_fraction_weight(one, l, m) / (beta + l) ** (k + 1)
    return -total if k % 2 else total


def q_row_next(row: list, beta, m: int) -> list:
    """Row ``m+1`` of ``Q(beta, ., k)`` from row ``m``.

    Also advances the regularized rows for ``m > N``.
    """
    shift = beta + m
    if shift == 0:
        raise PoleAtBeta(f"beta + {m} vanishes (beta={beta})")
    out = [row[0] / shift]
    for k in range(1, len(row)):
        out.append((row[k] - out[k - 1]) / shift)
    return out


def q_deriv_row(beta, m: int, k_max: int) -> list:
    """``[Q(beta, m, k) for k in 0..k_max]`` via the recurrence in ``m``."""
    if m < 0 or k_max < 0:
        raise OutOfRange("m and k_max must be nonnegative")
    row = p_initial_row(beta, k_max)
    for j in range(m):
        row = q_row_next(row, beta, j)
    return row


def q_hat_deriv(N: int, beta, m: int, k: int):
    """``Qhat(N, beta, m, k)`` from the closed form.

    Pass ``beta = -N`` for the value at eps = 0.  For ``m == 1`` the symbol is
    the constant 1, which the closed form carries as a Kronecker term at k = 0.
    """
    if not 0 <= N < m:
        raise OutOfRange(f"regularized symbol needs 0 <= N < m, got N={N}, m={m}")
    if k < 0:
        raise OutOfRange("k must be nonnegative")
    _check_poles(beta, m, skip=N)
    one = _one_like(beta)
    total = one * 0
    for l in range(m):
        if l == N:
            continue
        total += _partial_fraction_weight(one, l, m) * (N - l) / (beta + l) ** (k + 1)
    if k % 2:
        total = -total
    if k == 0 and m == 1:
        total += one
    return total


def q_hat_seed(N: int, beta, k_max: int) -> list:
    """Row ``m = N+1`` of the regularized kernel, equal to the plain row ``m = N``."""
    return q_deriv_row(beta, N, k_max)


def q_hat_row(N: int, beta, m: int, k_max: int) -> list:
    """``[Qhat(N, beta, m, k) for k in 0..k_max]`` via the recurrence in ``m``."""
    if not 0 <= N < m:
        raise OutOfRange(f"regularized symbol needs 0 <= N < m, got N={N}, m={m}")
    if k_max < 0:
        raise OutOfRange("k_max must be nonnegative")
    row = q_hat_seed(N, beta, k_max)
    for j in range(N + 1, m):
        row = q_row_next(row, beta, j)
    return row
