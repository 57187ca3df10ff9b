from fractions import Fraction

import pytest

from epsexp.cli import parse_param
from epsexp.engine import ExpansionRequest, Fixed
from epsexp.numerics import Backend

# 4F3 with rational parameters, no singular lowers
RATIONAL_4F3 = (
    "-4*eps,-1/2-eps,-3/2-2*eps,1/2-3*eps",
    "-1/2+2*eps,-1/2+4*eps,1/2+6*eps",
)
# 5F4 whose four lower parameters all vanish at eps = 0
SINGULAR_5F4 = ("eps,-eps,-3*eps,-5*eps,-7*eps", "2*eps,4*eps,6*eps,8*eps")
# 4F3 with pi-valued constants
PI_4F3 = ("-4*eps,-1/2-eps,-pi/2-2*eps,1/3-3*eps", "-pi+2*eps,-1/4+4*eps,1/2+6*eps")


def make_request(params, n_max, M, backend="exact", precision=256, z="1/2"):
    b = Backend(backend, precision)
    upper = [parse_param(s, b) for s in params[0].split(",")]
    lower = [parse_param(s, b) for s in params[1].split(",")]
    zval = Fraction(z) if backend == "exact" else b.convert(Fraction(z))
    return ExpansionRequest(upper, lower, zval, n_max=n_max, truncation=Fixed(M), backend=backend, precision=precision)


@pytest.fixture
def rational_4f3():
    return lambda n_max=10, M=50, **kw: make_request(RATIONAL_4F3, n_max, M, **kw)


@pytest.fixture
def singular_5f4():
    return lambda n_max=10, M=100, **kw: make_request(SINGULAR_5F4, n_max, M, **kw)


@pytest.fixture
def pi_4f3():
    return lambda n_max=6, M=100, **kw: make_request(PI_4F3, n_max, M, backend="float", **kw)


def brute_force_combine(vectors):
    """Entry n: sum over all compositions k_1 + ... + k_r = n of products of entries."""
    length = len(vectors[0])

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    out = []
    for n in range(length):
        acc = Fraction(0)
        for ks in compositions(n, len(vectors)):
            term = Fraction(1)
            for v, k in zip(vectors, ks):
                term *= v[k]
            acc += term
        out.append(acc)
    return out
