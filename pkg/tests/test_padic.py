import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import egcd_inverse, factorial_valuation, log_oracle
from rigidchern.errors import PrecisionExhausted, ValuationError
from rigidchern.padic import (
    PAdicContext,
    PAdicElem,
    inv_one_unit,
    log_one_unit,
    log_series_plan,
    vp,
    vp_factorial,
)


def test_context_validation():
    with pytest.raises(ValueError):
        PAdicContext(4, 8)
    with pytest.raises(ValueError):
        PAdicContext(5, 0)
    with pytest.raises(ValueError):
        PAdicContext(5, 65)
    assert PAdicContext(5, 8).modulus == 5**8


def test_inverse_examples():
    assert inv_one_unit(PAdicContext(5, 3), PAdicContext(5, 3)(0)) == 1
    ctx = PAdicContext(5, 3)
    assert inv_one_unit(ctx, ctx(5)).residue == 21 == egcd_inverse(6, 125)
    ctx = PAdicContext(2, 4)
    assert inv_one_unit(ctx, ctx(2)).residue == 11 == egcd_inverse(3, 16)


def test_inverse_rejects_units():
    ctx = PAdicContext(3, 5)
    with pytest.raises(ValuationError):
        inv_one_unit(ctx, ctx(2))


@pytest.mark.parametrize("p,N", [(2, 10), (3, 8), (5, 8), (7, 6)])
def test_inverse_matches_euclid(p, N):
    ctx = PAdicContext(p, N)
    rng = random.Random(p * 100 + N)
    m = p**N
    for _ in range(10_000):
        a = p * rng.randrange(m // p)
        s = inv_one_unit(ctx, ctx(a))
        assert (ctx(1 + a) * s) == 1
        assert s.residue == egcd_inverse(1 + a, m)


def test_log_examples():
    ctx = PAdicContext(3, 4)
    assert log_one_unit(ctx, ctx(1)) == 0
    val = log_one_unit(ctx, ctx(4))
    # One digit is reserved for the division by 3 in the term n = 3.
    assert val.prec == 3
    assert val == 48 and val.residue == 48 % 27
    # At N = 10 the value reduces to 48 modulo 81.
    big = log_one_unit(PAdicContext(3, 10), PAdicContext(3, 10)(4))
    assert big.residue % 81 == 48
    assert big.residue == log_oracle(4, 3, 10) % 3**big.prec


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_log_matches_series_oracle(p):
    N = 8
    ctx = PAdicContext(p, N)
    rng = random.Random(p)
    for _ in range(20):
        u = 1 + p * rng.randrange(p**N)
        got = log_one_unit(ctx, ctx(u))
        assert got.residue == log_oracle(u, p, N) % p**got.prec


def test_log_rejects_nonunits():
    ctx = PAdicContext(5, 4)
    with pytest.raises(ValuationError):
        log_one_unit(ctx, ctx(3))


def test_precision_exhausted_by_division():
    ctx = PAdicContext(2, 3)
    with pytest.raises(PrecisionExhausted):
        PAdicElem(ctx, 0, 2).divide_by_p_power(3)


def test_log_loss_is_bounded():
    # A loss of k digits needs a term n >= p**k, which is already negligible,
    # so the logarithm always keeps at least one digit.
    for p in (2, 3, 5):
        for prec in range(1, 12):
            for v in (1, 2):
                _, loss = log_series_plan(p, prec, v)
                assert loss < prec


def test_log_series_plan_stops_by_valuation():
    terms, loss = log_series_plan(5, 8, 1)
    assert terms == [1, 2, 3, 4, 5, 6, 7]
    assert loss == 1
    terms, loss = log_series_plan(5, 8, 4)
    assert terms == [1]
    assert loss == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_log_square(p):
    ctx = PAdicContext(p, 10)
    u = ctx(1 + p)
    assert log_one_unit(ctx, u * u) == log_one_unit(ctx, u) * 2


@settings(max_examples=200, deadline=None)
@given(p=st.sampled_from([2, 3, 5]), a=st.integers(0, 10**9), b=st.integers(0, 10**9))
def test_log_homomorphism(p, a, b):
    ctx = PAdicContext(p, 8)
    u, v = ctx(1 + p * a), ctx(1 + p * b)
    lhs = log_one_unit(ctx, u * v)
    rhs = log_one_unit(ctx, u) + log_one_unit(ctx, v)
    assert lhs == rhs


def test_vp_factorial_examples():
    ctx = PAdicContext(2, 4)
    assert vp_factorial(ctx, 0) == 0
    assert vp_factorial(ctx, 4) == 3 == vp(2, 24)
    assert vp_factorial(3, 9) == 4 == vp(3, 362880)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_vp_factorial_direct(p):
    f = 1
    for n in range(0, 501):
        if n:
            f *= n
        direct = 0
        g = f
        while g % p == 0:
            g //= p
            direct += 1
        assert vp_factorial(p, n) == direct
    assert vp_factorial(p, 30) == factorial_valuation(p, 30)


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(-10**12, 10**12),
    b=st.integers(-10**12, 10**12),
    pa=st.integers(0, 8),
    pb=st.integers(0, 8),
)
def test_precision_never_increases(a, b, pa, pb):
    ctx = PAdicContext(3, 8)
    x, y = PAdicElem(ctx, a, pa), PAdicElem(ctx, b, pb)
    for r in (x + y, x - y, x * y):
        assert r.prec == min(pa, pb)
    assert (-x).prec == pa
    assert (x * y).prec == min(pa, pb)


def test_zero_precision_absorbs():
    ctx = PAdicContext(5, 8)
    nothing = PAdicElem(ctx, 7, 0)
    assert (nothing + ctx(3)).prec == 0
    assert (nothing * ctx(3)).prec == 0
    assert nothing.inverse().prec == 0
    assert log_one_unit(ctx, nothing).prec == 0


def test_division_by_p_power():
    ctx = PAdicContext(5, 8)
    x = ctx(250)
    y = x.divide_by_p_power(2)
    assert y.residue == 10 and y.prec == 6
    with pytest.raises(ValuationError):
        ctx(7).divide_by_p_power(1)


def test_json_round_trip():
    ctx = PAdicContext(7, 9)
    x = PAdicElem(ctx, 123456, 6)
    data = x.to_json()
    assert data == {"residue": str(123456 % 7**6), "prec": 6}
    y = PAdicElem.from_json(ctx, data)
    assert y == x and y.prec == 6


def test_unhashable_and_equality():
    ctx = PAdicContext(5, 8)
    assert PAdicElem(ctx, 26, 2) == PAdicElem(ctx, 1, 8)
    assert PAdicElem(ctx, 26, 3) != PAdicElem(ctx, 1, 8)
    with pytest.raises(TypeError):
        hash(ctx(1))
    assert ctx(-1).symmetric() == -1
