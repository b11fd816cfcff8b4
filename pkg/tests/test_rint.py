from __future__ import annotations

import math
import sys
from decimal import Decimal
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcert import rint
from fcert.rint import (
    DivisionByIntervalContainingZero,
    DomainViolation,
    EmptyConstruction,
    IArray,
    IntervalError,
    Interval,
    normal_tail,
    normal_tail_fast,
)

from .oracles import tail_oracle

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)
NEAR_OVERFLOW = Fraction(sys.float_info.max) / 2
EXACT = {
    "add": Fraction.__add__,
    "sub": Fraction.__sub__,
    "mul": Fraction.__mul__,
    "div": Fraction.__truediv__,
}


def _contains_exact(iv: Interval, q: Fraction) -> bool:
    return Fraction(iv.lo) <= q <= Fraction(iv.hi)


@pytest.mark.parametrize("kind", sorted(EXACT))
@given(a=finite, b=finite)
def test_point_arithmetic_contains_exact_result(kind, a, b):
    if kind == "div" and b == 0:
        return
    exact = EXACT[kind](Fraction(a), Fraction(b))
    try:
        r = rint.arith(Interval(a), Interval(b), kind)
    except IntervalError:
        assert abs(exact) > NEAR_OVERFLOW
        return
    assert _contains_exact(r, exact)


@pytest.mark.parametrize("kind", sorted(EXACT))
@given(a=finite, w=st.floats(0, 10), b=finite, v=st.floats(0, 10), s=st.floats(0, 1), t=st.floats(0, 1))
def test_box_arithmetic_contains_every_member(kind, a, w, b, v, s, t):
    x, y = Interval(a, a + w), Interval(b, b + v)
    if kind == "div" and y.contains(0.0):
        with pytest.raises(DivisionByIntervalContainingZero):
            rint.arith(x, y, kind)
        return
    try:
        r = rint.arith(x, y, kind)
    except IntervalError:
        corners = [EXACT[kind](Fraction(p), Fraction(q)) for p in x for q in y]
        assert max(map(abs, corners)) > NEAR_OVERFLOW
        return
    px = Fraction(x.lo) + Fraction(s) * (Fraction(x.hi) - Fraction(x.lo))
    py = Fraction(y.lo) + Fraction(t) * (Fraction(y.hi) - Fraction(y.lo))
    assert _contains_exact(r, EXACT[kind](px, py))


@pytest.mark.parametrize(
    "kind, lo, hi, ref",
    [
        ("exp", -700.0, 700.0, mpmath.exp),
        ("log", 1e-300, 1e300, mpmath.log),
        ("sqrt", 0.0, 1e300, mpmath.sqrt),
    ],
)
@given(u=st.floats(0, 1))
def test_elementary_contains_mpmath(kind, lo, hi, ref, u):
    x = lo + (hi - lo) * u if kind != "log" else math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * u)
    r = rint.elem(Interval(x), kind)
    with mpmath.workdps(50):
        exact = ref(mpmath.mpf(x))
        assert mpmath.mpf(r.lo) <= exact <= mpmath.mpf(r.hi)


@given(x=st.floats(-40, 40))
def test_normal_tail_contains_mpmath(x):
    r = normal_tail(Interval(x))
    exact = tail_oracle(x)
    assert mpmath.mpf(r.lo) <= exact <= mpmath.mpf(r.hi)
    assert r.width() <= 1e-14 * float(exact) + 1e-300


@pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 0.3, 3.0, 12.0, 30.0])
def test_normal_tail_fast_is_accurate(x):
    assert normal_tail_fast(x) == pytest.approx(float(tail_oracle(x)), rel=1e-14)


def test_normal_tail_is_monotone_over_box():
    r = normal_tail(Interval(0.5, 1.5))
    assert r.contains(float(tail_oracle(0.5))) and r.contains(float(tail_oracle(1.5)))


def test_decimal_constructor_encloses_the_decimal():
    iv = Interval.from_decimal("0.2484195")
    assert Fraction(iv.lo) <= Fraction(Decimal("0.2484195")) <= Fraction(iv.hi)
    assert iv.lo < iv.hi


def test_from_fraction_is_tight():
    iv = Interval.from_fraction(Fraction(1, 3))
    assert Fraction(iv.lo) < Fraction(1, 3) < Fraction(iv.hi)
    assert iv.hi == math.nextafter(iv.lo, math.inf)


def test_empty_construction_rejected():
    with pytest.raises(EmptyConstruction):
        Interval(1.0, 0.0)


def test_log_of_nonpositive_rejected():
    with pytest.raises(DomainViolation):
        rint.log(Interval(-1.0, 1.0))


def test_square_of_signed_box_is_nonnegative():
    assert Interval(-2.0, 1.0).sq() == Interval(0.0, 4.0)


@given(st.lists(st.tuples(finite, st.floats(0, 5)), min_size=1, max_size=20))
def test_array_ops_agree_with_scalar(pairs):
    lo = np.array([p[0] for p in pairs])
    hi = lo + np.array([p[1] for p in pairs])
    a = IArray(lo, hi)
    got = a * a + a
    for i in range(len(pairs)):
        x = a.interval(i)
        ref = x * x + x
        g = got.interval(i)
        assert g.lo <= ref.lo and ref.hi <= g.hi or (g.contains(ref.lo) and g.contains(ref.hi))


def test_fault_injection_breaks_containment():
    rint.inject_rounding_fault(True)
    try:
        bad = 0
        for k in range(200):
            a, b = 0.1 + k, 0.7 / (k + 3)
            try:
                r = Interval(a) + Interval(b)
            except EmptyConstruction:
                bad += 1
                continue
            bad += not _contains_exact(r, Fraction(a) + Fraction(b))
        assert bad > 0
    finally:
        rint.inject_rounding_fault(False)
    r = Interval(0.1) + Interval(0.2)
    assert _contains_exact(r, Fraction(0.1) + Fraction(0.2))
