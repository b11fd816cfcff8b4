from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcert import rint
from fcert.quad import (
    Integrand,
    gaussian_tail_bound,
    integrate_finite,
    integrate_semiinfinite,
    pointwise,
)
from fcert.rint import IArray, Interval


def gauss_bump():
    return pointwise(
        lambda t: rint.exp(rint.neg_square(t)),
        d2=lambda t: (4.0 * t.sq() - 2.0) * rint.exp(rint.neg_square(t)),
    )


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (-2.0, 0.5), (0.3, 0.3), (1.0, 6.0)])
def test_gaussian_integral_is_enclosed(a, b):
    enc = integrate_finite(gauss_bump(), a, b, 1e-12)
    with mpmath.workdps(40):
        exact = mpmath.sqrt(mpmath.pi) / 2 * (mpmath.erf(b) - mpmath.erf(a))
    assert mpmath.mpf(enc.value.lo) <= exact <= mpmath.mpf(enc.value.hi)
    assert enc.value.width() <= 1e-12
    assert enc.width_reached


@given(k=st.integers(0, 6), b=st.floats(0.01, 3.0))
def test_monomial_integrals(k, b):
    f = pointwise(
        lambda t: t**k if k else IArray(np.ones(len(t))),
        d2=lambda t: k * (k - 1) * t ** (k - 2) if k >= 2 else IArray(np.zeros(len(t))),
    )
    enc = integrate_finite(f, 0.0, b, 1e-9)
    exact = mpmath.mpf(b) ** (k + 1) / (k + 1)
    assert mpmath.mpf(enc.value.lo) <= exact <= mpmath.mpf(enc.value.hi)


def test_scalar_convention_matches_vectorized():
    vec = integrate_finite(gauss_bump(), 0.0, 1.0, 1e-8).value
    sc = integrate_finite(Integrand(eval=lambda t: rint.exp(-t.sq()), vectorized=False), 0.0, 1.0, 1e-2).value
    assert vec.overlaps(sc)


def test_semi_infinite_gaussian():
    enc = integrate_semiinfinite(gauss_bump(), 0.0, 1.0, 1e-10)
    assert enc.value.contains(math.sqrt(math.pi) / 2)
    assert enc.truncation_error > 0
    assert enc.value.width() <= 1e-10


def test_subdivision_cap_keeps_a_valid_enclosure():
    enc = integrate_finite(gauss_bump(), 0.0, 1.0, 1e-15, max_subdivisions=64)
    assert not enc.width_reached
    assert enc.value.contains(math.sqrt(math.pi) / 2 * math.erf(1.0))


@pytest.mark.parametrize("s, t", [(1.0, 3.0), (0.5, 10.0), (2.0, 0.5)])
def test_tail_bound_dominates(s, t):
    exact = mpmath.quad(lambda x: mpmath.exp(-s * x * x), [t, mpmath.inf])
    assert gaussian_tail_bound(s, t) >= exact


def test_tail_bound_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gaussian_tail_bound(1.0, 0.0)
