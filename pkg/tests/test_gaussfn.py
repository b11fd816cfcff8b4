from __future__ import annotations

import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcert.gaussfn import (
    CERTIFIED,
    FAST,
    GParams,
    OrthantParams,
    SingularCorrelation,
    f_dalpha,
    f_dbeta,
    f_enclose,
    f_eval,
    f_fast,
    f_second,
    g_eval,
    g_fast,
    g_monte_carlo,
    orthant_monte_carlo,
    over_box,
)
from fcert.rint import DomainViolation, Interval, normal_tail

from .oracles import f_oracle

GAMMA = 0.2484195


def _within(iv: Interval, x) -> bool:
    return mpmath.mpf(iv.lo) <= x <= mpmath.mpf(iv.hi)


@pytest.mark.parametrize(
    "beta, u",
    [(0.001, 0.5), (0.2, -0.3), (0.495, -0.2), (0.5, -0.2), (0.7, 1.2), (0.999, -0.12), (0.3, 3.5), (0.05, -2.0)],
)
def test_certified_f_contains_oracle(beta, u):
    iv = f_enclose(beta, u)
    assert _within(iv, f_oracle(beta, u))
    assert iv.width() <= 1e-9 * float(f_oracle(beta, u)) + 1e-300


@settings(max_examples=40)
@given(beta=st.floats(0.01, 0.99), u=st.floats(-2.0, 2.0))
def test_fast_f_matches_oracle(beta, u):
    assert f_fast(beta, u) == pytest.approx(float(f_oracle(beta, u)), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("u", [-1.0, -0.2, 0.0, 0.4])
def test_boundary_values(u):
    h = Interval(u) * math.sqrt(2.0)
    assert f_enclose(1.0, u).overlaps(normal_tail(h))
    assert f_enclose(0.5, u).overlaps(normal_tail(h).sq())
    base = 1 - 2 * float(mpmath.ncdf(-math.sqrt(2) * abs(u))) if u < 0 else 0.0
    assert f_enclose(0.0, u).contains(base) or abs(f_enclose(0.0, u).mid() - base) < 1e-15


def test_box_enclosure_contains_corners():
    box = f_enclose(Interval(0.3, 0.31), Interval(-0.2, -0.1))
    for b in (0.3, 0.31):
        for u in (-0.2, -0.1):
            assert _within(box, f_oracle(b, u))


def test_singular_correlation_rejected():
    with pytest.raises(SingularCorrelation):
        f_enclose(1e-14, 0.2)


def test_beta_outside_unit_interval_rejected():
    with pytest.raises(DomainViolation):
        OrthantParams(GAMMA, 1.2, 0.0)


@given(beta=st.floats(0.05, 0.95), a=st.floats(-1.0, 0.5), d=st.floats(0.001, 0.3))
def test_monotone_in_beta_and_alpha(beta, a, d):
    assert f_fast(min(beta + d, 0.99), GAMMA + a) >= f_fast(beta, GAMMA + a) - 1e-15
    assert f_fast(beta, GAMMA + a + d) <= f_fast(beta, GAMMA + a) + 1e-15


def _fd_points(n=100, seed=3):
    rng = random.Random(seed)
    return [(rng.uniform(0.05, 0.95), rng.uniform(-1.0, 0.8)) for _ in range(n)]


FD_POINTS = _fd_points()


def _fd_errors(beta, a, h=1e-4):
    """Relative errors of the closed-form derivatives against central differences."""
    u = GAMMA + a
    p = OrthantParams(GAMMA, beta, a)
    fb = lambda b: f_fast(b, u)  # noqa: E731
    fu = lambda x: f_fast(beta, x)  # noqa: E731
    num = {
        "u": (fu(u + h) - fu(u - h)) / (2 * h),
        "b": (fb(beta + h) - fb(beta - h)) / (2 * h),
        "uu": (fu(u + h) - 2 * fu(u) + fu(u - h)) / h**2,
        "bb": (fb(beta + h) - 2 * fb(beta) + fb(beta - h)) / h**2,
        "bu": (f_fast(beta + h, u + h) - f_fast(beta + h, u - h) - f_fast(beta - h, u + h) + f_fast(beta - h, u - h)) / (4 * h * h),
    }
    ana = {
        "u": f_dalpha(p, CERTIFIED).mid(),
        "b": f_dbeta(p, "first", CERTIFIED).mid(),
        "uu": f_second(p, "aa").mid(),
        "bb": f_second(p, "bb").mid(),
        "bu": f_second(p, "ba").mid(),
    }
    return {k: abs(num[k] - ana[k]) / max(1.0, abs(ana[k])) for k in num}


@pytest.mark.parametrize("beta, a", FD_POINTS[:10])
def test_closed_form_derivatives_match_differences(beta, a):
    errs = _fd_errors(beta, a)
    assert errs["u"] < 1e-6 and errs["b"] < 1e-6
    assert errs["uu"] < 1e-4 and errs["bb"] < 1e-4 and errs["bu"] < 1e-4


def test_combo_derivative_identity():
    p = OrthantParams(GAMMA, 0.4, -0.3)
    combo = f_dbeta(p, "combo")
    ref = 0.4 * f_second(p, "bb") + 2 * f_dbeta(p, "first")
    assert combo.overlaps(ref)


def test_over_box_hull_contains_pointwise_values():
    p = OrthantParams(GAMMA, Interval(0.495, 0.505), Interval(-0.45, -0.44))
    hull = over_box(lambda q: f_eval(q, CERTIFIED), p, splits=(4, 4))
    for b in (0.495, 0.5, 0.505):
        for a in (-0.45, -0.445, -0.44):
            assert _within(hull, f_oracle(b, GAMMA + a))


def test_fast_and_certified_modes_agree():
    p = OrthantParams(GAMMA, 0.3, -0.4)
    c = f_eval(p, CERTIFIED)
    assert c.contains(f_eval(p, FAST).lo) or abs(c.mid() - f_eval(p, FAST).lo) < 1e-12


def test_orthant_monte_carlo_agrees():
    est, se = orthant_monte_carlo(0.3, -0.1, 200_000, seed=1)
    assert abs(est - f_fast(0.3, -0.1)) < 5 * se


def test_g_certified_matches_fast_and_monte_carlo():
    p = GParams(GAMMA, 0.5, -0.4, -0.4, -0.4, -0.4)
    v = g_eval(p, CERTIFIED)
    assert v.mid() == pytest.approx(g_fast(p), rel=1e-9)
    est, se = g_monte_carlo(p, 200_000, seed=2)
    assert abs(est - g_fast(p)) < 5 * se
