from __future__ import annotations

import math
import random
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcert.functional import (
    CaseMismatch,
    F1_eval,
    F1_fast,
    F1_prime,
    F2_eval,
    F2_fast,
    F2Point,
    LOCAL_BOX,
    LogOfNonpositive,
    ManifestError,
    NonpositiveM,
    SegmentPlan,
    SupBoundInput,
    bundled_manifest,
    concave_sup_bound,
    entropy,
    fixed_point_alpha,
    parse_manifest,
    quadratic_sup,
    read_manifest,
    segment_envelope_detail,
    segment_envelope_sup,
    smoke_subset,
    standard_schedule,
    write_manifest,
)
from fcert.gaussfn import CERTIFIED, FAST
from fcert.rint import Interval

GAMMA = "0.2484195"
G = 0.2484195


@given(g=st.floats(0.0, 0.5), a=st.floats(-1.5, 0.5))
def test_symmetric_point_identity(g, a):
    assert abs(F2_fast(0.5, a, a, g) - 4 * F1_fast(g, a)) <= 1e-12


@given(g=st.floats(0.0, 0.5), a=st.floats(-1.5, 0.5))
def test_degenerate_overlap_identity(g, a):
    assert abs(F2_fast(0.0, 0.0, a, g) - 2 * F1_fast(g, a)) <= 1e-12


def test_certified_identities_overlap():
    a = -0.445
    four = 4 * F1_eval(GAMMA, a, CERTIFIED)
    assert F2_eval(F2Point(0.5, a, a, GAMMA), CERTIFIED).overlaps(four)
    two = 2 * F1_eval(GAMMA, a, CERTIFIED)
    assert F2_eval(F2Point(0.0, 0.0, a, GAMMA), CERTIFIED).overlaps(two)


def test_f2_symmetry_in_beta():
    for b, a1, a2 in [(0.2, -0.3, -0.5), (0.41, 0.1, -0.2)]:
        assert F2_fast(b, a1, a2, G) == pytest.approx(F2_fast(1 - b, a2, a1, G), abs=1e-13)


def test_fixed_point_is_stationary():
    a, res = fixed_point_alpha(G, -0.4)
    assert res <= 1e-12
    assert abs(F1_prime(G, a).mid()) < 1e-11
    assert -0.446 < a < -0.444
    # a maximiser: nearby values are lower
    for d in (-1e-3, 1e-3):
        assert F1_fast(G, a + d) < F1_fast(G, a)


def test_entropy_values():
    assert entropy(0.5).contains(2 * math.log(2))
    assert entropy(0.0) == Interval(0.0)
    assert entropy(Fraction(1, 1000)).contains(-2 * (0.001 * math.log(0.001) + 0.999 * math.log(0.999)))


@given(
    v=st.floats(-1, 1),
    z=st.lists(st.floats(-2, 2), min_size=1, max_size=3),
    shift=st.lists(st.floats(-2, 2), min_size=3, max_size=3),
    M=st.floats(0.5, 8),
)
def test_concave_sup_bound_dominates_quadratic(v, z, shift, M):
    # h(x) = v + <g, x - z> - M/2 |x - z|^2 has sup v + |g|^2 / (2M)
    g = shift[: len(z)]
    sup = v + sum(t * t for t in g) / (2 * M)
    assert concave_sup_bound(SupBoundInput(v, g, M)) >= sup - 1e-15


def test_concave_sup_bound_rejects_nonpositive_M():
    with pytest.raises(NonpositiveM):
        SupBoundInput(0.0, [1.0], 0.0)


@given(
    v=st.floats(-1, 1),
    g=st.floats(-3, 3),
    M=st.floats(0.5, 8),
    lo=st.floats(-3, 0),
    hi=st.floats(0, 3),
)
def test_quadratic_sup_dominates_grid(v, g, M, lo, hi):
    d = np.linspace(lo, hi, 401)
    best = float(np.max(v + g * d - 0.5 * M * d * d))
    bound = quadratic_sup(Interval(v), Interval(g), M, lo, hi)
    assert bound >= best - 1e-12
    assert bound <= v + g * g / (2 * M) + 1e-12


def test_quadratic_sup_empty_range():
    assert quadratic_sup(Interval(0.0), Interval(1.0), 2.0, 1.0, 0.0) == -math.inf


# ---------------------------------------------------------------------------
# segment majorants against sampled F2 values

DOMAIN = {
    "le": lambda r: r.uniform(-2.5, -G),
    "ge": lambda r: r.uniform(-G, 1.5),
    None: lambda r: r.uniform(-2.5, 1.5),
}
CASE_DOMAINS = {
    "B2-case1": (None, "le"),
    "B2-case2": (None, "ge"),
    "B2-case3": ("ge", "ge"),
    "B2-case4": ("le", "ge"),
    "B2-case5": ("ge", "le"),
    "B2-case6": ("le", "le"),
}
SEGMENTS = [
    ("B2-case1", Fraction(1, 1000), Fraction(11, 10000), "-0.001"),
    ("B2-case1", Fraction(49, 10000), Fraction(1, 200), "-0.001"),
    ("B2-case2", Fraction(1, 1000), Fraction(2, 1000), "-0.01"),
    ("B2-case3", Fraction(1, 5), Fraction(21, 100), "-0.001"),
    ("B2-case4", Fraction(1, 10), Fraction(11, 100), "-0.001"),
    ("B2-case5", Fraction(49, 100), Fraction(1, 2), "-0.001"),
    ("B2-case6", Fraction(3, 10), Fraction(3001, 10000), "-0.00001"),
    ("B2-case6", Fraction(197999, 400000), Fraction(99, 200), "-0.00001"),
]


def _F2_or_minus_inf(beta, a1, a2):
    # deep in the tail f underflows and F2 is effectively -inf
    try:
        return F2_fast(beta, a1, a2, G)
    except LogOfNonpositive:
        return -math.inf


@pytest.mark.parametrize("tag, e1, e2, target", SEGMENTS)
def test_segment_bound_dominates_samples(tag, e1, e2, target):
    seg = SegmentPlan(tag, e1, e2, Decimal(target))
    bound = segment_envelope_sup(seg, GAMMA).hi
    assert bound <= float(target)
    r = random.Random(f"{tag}:{e1}")
    d1, d2 = CASE_DOMAINS[tag]
    worst = -math.inf
    for _ in range(300):
        beta = float(e1 + (e2 - e1) * Fraction(r.random()))
        a1, a2 = DOMAIN[d1](r), DOMAIN[d2](r)
        worst = max(worst, _F2_or_minus_inf(beta, a1, a2))
    # near the symmetric maximiser, where the bound is tightest
    if tag == "B2-case6":
        for _ in range(300):
            beta = float(e1 + (e2 - e1) * Fraction(r.random()))
            worst = max(worst, F2_fast(beta, -0.445 + r.gauss(0, 0.01), -0.445 + r.gauss(0, 0.01), G))
    assert worst <= bound


def test_local_segment_excludes_box_and_dominates_outside():
    seg = SegmentPlan("B3-local", Fraction(12477, 25000), Fraction(199633, 400000), Decimal("0.000001"))
    det = segment_envelope_detail(seg, GAMMA)
    assert det.passed
    assert det.checks["G2_at_witness_ok"] and det.checks["alpha_near_centre_ok"] and det.checks["grad_sum_ok"]
    lo, hi = (float(x) for x in LOCAL_BOX)
    r = random.Random(5)
    for _ in range(400):
        beta = float(seg.eta1 + (seg.eta2 - seg.eta1) * Fraction(r.random()))
        a1 = -0.445 + r.uniform(-0.02, 0.02)
        a2 = -0.445 + r.uniform(-0.02, 0.02)
        if lo <= a1 <= hi and lo <= a2 <= hi:
            continue
        assert F2_fast(beta, a1, a2, G) <= det.bound


def test_fast_mode_matches_certified_bound():
    seg = SegmentPlan("B2-case3", Fraction(1, 5), Fraction(21, 100), Decimal("-0.001"))
    c = segment_envelope_sup(seg, GAMMA, CERTIFIED)
    f = segment_envelope_sup(seg, GAMMA, FAST)
    assert abs(c.hi - f.hi) < 1e-8


def test_larger_M_gives_no_weaker_bound():
    seg = SegmentPlan("B2-case6", Fraction(3, 10), Fraction(3001, 10000), Decimal("-0.00001"))
    assert segment_envelope_sup(seg, GAMMA, M=4.0).hi <= segment_envelope_sup(seg, GAMMA, M=2.0).hi


# ---------------------------------------------------------------------------
# plans and manifests


def test_plan_validation():
    with pytest.raises(CaseMismatch):
        SegmentPlan("B2-case9", Fraction(1, 10), Fraction(1, 5), Decimal("-1"))
    with pytest.raises(CaseMismatch):
        SegmentPlan("B2-case6", Fraction(1, 5), Fraction(1, 10), Decimal("-1"))
    with pytest.raises(CaseMismatch):
        SegmentPlan("B2-case6", Fraction(1, 10), Fraction(1, 5), Decimal("0.1"))


def test_bisect_tiles_segment():
    p = SegmentPlan("B2-case6", Fraction(1, 10), Fraction(1, 5), Decimal("-1e-5"))
    a, b = p.bisect()
    assert a.eta1 == p.eta1 and a.eta2 == b.eta1 and b.eta2 == p.eta2


def test_manifest_round_trip(tmp_path):
    plans = standard_schedule("b3")[:7]
    path = tmp_path / "m.manifest"
    write_manifest(plans, path, header="tag eta1_num eta1_den eta2_num eta2_den target")
    assert read_manifest(path) == plans


@pytest.mark.parametrize(
    "line",
    ["B2-case6 1 10 1 5", "B2-case6 1 10 1 5 -1e-5 extra", "B2-case6 x 10 1 5 -1e-5", "B2-case6 1 0 1 5 -1e-5"],
)
def test_malformed_manifest_lines(line):
    with pytest.raises(ManifestError):
        parse_manifest([line])


@pytest.mark.parametrize("name", ["b2", "b3"])
def test_bundled_manifests_match_schedule(name):
    assert bundled_manifest(name) == standard_schedule(name)
    assert bundled_manifest(f"{name}-smoke") == smoke_subset(standard_schedule(name), 50)


def test_bundled_sizes():
    assert len(bundled_manifest("b2")) == 3446
    assert len(bundled_manifest("b3")) == 2000


def test_smoke_subset_keeps_ends():
    plans = standard_schedule("b3")
    sub = smoke_subset(plans, 50)
    assert len(sub) == 50 and sub[0] == plans[0] and sub[-1] == plans[-1]
