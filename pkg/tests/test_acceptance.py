"""Acceptance criteria; each test records one PASS/FAIL line for the summary."""
from __future__ import annotations

import math
import random
import time
from decimal import Decimal, localcontext
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from fcert import rint
from fcert.binom_oracle import first_moment_tail_check
from fcert.certify import (
    CERTIFIED_VERDICT,
    GAMMA_SWEEP,
    box_enclosures,
    certify_gamma_bounds,
    certify_hessian,
    certify_sweep,
)
from fcert.functional import F1_fast, F2_fast, bundled_manifest
from fcert.graphsim import (
    GAMMA_CRIT_OVER_SQRT2,
    BisectionState,
    count_friendly_exhaustive,
    empirical_first_moment,
    local_search_max_margin,
    sample_gnp_half,
)
from fcert.rint import Interval

from .oracles import ACCEPTANCE
from .test_gaussfn import FD_POINTS, _fd_errors


def _record(k: int, ok: bool, msg: str) -> None:
    ACCEPTANCE[k] = (ok, msg)
    assert ok, msg


def test_criterion_1_gamma_bracket():
    t0 = time.perf_counter()
    rep = certify_gamma_bounds("0.24841951", "0.24841959")
    dt = time.perf_counter() - t0
    gc = rep.enclosure("gamma_crit")
    ok = rep.verdict == CERTIFIED_VERDICT and 0.2484195 <= gc.lo and gc.hi <= 0.2484196 and dt < 60
    _record(1, ok, f"gamma_crit in [.24841951, .24841959] {rep.verdict} in {dt:.2f} s")


def test_criterion_2_box_enclosures():
    enc = box_enclosures()
    f, fb, combo = enc["f"], enc["f_beta"], enc["combo"]
    ok = 0.36544 <= f.lo and f.hi <= 0.37761 and 0.2780 <= fb.lo and fb.hi <= 0.3110 and combo.hi <= 0.630
    _record(
        2,
        ok,
        f"f in [{f.lo:.5f}, {f.hi:.5f}], f_beta in [{fb.lo:.5f}, {fb.hi:.5f}], combo <= {combo.hi:.4f}",
    )


def test_criterion_3_hessian():
    t0 = time.perf_counter()
    rep = certify_hessian()
    dt = time.perf_counter() - t0
    bb = rep.enclosure("bb").hi
    ba = max(rep.enclosure("ba1").mag(), rep.enclosure("ba2").mag())
    delta = rep.details["delta"]
    ok = rep.verdict == CERTIFIED_VERDICT and bb <= -2.15 and ba <= 2.05 and delta > 0 and dt < 600
    _record(3, ok, f"bb <= {bb:.4f}, |b a_i| <= {ba:.4f}, delta = {delta:.4f}, {dt:.1f} s")


def _sweep_ok(rep, target_cap: float) -> tuple[bool, float]:
    worst = rep.enclosure("worst_bound").hi
    return rep.verdict == CERTIFIED_VERDICT and worst <= target_cap, worst


@pytest.mark.slow
def test_criterion_4_sweeps():
    t0 = time.perf_counter()
    smoke2 = certify_sweep(bundled_manifest("b2-smoke"), GAMMA_SWEEP, claim_id="claim-b2")
    smoke3 = certify_sweep(bundled_manifest("b3-smoke"), GAMMA_SWEEP, claim_id="claim-b3")
    smoke_dt = time.perf_counter() - t0
    full2 = certify_sweep(bundled_manifest("b2"), GAMMA_SWEEP, claim_id="claim-b2")
    full3 = certify_sweep(bundled_manifest("b3"), GAMMA_SWEEP, claim_id="claim-b3")
    ok2, w2 = _sweep_ok(full2, -1e-5)
    ok3, w3 = _sweep_ok(full3, 1e-6)
    oks = smoke2.verdict == smoke3.verdict == CERTIFIED_VERDICT and smoke_dt < 300
    failing = full2.details["failing_segments"] + full3.details["failing_segments"]
    _record(
        4,
        ok2 and ok3 and oks and not failing,
        f"b2 {full2.segments_checked} segments worst {w2:.3e}, b3 {full3.segments_checked} segments worst {w3:.3e}, "
        f"smoke subsets {smoke_dt:.1f} s",
    )


def test_criterion_5_moment_identities():
    r = random.Random(2024)
    worst = 0.0
    for _ in range(100):
        g, a = r.uniform(0.0, 0.5), r.uniform(-1.5, 0.5)
        f1 = F1_fast(g, a)
        worst = max(worst, abs(F2_fast(0.5, a, a, g) - 4 * f1), abs(F2_fast(0.0, 0.0, a, g) - 2 * f1))
    _record(5, worst <= 1e-12, f"max identity defect {worst:.2e} over 100 points")


def test_criterion_6_binomial_rates():
    r = random.Random(11)
    ratios = []
    for _ in range(10):
        a1, a2, kappa = r.uniform(-1, 1), r.uniform(-1, 1), r.randint(-5, 5)
        errs = [first_moment_tail_check(n, a1, a2, kappa * math.isqrt(n) // 10)[2] for n in (100, 400, 1600)]
        ratios += [e0 / e1 for e0, e1 in zip(errs, errs[1:])]
    ok = all(2.5 <= q <= 6 for q in ratios)
    _record(6, ok, f"error ratio per 4x n in [{min(ratios):.3f}, {max(ratios):.3f}] over 10 parameter sets")


def test_criterion_7_graph_counts():
    exact, _ = empirical_first_moment(6, 0, "exhaustive")
    mc, se = empirical_first_moment(6, 0, "monte_carlo", samples=100_000, seed=7)
    k4 = count_friendly_exhaustive(BisectionState(4, np.ones((4, 4), dtype=np.int8) - np.eye(4, dtype=np.int8)), 0)
    empty = count_friendly_exhaustive(BisectionState(4, np.zeros((4, 4), dtype=np.int8)), 0)
    n2 = 400
    best, _ = local_search_max_margin(sample_gnp_half(n2, 1), restarts=2, seed=1)
    scaled = best / math.sqrt(n2 / 2)
    ok = exact == Fraction(4645, 4096) and abs(mc - float(exact)) <= 4 * se and k4 == 0 and empty == 6
    _record(
        7,
        ok,
        f"E X_0(n2=6) = {exact}, MC {mc:.5f} +- {se:.4f}, K4 {k4}, empty {empty}; "
        f"context: best_H/sqrt(n2/2) = {scaled:.3f} at n2={n2} vs {GAMMA_CRIT_OVER_SQRT2}",
    )


FUZZ = 100_000
EXACT = {
    "add": Fraction.__add__,
    "sub": Fraction.__sub__,
    "mul": Fraction.__mul__,
    "div": Fraction.__truediv__,
}


def _fuzz_arith(kind: str, r: random.Random) -> int:
    op = EXACT[kind]
    bad = 0
    for _ in range(FUZZ):
        a = r.uniform(-1, 1) * 10.0 ** r.randint(-8, 8)
        b = r.uniform(-1, 1) * 10.0 ** r.randint(-8, 8)
        if kind == "div" and b == 0:
            continue
        iv = rint.arith(Interval(a), Interval(b), kind)
        q = op(Fraction(a), Fraction(b))
        bad += not (Fraction(iv.lo) <= q <= Fraction(iv.hi))
    return bad


def _fuzz_elem(kind: str, r: random.Random) -> int:
    bad = 0
    with localcontext() as ctx:
        ctx.prec = 40
        for _ in range(FUZZ):
            x = r.uniform(-30, 30) if kind == "exp" else r.uniform(0, 1) * 10.0 ** r.randint(-6, 6)
            if kind == "log" and x == 0:
                continue
            iv = rint.elem(Interval(x), kind)
            d = Decimal(x)
            exact = {"exp": d.exp, "log": d.ln, "sqrt": d.sqrt}[kind]()
            bad += not (Decimal(iv.lo) <= exact <= Decimal(iv.hi))
    return bad


def _fuzz_tail(r: random.Random) -> int:
    bad = 0
    with mpmath.workdps(30):
        for _ in range(FUZZ):
            x = r.uniform(-8, 37)
            iv = rint.normal_tail(Interval(x))
            exact = mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2
            bad += not (mpmath.mpf(iv.lo) <= exact <= mpmath.mpf(iv.hi))
    return bad


def test_criterion_8_containment_and_derivatives():
    t0 = time.perf_counter()
    r = random.Random(8)
    violations = {k: _fuzz_arith(k, r) for k in EXACT}
    violations.update({k: _fuzz_elem(k, r) for k in ("exp", "log", "sqrt")})
    violations["normal_tail"] = _fuzz_tail(r)
    fd_fail = 0
    for beta, a in FD_POINTS:
        e = _fd_errors(beta, a)
        fd_fail += not (e["u"] < 1e-6 and e["b"] < 1e-6 and max(e["uu"], e["bb"], e["bu"]) < 1e-4)
    dt = time.perf_counter() - t0
    total = sum(violations.values())
    ok = total == 0 and fd_fail == 0 and dt < 120
    _record(
        8,
        ok,
        f"{total} violations over {len(violations)} classes x {FUZZ} samples, "
        f"{len(FD_POINTS) - fd_fail}/{len(FD_POINTS)} derivative checks, {dt:.1f} s",
    )
