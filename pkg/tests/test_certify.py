from __future__ import annotations

import json
import math
from decimal import Decimal
from fractions import Fraction

import pytest

from fcert.certify import (
    CERTIFIED_VERDICT,
    FAILED,
    NOT_REACHED,
    SCHEMA,
    ClaimReport,
    IncompleteInputs,
    assemble_assumption_report,
    box_enclosures,
    certify_gamma_bounds,
    certify_hessian,
    certify_initial_interval,
    certify_sweep,
    interval_strings,
    parse_gamma,
    sweep_complete,
)
from fcert.functional import SegmentPlan, bundled_manifest
from fcert.gaussfn import FAST
from fcert.rint import Interval


def test_parse_gamma_range_and_point():
    iv = parse_gamma("0.24841941,0.24841969")
    assert iv.lo <= 0.24841941 and iv.hi >= 0.24841969
    pt = parse_gamma("0.2484195")
    assert Fraction(pt.lo) <= Fraction(Decimal("0.2484195")) <= Fraction(pt.hi)


def test_interval_strings_round_outward():
    lo, hi = interval_strings(Interval(0.1, 0.2))
    assert Decimal(lo) <= Decimal(0.1) and Decimal(hi) >= Decimal(0.2)


def test_gamma_bracket_certified():
    rep = certify_gamma_bounds()
    assert rep.verdict == CERTIFIED_VERDICT
    assert rep.enclosure("F1_at_lower_witness").lo > 0
    assert rep.enclosure("sup_F1_upper_bound_at_gamma_hi").hi < 0
    assert rep.details["gamma_crit_mid_over_sqrt2"] == pytest.approx(0.17566, abs=1e-5)


@pytest.mark.parametrize("lo, hi", [("0.2484196", "0.2484197"), ("0.2484194", "0.2484195"), ("0.24841959", "0.24841951")])
def test_gamma_bracket_rejects_wrong_ranges(lo, hi):
    assert certify_gamma_bounds(lo, hi).verdict == FAILED


def test_fast_mode_is_never_certified():
    rep = certify_gamma_bounds(mode=FAST)
    assert rep.verdict == NOT_REACHED
    assert rep.exit_code == 2


def test_initial_interval_certified():
    rep = certify_initial_interval()
    assert rep.verdict == CERTIFIED_VERDICT
    assert all(rep.checks.values())


def test_hessian_and_box_enclosures():
    rep = certify_hessian()
    assert rep.verdict == CERTIFIED_VERDICT
    assert rep.details["delta"] > 0
    enc = box_enclosures()
    assert 0.36544 <= enc["f"].lo and enc["f"].hi <= 0.37761
    assert 0.2780 <= enc["f_beta"].lo and enc["f_beta"].hi <= 0.3110
    assert enc["combo"].hi <= 0.630


def _plans(n=3):
    return bundled_manifest("b3-smoke")[:n]


def test_sweep_certifies_and_records_coverage():
    rep = certify_sweep(_plans(), "0.2484195", claim_id="claim-b3")
    assert rep.verdict == CERTIFIED_VERDICT
    assert rep.segments_checked == 3
    assert not sweep_complete(rep)


def test_sweep_with_impossible_target_fails_after_refinement():
    plan = [SegmentPlan("B2-case6", Fraction(3, 10), Fraction(3001, 10000), Decimal("-1"))]
    rep = certify_sweep(plan, "0.2484195", refine=2, claim_id="claim-b2")
    assert rep.verdict == FAILED
    assert rep.details["refined_segments"] == 6
    assert rep.segments_checked == 4


def test_sweep_parallel_matches_serial():
    a = certify_sweep(_plans(4), "0.2484195", parallelism=1)
    b = certify_sweep(_plans(4), "0.2484195", parallelism=2)
    assert a.enclosures == b.enclosures and a.worst_segment == b.worst_segment


def test_sweep_rejects_bad_refine():
    with pytest.raises(ValueError):
        certify_sweep(_plans(1), "0.2484195", refine=5)


def test_report_file_is_append_only(report_dir):
    rep = certify_gamma_bounds()
    p1 = rep.write(report_dir)
    p2 = rep.write(report_dir)
    assert p1 != p2
    data = json.loads(open(p1, encoding="utf-8").read())
    assert data["schema"] == SCHEMA
    assert data["verdict"] == "certified"
    assert set(data) >= {"claim_id", "gamma", "verdict", "enclosures", "segments_checked", "worst_segment", "wall_seconds"}
    lo, hi = data["enclosures"]["gamma_crit"]
    assert Decimal(lo) <= Decimal("0.24841951") and Decimal(hi) >= Decimal("0.24841959")


def _fake(claim_id, gamma, verdict=CERTIFIED_VERDICT, details=None):
    return ClaimReport(claim_id, gamma, verdict, details=details or {})


FULL_B2 = {
    "beta_coverage": {
        "B2-case1": ["1/1000", "1/200"],
        "B2-case2": ["1/1000", "1/200"],
        "B2-case3": ["1/200", "1/2"],
        "B2-case4": ["1/200", "1/2"],
        "B2-case5": ["1/200", "1/2"],
        "B2-case6": ["1/200", "99/200"],
    }
}
FULL_B3 = {"beta_coverage": {"B3-local": ["99/200", "1/2"]}}


def _reports(sweep_gamma="0.24841941", b3_verdict=CERTIFIED_VERDICT):
    return [
        certify_gamma_bounds(),
        _fake("claim-b1", "0.24841941,0.24841969"),
        _fake("claim-b2", sweep_gamma, details=FULL_B2),
        _fake("claim-b3", sweep_gamma, b3_verdict, details=FULL_B3),
        _fake("claim-b4", "0.24841941,0.24841969"),
    ]


def test_assumption_combines_reports():
    av = assemble_assumption_report(_reports())
    assert av.verdict == CERTIFIED_VERDICT
    assert av.epsilon == pytest.approx(1e-7, rel=1e-6)
    assert av.to_claim_report().exit_code == 0


def test_assumption_takes_worst_component():
    assert assemble_assumption_report(_reports(b3_verdict=NOT_REACHED)).verdict == NOT_REACHED
    assert assemble_assumption_report(_reports(b3_verdict=FAILED)).verdict == FAILED


def test_assumption_fails_without_gamma_margin():
    av = assemble_assumption_report(_reports(sweep_gamma="0.2484196"))
    assert av.verdict == FAILED
    assert not av.epsilon > 0


def test_assumption_partial_sweep_not_reached():
    reps = _reports()
    reps[2] = _fake("claim-b2", "0.24841941", details={"beta_coverage": {"B2-case6": ["1/200", "99/200"]}})
    assert assemble_assumption_report(reps).verdict == NOT_REACHED


def test_assumption_missing_inputs():
    with pytest.raises(IncompleteInputs, match="claim-b4"):
        assemble_assumption_report(_reports()[:4])


def test_epsilon_is_finite_margin():
    av = assemble_assumption_report(_reports())
    assert math.isfinite(av.epsilon)
    assert av.covered.contains(av.gamma_crit)
