"""Claim-level verifiers producing JSON reports.

Each verifier returns a :class:`ClaimReport` whose verdict is one of
``certified``, ``failed`` or ``not_reached``.  Fast mode runs the same
pipeline in floating point and can therefore never return ``certified``.
"""
from __future__ import annotations

import datetime as _dt
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import rint
from .functional import (
    CASE_TAGS,
    F1_eval,
    F1_prime,
    LogOfNonpositive,
    SegmentPlan,
    SupBoundInput,
    concave_sup_bound,
    entropy,
    fixed_point_alpha,
    segment_envelope_detail,
)
from .gaussfn import (
    CERTIFIED,
    FAST,
    OrthantParams,
    RealLike,
    SingularCorrelation,
    _check_mode,
    _f_beta_iv,
    as_interval,
    f_dbeta,
    f_enclose,
    f_fast,
    f_second,
    over_box,
)
from .rint import LOG2, PI, SQRT2, SQRT_PI, Interval, normal_tail

__all__ = [
    "SCHEMA",
    "CERTIFIED_VERDICT",
    "FAILED",
    "NOT_REACHED",
    "ClaimReport",
    "HessianBox",
    "AssumptionVerdict",
    "IncompleteInputs",
    "SegmentPlan",
    "GAMMA_LO",
    "GAMMA_HI",
    "GAMMA_SWEEP",
    "GAMMA_BOX",
    "parse_gamma",
    "certify_gamma_bounds",
    "certify_initial_interval",
    "certify_sweep",
    "certify_hessian",
    "box_enclosures",
    "assemble_assumption_report",
]

SCHEMA = "fc-report/1"
CERTIFIED_VERDICT = "certified"
FAILED = "failed"
NOT_REACHED = "not_reached"
_ORDER = {CERTIFIED_VERDICT: 0, NOT_REACHED: 1, FAILED: 2}

GAMMA_LO = "0.24841951"
GAMMA_HI = "0.24841959"
GAMMA_SWEEP = "0.2484195"
# bracket widened by 1e-7 on each side
GAMMA_BOX = "0.24841941,0.24841969"


class IncompleteInputs(ValueError):
    """A required claim report is missing."""


def parse_gamma(text: RealLike) -> Interval:
    """``"x"`` gives the enclosure of ``x``; ``"lo,hi"`` gives the hull of both ends."""
    if isinstance(text, str) and "," in text:
        lo, hi = (s.strip() for s in text.split(",", 1))
        a, b = Interval.from_decimal(lo), Interval.from_decimal(hi)
        if a.lo > b.hi:
            raise ValueError(f"empty gamma range {text!r}")
        return a.hull(b)
    return as_interval(text)


def _dec(x: float, rounding: str) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    d = Decimal(x)
    if d == 0:
        return "0"
    exp = d.adjusted() - 16
    return str(d.quantize(Decimal(1).scaleb(exp), rounding=rounding).normalize())


def interval_strings(iv: Interval) -> list[str]:
    """Outward-rounded 17-digit decimal strings ``[lo, hi]``."""
    return [_dec(iv.lo, ROUND_FLOOR), _dec(iv.hi, ROUND_CEILING)]


def _gamma_string(g: Interval, text: Optional[str] = None) -> str:
    if text is not None:
        return str(text)
    if g.is_point():
        return _dec(g.lo, ROUND_FLOOR)
    return ",".join(interval_strings(g))


def _worst(verdicts: Iterable[str]) -> str:
    vs = list(verdicts)
    return max(vs, key=_ORDER.__getitem__) if vs else CERTIFIED_VERDICT


# ---------------------------------------------------------------------------
# reports


@dataclass
class ClaimReport:
    """Outcome of one claim verification."""

    claim_id: str
    gamma: str
    verdict: str
    enclosures: list[tuple[str, Interval]] = field(default_factory=list)
    segments_checked: int = 0
    worst_segment: Optional[str] = None
    wall_seconds: float = 0.0
    mode: str = CERTIFIED
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def enclosure(self, label: str) -> Interval:
        for k, v in self.enclosures:
            if k == label:
                return v
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "claim_id": self.claim_id,
            "gamma": self.gamma,
            "verdict": self.verdict,
            "mode": self.mode,
            "enclosures": {k: interval_strings(v) for k, v in self.enclosures},
            "segments_checked": self.segments_checked,
            "worst_segment": self.worst_segment,
            "wall_seconds": round(self.wall_seconds, 3),
            "checks": self.checks,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, default=str)

    def write(self, out_dir: str | os.PathLike) -> str:
        """Write to a new timestamped file in ``out_dir``; existing files are never touched."""
        os.makedirs(out_dir, exist_ok=True)
        stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        base = os.path.join(out_dir, f"{self.claim_id}-{stamp}")
        path = base + ".json"
        n = 1
        while True:
            try:
                with open(path, "x", encoding="utf-8") as fh:
                    fh.write(self.to_json() + "\n")
                return path
            except FileExistsError:
                path = f"{base}-{n}.json"
                n += 1

    @property
    def exit_code(self) -> int:
        return {CERTIFIED_VERDICT: 0, FAILED: 1, NOT_REACHED: 2}[self.verdict]


def _finish(rep: ClaimReport, t0: float, mode: str) -> ClaimReport:
    rep.wall_seconds = time.perf_counter() - t0
    rep.mode = mode
    if mode == FAST and rep.verdict == CERTIFIED_VERDICT:
        rep.verdict = NOT_REACHED
        rep.details["note"] = "fast mode cannot certify"
    return rep


# ---------------------------------------------------------------------------
# gamma bracket


def certify_gamma_bounds(
    gamma_lo: str = GAMMA_LO,
    gamma_hi: str = GAMMA_HI,
    mode: str = CERTIFIED,
) -> ClaimReport:
    """Certify ``gamma_lo <= gamma_crit <= gamma_hi``.

    ``sup F1`` is decreasing in ``gamma`` and vanishes at ``gamma_crit``.  The
    lower end follows from a point with ``F1 > 0`` at ``gamma_lo``; the upper
    end from ``sup F1 <= F1(w) + F1'(w)^2 / 4 < 0`` at ``gamma_hi``, using
    ``F1'' <= -2``.
    """
    _check_mode(mode)
    t0 = time.perf_counter()
    glo, ghi = as_interval(gamma_lo), as_interval(gamma_hi)
    a_lo, _ = fixed_point_alpha(glo.mid(), -0.4)
    a_hi, _ = fixed_point_alpha(ghi.mid(), -0.4)
    f_lo = F1_eval(glo, a_lo, mode)
    f_hi = F1_eval(ghi, a_hi, mode)
    d_hi = F1_prime(ghi, a_hi, mode)
    sup_hi = concave_sup_bound(SupBoundInput(f_hi, [d_hi], 2.0))
    lower_ok = f_lo.lo > 0
    upper_ok = sup_hi < 0 and glo.lo <= ghi.hi
    verdict = CERTIFIED_VERDICT if lower_ok and upper_ok else FAILED
    rep = ClaimReport(
        "gamma-bounds",
        f"{gamma_lo},{gamma_hi}",
        verdict,
        enclosures=[
            ("gamma_crit", glo.hull(ghi)),
            ("F1_at_lower_witness", f_lo),
            ("F1_at_upper_witness", f_hi),
            ("F1_prime_at_upper_witness", d_hi),
            ("sup_F1_upper_bound_at_gamma_hi", Interval(min(f_hi.lo, sup_hi), sup_hi)),
        ],
        checks={"lower_end": lower_ok, "upper_end": upper_ok},
        details={
            "witness_alpha_lower": repr(a_lo),
            "witness_alpha_upper": repr(a_hi),
            "concavity_M": 2.0,
            "gamma_crit_mid_over_sqrt2": (glo.mid() + ghi.mid()) / 2 / math.sqrt(2.0),
        },
    )
    return _finish(rep, t0, mode)


# ---------------------------------------------------------------------------
# initial beta interval


def certify_initial_interval(gamma: RealLike = GAMMA_BOX, mode: str = CERTIFIED) -> ClaimReport:
    """Certify that on ``beta in [0, .001]`` the second moment rate never beats twice the first.

    Dropping the ``alpha1`` term leaves
    ``G(beta, a) = 2 log 2 + ent(beta) - 2 a^2 + 2 (1 - beta) log f(1 - beta, a)``
    with ``G(0, a) = 2 F1(a)``.  The chain checked here:

    1. ``H(a) = 2 log 2 + ent(.001) + 1.998 (-a^2 + log Phi_bar((gamma + a) sqrt 2))``
       bounds ``G`` and is concave; its values at ``a = -.53`` and
       ``a = -.37`` lie strictly below ``2 F1`` at a witness, while
       ``H(-.45)`` exceeds both; so only ``a in [-.53, -.37]`` matters.
    2. There ``f(1 - beta, a) >= f_lo = f(.999, -.37)`` and
       ``f(1 - beta, a) <= f_up = Phi_bar(sqrt 2 (gamma - .53))``.
    3. With the closed form ``d/dbeta f(1 - beta, a) = -exp(-u^2/(1-beta)) / (2 pi sqrt(beta (1-beta)))``,
       ``dG/dbeta <= D(beta) = -2 log f_lo - 2 log beta - k / sqrt(beta)`` where
       ``k = sqrt(.999) exp(-(.53 - gamma)^2 / .999) / (pi f_up)``.
    4. ``D`` is increasing on ``(0, .001]`` (``k >= 4 sqrt(.001)``), so its
       integral ``I`` is convex with ``I(0) = 0``; ``I(.001) < 0`` then gives
       ``G(beta, a) <= G(0, a)`` throughout.

    The report also evaluates the constants of the classical expectation-based
    route (``-.29 sqrt(beta)`` bound, ``2.239`` intercept) for comparison.
    """
    _check_mode(mode)
    t0 = time.perf_counter()
    g = parse_gamma(gamma)
    if mode == FAST:
        g = Interval(g.mid())
    checks: dict[str, bool] = {}
    enc: list[tuple[str, Interval]] = []
    first_broken = None

    def check(name: str, ok: bool):
        nonlocal first_broken
        checks[name] = bool(ok)
        if not ok and first_broken is None:
            first_broken = name

    def phi_bar(x: Interval) -> Interval:
        return normal_tail(x) if mode == CERTIFIED else Interval(float(rint.normal_tail_fast(x.mid())))

    eta = Interval.from_decimal("0.001")
    ent = entropy(eta)
    w = Interval.from_decimal("0.999")

    def H(a: str) -> Interval:
        ai = Interval.from_decimal(a)
        return 2 * LOG2 + ent + 2 * w * (-ai.sq() + rint.log(phi_bar((g + ai) * SQRT2)))

    h53, h37, h45 = H("-0.53"), H("-0.37"), H("-0.45")
    enc += [("entropy_at_0.001", ent), ("H(-0.53)", h53), ("H(-0.37)", h37), ("H(-0.45)", h45)]
    check("entropy_at_0.001<=0.01582", ent.hi <= 0.01582)
    a_star, _ = fixed_point_alpha(g.mid(), -0.4)
    f1 = F1_eval(g, a_star, mode)
    enc.append(("F1_at_witness", f1))
    # outside [-.53, -.37] the concave H stays below its endpoint values,
    # which must fall strictly below 2 sup F1 >= 2 F1(witness)
    two_f1 = (2 * f1).lo
    check("H(-0.45)>H(-0.53)", h45.lo > h53.hi)
    check("H(-0.45)>H(-0.37)", h45.lo > h37.hi)
    check("H(-0.53)<2F1(witness)", h53.hi < two_f1)
    check("H(-0.37)<2F1(witness)", h37.hi < two_f1)

    # step 2
    a37 = Interval.from_decimal("-0.37")
    a53 = Interval.from_decimal("-0.53")
    if mode == CERTIFIED:
        f_lo = f_enclose(w, g + a37)
    else:
        f_lo = Interval(float(f_fast(w.mid(), (g + a37).mid())))
    f_up = phi_bar((g + a53) * SQRT2)
    enc += [("f_lower(0.999,-0.37)", f_lo), ("f_upper(1,-0.53)", f_up)]
    check("f_lower>0", f_lo.lo > 0)
    l1 = -2 * rint.log(f_lo)
    enc.append(("-2log(f_lower)", l1))

    # step 3
    u53 = g + a53
    k = rint.sqrt(w) * rint.exp(-(u53.sq() / w)) / (PI * f_up)
    enc.append(("k", k))
    check("k>=4sqrt(0.001)", k.lo >= (4 * rint.sqrt(eta)).hi)

    # step 4: I(b) = l1 b - 2 (b log b - b) - 2 k sqrt(b)
    integral = l1 * eta - 2 * (eta * rint.log(eta) - eta) - 2 * k * rint.sqrt(eta)
    enc.append(("integral_of_derivative_bound", integral))
    check("integral<0", integral.hi < 0)

    details = _initial_interval_reference(g, mode, f_up)
    details["reference_links"].update(
        {
            "H(-0.53)<=-1e-3": h53.hi <= -1e-3,
            "H(-0.37)<=-1e-3": h37.hi <= -1e-3,
            "H(-0.45)>=1e-2": h45.lo >= 1e-2,
            "sup_F1>-5e-4": f1.lo > -5e-4,
            "f_lower>=0.538": f_lo.lo >= 0.538,
            "-2log(f_lower)<=1.239": l1.hi <= 1.239,
        }
    )
    verdict = CERTIFIED_VERDICT if first_broken is None else FAILED
    rep = ClaimReport(
        "claim-b1",
        _gamma_string(g, gamma if isinstance(gamma, str) else None),
        verdict,
        enclosures=enc + details.pop("enclosures"),
        checks=checks,
        details={"first_broken_link": first_broken, **details},
    )
    return _finish(rep, t0, mode)


def _initial_interval_reference(g: Interval, mode: str, f_up: Interval) -> dict:
    """Constants of the expectation-based route, evaluated for comparison only."""
    half = Interval(0.5)
    inv_sqrt_2pi = 1 / rint.sqrt(2 * PI)
    u53 = g + Interval.from_decimal("-0.53")
    u37 = g + Interval.from_decimal("-0.37")
    w = Interval.from_decimal("0.999")
    b = Interval.from_decimal("0.001")
    # z1 range for t in [0, 10]
    z_min = rint.sqrt(2 / w) * u53
    z_max = rint.sqrt(2 / w) * u37 + 10 * rint.sqrt(b / w)
    z_ok = z_max.hi <= (-z_min).lo
    # int_0^10 int_{-t}^t (x^2 - 1) phi(x) dx dt = -2 phi(0) (1 - exp(-50))
    inner = -2 * inv_sqrt_2pi * (1 - rint.exp(Interval(-50.0)))
    weight = rint.exp(-(u53.sq() / w)) * inv_sqrt_2pi
    e_coef = weight * inner
    coef_corrected = w * (-e_coef) / f_up
    ref_integral = (
        Interval.from_decimal("2.239") * b - b * rint.log(b) + b - Interval.from_decimal("0.94") * rint.sqrt(b)
    )
    lo_needed = rint.exp(Interval.from_decimal("-1.239") * half)
    return {
        "enclosures": [
            ("z1_min", z_min),
            ("z1_max", z_max),
            ("expectation_coefficient", e_coef),
            ("rate_coefficient_via_expectation", coef_corrected),
            ("reference_integral_2.239_logb_0.47", ref_integral),
            ("f_lower_needed_for_1.239", lo_needed),
        ],
        "reference_links": {
            "z1_range_symmetric": z_ok,
            "expectation_coefficient<=-0.29": e_coef.hi <= -0.29,
            "f_upper<=0.611": f_up.hi <= 0.611,
            "reference_integral<0": ref_integral.hi < 0,
        },
    }


# ---------------------------------------------------------------------------
# segment sweeps


def _eval_segment(args) -> dict:
    plan, gamma_text, mode = args
    try:
        sb = segment_envelope_detail(plan, gamma_text, mode)
    except (LogOfNonpositive, SingularCorrelation, ArithmeticError) as exc:
        return {"label": plan.label(), "bound": math.inf, "status": NOT_REACHED, "error": repr(exc), "checks": {}}
    checks = {k: v for k, v in sb.checks.items()}
    checks_ok = all(v for k, v in checks.items() if k.endswith("_ok"))
    ok = sb.bound <= float(plan.target) and checks_ok
    return {
        "label": plan.label(),
        "bound": sb.bound,
        "status": CERTIFIED_VERDICT if ok else FAILED,
        "corrections": [t.name for t in sb.terms if t.corrected],
        "checks": checks,
    }


def _run_map(tasks: list, parallelism: int) -> list[dict]:
    if parallelism <= 1 or len(tasks) < 2:
        return [_eval_segment(t) for t in tasks]
    chunk = max(1, len(tasks) // (parallelism * 8))
    with ProcessPoolExecutor(max_workers=parallelism) as ex:
        return list(ex.map(_eval_segment, tasks, chunksize=chunk))


def _beta_coverage(plans: Iterable[SegmentPlan]) -> dict:
    """Per case tag, the beta range tiled without gaps (``None`` if gapped)."""
    by_tag: dict[str, list] = {}
    for p in plans:
        by_tag.setdefault(p.case_tag, []).append((p.eta1, p.eta2))
    out = {}
    for tag, v in sorted(by_tag.items()):
        v.sort()
        gapless = all(a[1] >= b[0] for a, b in zip(v, v[1:]))
        out[tag] = [str(v[0][0]), str(max(e for _, e in v))] if gapless else None
    return out


# beta ranges each sweep must tile, per case tag
SWEEP_COVERAGE = {
    "claim-b2": {
        "B2-case1": ("1/1000", "1/200"),
        "B2-case2": ("1/1000", "1/200"),
        "B2-case3": ("1/200", "1/2"),
        "B2-case4": ("1/200", "1/2"),
        "B2-case5": ("1/200", "1/2"),
        "B2-case6": ("1/200", "99/200"),
    },
    "claim-b3": {"B3-local": ("99/200", "1/2")},
}


def sweep_complete(rep: ClaimReport) -> bool:
    """Whether a sweep report tiles every required case range."""
    cov = rep.details.get("beta_coverage", {})
    for tag, (lo, hi) in SWEEP_COVERAGE[rep.claim_id].items():
        got = cov.get(tag)
        if got is None or Fraction(got[0]) > Fraction(lo) or Fraction(got[1]) < Fraction(hi):
            return False
    return True


def certify_sweep(
    plan: Sequence[SegmentPlan],
    gamma: RealLike = GAMMA_SWEEP,
    parallelism: int = 1,
    mode: str = CERTIFIED,
    refine: int = 0,
    claim_id: str = "sweep",
) -> ClaimReport:
    """Check every segment majorant against its target.

    Parameters
    ----------
    plan : sequence of SegmentPlan
    gamma : decimal string or Interval
        Bounds hold for every gamma at or above the lower end.
    parallelism : int
        Worker processes; results are reduced in plan order.
    mode : {"fast", "certified"}
    refine : int
        Bisect segments that miss their target up to this many times (at most 4).
    claim_id : str

    Returns
    -------
    ClaimReport
    """
    _check_mode(mode)
    if not 0 <= refine <= 4:
        raise ValueError("refine must lie in 0..4")
    if not plan:
        raise ValueError("empty plan")
    t0 = time.perf_counter()
    g = parse_gamma(gamma)
    gtext = g if not isinstance(gamma, str) else gamma
    gamma_arg = g
    results = _run_map([(p, gamma_arg, mode) for p in plan], parallelism)
    refined = 0
    final: list[tuple[SegmentPlan, dict]] = []
    for p, r in zip(plan, results):
        if r["status"] == CERTIFIED_VERDICT or refine == 0:
            final.append((p, r))
            continue
        pending = [p]
        for depth in range(refine):
            pieces = [h for q in pending for h in q.bisect()]
            sub = _run_map([(q, gamma_arg, mode) for q in pieces], parallelism)
            refined += len(pieces)
            pending = []
            for q, s in zip(pieces, sub):
                if s["status"] == CERTIFIED_VERDICT or depth == refine - 1:
                    final.append((q, s))
                else:
                    pending.append(q)
            if not pending:
                break
    verdict = _worst(r["status"] for _, r in final)
    worst_p, worst_r = max(final, key=lambda pr: pr[1]["bound"] - float(pr[0].target))
    per_case: dict[str, dict] = {}
    for p, r in final:
        slot = per_case.setdefault(p.case_tag, {"segments": 0, "worst_margin": -math.inf, "worst_segment": None, "corrections": 0})
        slot["segments"] += 1
        slot["corrections"] += len(r.get("corrections", []))
        m = r["bound"] - float(p.target)
        if m > slot["worst_margin"]:
            slot["worst_margin"], slot["worst_segment"] = m, r["label"]
    failures = [r["label"] for _, r in final if r["status"] != CERTIFIED_VERDICT][:20]
    details_cov = _beta_coverage(p for p, _ in final)
    enc = [("worst_bound", Interval(worst_r["bound"]))] if math.isfinite(worst_r["bound"]) else []
    details: dict = {
        "per_case": per_case,
        "failing_segments": failures,
        "refined_segments": refined,
        "parallelism": parallelism,
        "beta_coverage": details_cov,
    }
    local = [r["checks"] for _, r in final if r["checks"]]
    if local:
        details["local_witness"] = {
            "max_G2_at_witness": max(c["G2_at_witness_hi"] for c in local),
            "max_grad_sum": max(c["grad_sum_hi"] for c in local),
            "all_alpha_near_centre": all(c["alpha_near_centre_ok"] for c in local),
        }
    rep = ClaimReport(
        claim_id,
        _gamma_string(g, gtext if isinstance(gtext, str) else None),
        verdict,
        enclosures=enc,
        segments_checked=len(final),
        worst_segment=worst_r["label"],
        details=details,
    )
    return _finish(rep, t0, mode)


# ---------------------------------------------------------------------------
# Hessian near the symmetric point


@dataclass
class HessianBox:
    """Second derivative enclosures of the second moment rate over a box.

    ``entries`` are keyed ``a1a1, a2a2, bb, ba1, ba2, a1a2``.
    """

    beta_box: Interval
    alpha1_box: Interval
    alpha2_box: Interval
    gamma_box: Interval
    entries: dict

    def __post_init__(self):
        if not (self.beta_box.lo >= 0.495 - 1e-12 and self.beta_box.hi <= 0.505 + 1e-12):
            raise ValueError("beta box must lie in [.495, .505]")
        for a in (self.alpha1_box, self.alpha2_box):
            if not (a.lo >= -0.449 - 1e-12 and a.hi <= -0.441 + 1e-12):
                raise ValueError("alpha boxes must lie in [-.449, -.441]")
        e = self.entries.get("a1a2")
        if e is None or not (e.lo == e.hi == 0.0):
            raise ValueError("the mixed alpha entry must be exactly zero")


def _log_terms(b: Interval, u: Interval):
    """``(f, f_u, f_uu, f_b, f_bb, f_bu)`` enclosures on a box."""
    p = OrthantParams(0.0, b, u)
    f = f_enclose(b, u)
    fu = -(2 / SQRT_PI) * rint.exp(-u.sq()) * normal_tail(u * rint.sqrt(2 * (1 - b) / b))
    fuu = f_second(p, "aa")
    fb = _f_beta_iv(b, u)
    fbb = f_second(p, "bb")
    fbu = f_second(p, "ba")
    return f, fu, fuu, fb, fbb, fbu


def _hessian_piece(b: Interval, u1: Interval, u2: Interval) -> dict:
    c = 1 - b
    f1, f1u, f1uu, f1b, f1bb, f1bu = _log_terms(b, u1)
    f2, f2u, f2uu, f2b, f2bb, f2bu = _log_terms(c, u2)
    r1, r2 = f1u / f1, f2u / f2
    q1, q2 = f1b / f1, f2b / f2
    a1a1 = -4 + 2 * b * (f1uu / f1 - r1.sq())
    a2a2 = -4 + 2 * c * (f2uu / f2 - r2.sq())
    bb = -2 / (b * c) + 4 * q1 + 2 * b * (f1bb / f1 - q1.sq()) + 4 * q2 + 2 * c * (f2bb / f2 - q2.sq())
    ba1 = 2 * r1 + 2 * b * (f1bu / f1 - q1 * r1)
    ba2 = -(2 * r2 + 2 * c * (f2bu / f2 - q2 * r2))
    return {"a1a1": a1a1, "a2a2": a2a2, "bb": bb, "ba1": ba1, "ba2": ba2}


def _split(x: Interval, n: int) -> list[Interval]:
    if n <= 1:
        return [x]
    pts = [x.lo + (x.hi - x.lo) * i / n for i in range(n + 1)]
    pts[0], pts[-1] = x.lo, x.hi
    return [Interval(pts[i], pts[i + 1]) for i in range(n)]


def _hessian_enclosure(beta: Interval, a1: Interval, a2: Interval, g: Interval, splits: int) -> dict:
    out: dict = {}
    for b in _split(beta, splits):
        for x1 in _split(a1, splits):
            for x2 in _split(a2, splits):
                piece = _hessian_piece(b, g + x1, g + x2)
                for k, v in piece.items():
                    out[k] = v if k not in out else out[k].hull(v)
    out["a1a2"] = Interval(0.0)
    return out


def _neg_minors(e: dict, delta: float) -> tuple[Interval, Interval, Interval]:
    d = Interval(delta)
    a1 = -e["a1a1"] - d
    a2 = -e["a2a2"] - d
    b = -e["bb"] - d
    m1 = -e["ba1"]
    m2 = -e["ba2"]
    return a1, a1 * a2, a1 * a2 * b - m1.sq() * a2 - m2.sq() * a1


def box_enclosures(
    gamma: RealLike = GAMMA_BOX,
    beta_box: tuple[str, str] = ("0.495", "0.505"),
    alpha_box: tuple[str, str] = ("-0.45", "-0.44"),
    splits: tuple[int, int] = (4, 4),
) -> dict[str, Interval]:
    """Enclosures of ``f``, ``df/dbeta`` and ``beta f_bb + 2 f_b`` over a box."""
    g = parse_gamma(gamma)
    b = Interval.from_decimal(beta_box[0]).hull(Interval.from_decimal(beta_box[1]))
    a = Interval.from_decimal(alpha_box[0]).hull(Interval.from_decimal(alpha_box[1]))
    p = OrthantParams(g, b, a)
    return {
        "f": over_box(lambda q: f_enclose(as_interval(q.beta), q.u()), p, splits),
        "f_beta": over_box(lambda q: f_dbeta(q, "first"), p, splits),
        "combo": over_box(lambda q: f_dbeta(q, "combo"), p, splits),
    }


def certify_hessian(
    gamma_box: RealLike = GAMMA_BOX,
    splits: int = 4,
    mode: str = CERTIFIED,
) -> ClaimReport:
    """Certify negative definiteness of the Hessian near the symmetric point.

    Entries are enclosed over ``beta in [.495, .505]``, ``alpha_i in [-.449, -.441]``
    and the gamma box from closed-form derivatives of ``f``.  The checks are
    ``d2/da_i^2 <= -4``, ``d2/db^2 <= -2.15`` and ``|d2/db da_i| <= 2.05``;
    definiteness follows from Sylvester's criterion applied to the negated
    enclosure shifted by ``delta``, found by bisection as the largest shift
    keeping all three leading minors certified positive.
    """
    _check_mode(mode)
    t0 = time.perf_counter()
    g = parse_gamma(gamma_box)
    beta = Interval.from_decimal("0.495").hull(Interval.from_decimal("0.505"))
    abox = Interval.from_decimal("-0.449").hull(Interval.from_decimal("-0.441"))
    if mode == FAST:
        e = _hessian_piece(Interval(beta.mid()), Interval(g.mid() + abox.mid()), Interval(g.mid() + abox.mid()))
        e["a1a2"] = Interval(0.0)
    else:
        e = _hessian_enclosure(beta, abox, abox, g, splits)
    hb = HessianBox(beta, abox, abox, g, e)
    checks = {
        "a1a1<=-4": e["a1a1"].hi <= -4,
        "a2a2<=-4": e["a2a2"].hi <= -4,
        "bb<=-2.15": e["bb"].hi <= -2.15,
        "|ba1|<=2.05": e["ba1"].mag() <= 2.05,
        "|ba2|<=2.05": e["ba2"].mag() <= 2.05,
        "a1a2==0": True,
    }
    minors0 = _neg_minors(e, 0.0)
    checks["sylvester"] = all(m.lo > 0 for m in minors0)
    delta = 0.0
    if checks["sylvester"]:
        lo, hi = 0.0, -e["a1a1"].hi
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if all(m.lo > 0 for m in _neg_minors(e, mid)):
                lo = mid
            else:
                hi = mid
        delta = lo
    checks["delta>0"] = delta > 0
    cross = box_enclosures(g) if mode == CERTIFIED else {}
    if cross:
        checks["f_in_[.36544,.37761]"] = cross["f"].lo >= 0.36544 and cross["f"].hi <= 0.37761
        checks["f_beta_in_[.2780,.3110]"] = cross["f_beta"].lo >= 0.2780 and cross["f_beta"].hi <= 0.3110
        checks["combo<=.630"] = cross["combo"].hi <= 0.630
    verdict = CERTIFIED_VERDICT if all(checks.values()) else FAILED
    enc = [(k, v) for k, v in e.items()]
    enc += [(f"minor{i + 1}", m) for i, m in enumerate(minors0)]
    enc += [(f"box_{k}", v) for k, v in cross.items()]
    rep = ClaimReport(
        "claim-b4",
        _gamma_string(g, gamma_box if isinstance(gamma_box, str) else None),
        verdict,
        enclosures=enc,
        segments_checked=splits**3 if mode == CERTIFIED else 1,
        checks=checks,
        details={
            "delta": delta,
            "splits_per_axis": splits,
            "box_derivatives_certified": mode == CERTIFIED,
            "beta_box": interval_strings(hb.beta_box),
            "alpha_box": interval_strings(hb.alpha1_box),
        },
    )
    return _finish(rep, t0, mode)


# ---------------------------------------------------------------------------
# overall assumption


@dataclass
class AssumptionVerdict:
    """Conjunction of the claim reports with the gamma range it covers."""

    verdict: str
    components: dict
    gamma_crit: Optional[Interval]
    covered: Optional[Interval]
    epsilon: float
    composition: list[str]

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "claim_id": "assumption",
            "verdict": self.verdict,
            "components": self.components,
            "gamma_crit": interval_strings(self.gamma_crit) if self.gamma_crit else None,
            "gamma_covered": interval_strings(self.covered) if self.covered else None,
            "epsilon": self.epsilon,
            "composition": self.composition,
        }

    def to_claim_report(self) -> ClaimReport:
        enc = []
        if self.gamma_crit:
            enc.append(("gamma_crit", self.gamma_crit))
        if self.covered:
            enc.append(("gamma_covered", self.covered))
        return ClaimReport(
            "assumption",
            ",".join(interval_strings(self.covered)) if self.covered else "",
            self.verdict,
            enclosures=enc,
            segments_checked=len(self.components),
            details={"components": self.components, "epsilon": self.epsilon, "composition": self.composition},
        )


_REQUIRED = ("gamma-bounds", "claim-b1", "claim-b2", "claim-b3", "claim-b4")


def _coverage(rep: ClaimReport) -> Interval:
    g = parse_gamma(rep.gamma)
    if rep.claim_id in ("claim-b2", "claim-b3"):
        # majorants decrease in gamma: valid for every gamma above the lower end
        return Interval(g.lo, 1.0)
    return g


def assemble_assumption_report(reports: Sequence[ClaimReport]) -> AssumptionVerdict:
    """Combine the five claim reports into one verdict.

    The composition: the gamma bracket places ``gamma_crit``; on
    ``beta in [0, .001]`` the second moment rate equals twice the first; on
    ``[.001, .495]`` it is below ``-1e-5``; on ``[.495, .5]`` outside the alpha
    box it is below ``1e-6``; inside the box the Hessian is negative definite,
    and the gradient vanishes at the symmetric point, which is then the unique
    maximiser with value four times the first moment rate.  Symmetry in
    ``beta -> 1 - beta`` covers ``[.5, 1]``.

    Raises
    ------
    IncompleteInputs
        If any of ``gamma-bounds``, ``claim-b1`` ... ``claim-b4`` is missing.
    """
    by_id = {r.claim_id: r for r in reports}
    missing = [c for c in _REQUIRED if c not in by_id]
    if missing:
        raise IncompleteInputs(f"missing claim reports: {', '.join(missing)}")
    comps = {c: by_id[c].verdict for c in _REQUIRED}
    partial = [c for c in ("claim-b2", "claim-b3") if comps[c] == CERTIFIED_VERDICT and not sweep_complete(by_id[c])]
    for c in partial:
        comps[c] = NOT_REACHED
    verdict = _worst(comps.values())
    gc = by_id["gamma-bounds"].enclosure("gamma_crit")
    cov: Optional[Interval] = None
    for c in _REQUIRED[1:]:
        iv = _coverage(by_id[c])
        cov = iv if cov is None else cov.intersect(iv)
        if cov is None:
            break
    eps = -math.inf
    if cov is not None:
        eps = min(gc.lo - cov.lo, cov.hi - gc.hi)
    if verdict == CERTIFIED_VERDICT and not eps > 0:
        verdict = FAILED
    failed = [c for c, v in comps.items() if v != CERTIFIED_VERDICT]
    comp = [
        f"gamma_crit in [{gc.lo!r}, {gc.hi!r}] ({comps['gamma-bounds']})",
        f"beta in [0, .001]: sup equals twice the first moment rate ({comps['claim-b1']})",
        f"beta in [.001, .495]: sup below -1e-5 ({comps['claim-b2']})",
        f"beta in [.495, .5], alpha outside box: sup below 1e-6 ({comps['claim-b3']})",
        f"beta in [.495, .505], alpha in box: Hessian negative definite ({comps['claim-b4']})",
        "gradient vanishes at (1/2, a*, a*); value there is four times the first moment rate",
        "symmetry beta -> 1 - beta with alpha1 <-> alpha2 covers beta in [.5, 1]",
    ]
    if failed:
        comp.append("not established: " + ", ".join(failed))
    if partial:
        comp.append("partial beta coverage: " + ", ".join(partial))
    comp.append(f"holds for every gamma within {eps!r} of gamma_crit" if eps > 0 else "gamma ranges do not cover the bracket")
    return AssumptionVerdict(verdict, comps, gc, cov, eps, comp)
