"""First and second moment functionals and their segment majorants.

``F1(alpha) = log 2 - alpha^2 + log Phi_bar((gamma + alpha) sqrt 2)``

``F2(beta, a1, a2) = 2 log 2 - 2 beta log beta - 2 (1 - beta) log(1 - beta)
- 2 a1^2 - 2 a2^2 + 2 beta log f(beta, a1) + 2 (1 - beta) log f(1 - beta, a2)``

Segment majorants
-----------------
For ``beta`` in ``[eta1, eta2]`` with ``eta2 <= 1/2`` the entropy part is at
most its value at ``eta2`` and each ``log f`` term is bounded using that
``f`` is non-decreasing in ``beta``.  After the substitution
``u = gamma + alpha`` every surviving alpha-term has the form

    A(u) = -2 (u - gamma)^2 + 2 c log f(b, s u)

with constants ``c`` (coefficient), ``b`` (beta argument) and ``s``
(threshold scale), restricted to a half-line in ``u``.  ``A`` is concave with
``A'' <= -4``; a witness ``w`` near the maximiser and the inequality

    sup_{u in D} A(u) <= sup_{d : w + d in D} A(w) + A'(w) d - (M / 2) d^2

turn one certified evaluation into a bound over the whole domain ``D``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from typing import Iterable, Optional, Sequence

from scipy import optimize as _opt
from scipy import special as _sp

from . import rint
from .gaussfn import (
    CERTIFIED,
    FAST,
    RealLike,
    _check_mode,
    as_interval,
    f_enclose,
    f_fast,
    f_u_fast,
)
from .rint import LOG2, SQRT2, SQRT_PI, Interval, normal_tail

__all__ = [
    "F2Point",
    "SupBoundInput",
    "SegmentPlan",
    "SegmentBound",
    "TermBound",
    "LogOfNonpositive",
    "NoConvergence",
    "NonpositiveM",
    "CaseMismatch",
    "ManifestError",
    "CASE_TAGS",
    "F1_eval",
    "F1_prime",
    "F1_fast",
    "F1_prime_fast",
    "F2_eval",
    "F2_fast",
    "fixed_point_alpha",
    "concave_sup_bound",
    "quadratic_sup",
    "segment_envelope_sup",
    "segment_envelope_detail",
    "entropy",
    "read_manifest",
    "write_manifest",
    "parse_manifest",
    "bundled_manifest",
    "standard_schedule",
    "smoke_subset",
    "BUNDLED_MANIFESTS",
]

CASE_TAGS = (
    "B1-tail",
    "B2-case1",
    "B2-case2",
    "B2-case3",
    "B2-case4",
    "B2-case5",
    "B2-case6",
    "B3-local",
)

# which alpha-terms survive in each case, and the half-line each lives on
_CASES: dict[str, tuple[Optional[str], str]] = {
    "B1-tail": (None, "all"),
    "B2-case1": (None, "le"),
    "B2-case2": (None, "ge"),
    "B2-case3": ("ge", "ge"),
    "B2-case4": ("le", "ge"),
    "B2-case5": ("ge", "le"),
    "B2-case6": ("le", "le"),
    "B3-local": ("le", "le"),
}

LOCAL_BOX = ("-0.449", "-0.441")
LOCAL_CENTER = Decimal("-0.445")


class LogOfNonpositive(ArithmeticError):
    """An orthant probability enclosure touches zero, so its log is unbounded."""


class NoConvergence(RuntimeError):
    """The fixed-point iteration did not settle within ``max_iter`` steps."""


class NonpositiveM(ValueError):
    """The concavity constant must be positive."""


class CaseMismatch(ValueError):
    """A segment is inconsistent with the requirements of its case tag."""


class ManifestError(ValueError):
    """A segment manifest line could not be parsed."""


# ---------------------------------------------------------------------------
# F1


def F1_fast(gamma: float, alpha: float) -> float:
    """Floating-point ``F1`` using ``log_ndtr``."""
    u = float(gamma) + float(alpha)
    return math.log(2.0) - alpha * alpha + float(_sp.log_ndtr(-u * math.sqrt(2.0)))


def F1_prime_fast(gamma: float, alpha: float) -> float:
    """``F1'(alpha) = -2 alpha - 2 / (sqrt(pi) erfcx(gamma + alpha))``.

    Written with the scaled complementary error function, which makes it an
    evaluation independent of the ``ndtr``-based fixed-point map.
    """
    u = float(gamma) + float(alpha)
    return -2.0 * alpha - 2.0 / (math.sqrt(math.pi) * float(_sp.erfcx(u)))


def F1_eval(gamma: RealLike, alpha: RealLike, mode: str = FAST) -> Interval:
    """First moment rate ``F1`` at ``gamma``.

    Parameters
    ----------
    gamma, alpha : float, decimal string or Interval
    mode : {"fast", "certified"}

    Returns
    -------
    Interval
        A point interval in fast mode; an enclosure in certified mode.

    Examples
    --------
    >>> F1_eval("0.24841951", -0.445183267, "certified").lo > 4e-8
    True
    """
    _check_mode(mode)
    if mode == FAST:
        g = as_interval(gamma).mid()
        a = as_interval(alpha).mid()
        return Interval(F1_fast(g, a))
    g = as_interval(gamma)
    a = as_interval(alpha)
    tail = normal_tail((g + a) * SQRT2)
    return LOG2 - a.sq() + rint.log(tail)


def F1_prime(gamma: RealLike, alpha: RealLike, mode: str = FAST) -> Interval:
    """Derivative ``F1'(alpha) = -2 alpha - exp(-u^2) / (sqrt(pi) Phi_bar(u sqrt 2))``."""
    _check_mode(mode)
    if mode == FAST:
        return Interval(F1_prime_fast(as_interval(gamma).mid(), as_interval(alpha).mid()))
    g = as_interval(gamma)
    a = as_interval(alpha)
    u = g + a
    return -2 * a - rint.exp(-u.sq()) / (SQRT_PI * normal_tail(u * SQRT2))


def fixed_point_alpha(
    gamma: float,
    alpha0: float,
    tol: float = 1e-13,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Maximiser of ``F1`` by the iteration ``alpha <- -exp(-u^2) / (2 sqrt(pi) Phi_bar(u sqrt 2))``.

    Parameters
    ----------
    gamma : float
    alpha0 : float
        Starting point.
    tol : float
        Stop when successive iterates differ by at most ``tol``.
    max_iter : int

    Returns
    -------
    alpha_star : float
    residual : float
        ``|F1'(alpha_star)|`` from :func:`F1_prime_fast`.

    Raises
    ------
    NoConvergence
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = float(gamma)
    a = float(alpha0)
    for _ in range(max_iter):
        u = g + a
        nxt = -math.exp(-u * u) / (2.0 * math.sqrt(math.pi) * float(_sp.ndtr(-u * math.sqrt(2.0))))
        if abs(nxt - a) <= tol:
            return nxt, abs(F1_prime_fast(g, nxt))
        a = nxt
    raise NoConvergence(f"no fixed point within {max_iter} iterations (last {a!r})")


# ---------------------------------------------------------------------------
# F2


@dataclass(frozen=True)
class F2Point:
    """Evaluation point of ``F2``."""

    beta: RealLike
    alpha1: RealLike
    alpha2: RealLike
    gamma: RealLike

    def __post_init__(self):
        b = as_interval(self.beta)
        if b.lo < 0 or b.hi > 1:
            raise rint.DomainViolation("beta must lie in [0, 1]", b.lo)


def entropy(eta: RealLike) -> Interval:
    """``-2 eta log eta - 2 (1 - eta) log(1 - eta)`` with ``0 log 0 = 0``."""
    e = as_interval(eta)
    out = Interval(0.0)
    if e.hi > 0:
        if e.lo <= 0:
            raise rint.DomainViolation("entropy needs eta bounded away from 0 or exactly 0", e.lo)
        out = out - 2 * e * rint.log(e)
    one_minus = 1 - e
    if one_minus.hi > 0 and not (one_minus.lo == one_minus.hi == 0):
        if one_minus.lo <= 0:
            raise rint.DomainViolation("entropy needs eta bounded away from 1", e.hi)
        out = out - 2 * one_minus * rint.log(one_minus)
    return out


def F2_fast(beta: float, alpha1: float, alpha2: float, gamma: float) -> float:
    """Floating-point ``F2``; ``beta`` in ``{0, 1}`` drops the vanishing terms."""
    b = float(beta)
    out = 2 * math.log(2) - 2 * alpha1 * alpha1 - 2 * alpha2 * alpha2
    if 0 < b < 1:
        out += -2 * b * math.log(b) - 2 * (1 - b) * math.log(1 - b)
    if b > 0:
        f1 = float(f_fast(b, gamma + alpha1))
        if f1 <= 0:
            raise LogOfNonpositive(f"f({b}, {alpha1}) underflows")
        out += 2 * b * math.log(f1)
    if b < 1:
        f2 = float(f_fast(1 - b, gamma + alpha2))
        if f2 <= 0:
            raise LogOfNonpositive(f"f({1 - b}, {alpha2}) underflows")
        out += 2 * (1 - b) * math.log(f2)
    return out


def F2_eval(p: F2Point, mode: str = FAST) -> Interval:
    """Second moment rate ``F2`` at a point (or small box).

    At ``beta = 0`` the terms ``beta log beta`` and ``beta log f(beta, a1)``
    are dropped (and symmetrically at ``beta = 1``), so that
    ``F2(0, 0, a) = 2 F1(a)``.

    Raises
    ------
    LogOfNonpositive
        If an orthant probability enclosure touches zero.
    """
    _check_mode(mode)
    if mode == FAST:
        return Interval(
            F2_fast(as_interval(p.beta).mid(), as_interval(p.alpha1).mid(), as_interval(p.alpha2).mid(), as_interval(p.gamma).mid())
        )
    b = as_interval(p.beta)
    g = as_interval(p.gamma)
    a1 = as_interval(p.alpha1)
    a2 = as_interval(p.alpha2)
    out = 2 * LOG2 - 2 * a1.sq() - 2 * a2.sq()
    if b.hi > 0 and b.lo < 1:
        out = out + entropy(b)
    if b.hi > 0:
        f1 = f_enclose(b, g + a1)
        if f1.lo <= 0:
            raise LogOfNonpositive(f"f enclosure {f1!r} touches zero")
        out = out + 2 * b * rint.log(f1)
    if b.lo < 1:
        f2 = f_enclose(1 - b, g + a2)
        if f2.lo <= 0:
            raise LogOfNonpositive(f"f enclosure {f2!r} touches zero")
        out = out + 2 * (1 - b) * rint.log(f2)
    return out


# ---------------------------------------------------------------------------
# concavity bounds


@dataclass(frozen=True)
class SupBoundInput:
    """Value and gradient of an ``M``-strongly concave function at a point."""

    value_at_z: RealLike
    grad_at_z: Sequence[RealLike]
    concavity_M: float

    def __post_init__(self):
        if not self.concavity_M > 0:
            raise NonpositiveM(f"concavity_M must be positive, got {self.concavity_M!r}")


def concave_sup_bound(inp: SupBoundInput) -> float:
    """Certified ``value + |grad|^2 / (2 M)``, an upper bound on the global supremum.

    Examples
    --------
    >>> concave_sup_bound(SupBoundInput(-0.01, [-0.2], 2.0)) < 1e-15
    True
    """
    if not inp.concavity_M > 0:
        raise NonpositiveM("concavity_M must be positive")
    v = as_interval(inp.value_at_z)
    g2 = Interval(0.0)
    for g in inp.grad_at_z:
        gi = as_interval(g)
        g2 = g2 + Interval(gi.mag()).sq()
    return (v + g2 / (2 * Interval(inp.concavity_M))).hi


def quadratic_sup(value: Interval, grad: Interval, M: float, d_lo: float = -math.inf, d_hi: float = math.inf) -> float:
    """Upper bound on ``sup_{d in [d_lo, d_hi]} value + grad d - (M/2) d^2``.

    Valid for every gradient in ``grad``; the supremum is convex in the
    gradient, so only its endpoints are checked.  When the vertex ``g / M``
    cannot be placed relative to the interval with certainty the unrestricted
    bound ``value + g^2 / (2M)`` is used.
    """
    if not M > 0:
        raise NonpositiveM("M must be positive")
    if d_lo > d_hi:
        return -math.inf
    Mi = Interval(M)
    best = -math.inf
    for g in {grad.lo, grad.hi}:
        gi = Interval(g)
        vert = gi / Mi
        if vert.hi < d_lo:
            d = Interval(d_lo)
            cand = value + gi * d - Mi * d.sq() * 0.5
        elif vert.lo > d_hi:
            d = Interval(d_hi)
            cand = value + gi * d - Mi * d.sq() * 0.5
        else:
            cand = value + gi.sq() / (2 * Mi)
        best = max(best, cand.hi)
    return best


# ---------------------------------------------------------------------------
# segment plans and manifests


@dataclass(frozen=True)
class SegmentPlan:
    """One beta-interval ``[eta1, eta2]`` with its case tag and target bound."""

    case_tag: str
    eta1: Fraction
    eta2: Fraction
    target: Decimal

    def __post_init__(self):
        object.__setattr__(self, "eta1", Fraction(self.eta1))
        object.__setattr__(self, "eta2", Fraction(self.eta2))
        object.__setattr__(self, "target", Decimal(str(self.target)))
        if self.case_tag not in CASE_TAGS:
            raise CaseMismatch(f"unknown case tag {self.case_tag!r}")
        cap = Fraction(505, 1000) if self.case_tag == "B3-local" else Fraction(1, 2)
        if not (0 <= self.eta1 < self.eta2 <= cap):
            raise CaseMismatch(f"segment [{self.eta1}, {self.eta2}] invalid for {self.case_tag}")
        if self.case_tag not in ("B3-local", "B1-tail") and not self.target < 0:
            raise CaseMismatch(f"target {self.target} must be negative for {self.case_tag}")

    def label(self) -> str:
        return f"{self.case_tag}[{self.eta1},{self.eta2}]"

    def to_line(self) -> str:
        return (
            f"{self.case_tag} {self.eta1.numerator} {self.eta1.denominator} "
            f"{self.eta2.numerator} {self.eta2.denominator} {self.target}"
        )

    def bisect(self) -> tuple["SegmentPlan", "SegmentPlan"]:
        m = (self.eta1 + self.eta2) / 2
        return (
            SegmentPlan(self.case_tag, self.eta1, m, self.target),
            SegmentPlan(self.case_tag, m, self.eta2, self.target),
        )


def parse_manifest(lines: Iterable[str], source: str = "<manifest>") -> list[SegmentPlan]:
    """Parse manifest lines ``tag n1 d1 n2 d2 target``; ``#`` starts a comment."""
    out = []
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ManifestError(f"{source}:{no}: expected 6 fields, got {len(parts)}")
        tag, n1, d1, n2, d2, tgt = parts
        try:
            e1 = Fraction(int(n1), int(d1))
            e2 = Fraction(int(n2), int(d2))
            t = Decimal(tgt)
        except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
            raise ManifestError(f"{source}:{no}: {exc}") from None
        try:
            out.append(SegmentPlan(tag, e1, e2, t))
        except CaseMismatch as exc:
            raise ManifestError(f"{source}:{no}: {exc}") from None
    return out


def read_manifest(path: str | os.PathLike) -> list[SegmentPlan]:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh, str(path))


def write_manifest(plans: Iterable[SegmentPlan], path: str | os.PathLike, header: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in header.splitlines():
            fh.write(f"# {line}\n")
        for p in plans:
            fh.write(p.to_line() + "\n")


_SCHEDULES: dict[str, list[tuple[str, str, int, int, Fraction]]] = {
    "b2": [
        ("B2-case1", "-0.001", 10, 49, Fraction(1, 10**4)),
        ("B2-case2", "-0.01", 1, 4, Fraction(1, 10**3)),
        *[
            (tag, "-0.001", lo, hi, step)
            for tag in ("B2-case3", "B2-case4", "B2-case5")
            for lo, hi, step in ((5, 19, Fraction(1, 10**3)), (2, 49, Fraction(1, 100)))
        ],
        ("B2-case6", "-0.00001", 5, 19, Fraction(1, 10**3)),
        ("B2-case6", "-0.00001", 2, 24, Fraction(1, 100)),
        ("B2-case6", "-0.00001", 250, 424, Fraction(1, 10**3)),
        ("B2-case6", "-0.00001", 4250, 4724, Fraction(1, 10**4)),
        ("B2-case6", "-0.00001", 23625, 24299, Fraction(1, 5 * 10**4)),
        ("B2-case6", "-0.00001", 48600, 48799, Fraction(1, 10**5)),
        ("B2-case6", "-0.00001", 97600, 98749, Fraction(1, 2 * 10**5)),
        ("B2-case6", "-0.00001", 197500, 197999, Fraction(1, 4 * 10**5)),
    ],
    "b3": [("B3-local", "0.000001", 198000, 199999, Fraction(1, 4 * 10**5))],
}


def standard_schedule(name: str) -> list[SegmentPlan]:
    """Segments ``[j h, (j + 1) h]`` of the standard sweeps ``"b2"`` or ``"b3"``."""
    try:
        spec = _SCHEDULES[name]
    except KeyError:
        raise KeyError(f"unknown schedule {name!r}") from None
    return [
        SegmentPlan(tag, j * step, (j + 1) * step, Decimal(target))
        for tag, target, lo, hi, step in spec
        for j in range(lo, hi + 1)
    ]


def smoke_subset(plans: Sequence[SegmentPlan], size: int = 50) -> list[SegmentPlan]:
    """Evenly spaced subset that always keeps the last segment."""
    n = len(plans)
    if size >= n:
        return list(plans)
    idx = sorted({round(k * (n - 1) / (size - 1)) for k in range(size)})
    return [plans[i] for i in idx]


BUNDLED_MANIFESTS = {
    "b2": "b2.manifest",
    "b3": "b3.manifest",
    "b2-smoke": "b2-smoke.manifest",
    "b3-smoke": "b3-smoke.manifest",
}


def bundled_manifest(name: str) -> list[SegmentPlan]:
    """Load one of the manifests shipped in ``fcert/data``."""
    try:
        fname = BUNDLED_MANIFESTS[name]
    except KeyError:
        raise KeyError(f"unknown bundled manifest {name!r}; choose from {sorted(BUNDLED_MANIFESTS)}") from None
    text = resources.files("fcert").joinpath("data", fname).read_text(encoding="utf-8")
    return parse_manifest(text.splitlines(), fname)


# ---------------------------------------------------------------------------
# segment majorants


@dataclass
class TermBound:
    """Bound on one separable alpha-term ``A(u)`` of a segment majorant."""

    name: str
    domain: str
    coef: float
    beta_arg: float
    scale: float
    u_star: float
    witness_u: float
    value: Interval
    grad: Interval
    sup_all: float
    sup_excluded: float = math.nan
    corrected: bool = False


@dataclass
class SegmentBound:
    """Full record of one segment majorant evaluation."""

    plan: SegmentPlan
    gamma: float
    mode: str
    constant: Interval
    terms: list[TermBound]
    bound: float
    witness_value: Interval
    reached: bool = True
    checks: dict = field(default_factory=dict)

    @property
    def interval(self) -> Interval:
        lo = min(self.witness_value.lo, self.bound)
        return Interval(lo, self.bound)

    @property
    def passed(self) -> bool:
        return self.bound <= float(self.plan.target) and self.reached


def _term_params(name: str, domain: str, e1: Fraction, e2: Fraction) -> tuple[float, float, float]:
    """Doubles ``(c, b, s)`` that give a valid majorant for the exact rationals.

    ``c`` is rounded down (it multiplies a non-positive log), ``b`` up (``f``
    is non-decreasing in beta) and ``s`` up (on ``u <= 0`` a larger scale
    lowers the threshold and raises ``f``).
    """
    if name == "alpha1":
        c, b = e1, e2
        s2 = e2 / e1 if domain == "le" else Fraction(1)
    else:
        c, b = 1 - e2, 1 - e1
        s2 = (1 - e1) / (1 - e2) if domain == "le" else Fraction(1)
    ci = Interval.from_fraction(c)
    bi = Interval.from_fraction(b)
    s = 1.0 if s2 == 1 else rint.sqrt(Interval.from_fraction(s2)).hi
    return ci.lo, min(bi.hi, 1.0), s


def _A_fast(u: float, g: float, c: float, b: float, s: float) -> float:
    fv = float(f_fast(b, s * u))
    return -2 * (u - g) ** 2 + 2 * c * math.log(fv) if fv > 0 else -math.inf


def _dA_fast(u: float, g: float, c: float, b: float, s: float) -> float:
    fv = float(f_fast(b, s * u))
    fu = float(f_u_fast(b, s * u)) if b < 1 else -math.exp(-(s * u) ** 2) / math.sqrt(math.pi)
    if fv <= 0:
        return -math.inf
    return -4 * (u - g) + 2 * c * s * fu / fv


def _maximise_term(g: float, c: float, b: float, s: float) -> float:
    """Unconstrained maximiser of ``A`` via the damped fixed point ``u = g + (c s / 2) f_u / f``."""
    if c == 0:
        return g
    u = g - 0.45
    for _ in range(200):
        fv = float(f_fast(b, s * u))
        if fv <= 0:
            break
        fu = float(f_u_fast(b, s * u)) if b < 1 else -math.exp(-(s * u) ** 2) / math.sqrt(math.pi)
        nxt = g + 0.5 * c * s * fu / fv
        nxt = 0.5 * (u + nxt)
        if abs(nxt - u) <= 1e-15:
            return nxt
        u = nxt
    # the derivative is decreasing with A'(g) <= 0 < A'(g - 5)
    return _opt.brentq(lambda t: _dA_fast(t, g, c, b, s), g - 5.0, g, xtol=1e-16, rtol=4e-16, maxiter=400)


def _A_cert(u: float, g: float, c: float, b: float, s: float) -> tuple[Interval, Interval]:
    """Certified ``A(u)`` and ``A'(u)`` for the double witness ``u``."""
    ui = Interval(u)
    su = ui if s == 1.0 else ui * s
    fv = f_enclose(Interval(b), su, rtol=1e-11)
    if fv.lo <= 0:
        raise LogOfNonpositive(f"f({b}, {su!r}) enclosure touches zero")
    if b >= 1.0:
        fu = -rint.exp(-su.sq()) / SQRT_PI
    else:
        bi = Interval(b)
        fu = -(2 / SQRT_PI) * rint.exp(-su.sq()) * normal_tail(su * rint.sqrt(2 * (1 - bi) / bi))
    d = ui - g
    val = -2 * d.sq() + 2 * Interval(c) * rint.log(fv)
    grad = -4 * d + 2 * Interval(c) * s * fu / fv
    return val, grad


def _domain_bounds(domain: str, ge_edge: float) -> tuple[float, float]:
    if domain == "le":
        return -math.inf, 0.0
    if domain == "ge":
        return ge_edge, math.inf
    return -math.inf, math.inf


def segment_envelope_detail(
    seg: SegmentPlan,
    gamma: RealLike,
    mode: str = CERTIFIED,
    M: float = 2.0,
) -> SegmentBound:
    """Evaluate the case majorant of ``F2`` over one segment.

    See :func:`segment_envelope_sup`; this variant returns every intermediate
    quantity (witnesses, per-term bounds, corrections, local-claim checks).
    """
    _check_mode(mode)
    tags = _CASES.get(seg.case_tag)
    if tags is None:
        raise CaseMismatch(f"unknown case tag {seg.case_tag!r}")
    if seg.eta2 > Fraction(1, 2):
        raise CaseMismatch("the entropy bound needs eta2 <= 1/2")
    gi = as_interval(gamma)
    g = gi.lo  # f decreases in gamma, so the lower end gives a majorant
    ge_edge = (Interval(g) - gi.hi).lo  # alpha >= -gamma_hi  <=>  u >= g - gamma_hi
    e1, e2 = seg.eta1, seg.eta2
    const = 2 * LOG2 + entropy(Interval.from_fraction(e2))
    terms: list[TermBound] = []
    reached = True
    for name, domain in (("alpha1", tags[0]), ("alpha2", tags[1])):
        if domain is None:
            continue
        if name == "alpha1" and e1 == 0:
            raise CaseMismatch("the alpha1 term needs eta1 > 0")
        c, b, s = _term_params(name, domain, e1, e2)
        u_star = _maximise_term(g, c, b, s)
        lo, hi = _domain_bounds(domain, ge_edge)
        w = min(max(u_star, lo), hi)
        if mode == FAST:
            v = _A_fast(w, g, c, b, s)
            val, grad = Interval(v), Interval(_dA_fast(w, g, c, b, s))
        else:
            val, grad = _A_cert(w, g, c, b, s)
        sup_all = quadratic_sup(val, grad, M, lo - w, hi - w)
        tb = TermBound(name, domain, c, b, s, u_star, w, val, grad, sup_all, corrected=(w != u_star))
        if seg.case_tag == "B3-local":
            left = (Interval(g) + Interval.from_decimal(LOCAL_BOX[0])).hi
            right = (Interval(g) + Interval.from_decimal(LOCAL_BOX[1])).lo
            pieces = [(lo - w, min(left, hi) - w), (max(right, lo) - w, hi - w)]
            tb.sup_excluded = max(quadratic_sup(val, grad, M, a, z) for a, z in pieces)
        terms.append(tb)
    if seg.case_tag == "B3-local":
        t1, t2 = terms
        s_a = Interval(t1.sup_excluded) + Interval(t2.sup_all)
        s_b = Interval(t1.sup_all) + Interval(t2.sup_excluded)
        total = (const + Interval(max(s_a.hi, s_b.hi))).hi
    else:
        acc = const
        for t in terms:
            acc = acc + Interval(t.sup_all)
        total = acc.hi
    wv = const
    for t in terms:
        wv = wv + t.value
    out = SegmentBound(seg, g, mode, const, terms, total, wv, reached)
    if seg.case_tag == "B3-local":
        out.checks = _local_checks(out)
    return out


def _local_checks(sb: SegmentBound) -> dict:
    """Witness conditions used by the localisation argument."""
    t1, t2 = sb.terms
    a1 = t1.witness_u - sb.gamma
    a2 = t2.witness_u - sb.gamma
    centre = float(LOCAL_CENTER)
    grad_sum = (abs(t1.grad) + abs(t2.grad)).hi
    return {
        "witness_alpha1": a1,
        "witness_alpha2": a2,
        "G2_at_witness_hi": sb.witness_value.hi,
        "G2_at_witness_ok": sb.witness_value.hi <= 1e-5,
        "alpha_near_centre_ok": abs(a1 - centre) <= 1.5e-3 and abs(a2 - centre) <= 1.5e-3,
        "grad_sum_hi": grad_sum,
        "grad_sum_ok": grad_sum <= 1e-5,
    }


def segment_envelope_sup(seg: SegmentPlan, gamma: RealLike, mode: str = CERTIFIED, M: float = 2.0) -> Interval:
    """Upper bound on ``F2`` over a segment and its case's alpha-region.

    Parameters
    ----------
    seg : SegmentPlan
    gamma : float, decimal string or Interval
        The bound holds for every ``gamma`` at or above the lower end.
    mode : {"fast", "certified"}
    M : float
        Concavity constant used per alpha-term (the true value is at least 4).

    Returns
    -------
    Interval
        ``hi`` is the bound; ``lo`` is a lower bound on the majorant's value at
        the witness, so the supremum of the majorant lies inside.
    """
    return segment_envelope_detail(seg, gamma, mode, M).interval

