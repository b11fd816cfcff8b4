"""Correlated Gaussian orthant probabilities and their derivatives.

The central object is

    f(beta, alpha) = P[X >= gamma + alpha, Y >= gamma + alpha]

for a centred Gaussian pair with variance 1/2 and correlation
``rho = 2 beta - 1``.  With ``u = gamma + alpha``, the angle (Craig type)
representation reads

    f = B(u) + (1/pi) * integral_0^{asin sqrt(beta)} exp(-u^2 / sin^2 psi) d psi

where ``B(u) = 1 - 2 Phi_bar(sqrt(2) |u|)`` for ``u < 0`` and ``B(u) = 0``
otherwise; ``B(u)`` is the value at ``beta = 0``.  The integrand is positive
and increasing in ``psi``, so range enclosures on a piece are the values at
its endpoints.

Derivatives with respect to ``u`` (equivalently ``alpha``) and ``beta`` have
closed forms that are used directly:

    f_u     = -(2/sqrt(pi)) exp(-u^2) Phi_bar(c u),   c = sqrt(2 (1 - beta) / beta)
    f_beta  = exp(-u^2 / beta) / (2 pi sqrt(beta (1 - beta)))
    f_uu    = (2/sqrt(pi)) exp(-u^2) (2 u Phi_bar(c u) + c phi(c u))
    f_beta_u    = -2 u / beta * f_beta
    f_beta_beta = f_beta * (u^2 / beta^2 - 1 / (2 beta) + 1 / (2 (1 - beta)))

``f_beta > 0`` everywhere, so ``f`` is non-decreasing in ``beta`` for every
``alpha``; ``f_u < 0``, so ``f`` is decreasing in ``u``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Union

import numpy as np
from scipy import integrate as _sp_integrate
from scipy import special as _sp

from . import rint
from .quad import Integrand, integrate_finite
from .rint import IArray, Interval, PI, SQRT2, SQRT_PI, DomainViolation, normal_tail

__all__ = [
    "FAST",
    "CERTIFIED",
    "OrthantParams",
    "GParams",
    "SingularCorrelation",
    "BranchMismatch",
    "as_interval",
    "f_fast",
    "f_u_fast",
    "f_eval",
    "f_enclose",
    "f_dalpha",
    "f_dbeta",
    "f_second",
    "g_eval",
    "g_fast",
    "envelope",
    "over_box",
    "orthant_monte_carlo",
    "g_monte_carlo",
]

FAST = "fast"
CERTIFIED = "certified"
_MODES = (FAST, CERTIFIED)

RealLike = Union[float, int, str, Decimal, Fraction, Interval]

_SING = 5e-13  # |rho| within 1e-12 of 1
_LIP_U = 1.1284  # > 2/sqrt(pi), bound on |df/du|
_DEFAULT_RTOL = 1e-10


class SingularCorrelation(ArithmeticError):
    """Correlation too close to +-1 for the integral representation."""


class BranchMismatch(ValueError):
    """The tilt lies on the wrong side of ``-gamma`` for the requested envelope branch."""


def _check_mode(mode: str) -> str:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    return mode


def as_interval(x: RealLike) -> Interval:
    """Interval enclosing a real given as float, decimal string or fraction."""
    if isinstance(x, Interval):
        return x
    if isinstance(x, (str, Decimal)):
        return Interval.from_decimal(x)
    if isinstance(x, Fraction):
        return Interval.from_fraction(x)
    return Interval(float(x))


def _mid(x: RealLike) -> float:
    if isinstance(x, Interval):
        return x.mid()
    if isinstance(x, (str, Decimal, Fraction)):
        return float(Fraction(Decimal(x)) if isinstance(x, str) else x)
    return float(x)


@dataclass(frozen=True)
class OrthantParams:
    """Parameters ``(gamma, beta, alpha)`` of the orthant probability.

    ``beta`` and ``alpha`` may be intervals (boxes); ``gamma`` may also be a
    decimal string, which is widened to an enclosing interval.
    """

    gamma: RealLike
    beta: RealLike
    alpha: RealLike

    def __post_init__(self):
        b = as_interval(self.beta)
        if b.lo < 0 or b.hi > 1:
            raise DomainViolation("beta must lie in [0, 1]", b.lo if b.lo < 0 else b.hi)

    @property
    def rho(self) -> Interval:
        return 2 * as_interval(self.beta) - 1

    def u(self) -> Interval:
        return as_interval(self.gamma) + as_interval(self.alpha)


@dataclass(frozen=True)
class GParams:
    """Parameters of the tilted two-threshold probability ``g``."""

    gamma: RealLike
    beta: RealLike
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0

    def __post_init__(self):
        b = _mid(self.beta)
        if not 0 < b < 1:
            raise DomainViolation("beta must lie in (0, 1)", b)


# ---------------------------------------------------------------------------
# fast (floating point) evaluations


def f_fast(beta, u):
    """Floating-point ``f`` as a function of ``beta`` and ``u = gamma + alpha``.

    Uses ``Phi_bar(h) - 2 T(h, sqrt((1 - beta) / beta))`` with Owen's T
    function; vectorised over numpy arrays.
    """
    beta = np.asarray(beta, dtype=float)
    u = np.asarray(u, dtype=float)
    h = u * math.sqrt(2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.sqrt((1.0 - beta) / beta)
        mid = _sp.ndtr(-h) - 2.0 * _sp.owens_t(h, a)
    at0 = np.where(u < 0, 1.0 - 2.0 * _sp.ndtr(h), 0.0)
    at1 = _sp.ndtr(-h)
    out = np.where(beta <= 0, at0, np.where(beta >= 1, at1, mid))
    # Owen's T cancels when both thresholds are positive and rho is near -1
    risky = (u > 0) & (beta > 0) & (beta < 0.5) & (out < 1e-6)
    if np.any(risky):
        out = np.array(out, dtype=float, copy=True)
        bb, uu = np.broadcast_arrays(beta, u)
        for idx in zip(*np.nonzero(np.broadcast_to(risky, out.shape))) if out.ndim else [()]:
            out[idx] = _f_quad_fast(float(bb[idx]), float(uu[idx]))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def f_u_fast(beta, u):
    """Floating-point ``df/du`` (equal to ``df/dalpha``)."""
    beta = np.asarray(beta, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.sqrt(2.0 * (1.0 - beta) / beta)
        cu = np.where(u == 0, 0.0, c * u)
    out = -(2.0 / math.sqrt(math.pi)) * np.exp(-u * u) * _sp.ndtr(-cu)
    return float(out) if out.ndim == 0 else out


def _f_beta_fast(beta: float, u: float) -> float:
    return math.exp(-u * u / beta) / (2 * math.pi * math.sqrt(beta * (1 - beta)))


# ---------------------------------------------------------------------------
# certified evaluation at a point


def _k_range(psi: IArray, kk: Interval) -> IArray:
    """Range of ``exp(-K / sin(psi)**2)`` over psi pieces in ``[0, pi/2]``.

    The function is increasing in ``psi``, so the range is spanned by the
    values at the piece endpoints.
    """
    s_lo = rint.sin(IArray(psi.lo)).lo
    s_hi = rint.sin(IArray(psi.hi)).hi
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        q_lo = np.where(s_lo > 0, rint._vup(kk.hi / rint._vup(s_lo * s_lo)), np.inf)
        q_hi = np.where(s_hi > 0, rint._vdown(kk.lo / rint._vdown(s_hi * s_hi)), np.inf)
    lo = np.where(np.isfinite(q_lo), rint._vdown(np.exp(-q_lo), rint.ELEM_ULPS), 0.0)
    hi = np.where(np.isfinite(q_hi), rint._vup(np.exp(-q_hi), rint.ELEM_ULPS), 0.0)
    if kk.lo == 0.0:
        hi = np.where(s_hi > 0, 1.0, hi)
    if kk.hi == 0.0:
        lo = np.where(s_lo > 0, 1.0, lo)
    return IArray(np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0))


def _k_d2(psi: IArray, kk: Interval) -> IArray:
    """``k'' = k [4 K^2 c^2 / w^6 - 6 K c^2 / w^4 - 2 K / w^2]``, ``w = sin``, ``c^2 = 1 - w^2``."""
    w = rint.sin(psi)
    ok = w.lo > 0
    k = _k_range(psi, kk)
    K = IArray(kk.lo, kk.hi)
    w2 = w.sq()
    c2 = 1.0 - w2
    with np.errstate(all="ignore"):
        inv2 = 1.0 / w2
        br = 4.0 * K.sq() * c2 * (inv2.sq() * inv2) - 6.0 * K * c2 * inv2.sq() - 2.0 * K * inv2
        out = k * br
    bad = ~ok | ~out.isfinite()
    return IArray(np.where(bad, -np.inf, out.lo), np.where(bad, np.inf, out.hi))


def _craig_integral(kk: Interval, b: float, target: float) -> tuple[Interval, bool]:
    integrand = Integrand(
        eval=lambda t: _k_range(t, kk),
        second_derivative=lambda t: _k_d2(t, kk),
    )
    enc = integrate_finite(integrand, 0.0, b, target)
    return enc.value, enc.width_reached


def _f_quad_fast(beta: float, u: float) -> float:
    """Floating-point ``f`` from the angle integral (accurate deep in the tail)."""
    kk = u * u
    end = math.asin(math.sqrt(beta))

    def k(t: float) -> float:
        w = math.sin(t)
        return math.exp(-kk / (w * w)) if w > 0 else 0.0

    val, _ = _sp_integrate.quad(k, 0.0, end, epsabs=0.0, epsrel=1e-12, limit=200)
    base = 0.0 if u >= 0 else 1.0 - 2.0 * float(_sp.ndtr(u * math.sqrt(2.0)))
    return base + val / math.pi


@functools.lru_cache(maxsize=8192)
def _f_point(beta: float, u: float, rtol: float) -> tuple[float, float, bool]:
    """Certified ``f`` at a point; returns ``(lo, hi, width_reached)``.

    Uses ``f = B(u) + (1/pi) integral_0^{asin sqrt(beta)} exp(-u^2 / sin^2 psi) d psi``
    where ``B(u) = 1 - 2 Phi_bar(sqrt(2) |u|)`` for ``u < 0`` and 0 otherwise.
    """
    h = Interval(u) * SQRT2
    if beta == 1.0:
        r = normal_tail(h)
        return r.lo, r.hi, True
    if u >= 0:
        base = Interval(0.0)
    else:
        b0 = 1 - 2 * normal_tail(-h)
        base = Interval(max(b0.lo, 0.0), b0.hi)
    if beta == 0.0:
        return base.lo, base.hi, True
    if beta < _SING or beta > 1 - _SING:
        raise SingularCorrelation(f"beta={beta!r} gives |rho| within 1e-12 of 1")
    if beta == 0.5:
        r = normal_tail(h).sq()
        return r.lo, r.hi, True
    if u > 0 and beta < 0.5:
        est = _f_quad_fast(beta, u)
    else:
        est = float(f_fast(beta, u))
    est = max(est, 1e-300)
    target = max(math.pi * rtol * est, 1e-300)
    kk = Interval(u).sq()
    end = rint.asin(rint.sqrt(Interval(beta)))
    core = Interval(0.0)
    reached = True
    if end.lo > 0:
        core, reached = _craig_integral(kk, end.lo, target)
    # the limit asin(sqrt(beta)) is not representable; bound the leftover piece
    k_end = _k_range(IArray(end.lo, end.hi), kk).hi[()]
    sliver = Interval(0.0, (Interval((end - end.lo).hi) * float(k_end)).hi)
    total = base + (core + sliver) / PI
    return max(total.lo, 0.0), min(total.hi, 1.0), reached


def f_enclose(beta: RealLike, u: RealLike, rtol: float = _DEFAULT_RTOL) -> Interval:
    """Certified enclosure of ``f`` over a box in ``(beta, u)``.

    Small boxes are handled with one quadrature at an interior point and a
    Lipschitz widening; larger boxes use the monotonicity of ``f`` (increasing
    in ``beta``, decreasing in ``u``) and evaluate two corners.
    """
    b = as_interval(beta)
    uu = as_interval(u)
    if b.lo < 0 or b.hi > 1:
        raise DomainViolation("beta must lie in [0, 1]", b.lo)
    bw = b.hi - b.lo
    uw = uu.hi - uu.lo
    if bw == 0 and uw == 0:
        lo, hi, _ = _f_point(b.lo, uu.lo, rtol)
        return Interval(lo, hi)
    if bw <= 1e-9 and uw <= 1e-9 and (bw == 0 or (b.lo > 0 and b.hi < 1)):
        bm = b.lo if bw == 0 else min(max(b.mid(), b.lo), b.hi)
        um = min(max(uu.mid(), uu.lo), uu.hi)
        lo, hi, _ = _f_point(bm, um, rtol)
        du = max(um - uu.lo, uu.hi - um)
        slack = Interval(_LIP_U) * du
        if bw > 0:
            lb = 1 / (2 * PI * rint.sqrt(Interval(b.lo) * (1 - Interval(b.hi))))
            slack = slack + lb * max(bm - b.lo, b.hi - bm)
        s = slack.hi
        return Interval(max(0.0, (Interval(lo) - s).lo), min(1.0, (Interval(hi) + s).hi))
    lo = _f_point(b.lo, uu.hi, rtol)[0]
    hi = _f_point(b.hi, uu.lo, rtol)[1]
    return Interval(lo, hi)


def f_eval(p: OrthantParams, mode: str = FAST, rtol: float = _DEFAULT_RTOL) -> Interval:
    """Orthant probability ``f(beta, alpha)`` at ``gamma``.

    Parameters
    ----------
    p : OrthantParams
    mode : {"fast", "certified"}
        Fast mode returns a point interval from floating-point formulas.
    rtol : float
        Relative width target for the certified quadrature.

    Returns
    -------
    Interval
        Subset of ``[0, 1]``.

    Examples
    --------
    >>> r = f_eval(OrthantParams(0.2484195, 0.5, -0.445), CERTIFIED)
    >>> 0.36 < r.lo <= r.hi < 0.38
    True
    """
    _check_mode(mode)
    if mode == FAST:
        return Interval(f_fast(_mid(p.beta), _mid(p.gamma) + _mid(p.alpha)))
    return f_enclose(as_interval(p.beta), p.u(), rtol)


def _beta_open(b: Interval) -> None:
    if not (b.lo > 0 and b.hi < 1):
        raise DomainViolation("beta must lie in (0, 1)", b.lo if b.lo <= 0 else b.hi)
    if b.lo < _SING or b.hi > 1 - _SING:
        raise SingularCorrelation(f"beta box {b!r} too close to 0 or 1")


def _c_factor(b: Interval) -> Interval:
    return rint.sqrt(2 * (1 - b) / b)


def f_dalpha(p: OrthantParams, mode: str = FAST) -> Interval:
    """Partial derivative of ``f`` in ``alpha``; always non-positive.

    ``-(2 / sqrt(pi)) exp(-u^2) Phi_bar(u sqrt(2 (1 - beta) / beta))``.
    """
    _check_mode(mode)
    b = as_interval(p.beta)
    _beta_open(b)
    if mode == FAST:
        return Interval(f_u_fast(_mid(p.beta), _mid(p.gamma) + _mid(p.alpha)))
    u = p.u()
    val = -(2 / SQRT_PI) * rint.exp(-u.sq()) * normal_tail(u * _c_factor(b))
    return Interval(val.lo, min(val.hi, 0.0))


def _f_beta_iv(b: Interval, u: Interval) -> Interval:
    return rint.exp(-(u.sq() / b)) / (2 * PI * rint.sqrt(b * (1 - b)))


def f_dbeta(p: OrthantParams, order: str = "first", mode: str = CERTIFIED) -> Interval:
    """Closed-form ``df/dbeta`` (``order="first"``) or ``beta f_bb + 2 f_b`` (``"combo"``).

    The first derivative is ``exp(-u^2/beta) / (2 pi sqrt(beta (1 - beta)))``;
    the combination equals that times ``u^2/beta + 2 + (2 beta - 1)/(2 (1 - beta))``.
    """
    _check_mode(mode)
    if order not in ("first", "combo"):
        raise ValueError("order must be 'first' or 'combo'")
    b = as_interval(p.beta)
    _beta_open(b)
    if mode == FAST:
        bm, um = _mid(p.beta), _mid(p.gamma) + _mid(p.alpha)
        fb = _f_beta_fast(bm, um)
        if order == "first":
            return Interval(fb)
        return Interval(fb * (um * um / bm + 2 + (2 * bm - 1) / (2 * (1 - bm))))
    u = p.u()
    fb = _f_beta_iv(b, u)
    if order == "first":
        return fb
    return fb * (u.sq() / b + 2 + (2 * b - 1) / (2 * (1 - b)))


def f_second(p: OrthantParams, which: str, mode: str = CERTIFIED) -> Interval:
    """Second partial derivatives of ``f``: ``which`` in ``{"aa", "ba", "bb"}``."""
    _check_mode(mode)
    b = as_interval(p.beta)
    _beta_open(b)
    if mode == FAST:
        bi, ui = Interval(_mid(p.beta)), Interval(_mid(p.gamma) + _mid(p.alpha))
    else:
        bi, ui = b, p.u()
    if which == "aa":
        c = _c_factor(bi)
        cu = ui * c
        phi = rint.exp(-(cu.sq() * 0.5)) / rint.sqrt(2 * PI)
        out = (2 / SQRT_PI) * rint.exp(-ui.sq()) * (2 * ui * normal_tail(cu) + c * phi)
    elif which == "ba":
        out = _f_beta_iv(bi, ui) * (-2 * ui / bi)
    elif which == "bb":
        out = _f_beta_iv(bi, ui) * (ui.sq() / bi.sq() - 1 / (2 * bi) + 1 / (2 * (1 - bi)))
    else:
        raise ValueError("which must be 'aa', 'ba' or 'bb'")
    return Interval(out.mid()) if mode == FAST else out


def over_box(fn: Callable[[OrthantParams], Interval], p: OrthantParams, splits: tuple[int, int] = (8, 8)) -> Interval:
    """Hull of ``fn`` over a uniform subdivision of the ``(beta, alpha)`` box."""
    b = as_interval(p.beta)
    a = as_interval(p.alpha)
    nb, na = splits
    bs = _subdivide(b, nb)
    as_ = _subdivide(a, na)
    out = None
    for bi in bs:
        for ai in as_:
            r = fn(OrthantParams(p.gamma, bi, ai))
            out = r if out is None else out.hull(r)
    return out


def _subdivide(x: Interval, n: int) -> list[Interval]:
    if n <= 1 or x.is_point():
        return [x]
    pts = np.linspace(x.lo, x.hi, n + 1)
    pts[0], pts[-1] = x.lo, x.hi
    return [Interval(float(pts[i]), float(pts[i + 1])) for i in range(n)]


# ---------------------------------------------------------------------------
# the tilted probability g


def _g_thresholds(p: GParams) -> tuple[float, float]:
    b = _mid(p.beta)
    g = _mid(p.gamma)
    d1 = p.a3 - p.a1
    d2 = p.a4 - p.a2
    x = g + (d1 * b + d2 * (1 - b)) / 2
    y = g + (d1 * b - d2 * (1 - b)) / 2
    return x, y


def g_fast(p: GParams) -> float:
    """Floating-point ``g`` via the one-dimensional angle integral."""
    b = _mid(p.beta)
    x, y = _g_thresholds(p)
    hh, kk = x * math.sqrt(2), y * math.sqrt(2)
    rho = 2 * b - 1
    base = float(_sp.ndtr(-hh) * _sp.ndtr(-kk))
    if rho == 0:
        return base
    a_, b_ = hh * hh + kk * kk, 2 * hh * kk

    def integrand(t: float) -> float:
        s = math.sin(t)
        return math.exp(-(a_ - b_ * s) / (2 * (1 - s * s)))

    val, _ = _sp_integrate.quad(integrand, 0.0, math.asin(rho), epsabs=1e-15, epsrel=1e-13, limit=200)
    return min(max(base + val / (2 * math.pi), 0.0), 1.0)


def _gE_parts(s: IArray, A: Interval, B: Interval):
    q = 1.0 - s.sq()
    ai = IArray(A.lo, A.hi)
    bi = IArray(B.lo, B.hi)
    e = -(ai - bi * s) / (2.0 * q)
    return q, ai, bi, e


def _gen_range(theta: IArray, A: Interval, B: Interval) -> IArray:
    s = rint.sin(theta)
    _, _, _, e = _gE_parts(s, A, B)
    with np.errstate(over="ignore"):
        return rint.exp(IArray(e.lo, np.minimum(e.hi, 0.0)))


def _gen_d2(theta: IArray, A: Interval, B: Interval) -> IArray:
    s = rint.sin(theta)
    q, ai, bi, e = _gE_parts(s, A, B)
    n_ = bi + bi * s.sq() - 2.0 * ai * s
    es = n_ / (2.0 * q.sq())
    ess = ((bi * s - ai) * q + 2.0 * s * n_) / (q.sq() * q)
    g = rint.exp(IArray(e.lo, np.minimum(e.hi, 0.0)))
    with np.errstate(all="ignore"):
        out = g * (es.sq() * q + ess * q - es * s)
    return out


def g_eval(p: GParams, mode: str = FAST, rtol: float = 1e-12) -> Interval:
    """Two-threshold probability ``g`` at correlation ``2 beta - 1``.

    The thresholds are ``gamma + ((a3 - a1) beta +- (a4 - a2)(1 - beta)) / 2``
    on a pair with variance 1/2.
    """
    _check_mode(mode)
    if mode == FAST:
        return Interval(g_fast(p))
    b = _mid(p.beta)
    if b < _SING or b > 1 - _SING:
        raise SingularCorrelation(f"beta={b!r} too close to 0 or 1")
    g = as_interval(p.gamma)
    bi = as_interval(p.beta)
    d1 = Interval(p.a3) - p.a1
    d2 = Interval(p.a4) - p.a2
    x = g + (d1 * bi + d2 * (1 - bi)) * 0.5
    y = g + (d1 * bi - d2 * (1 - bi)) * 0.5
    hh, kk = x * SQRT2, y * SQRT2
    base = normal_tail(hh) * normal_tail(kk)
    A = hh.sq() + kk.sq()
    B = 2 * hh * kk
    rho = 2 * bi - 1
    if rho.lo == 0 and rho.hi == 0:
        return Interval(max(base.lo, 0.0), min(base.hi, 1.0))
    end = rint.asin(rho)
    est = max(g_fast(p), 1e-300)
    target = 2 * math.pi * rtol * est
    integrand = Integrand(eval=lambda t: _gen_range(t, A, B), second_derivative=lambda t: _gen_d2(t, A, B))
    if end.lo > 0:
        core = integrate_finite(integrand, 0.0, end.lo, target).value
        core = core + Interval(0.0, (end - end.lo).hi)
        total = base + core / (2 * PI)
    elif end.hi < 0:
        core = integrate_finite(integrand, end.hi, 0.0, target).value
        core = core + Interval(0.0, (Interval(end.hi) - end).hi)
        total = base - core / (2 * PI)
    else:
        # rho straddles zero only through rounding; enclose the tiny range directly
        total = base + Interval(-1.0, 1.0) * (end.mag() / (2 * PI)).hi
    return Interval(max(total.lo, 0.0), min(total.hi, 1.0))


# ---------------------------------------------------------------------------
# envelopes over beta-intervals


def envelope(
    p: OrthantParams,
    eta: tuple[RealLike, RealLike],
    side: str = "upper",
    branch: str | None = None,
    mode: str = CERTIFIED,
) -> Interval:
    """Bound on ``f(beta, alpha)`` uniform over ``beta`` in ``[eta1, eta2]``.

    Parameters
    ----------
    p : OrthantParams
        ``p.beta`` is ignored; ``gamma`` and ``alpha`` are used.
    eta : pair
        The beta-interval ``[eta1, eta2]`` inside ``(0, 1]``.
    side : {"upper", "lower"}
    branch : {"near", "tail"}, optional
        ``"near"`` requires ``-gamma <= alpha <= 0`` and uses ``f(eta2, alpha)``
        (upper) or ``f(eta1, alpha)`` (lower).  ``"tail"`` requires
        ``alpha <= -gamma`` and evaluates at the threshold scaled by
        ``sqrt(eta2 / eta1)`` (upper) or ``sqrt(eta1 / eta2)`` (lower).
        Chosen from ``alpha`` when omitted.
    mode : {"fast", "certified"}

    Returns
    -------
    Interval
        Enclosure of the envelope value.  For ``side="upper"`` its upper end
        bounds ``f(beta, alpha)`` for every ``beta`` in the interval.
    """
    _check_mode(mode)
    e1 = as_interval(eta[0])
    e2 = as_interval(eta[1])
    if not (0 < e1.lo and e1.hi <= e2.hi and e2.hi <= 1):
        raise DomainViolation("eta interval must lie in (0, 1]", e1.lo)
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    u = p.u()
    a = as_interval(p.alpha)
    if branch is None:
        if u.hi <= 0:
            branch = "tail"
        elif u.lo >= 0 and a.hi <= 0:
            branch = "near"
        else:
            raise BranchMismatch(f"alpha={a!r} is not on one side of -gamma within (-inf, 0]")
    if branch == "near":
        if u.lo < 0 or a.hi > 0:
            raise BranchMismatch(f"near branch needs -gamma <= alpha <= 0, got alpha={a!r}")
        beta_at = e2 if side == "upper" else e1
        thr = u
    elif branch == "tail":
        if u.hi > 0:
            raise BranchMismatch(f"tail branch needs alpha <= -gamma, got alpha={a!r}")
        beta_at = e2 if side == "upper" else e1
        ratio = e2 / e1 if side == "upper" else e1 / e2
        thr = rint.sqrt(ratio) * u
    else:
        raise ValueError("branch must be 'near' or 'tail'")
    if mode == FAST:
        return Interval(f_fast(beta_at.mid(), thr.mid()))
    b_use = Interval(beta_at.hi) if side == "upper" else Interval(beta_at.lo)
    return f_enclose(b_use, thr)


# ---------------------------------------------------------------------------
# Monte Carlo cross-checks


def orthant_monte_carlo(beta: float, u: float, samples: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of ``f`` from the rotated two-dimensional density.

    Draws ``X = sqrt(beta/2) Z1 + sqrt((1-beta)/2) Z2`` and
    ``Y = sqrt(beta/2) Z1 - sqrt((1-beta)/2) Z2`` with a Philox generator and
    returns ``(mean, standard_error)``.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    hits = 0
    done = 0
    chunk = 1_000_000
    a, c = math.sqrt(beta / 2), math.sqrt((1 - beta) / 2)
    while done < samples:
        m = min(chunk, samples - done)
        z = rng.standard_normal((2, m))
        x = a * z[0] + c * z[1]
        y = a * z[0] - c * z[1]
        hits += int(np.count_nonzero((x >= u) & (y >= u)))
        done += m
    p_hat = hits / samples
    return p_hat, math.sqrt(max(p_hat * (1 - p_hat), 1e-300) / samples)


def g_monte_carlo(p: GParams, samples: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of ``g`` from its defining Gaussian pair."""
    b = _mid(p.beta)
    x_thr, y_thr = _g_thresholds(p)
    rng = np.random.Generator(np.random.Philox(seed))
    a, c = math.sqrt(b / 2), math.sqrt((1 - b) / 2)
    hits = 0
    done = 0
    while done < samples:
        m = min(1_000_000, samples - done)
        z = rng.standard_normal((2, m))
        hits += int(np.count_nonzero((a * z[0] + c * z[1] >= x_thr) & (a * z[0] - c * z[1] >= y_thr)))
        done += m
    p_hat = hits / samples
    return p_hat, math.sqrt(max(p_hat * (1 - p_hat), 1e-300) / samples)

