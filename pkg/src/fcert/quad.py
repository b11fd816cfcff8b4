"""Certified one-dimensional quadrature.

The integrator works on a partition of ``[a, b]`` into pieces with double
endpoints.  On each piece ``[l, r]`` of length ``h`` with exact midpoint
``c`` the integral is enclosed by

* ``h * g(c) + h**3 / 24 * [min g'', max g'']`` when a second-derivative
  enclosure is available (midpoint rule with Lagrange remainder),
* ``h * g(c) + h**2 / 4 * [-D, D]`` when only a bound ``|g'| <= D`` is known,
* ``h * range(g)`` otherwise.

Pieces whose contribution is wider than their share of the target width are
bisected until the target is met or the subdivision cap is reached.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rint import IArray, Interval, _vdown, _vup, exp

__all__ = [
    "Integrand",
    "Enclosure",
    "IntegrandDomainError",
    "integrate_finite",
    "integrate_semiinfinite",
    "MAX_SUBDIVISIONS",
]

MAX_SUBDIVISIONS = 2**20
_INITIAL_PIECES = 16


class IntegrandDomainError(ArithmeticError):
    """The integrand could not be enclosed on part of the integration range."""


@dataclass(frozen=True)
class Integrand:
    """A function with certified range enclosures.

    Attributes
    ----------
    eval : callable
        Maps an :class:`IArray` of subintervals to an :class:`IArray`
        enclosing the range of the integrand on each of them.  When
        ``vectorized`` is false it instead maps one :class:`Interval` to one
        :class:`Interval` and is called in a loop.
    deriv_bound : float, optional
        Uniform bound on ``|g'|`` over the integration range.
    second_derivative : callable, optional
        Range enclosure of ``g''`` with the same calling convention as
        ``eval``.  Entries may be infinite where no bound is available; those
        pieces fall back to the plain range enclosure.
    vectorized : bool
        Calling convention of the callables, see above.
    """

    eval: Callable
    deriv_bound: Optional[float] = None
    second_derivative: Optional[Callable] = None
    vectorized: bool = True

    def _call(self, fn: Callable, x: IArray) -> IArray:
        if self.vectorized:
            out = fn(x)
            return IArray.coerce(out) if not isinstance(out, IArray) else out
        lo = np.empty(len(x))
        hi = np.empty(len(x))
        for i in range(len(x)):
            try:
                v = fn(Interval(float(x.lo[i]), float(x.hi[i])))
                v = Interval.coerce(v)
                lo[i], hi[i] = v.lo, v.hi
            except ArithmeticError:
                lo[i], hi[i] = -np.inf, np.inf
        return IArray(lo, hi)

    def range(self, x: IArray) -> IArray:
        return self._call(self.eval, x)

    def d2(self, x: IArray) -> IArray:
        return self._call(self.second_derivative, x)


@dataclass(frozen=True)
class Enclosure:
    """Result of a certified integration.

    Attributes
    ----------
    value : Interval
        Contains the exact integral.
    subdivisions : int
        Number of pieces in the final partition.
    truncation_error : float
        Analytic bound on a discarded tail, already included in ``value``.
    width_reached : bool
        False when the subdivision cap stopped refinement before the target
        width was met.  ``value`` is still a valid enclosure.
    """

    value: Interval
    subdivisions: int
    truncation_error: float = 0.0
    width_reached: bool = True


def _contributions(f: Integrand, left: np.ndarray, right: np.ndarray) -> IArray:
    piece = IArray(left, right)
    h = IArray(right) - IArray(left)
    h = IArray(np.maximum(h.lo, 0.0), h.hi)
    s = left + right
    mid = IArray(_vdown(s) * 0.5, _vup(s) * 0.5)
    if f.second_derivative is None and f.deriv_bound is None:
        out = h * f.range(piece)
    else:
        gm = f.range(mid)
        base = h * gm
        if f.second_derivative is not None:
            corr = h.sq() * h * f.d2(piece) * (1.0 / 24.0)
            corr = IArray(_vdown(corr.lo), _vup(corr.hi))
        else:
            d = float(f.deriv_bound)
            q = h.sq() * (d / 4.0)
            corr = IArray(-_vup(q.hi), _vup(q.hi))
        out = base + corr
        bad = ~out.isfinite()
        if bad.any():
            fb = h[bad] * f.range(piece[bad])
            lo = out.lo.copy()
            hi = out.hi.copy()
            lo[bad], hi[bad] = fb.lo, fb.hi
            out = IArray(lo, hi)
    if not out.isfinite().all():
        i = int(np.argmin(out.isfinite()))
        raise IntegrandDomainError(f"integrand unbounded on [{left[i]!r}, {right[i]!r}]")
    return out


def _sum(c: IArray) -> Interval:
    lo = math.fsum(c.lo.tolist())
    hi = math.fsum(c.hi.tolist())
    return Interval(math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf))


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    target_width: float,
    max_subdivisions: int = MAX_SUBDIVISIONS,
) -> Enclosure:
    """Enclose ``integral_a^b g(x) dx``.

    Parameters
    ----------
    f : Integrand
    a, b : float
        Integration limits with ``a <= b``.
    target_width : float
        Requested width of the returned enclosure.
    max_subdivisions : int
        Cap on the number of pieces.

    Returns
    -------
    Enclosure

    Examples
    --------
    >>> one = Integrand(lambda x: IArray(np.ones_like(x.lo)))
    >>> integrate_finite(one, 0.0, 2.0, 1e-12).value.contains(2.0)
    True
    """
    a = float(a)
    b = float(b)
    if not a <= b:
        raise ValueError(f"integration limits out of order: {a} > {b}")
    if a == b:
        return Enclosure(Interval(0.0), 0)
    n0 = min(_INITIAL_PIECES, max_subdivisions)
    grid = np.linspace(a, b, n0 + 1)
    grid[0], grid[-1] = a, b
    grid = np.unique(grid)
    left, right = grid[:-1].copy(), grid[1:].copy()
    contrib = _contributions(f, left, right)
    reached = True
    while True:
        total = _sum(contrib)
        width = total.hi - total.lo
        if width <= target_width:
            break
        n = len(left)
        if n >= max_subdivisions:
            reached = False
            break
        share = target_width / n
        w = contrib.hi - contrib.lo
        split = w > share
        mids = 0.5 * (left + right)
        # pieces that can no longer be split in floating point stay as they are
        split &= (mids > left) & (mids < right)
        room = max_subdivisions - n
        if not split.any():
            reached = False
            break
        if split.sum() > room:
            idx = np.flatnonzero(split)
            keep = idx[np.argsort(-w[idx], kind="stable")[:room]]
            split = np.zeros_like(split)
            split[keep] = True
        sl, sr, sm = left[split], right[split], mids[split]
        new_left = np.concatenate([left[~split], sl, sm])
        new_right = np.concatenate([right[~split], sm, sr])
        new_c = _contributions(f, np.concatenate([sl, sm]), np.concatenate([sm, sr]))
        kept = contrib[~split]
        order = np.argsort(new_left, kind="stable")
        left, right = new_left[order], new_right[order]
        contrib = IArray(np.concatenate([kept.lo, new_c.lo])[order], np.concatenate([kept.hi, new_c.hi])[order])
    return Enclosure(total, len(left), 0.0, reached)


def gaussian_tail_bound(scale: float, cutoff: float) -> float:
    """Upper bound on ``integral_T^inf exp(-s x**2) dx`` for ``T > 0``.

    Uses ``exp(-s T**2) / (2 s T)``, evaluated with outward rounding.
    """
    if cutoff <= 0 or scale <= 0:
        raise ValueError("cutoff and scale must be positive")
    s = Interval(scale)
    t = Interval(cutoff)
    return (exp(-(s * t.sq())) / (2 * s * t)).hi


def integrate_semiinfinite(
    f: Integrand,
    a: float,
    gaussian_decay: float,
    target_width: float,
    max_subdivisions: int = MAX_SUBDIVISIONS,
) -> Enclosure:
    """Enclose ``integral_a^inf g(x) dx`` for a Gaussian-dominated integrand.

    The caller asserts ``|g(x)| <= exp(-gaussian_decay * x**2)`` beyond the
    cutoff chosen here.  The cutoff ``T`` is the smallest value (on a
    doubling search) with tail bound at most ``target_width / 10``; the bound
    is added to both ends of the finite enclosure.
    """
    s = float(gaussian_decay)
    if s <= 0:
        raise ValueError("gaussian_decay must be positive")
    goal = target_width / 10.0
    t = max(float(a), 0.0) + 1.0 / math.sqrt(s)
    while gaussian_tail_bound(s, t) > goal:
        t = t * 1.25 if t > 0 else 1.0
    tb = gaussian_tail_bound(s, t)
    fin = integrate_finite(f, a, t, 0.8 * target_width, max_subdivisions)
    value = fin.value + Interval(-tb, tb)
    return Enclosure(value, fin.subdivisions, tb, fin.width_reached)


# convenience for callers that build integrands from elementwise formulas
def pointwise(fn: Callable[[IArray], IArray], d2: Callable | None = None) -> Integrand:
    """Wrap an interval formula (valid for any argument box) as an integrand."""
    return Integrand(eval=fn, second_derivative=d2)

