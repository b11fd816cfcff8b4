"""Interval arithmetic with outward rounding.

Two carriers are provided:

``Interval``
    A scalar closed interval ``[lo, hi]`` of doubles.  Addition, subtraction,
    multiplication, division and square root use error-free transformations
    to decide the rounding direction exactly, so results that happen to be
    representable stay tight (``[1, 2] + [3, 4]`` is exactly ``[4, 6]``).
    Transcendental functions are evaluated with the platform libm and then
    widened by ``ELEM_ULPS`` units in the last place on each side.

``IArray``
    A vectorised interval array used by the quadrature kernels.  Every
    operation is widened by at least one ulp on each side (no exactness
    detection), which is cheaper and still sound.

The certified standard normal tail ``normal_tail`` is computed from a power
series in extended decimal precision with an explicit remainder bound, so it
does not rely on the accuracy of any libm ``erfc``.

Notes
-----
The libm inflation relies on the platform's ``exp``, ``log``, ``sin`` and
``asin`` being accurate to better than ``ELEM_ULPS`` ulp.  glibc and numpy
measure below 0.8 ulp for these functions; ``ELEM_ULPS = 2`` leaves a safety
factor above two.
"""
from __future__ import annotations

import functools
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "Interval",
    "IArray",
    "IntervalError",
    "EmptyConstruction",
    "DivisionByIntervalContainingZero",
    "DomainViolation",
    "exp",
    "log",
    "sqrt",
    "sin",
    "asin",
    "neg_square",
    "normal_tail",
    "normal_tail_fast",
    "arith",
    "elem",
    "inject_rounding_fault",
    "PI",
    "LOG2",
    "SQRT2",
    "SQRT_PI",
]

ELEM_ULPS = 2
_INF = math.inf


class IntervalError(ArithmeticError):
    """Base class for interval kernel errors."""


class EmptyConstruction(IntervalError):
    """Raised when an interval with ``lo > hi`` (or a NaN endpoint) is built."""


class DivisionByIntervalContainingZero(IntervalError, ZeroDivisionError):
    """Raised when the divisor interval contains zero."""


class DomainViolation(IntervalError, ValueError):
    """Raised when an argument leaves the domain of an elementary function.

    Attributes
    ----------
    endpoint : float
        The offending endpoint.
    """

    def __init__(self, message: str, endpoint: float):
        super().__init__(f"{message} (endpoint {endpoint!r})")
        self.endpoint = endpoint


# ---------------------------------------------------------------------------
# rounding primitives

_FAULT = False


def inject_rounding_fault(enabled: bool = True) -> None:
    """Test hook: make every outward rounding step point inward instead.

    Only ``selftest`` uses this, to prove that the containment checks catch a
    broken rounding mode.
    """
    global _FAULT
    _FAULT = bool(enabled)


def _down(x: float) -> float:
    if _FAULT:
        return math.nextafter(x, _INF)
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    if _FAULT:
        return math.nextafter(x, -_INF)
    return math.nextafter(x, _INF)


def _down_n(x: float, n: int) -> float:
    for _ in range(n):
        x = _down(x)
    return x


def _up_n(x: float, n: int) -> float:
    for _ in range(n):
        x = _up(x)
    return x


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


_SPLITTER = 134217729.0  # 2**27 + 1
_SAFE_LO = 2.0**-450
_SAFE_HI = 2.0**450


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float] | None:
    """Dekker product; ``None`` when the operands are outside the safe range."""
    p = a * b
    if a == 0.0 or b == 0.0:
        return p, 0.0
    aa, ab = abs(a), abs(b)
    if not (_SAFE_LO < aa < _SAFE_HI and _SAFE_LO < ab < _SAFE_HI):
        return None
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _add_dn(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    return _down(s) if e < 0 or _FAULT else s


def _add_up(a: float, b: float) -> float:
    s, e = _two_sum(a, b)
    return _up(s) if e > 0 or _FAULT else s


def _mul_dn(a: float, b: float) -> float:
    t = _two_prod(a, b)
    if t is None:
        return _down(a * b)
    p, e = t
    return _down(p) if e < 0 or _FAULT else p


def _mul_up(a: float, b: float) -> float:
    t = _two_prod(a, b)
    if t is None:
        return _up(a * b)
    p, e = t
    return _up(p) if e > 0 or _FAULT else p


def _div_sign(x: float, y: float, q: float) -> int:
    """Sign of ``x / y - q`` where ``q`` is the rounded quotient (or 2 if unknown)."""
    t = _two_prod(q, y)
    if t is None or q == 0.0 and x != 0.0:
        return 2
    p, e = t
    r = (x - p) - e  # exact residual sign
    if r == 0.0:
        return 0
    return 1 if (r > 0) == (y > 0) else -1


def _div_dn(x: float, y: float) -> float:
    q = x / y
    s = _div_sign(x, y, q)
    return q if s == 0 or (s == 1 and not _FAULT) else _down(q)


def _div_up(x: float, y: float) -> float:
    q = x / y
    s = _div_sign(x, y, q)
    return q if s == 0 or (s == -1 and not _FAULT) else _up(q)


def _check_finite(lo: float, hi: float, what: str) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise IntervalError(f"{what}: result is unbounded or not a number ({lo}, {hi})")


# ---------------------------------------------------------------------------
# scalar interval


Number = Union[int, float]


class Interval:
    """Closed interval ``[lo, hi]`` with double endpoints.

    Parameters
    ----------
    lo : float
        Lower endpoint.
    hi : float, optional
        Upper endpoint; defaults to ``lo`` (a point interval).

    Raises
    ------
    EmptyConstruction
        If ``lo > hi`` or an endpoint is NaN.

    Examples
    --------
    >>> Interval(1, 2) + Interval(3, 4)
    Interval(4.0, 6.0)
    >>> (Interval(1) / 3).width() > 0
    True
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not lo <= hi:
            raise EmptyConstruction(f"empty interval [{lo}, {hi}]")
        if math.isinf(lo) or math.isinf(hi):
            raise IntervalError(f"unbounded interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # construction helpers -------------------------------------------------

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> "Interval":
        """Tightest double interval containing the rational ``q``."""
        q = Fraction(q)
        x = float(q)
        fx = Fraction(x)
        if fx == q:
            return cls(x)
        if fx < q:
            return cls(x, math.nextafter(x, _INF))
        return cls(math.nextafter(x, -_INF), x)

    @classmethod
    def from_decimal(cls, text: str | Decimal) -> "Interval":
        """Tightest double interval containing a decimal literal.

        ``Interval.from_decimal("0.24841951")`` brackets the exact decimal
        value, which is not representable in binary.
        """
        return cls.from_fraction(Fraction(Decimal(str(text))))

    @staticmethod
    def coerce(x: "Interval | Number") -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction):
            return Interval.from_fraction(x)
        return Interval(x)

    # queries --------------------------------------------------------------

    def width(self) -> float:
        """Upper bound on ``hi - lo``."""
        return _add_up(self.hi, -self.lo)

    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    def mag(self) -> float:
        """Largest absolute value in the interval."""
        return max(abs(self.lo), abs(self.hi))

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: "Interval | Number") -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Fraction):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval | Number") -> "Interval":
        other = Interval.coerce(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other):
        if isinstance(other, IArray):
            return NotImplemented
        o = Interval.coerce(other)
        lo, hi = _add_dn(self.lo, o.lo), _add_up(self.hi, o.hi)
        _check_finite(lo, hi, "add")
        return Interval(lo, hi)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, IArray):
            return NotImplemented
        o = Interval.coerce(other)
        lo, hi = _add_dn(self.lo, -o.hi), _add_up(self.hi, -o.lo)
        _check_finite(lo, hi, "sub")
        return Interval(lo, hi)

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, IArray):
            return NotImplemented
        o = Interval.coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a >= 0 and c >= 0:
            lo, hi = _mul_dn(a, c), _mul_up(b, d)
        elif a >= 0 and d <= 0:
            lo, hi = _mul_dn(b, c), _mul_up(a, d)
        elif b <= 0 and c >= 0:
            lo, hi = _mul_dn(a, d), _mul_up(b, c)
        elif b <= 0 and d <= 0:
            lo, hi = _mul_dn(b, d), _mul_up(a, c)
        else:
            pairs = ((a, c), (a, d), (b, c), (b, d))
            lo = min(_mul_dn(x, y) for x, y in pairs)
            hi = max(_mul_up(x, y) for x, y in pairs)
        _check_finite(lo, hi, "mul")
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, IArray):
            return NotImplemented
        o = Interval.coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByIntervalContainingZero(f"divisor {o!r} contains zero")
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(_div_dn(x, y) for x, y in pairs)
        hi = max(_div_up(x, y) for x, y in pairs)
        _check_finite(lo, hi, "div")
        return Interval(lo, hi)

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def sq(self) -> "Interval":
        """Enclosure of ``{x**2}``; tighter than ``self * self`` across zero."""
        a, b = self.lo, self.hi
        if a >= 0:
            lo, hi = _mul_dn(a, a), _mul_up(b, b)
        elif b <= 0:
            lo, hi = _mul_dn(b, b), _mul_up(a, a)
        else:
            lo, hi = 0.0, max(_mul_up(a, a), _mul_up(b, b))
        _check_finite(lo, hi, "sq")
        return Interval(lo, hi)

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise TypeError("only non-negative integer powers are supported")
        if n == 0:
            return Interval(1.0)
        if n % 2 == 0:
            return self.sq() ** (n // 2) if n > 2 else self.sq()
        return self * self ** (n - 1)

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))


# ---------------------------------------------------------------------------
# vectorised interval


def _vdown(x: np.ndarray, n: int = 1) -> np.ndarray:
    for _ in range(n):
        x = np.nextafter(x, np.inf if _FAULT else -np.inf)
    return x


def _vup(x: np.ndarray, n: int = 1) -> np.ndarray:
    for _ in range(n):
        x = np.nextafter(x, -np.inf if _FAULT else np.inf)
    return x


class IArray:
    """Array of intervals, stored as two float64 arrays.

    Unlike :class:`Interval`, operations never raise on domain problems:
    entries whose true range is unbounded become ``[-inf, inf]``, so callers
    can detect and replace them in bulk (see ``isfinite``).
    """

    __slots__ = ("lo", "hi")
    __array_priority__ = 1000

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=float)
        if hi is None:
            self.lo = self.hi = lo
        else:
            self.lo, self.hi = np.broadcast_arrays(lo, np.asarray(hi, dtype=float))

    @classmethod
    def coerce(cls, x) -> "IArray":
        if isinstance(x, IArray):
            return x
        if isinstance(x, Interval):
            return cls(x.lo, x.hi)
        if isinstance(x, Fraction):
            i = Interval.from_fraction(x)
            return cls(i.lo, i.hi)
        return cls(x)

    def __len__(self) -> int:
        return int(self.lo.size)

    def __getitem__(self, idx) -> "IArray":
        return IArray(self.lo[idx], self.hi[idx])

    def interval(self, i: int) -> Interval:
        return Interval(float(self.lo[i]), float(self.hi[i]))

    def isfinite(self) -> np.ndarray:
        return np.isfinite(self.lo) & np.isfinite(self.hi)

    def width(self) -> np.ndarray:
        return _vup(self.hi - self.lo)

    def __repr__(self) -> str:
        return f"IArray(lo={self.lo!r}, hi={self.hi!r})"

    def __neg__(self) -> "IArray":
        return IArray(-self.hi, -self.lo)

    def __add__(self, other) -> "IArray":
        o = IArray.coerce(other)
        return IArray(_vdown(self.lo + o.lo), _vup(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "IArray":
        o = IArray.coerce(other)
        return IArray(_vdown(self.lo - o.hi), _vup(self.hi - o.lo))

    def __rsub__(self, other) -> "IArray":
        return IArray.coerce(other) - self

    def __mul__(self, other) -> "IArray":
        o = IArray.coerce(other)
        with np.errstate(invalid="ignore"):
            p = np.stack(np.broadcast_arrays(self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi))
        lo = _vdown(p.min(axis=0))
        hi = _vup(p.max(axis=0))
        bad = np.isnan(lo) | np.isnan(hi)
        if bad.any():
            lo = np.where(bad, -np.inf, lo)
            hi = np.where(bad, np.inf, hi)
        return IArray(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IArray":
        o = IArray.coerce(other)
        zero = (o.lo <= 0) & (o.hi >= 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.stack(np.broadcast_arrays(self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi))
        lo = _vdown(q.min(axis=0))
        hi = _vup(q.max(axis=0))
        bad = zero | np.isnan(lo) | np.isnan(hi)
        return IArray(np.where(bad, -np.inf, lo), np.where(bad, np.inf, hi))

    def __rtruediv__(self, other) -> "IArray":
        return IArray.coerce(other) / self

    def sq(self) -> "IArray":
        a, b = self.lo, self.hi
        a2, b2 = a * a, b * b
        lo = np.where(a >= 0, a2, np.where(b <= 0, b2, 0.0))
        hi = np.maximum(a2, b2)
        return IArray(np.where(lo > 0, _vdown(lo), 0.0), _vup(hi))

    def __pow__(self, n: int) -> "IArray":
        if n == 2:
            return self.sq()
        if n == 3:
            return self * self.sq()
        out = IArray(np.ones_like(self.lo))
        for _ in range(n):
            out = out * self
        return out


# ---------------------------------------------------------------------------
# elementary functions (dispatch on Interval / IArray / number)


def _scalar_exp(x: Interval) -> Interval:
    if x.hi > 709.0:
        raise IntervalError(f"exp overflow for {x!r}")
    lo = 1.0 if x.lo == 0.0 and not _FAULT else max(0.0, _down_n(math.exp(x.lo), ELEM_ULPS))
    hi = 1.0 if x.hi == 0.0 and not _FAULT else _up_n(math.exp(x.hi), ELEM_ULPS)
    return Interval(lo, max(lo, hi))


def _scalar_log(x: Interval) -> Interval:
    if not x.lo > 0:
        raise DomainViolation("log requires a positive argument", x.lo)
    lo = 0.0 if x.lo == 1.0 and not _FAULT else _down_n(math.log(x.lo), ELEM_ULPS)
    hi = 0.0 if x.hi == 1.0 and not _FAULT else _up_n(math.log(x.hi), ELEM_ULPS)
    return Interval(lo, max(lo, hi))


def _sqrt_dn(a: float) -> float:
    r = math.sqrt(a)
    t = _two_prod(r, r)
    if t is None:
        return _down(r)
    p, e = t
    # r*r - a = (p - a) + e; r is a lower bound when r*r <= a
    return r if ((p - a) + e <= 0 and not _FAULT) else _down(r)


def _sqrt_up(a: float) -> float:
    r = math.sqrt(a)
    t = _two_prod(r, r)
    if t is None:
        return _up(r)
    p, e = t
    return r if ((p - a) + e >= 0 and not _FAULT) else _up(r)


def _scalar_sqrt(x: Interval) -> Interval:
    if x.lo < 0:
        raise DomainViolation("sqrt requires a non-negative argument", x.lo)
    lo = 0.0 if x.lo == 0.0 else max(0.0, _sqrt_dn(x.lo))
    hi = 0.0 if x.hi == 0.0 else _sqrt_up(x.hi)
    return Interval(lo, max(lo, hi))


_HALF_PI_HI = math.nextafter(math.pi / 2, _INF)


def _scalar_sin(x: Interval) -> Interval:
    # only the monotone branch is needed downstream
    if x.lo < -_HALF_PI_HI or x.hi > _HALF_PI_HI:
        raise DomainViolation("sin is only supported on [-pi/2, pi/2]", x.lo if x.lo < 0 else x.hi)
    lo = 0.0 if x.lo == 0.0 and not _FAULT else max(-1.0, _down_n(math.sin(x.lo), ELEM_ULPS))
    hi = 0.0 if x.hi == 0.0 and not _FAULT else min(1.0, _up_n(math.sin(x.hi), ELEM_ULPS))
    return Interval(lo, max(lo, hi))


def _scalar_asin(x: Interval) -> Interval:
    if x.lo < -1.0 or x.hi > 1.0:
        raise DomainViolation("asin requires an argument in [-1, 1]", x.lo if x.lo < -1 else x.hi)
    lo = 0.0 if x.lo == 0.0 and not _FAULT else _down_n(math.asin(x.lo), ELEM_ULPS)
    hi = 0.0 if x.hi == 0.0 and not _FAULT else _up_n(math.asin(x.hi), ELEM_ULPS)
    return Interval(lo, max(lo, hi))


def _arr_exp(x: IArray) -> IArray:
    with np.errstate(over="ignore"):
        lo = np.maximum(_vdown(np.exp(x.lo), ELEM_ULPS), 0.0)
        hi = _vup(np.exp(x.hi), ELEM_ULPS)
    return IArray(lo, hi)


def _arr_log(x: IArray) -> IArray:
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(x.lo > 0, _vdown(np.log(np.where(x.lo > 0, x.lo, 1.0)), ELEM_ULPS), -np.inf)
        hi = _vup(np.log(x.hi), ELEM_ULPS)
    return IArray(lo, np.where(x.hi > 0, hi, np.inf))


def _arr_sqrt(x: IArray) -> IArray:
    with np.errstate(invalid="ignore"):
        lo = np.where(x.lo > 0, np.maximum(_vdown(np.sqrt(np.maximum(x.lo, 0.0))), 0.0), 0.0)
        hi = _vup(np.sqrt(np.maximum(x.hi, 0.0)))
    return IArray(np.where(x.lo < 0, -np.inf, lo), np.where(x.lo < 0, np.inf, hi))


def _arr_sin(x: IArray) -> IArray:
    lo = np.maximum(_vdown(np.sin(x.lo), ELEM_ULPS), -1.0)
    hi = np.minimum(_vup(np.sin(x.hi), ELEM_ULPS), 1.0)
    bad = (x.lo < -_HALF_PI_HI) | (x.hi > _HALF_PI_HI)
    return IArray(np.where(bad, -1.0, lo), np.where(bad, 1.0, hi))


def _arr_asin(x: IArray) -> IArray:
    with np.errstate(invalid="ignore"):
        lo = _vdown(np.arcsin(np.clip(x.lo, -1, 1)), ELEM_ULPS)
        hi = _vup(np.arcsin(np.clip(x.hi, -1, 1)), ELEM_ULPS)
    bad = (x.lo < -1) | (x.hi > 1)
    return IArray(np.where(bad, -np.inf, lo), np.where(bad, np.inf, hi))


def _dispatch(x, scalar, array):
    if isinstance(x, IArray):
        return array(x)
    return scalar(Interval.coerce(x))


def exp(x):
    """Enclosure of ``exp`` over ``x``."""
    return _dispatch(x, _scalar_exp, _arr_exp)


def log(x):
    """Enclosure of ``log`` over ``x``; requires ``x.lo > 0``."""
    return _dispatch(x, _scalar_log, _arr_log)


def sqrt(x):
    """Enclosure of the square root; requires ``x.lo >= 0``."""
    return _dispatch(x, _scalar_sqrt, _arr_sqrt)


def sin(x):
    """Enclosure of ``sin`` on ``[-pi/2, pi/2]``."""
    return _dispatch(x, _scalar_sin, _arr_sin)


def asin(x):
    """Enclosure of ``arcsin`` on ``[-1, 1]``."""
    return _dispatch(x, _scalar_asin, _arr_asin)


def neg_square(x):
    """Enclosure of ``-x**2`` (``neg_square([-2, 1]) == [-4, 0]``)."""
    if isinstance(x, IArray):
        return -x.sq()
    return -Interval.coerce(x).sq()


# ---------------------------------------------------------------------------
# standard normal tail


@functools.lru_cache(maxsize=None)
def _sqrt_2pi(prec: int) -> Decimal:
    """sqrt(2 pi) to ``prec`` digits (Machin's formula with guard digits)."""
    with localcontext() as ctx:
        ctx.prec = prec + 15

        def atan_inv(k: int) -> Decimal:
            x = Decimal(1) / k
            x2 = x * x
            total, term, n = x, x, 1
            eps = Decimal(10) ** (-(prec + 14))
            while term > eps:
                term *= x2
                n += 2
                total += (term / n) if (n // 2) % 2 == 0 else -(term / n)
            return total

        pi = 16 * atan_inv(5) - 4 * atan_inv(239)
        r = (2 * pi).sqrt()
    with localcontext() as ctx:
        ctx.prec = prec
        return +r


_DEC_EXTRA = 12


_CF_FROM = 3.0
_CF_PREC = 34


def _tail_cf(t: float) -> tuple[Decimal, Decimal]:
    """Decimal bounds on ``P[Z >= t]`` for ``t >= 3`` from the Mills ratio.

    ``Phi_bar(t) / phi(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...))))`` has positive
    coefficients, so consecutive convergents bracket it.  The Wallis
    recurrence only adds and multiplies positive numbers, so after ``k``
    steps each convergent carries relative rounding error below
    ``(6 k + 2) * 10**(1 - prec)``.
    """
    prec = _CF_PREC
    with localcontext() as ctx:
        ctx.prec = prec
        td = Decimal(t)
        eps = Decimal(10) ** (1 - prec)
        # convergents A_k / B_k with a_1 = 1, a_k = k - 1, b_k = t
        a_prev, a_cur = Decimal(1), Decimal(0)
        b_prev, b_cur = Decimal(0), Decimal(1)
        conv_prev = None
        k = 0
        while True:
            k += 1
            ak = 1 if k == 1 else k - 1
            a_prev, a_cur = a_cur, td * a_cur + ak * a_prev
            b_prev, b_cur = b_cur, td * b_cur + ak * b_prev
            conv = a_cur / b_cur
            if conv_prev is not None and abs(conv - conv_prev) <= conv * Decimal("1e-24"):
                break
            conv_prev = conv
        delta = (6 * k + 20) * eps
        lo_r, hi_r = min(conv, conv_prev), max(conv, conv_prev)
        phi = (-(td * td) / 2).exp() / _sqrt_2pi(prec)
        return phi * lo_r * (1 - delta), phi * hi_r * (1 + delta)


def _tail_decimal(x: float) -> tuple[Decimal, Decimal]:
    """Rigorous decimal bounds on ``P[Z >= x]`` for a double ``x``.

    Uses ``Phi_bar(x) = 1/2 - phi(x) * S(|x|) sign(x)`` with the series
    ``S(t) = sum_n t**(2n+1) / (2n+1)!!`` whose terms are all positive.  Every
    decimal operation is rounded to nearest at ``prec`` digits, so each adds
    a relative error below ``10**(1-prec)``; the accumulated error is bounded
    by ``(ops + 8) * 10**(1-prec)`` relative to ``phi * S`` and added on both
    sides together with the series remainder.
    """
    t = abs(x)
    if t >= _CF_FROM:
        lo, hi = _tail_cf(t)
        if x > 0:
            return lo, hi
        with localcontext() as ctx:
            ctx.prec = _CF_PREC
            eps = Decimal(10) ** (1 - _CF_PREC)
            return 1 - hi - eps, 1 - lo + eps
    prec = 40 + int(t * t / 4.6) + _DEC_EXTRA
    with localcontext() as ctx:
        ctx.prec = prec
        td = Decimal(t)  # exact conversion of the double
        t2 = td * td
        term = td
        total = term
        n = 0
        ops = 3
        tiny = Decimal(10) ** (-(prec + 2))
        while True:
            denom = 2 * n + 3
            term = term * t2 / denom
            total += term
            ops += 3
            n += 1
            ratio = t2 / (2 * n + 3)
            if ratio < Decimal("0.5"):
                # remaining tail < term * ratio / (1 - ratio) <= 2 * term * ratio
                rem = 2 * term * ratio
                if rem <= tiny * total or term == 0:
                    break
        phi = (-(t2 / 2)).exp() / _sqrt_2pi(prec)
        prod = phi * total
        ops += 4
        eps = Decimal(10) ** (1 - prec)
        # the last term covers rounding of the final subtraction
        err = prod * eps * (ops + 8) + phi * rem * (1 + eps * 8) + 2 * eps
        half = Decimal("0.5")
        if x >= 0:
            lo = half - prod - err
            hi = half - prod + err
        else:
            lo = half + prod - err
            hi = half + prod + err
    return lo, hi


def _dec_to_interval(lo: Decimal, hi: Decimal) -> tuple[float, float]:
    flo = float(lo)
    fhi = float(hi)
    # float(Decimal) is correctly rounded; one step outward is always safe
    flo = math.nextafter(flo, -_INF) if not _FAULT else flo
    fhi = math.nextafter(fhi, _INF) if not _FAULT else fhi
    return max(flo, 0.0), min(fhi, 1.0)


_TAIL_CUTOFF = 38.5


def _tail_point(x: float) -> tuple[float, float]:
    if x == 0.0:
        return 0.5, 0.5
    if x > _TAIL_CUTOFF:
        return 0.0, 5e-324
    if x < -_TAIL_CUTOFF:
        return math.nextafter(1.0, 0.0), 1.0
    return _dec_to_interval(*_tail_decimal(x))


def normal_tail(x) -> Interval:
    """Certified enclosure of ``Phi_bar(x) = P[Z >= x]`` for ``Z ~ N(0, 1)``.

    Parameters
    ----------
    x : Interval or float
        Finite argument.  The function is antitone, so the endpoints are
        evaluated separately.

    Returns
    -------
    Interval
        Subset of ``[0, 1]``.  For point inputs the width is a few ulp.

    Examples
    --------
    >>> normal_tail(Interval(0.0))
    Interval(0.5, 0.5)
    """
    x = Interval.coerce(x)
    lo_hi = _tail_point(x.hi)
    if x.is_point():
        return Interval(*lo_hi)
    hi_lo = _tail_point(x.lo)
    return Interval(lo_hi[0], hi_lo[1])


def normal_tail_fast(x: float) -> float:
    """Non-certified ``P[Z >= x]`` via ``scipy.special.ndtr``."""
    from scipy.special import ndtr

    return float(ndtr(-x))


# ---------------------------------------------------------------------------
# spec-level entry points


def arith(a: Interval, b: Interval, kind: str) -> Interval:
    """Binary interval arithmetic, ``kind`` in ``{add, sub, mul, div}``."""
    ops = {
        "add": Interval.__add__,
        "sub": Interval.__sub__,
        "mul": Interval.__mul__,
        "div": Interval.__truediv__,
    }
    try:
        return ops[kind](Interval.coerce(a), Interval.coerce(b))
    except KeyError:
        raise ValueError(f"unknown arithmetic kind {kind!r}") from None


def elem(a: Interval, kind: str) -> Interval:
    """Elementary function enclosure, ``kind`` in ``{exp, log, sqrt, neg_square}``."""
    fns = {"exp": exp, "log": log, "sqrt": sqrt, "neg_square": neg_square}
    try:
        return fns[kind](a)
    except KeyError:
        raise ValueError(f"unknown elementary function {kind!r}") from None


PI = Interval(math.pi, math.nextafter(math.pi, _INF))
LOG2 = log(Interval(2.0))
SQRT2 = sqrt(Interval(2.0))
SQRT_PI = sqrt(PI)
