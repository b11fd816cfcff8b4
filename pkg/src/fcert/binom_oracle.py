"""Exact binomial computations used as oracles for Gaussian approximations.

Tilted success probabilities ``1/2 + a / (2 sqrt n)`` are irrational in
general, so probabilities are evaluated in 50-digit decimal arithmetic from
exact integer binomial coefficients.  Untilted cases reduce to exact
rationals.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

from scipy import special as _sp

from .gaussfn import FAST, GParams, g_eval

__all__ = [
    "BinDiffSpec",
    "OutOfRange",
    "InfeasibleBeta",
    "PRECISION",
    "MAX_N",
    "exact_middle_ratio",
    "binomial_pmf",
    "difference_pmf",
    "diff_pmf_exact",
    "diff_pmf_leading",
    "first_moment_tail_check",
    "second_moment_joint_check",
    "write_rows",
]

PRECISION = 50
MAX_N = 4096


class OutOfRange(ValueError):
    """Arguments outside the range where the quantity is defined."""


class InfeasibleBeta(ValueError):
    """``beta n`` is not an integer or ``beta`` is not strictly inside ``(0, 1)``."""


@dataclass(frozen=True)
class BinDiffSpec:
    """``P[Bin(n, 1/2 + a2/(2 sqrt n)) - Bin(n - ell, 1/2 + a1/(2 sqrt n)) = t]``."""

    n: int
    ell: int
    a1: float
    a2: float
    t: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.ell <= self.n:
            raise OutOfRange(f"need n >= 1 and 0 <= ell <= n, got n={self.n}, ell={self.ell}")
        for a in (self.a1, self.a2):
            if not abs(a) < math.sqrt(self.n):
                raise OutOfRange(f"tilt {a} makes a probability leave (0, 1)")


def exact_middle_ratio(n: int, t: int) -> Fraction:
    """``C(n, n/2 + t) / C(n, n/2)`` as an exact rational.

    Examples
    --------
    >>> exact_middle_ratio(100, 0)
    Fraction(1, 1)
    """
    if n < 0 or n % 2:
        raise OutOfRange("n must be a non-negative even integer")
    if abs(t) > n // 2:
        raise OutOfRange(f"|t| = {abs(t)} exceeds n/2 = {n // 2}")
    return Fraction(math.comb(n, n // 2 + t), math.comb(n, n // 2))


def _prob(a: float, n: int) -> Decimal:
    return Decimal(1) / 2 + Decimal(a) / (2 * Decimal(n).sqrt())


def binomial_pmf(m: int, p: Decimal) -> list[Decimal]:
    """``P[Bin(m, p) = k]`` for ``k = 0..m`` in the current decimal context."""
    if m < 0:
        raise OutOfRange("m must be non-negative")
    q = 1 - p
    if p == 0 or q == 0:
        out = [Decimal(0)] * (m + 1)
        out[m if q == 0 else 0] = Decimal(1)
        return out
    # P[k] from P[k-1] by the ratio (m - k + 1) p / (k q), started at q^m
    out = [q**m]
    r = p / q
    for k in range(1, m + 1):
        out.append(out[-1] * r * (m - k + 1) / k)
    return out


def difference_pmf(m1: int, p1: Decimal, m2: int, p2: Decimal) -> tuple[int, list[Decimal]]:
    """Distribution of ``Bin(m1, p1) - Bin(m2, p2)``.

    Returns
    -------
    offset : int
        The smallest support point ``-m2``; entry ``i`` is ``P[D = i + offset]``.
    pmf : list of Decimal
    """
    x = binomial_pmf(m1, p1)
    y = binomial_pmf(m2, p2)
    out = [Decimal(0)] * (m1 + m2 + 1)
    # D = i - j  ->  index i - j + m2
    for j, yj in enumerate(y):
        if not yj:
            continue
        base = m2 - j
        for i, xi in enumerate(x):
            out[base + i] += xi * yj
    return -m2, out


def diff_pmf_exact(spec: BinDiffSpec) -> Decimal:
    """Point probability of the tilted binomial difference.

    Examples
    --------
    >>> float(diff_pmf_exact(BinDiffSpec(2, 0, 0.0, 0.0, 0)))
    0.375
    """
    with localcontext() as ctx:
        ctx.prec = PRECISION
        n = spec.n
        x = binomial_pmf(n, _prob(spec.a2, n))
        y = binomial_pmf(n - spec.ell, _prob(spec.a1, n))
        total = Decimal(0)
        for k, xk in enumerate(x):
            j = k - spec.t
            if 0 <= j < len(y):
                total += xk * y[j]
        return +total


def diff_pmf_leading(spec: BinDiffSpec) -> float:
    """Gaussian leading term ``exp(-((a2 - a1)/2 + (ell/2 - t)/sqrt n)^2) / sqrt(pi n)``."""
    n = spec.n
    z = (spec.a2 - spec.a1) / 2 + (spec.ell / 2 - spec.t) / math.sqrt(n)
    return math.exp(-z * z) / math.sqrt(math.pi * n)


def first_moment_tail_check(n: int, a1: float, a2: float, k: int) -> tuple[Decimal, float, float]:
    """Exact ``P[Bin(n-1, p1) - Bin(n, p2) >= k]`` against its Gaussian approximation.

    Parameters
    ----------
    n : int
    a1, a2 : float
        Tilts, ``p_i = 1/2 + a_i / (2 sqrt n)``.
    k : int

    Returns
    -------
    exact : Decimal
    gaussian : float
        ``Phi_bar(k sqrt 2 / sqrt n + (a2 - a1) / sqrt 2)``.
    err : float
        ``|exact - gaussian|``.
    """
    if n < 2 or n > MAX_N * 16:
        raise OutOfRange(f"n={n} outside [2, {MAX_N * 16}]")
    with localcontext() as ctx:
        ctx.prec = PRECISION
        x = binomial_pmf(n - 1, _prob(a1, n))
        y = binomial_pmf(n, _prob(a2, n))
        # P[X - Y >= k] = sum_i P[X = i] P[Y <= i - k]
        cdf = []
        acc = Decimal(0)
        for v in y:
            acc += v
            cdf.append(acc)
        total = Decimal(0)
        for i, xi in enumerate(x):
            j = i - k
            if j < 0:
                continue
            total += xi * (cdf[j] if j < len(cdf) else Decimal(1))
        exact = +total
    z = k * math.sqrt(2.0) / math.sqrt(n) + (a2 - a1) / math.sqrt(2.0)
    gauss = float(_sp.ndtr(-z))
    return exact, gauss, abs(float(exact) - gauss)


def second_moment_joint_check(
    n: int,
    beta: Fraction,
    a: Sequence[float],
    Gamma: int,
) -> tuple[Decimal, float, float]:
    """Exact joint probability of the two signed-sum inequalities against ``g``.

    With ``k = beta n``, ``X1 ~ Bin(k - 1, p1)``, ``X2 ~ Bin(n - k, p2)``,
    ``X3 ~ Bin(k, p3)``, ``X4 ~ Bin(n - k, p4)``, ``T1 = X1 - X3`` and
    ``T2 = X2 - X4``, evaluates ``P[T1 + T2 >= Gamma and T1 - T2 >= Gamma]``.

    Returns
    -------
    exact : Decimal
    g_value : float
        ``g`` at ``gamma = Gamma / sqrt n``.
    err : float
    """
    beta = Fraction(beta)
    if not 0 < beta < 1:
        raise InfeasibleBeta(f"beta={beta} must lie strictly between 0 and 1")
    kq = beta * n
    if kq.denominator != 1:
        raise InfeasibleBeta(f"beta n = {kq} is not an integer")
    if n > MAX_N:
        raise OutOfRange(f"n={n} exceeds {MAX_N}")
    if len(a) != 4:
        raise ValueError("need four tilts")
    k = int(kq)
    a1, a2, a3, a4 = (float(v) for v in a)
    with localcontext() as ctx:
        ctx.prec = PRECISION
        off1, t1 = difference_pmf(k - 1, _prob(a1, n), k, _prob(a3, n))
        off2, t2 = difference_pmf(n - k, _prob(a2, n), n - k, _prob(a4, n))
        # tail[i] = P[T1 >= i + off1]
        tail = [Decimal(0)] * (len(t1) + 1)
        for i in range(len(t1) - 1, -1, -1):
            tail[i] = tail[i + 1] + t1[i]
        total = Decimal(0)
        for j, pj in enumerate(t2):
            if not pj:
                continue
            need = Gamma + abs(j + off2) - off1
            if need <= 0:
                total += pj * tail[0]
            elif need < len(t1):
                total += pj * tail[need]
        exact = +total
    gv = g_eval(GParams(Gamma / math.sqrt(n), float(beta), a1, a2, a3, a4), FAST).mid()
    return exact, gv, abs(float(exact) - gv)


def write_rows(path: str | os.PathLike, rows: Iterable[dict]) -> str:
    """Append ``(n, params, exact, approx, err)`` rows to a CSV file."""
    fields = ["n", "params", "exact", "approx", "err"]
    new = not os.path.exists(path)
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        if new:
            w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in fields})
    return str(path)
