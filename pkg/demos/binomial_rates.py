"""Compare exact binomial-difference tails with their Gaussian limit."""
from __future__ import annotations

import math

from fcert.binom_oracle import first_moment_tail_check


def main() -> None:
    a1, a2, kappa = 0.3, -0.5, 2
    prev = None
    print(f"{'n':>6} {'exact':>14} {'gaussian':>14} {'err':>11} ratio")
    for n in (100, 400, 1600, 6400):
        exact, gauss, err = first_moment_tail_check(n, a1, a2, kappa * math.isqrt(n) // 10)
        ratio = "" if prev is None else f"{prev / err:.3f}"
        print(f"{n:>6} {float(exact):>14.10f} {gauss:>14.10f} {err:>11.3e} {ratio}")
        prev = err


if __name__ == "__main__":
    main()
