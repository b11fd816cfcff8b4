"""Small-graph counts of friendly bisections and a local-search margin."""
from __future__ import annotations

import math

from fcert.graphsim import GAMMA_CRIT_OVER_SQRT2, empirical_first_moment, local_search_max_margin, sample_gnp_half


def main() -> None:
    exact, _ = empirical_first_moment(6, 0, "exhaustive")
    mc, se = empirical_first_moment(6, 0, "monte_carlo", samples=20_000, seed=1)
    print(f"E X_0 at n2 = 6: exact {exact} = {float(exact):.5f}, Monte Carlo {mc:.5f} +- {se:.5f}")
    for n2 in (50, 100, 200):
        best, _ = local_search_max_margin(sample_gnp_half(n2, 0), restarts=3, seed=0)
        print(f"n2 = {n2}: best H = {best}, scaled {best / math.sqrt(n2 / 2):.3f} (limit {GAMMA_CRIT_OVER_SQRT2})")


if __name__ == "__main__":
    main()
