"""Random graph laboratory for friendly bisections.

A bisection ``(A1, A2)`` of the vertex set is stored as spins ``s_v = +1``
for ``A1`` and ``-1`` for ``A2``.  The margin of ``v`` is
``deg(v, own part) - deg(v, other part) = s_v (A s)_v``, and the bisection is
``H``-friendly when every margin is at least ``H``.  Bisections are ordered:
``(A1, A2)`` and ``(A2, A1)`` count separately.

Randomness comes from numpy's Philox 4x64 counter-based generator keyed by
the 64-bit seed, so streams for different seeds are independent and
reproducible.
"""
from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

__all__ = [
    "BisectionState",
    "TooLarge",
    "rng_for",
    "sample_gnp_half",
    "bisection_spins",
    "count_friendly_exhaustive",
    "max_margin_exhaustive",
    "empirical_first_moment",
    "local_search_max_margin",
    "graph_to_hex",
    "graph_from_hex",
    "write_graphs",
    "read_graphs",
    "write_results_csv",
    "GAMMA_CRIT_OVER_SQRT2",
]

EXHAUSTIVE_MAX_N2 = 12
EXHAUSTIVE_MAX_EDGES = 16
GAMMA_CRIT_OVER_SQRT2 = 0.17566


class TooLarge(ValueError):
    """The requested exhaustive enumeration is beyond the supported size."""


def rng_for(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


@dataclass
class BisectionState:
    """A graph with an optional bisection and incrementally maintained margins."""

    n2: int
    adjacency: np.ndarray
    part_of: Optional[np.ndarray] = None
    margins: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=np.int8)
        if a.shape != (self.n2, self.n2):
            raise ValueError("adjacency shape does not match n2")
        if not np.array_equal(a, a.T) or np.any(np.diag(a)):
            raise ValueError("adjacency must be symmetric with zero diagonal")
        self.adjacency = a
        if self.part_of is not None:
            self.set_partition(self.part_of)

    @property
    def spins(self) -> np.ndarray:
        if self.part_of is None:
            raise ValueError("no partition set")
        return np.where(self.part_of == 1, 1, -1).astype(np.int64)

    def set_partition(self, part_of: np.ndarray) -> None:
        p = np.asarray(part_of, dtype=np.int8)
        if p.shape != (self.n2,) or not np.all((p == 1) | (p == 2)):
            raise ValueError("part_of must assign every vertex to part 1 or 2")
        n1 = int(np.sum(p == 1))
        if abs(2 * n1 - self.n2) > 1:
            raise ValueError("parts must differ in size by at most one")
        self.part_of = p
        self.margins = self.recompute_margins()

    def recompute_margins(self) -> np.ndarray:
        s = self.spins
        return s * (self.adjacency.astype(np.int64) @ s)

    def check(self) -> bool:
        return self.margins is not None and np.array_equal(self.margins, self.recompute_margins())

    def min_margin(self) -> int:
        return int(self.margins.min())

    def swap(self, u: int, v: int) -> None:
        """Exchange ``u`` and ``v`` between the parts, updating margins in ``O(n)``."""
        if self.part_of[u] == self.part_of[v]:
            raise ValueError("swap needs vertices from different parts")
        s = self.spins
        a = self.adjacency
        delta = -2 * s * (a[:, u] * s[u] + a[:, v] * s[v])
        m = self.margins + delta
        auv = int(a[u, v])
        m[u] = -self.margins[u] - 2 * auv
        m[v] = -self.margins[v] - 2 * auv
        self.part_of[u], self.part_of[v] = self.part_of[v], self.part_of[u]
        self.margins = m


def sample_gnp_half(n2: int, seed: int) -> BisectionState:
    """``G(n2, 1/2)`` with each edge an independent fair bit."""
    if n2 < 2:
        raise ValueError("n2 must be at least 2")
    bits = rng_for(seed).integers(0, 2, size=n2 * (n2 - 1) // 2, dtype=np.int8)
    return BisectionState(n2, _from_lower_bits(n2, bits))


def _lower_index(n2: int) -> tuple[np.ndarray, np.ndarray]:
    # rows i = 1..n2-1, columns j = 0..i-1, row-major
    i, j = np.tril_indices(n2, -1)
    return i, j


def _from_lower_bits(n2: int, bits: np.ndarray) -> np.ndarray:
    a = np.zeros((n2, n2), dtype=np.int8)
    i, j = _lower_index(n2)
    a[i, j] = bits
    a[j, i] = bits
    return a


def bisection_spins(n2: int) -> np.ndarray:
    """All ordered bisections as a ``(count, n2)`` spin matrix.

    For odd ``n2`` both shapes ``(floor, ceil)`` and ``(ceil, floor)`` appear.
    """
    sizes = {n2 // 2, (n2 + 1) // 2}
    rows = []
    for size in sorted(sizes):
        for a1 in itertools.combinations(range(n2), size):
            s = -np.ones(n2, dtype=np.int64)
            s[list(a1)] = 1
            rows.append(s)
    return np.array(rows, dtype=np.int64)


def _margins_all(adj: np.ndarray, spins: np.ndarray) -> np.ndarray:
    # adj: (..., n, n), spins: (b, n) -> (..., b, n)
    return spins * np.einsum("...ij,bj->...bi", adj.astype(np.int64), spins)


def count_friendly_exhaustive(state: BisectionState, H: int) -> int:
    """Number of ordered ``H``-friendly bisections of the graph.

    Raises
    ------
    TooLarge
        If ``n2`` exceeds 12.

    Examples
    --------
    >>> count_friendly_exhaustive(BisectionState(4, np.zeros((4, 4))), 0)
    6
    """
    if state.n2 > EXHAUSTIVE_MAX_N2:
        raise TooLarge(f"exhaustive counting supports n2 <= {EXHAUSTIVE_MAX_N2}")
    m = _margins_all(state.adjacency, bisection_spins(state.n2))
    return int(np.sum(np.all(m >= H, axis=-1)))


def max_margin_exhaustive(state: BisectionState) -> tuple[int, np.ndarray]:
    """Largest minimum margin over all bisections and one bisection attaining it."""
    if state.n2 > EXHAUSTIVE_MAX_N2:
        raise TooLarge(f"exhaustive search supports n2 <= {EXHAUSTIVE_MAX_N2}")
    spins = bisection_spins(state.n2)
    mins = _margins_all(state.adjacency, spins).min(axis=-1)
    i = int(np.argmax(mins))
    return int(mins[i]), np.where(spins[i] > 0, 1, 2).astype(np.int8)


def _all_graphs(n2: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    e = n2 * (n2 - 1) // 2
    i, j = _lower_index(n2)
    codes = np.arange(2**e, dtype=np.int64)
    for start in range(0, len(codes), chunk):
        c = codes[start : start + chunk]
        bits = ((c[:, None] >> np.arange(e - 1, -1, -1)) & 1).astype(np.int8)
        a = np.zeros((len(c), n2, n2), dtype=np.int8)
        a[:, i, j] = bits
        a[:, j, i] = bits
        yield a


def empirical_first_moment(
    n2: int,
    H: int,
    mode: str = "exhaustive",
    samples: int = 100_000,
    seed: int = 0,
) -> tuple[Fraction | float, float]:
    """Mean number of ordered ``H``-friendly bisections of ``G(n2, 1/2)``.

    Parameters
    ----------
    n2 : int
    H : int
    mode : {"exhaustive", "monte_carlo"}
        Exhaustive mode averages over all ``2^C(n2, 2)`` graphs and returns an
        exact rational with standard error 0.
    samples, seed : int
        Monte Carlo sample count and generator key.

    Returns
    -------
    mean : Fraction or float
    stderr : float
    """
    spins = bisection_spins(n2)
    if mode == "exhaustive":
        e = n2 * (n2 - 1) // 2
        if e > EXHAUSTIVE_MAX_EDGES:
            raise TooLarge(f"exhaustive mode needs C(n2, 2) <= {EXHAUSTIVE_MAX_EDGES}")
        total = 0
        for batch in _all_graphs(n2):
            m = _margins_all(batch, spins)
            total += int(np.sum(np.all(m >= H, axis=-1)))
        return Fraction(total, 2**e), 0.0
    if mode != "monte_carlo":
        raise ValueError("mode must be 'exhaustive' or 'monte_carlo'")
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = rng_for(seed)
    e = n2 * (n2 - 1) // 2
    i, j = _lower_index(n2)
    counts = np.empty(samples, dtype=np.int64)
    batch = max(1, min(samples, 2**22 // max(1, len(spins) * n2)))
    for start in range(0, samples, batch):
        b = min(batch, samples - start)
        bits = rng.integers(0, 2, size=(b, e), dtype=np.int8)
        a = np.zeros((b, n2, n2), dtype=np.int8)
        a[:, i, j] = bits
        a[:, j, i] = bits
        counts[start : start + b] = np.sum(np.all(_margins_all(a, spins) >= H, axis=-1), axis=-1)
    mean = float(counts.mean())
    return mean, float(counts.std(ddof=1) / math.sqrt(samples))


def _random_partition(n2: int, rng: np.random.Generator, bigger_first: bool) -> np.ndarray:
    n1 = (n2 + 1) // 2 if bigger_first else n2 // 2
    p = np.full(n2, 2, dtype=np.int8)
    p[rng.permutation(n2)[:n1]] = 1
    return p


def _best_swap(state: BisectionState, candidates: np.ndarray) -> Optional[tuple[int, int, int, int]]:
    """Best pair swap by (new minimum margin, -count at that minimum)."""
    s = state.spins
    a = state.adjacency.astype(np.int64)
    m = state.margins
    p = state.part_of
    best = None
    # column w of d[:, x] is the change at w from flipping x alone
    d = -2 * (s[:, None] * a) * s[None, :]
    for u in candidates:
        opp = np.flatnonzero(p != p[u])
        if len(opp) == 0:
            continue
        new = m[:, None] + d[:, u][:, None] + d[:, opp]
        auv = a[u, opp]
        new[u, :] = -m[u] - 2 * auv
        new[opp, np.arange(len(opp))] = -m[opp] - 2 * auv
        mins = new.min(axis=0)
        cnt = np.sum(new == mins[None, :], axis=0)
        key = mins * (state.n2 + 1) - cnt
        k = int(np.argmax(key))
        cand = (int(mins[k]), -int(cnt[k]), int(u), int(opp[k]))
        if best is None or cand[:2] > best[:2]:
            best = cand
    return best


def local_search_max_margin(
    state: BisectionState,
    restarts: int = 10,
    seed: int = 0,
    max_steps: Optional[int] = None,
    candidate_limit: int = 16,
) -> tuple[int, np.ndarray]:
    """Greedy pair-swap search for a bisection with large minimum margin.

    Each restart draws a random balanced partition, then repeatedly applies
    the swap that most improves ``(min margin, -#vertices at the min)`` until
    no swap improves it.  For large graphs only the ``candidate_limit``
    lowest-margin vertices are tried as the first member of a swap.

    Returns
    -------
    best_H : int
    partition : ndarray
        ``part_of`` array of the best bisection found.
    """
    n2 = state.n2
    rng = rng_for(seed)
    steps = max_steps if max_steps is not None else 20 * n2
    best_h = None
    best_p = None
    for r in range(max(1, restarts)):
        st = BisectionState(n2, state.adjacency, _random_partition(n2, rng, bool(r % 2)))
        cur = (st.min_margin(), -int(np.sum(st.margins == st.min_margin())))
        for _ in range(steps):
            if n2 <= candidate_limit:
                cands = np.arange(n2)
            else:
                cands = np.argsort(st.margins, kind="stable")[:candidate_limit]
            mv = _best_swap(st, cands)
            if mv is None or mv[:2] <= cur:
                break
            st.swap(mv[2], mv[3])
            cur = (st.min_margin(), -int(np.sum(st.margins == st.min_margin())))
        if best_h is None or cur[0] > best_h:
            best_h, best_p = cur[0], st.part_of.copy()
    return int(best_h), best_p


# ---------------------------------------------------------------------------
# I/O


def graph_to_hex(state: BisectionState) -> str:
    """``"<n2> <hex>"``: lower-triangular bits (row-major, ``i > j``) as hex, MSB first.

    The bit string is right-padded with zeros to a multiple of four bits.
    """
    i, j = _lower_index(state.n2)
    bits = "".join("1" if b else "0" for b in state.adjacency[i, j])
    bits += "0" * (-len(bits) % 4)
    hexs = "".join(f"{int(bits[k : k + 4], 2):x}" for k in range(0, len(bits), 4))
    return f"{state.n2} {hexs}"


def graph_from_hex(line: str) -> BisectionState:
    parts = line.split()
    if len(parts) not in (1, 2):
        raise ValueError(f"malformed graph line {line!r}")
    n2 = int(parts[0])
    e = n2 * (n2 - 1) // 2
    hexs = parts[1] if len(parts) == 2 else ""
    if len(hexs) != (e + 3) // 4:
        raise ValueError(f"expected {(e + 3) // 4} hex digits for n2={n2}, got {len(hexs)}")
    bits = "".join(f"{int(c, 16):04b}" for c in hexs)[:e]
    return BisectionState(n2, _from_lower_bits(n2, np.array([int(b) for b in bits], dtype=np.int8)))


def write_graphs(path: str | os.PathLike, graphs: Iterable[BisectionState]) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for g in graphs:
            fh.write(graph_to_hex(g) + "\n")


def read_graphs(path: str | os.PathLike) -> list[BisectionState]:
    with open(path, encoding="utf-8") as fh:
        return [graph_from_hex(line) for line in fh if line.strip() and not line.startswith("#")]


def write_results_csv(path: str | os.PathLike, rows: Iterable[dict], value_name: str = "X_H") -> str:
    """Append ``(seed, n2, H, value)`` rows; ``value_name`` is ``X_H`` or ``best_H``."""
    fields = ["seed", "n2", "H", value_name]
    new = not os.path.exists(path)
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        if new:
            w.writeheader()
        for r in rows:
            w.writerow(r)
    return str(path)
