"""Ranks, tie statistics, and rank-indexed weight tables.

Ranks use the max-rank convention R_i = #{j : y_j <= y_i}, so tied values
share the rank of their last occurrence in sorted order.  The tie
correction n0 counts the multiplicity of the sample maximum plus one if the
minimum is unique; n0 == n means no coefficient value is defined and the
estimators reject the sample.

Interior ranks r carry weight 1/((r-1)(n-r)); ranks 1 and n carry zero
weight.  A prefix table over rank values answers "total weight of all
observations whose rank falls in [lo, hi]" in O(1) after an O(n) build,
which is what makes the coefficient evaluable in O(n log n) overall.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .util import as_float_vector, compensated_cumsum


@dataclass(frozen=True)
class RankInfo:
    """Max-ranks of a sample plus its tie census."""

    ranks: np.ndarray            # 1-based max-ranks, length n
    n: int
    n_max: int                   # multiplicity of the sample maximum
    c_min: int                   # 1 if the minimum is unique, else 0
    n0: int                      # n_max + c_min
    distinct_rank_values: np.ndarray

    def __post_init__(self):
        self.ranks.setflags(write=False)
        self.distinct_rank_values.setflags(write=False)


def compute_ranks(y) -> RankInfo:
    """Rank a numeric sequence with the max-rank convention.

    Deterministic: ties need no randomness because tied values share a rank.
    """
    y = as_float_vector(y, "y")
    n = len(y)
    if n < 1:
        raise InvalidInputError("need at least one observation")
    order = np.sort(y)
    ranks = np.searchsorted(order, y, side="right").astype(np.int64)
    n_max = int(np.count_nonzero(y == order[-1]))
    c_min = 1 if np.count_nonzero(y == order[0]) == 1 else 0
    return RankInfo(
        ranks=ranks,
        n=n,
        n_max=n_max,
        c_min=c_min,
        n0=n_max + c_min,
        distinct_rank_values=np.unique(ranks),
    )


def rank_weight(r: int, n: int) -> float:
    """Weight 1/((r-1)(n-r)) of rank ``r``; zero at the extremes."""
    if r <= 1 or r >= n:
        return 0.0
    return 1.0 / ((r - 1) * (n - r))


def rank_weight_exact(r: int, n: int) -> Fraction:
    if r <= 1 or r >= n:
        return Fraction(0)
    return Fraction(1, (r - 1) * (n - r))


@dataclass(frozen=True)
class WeightTable:
    """Per-rank weights with a prefix table of observation weight mass.

    ``weights[r]`` is the weight of rank value r (index 0 unused).
    ``prefix[r]`` is the total weight of all observations with rank <= r, so
    ``prefix[n]`` is the total weighted count.  In exact mode both are lists
    of :class:`fractions.Fraction` and every query is exact.
    """

    n: int
    weights: object   # ndarray (float mode) or list[Fraction] (exact mode)
    prefix: object
    exact: bool

    def weight(self, r: int):
        return self.weights[r]

    def mass(self, lo: int, hi: int):
        """Total weight of observations with rank in [lo, hi]."""
        if not (1 <= lo <= hi <= self.n):
            raise InvalidInputError(
                f"need 1 <= lo <= hi <= n, got lo={lo}, hi={hi}, n={self.n}"
            )
        return self.prefix[hi] - self.prefix[lo - 1]


def build_weight_table(rank_info: RankInfo, exact: bool = False) -> WeightTable:
    n = rank_info.n
    counts = np.bincount(rank_info.ranks, minlength=n + 1)
    if exact:
        weights = [Fraction(0)] * (n + 1)
        prefix = [Fraction(0)] * (n + 1)
        running = Fraction(0)
        for r in range(1, n + 1):
            weights[r] = rank_weight_exact(r, n)
            running += int(counts[r]) * weights[r]
            prefix[r] = running
        return WeightTable(n=n, weights=weights, prefix=prefix, exact=True)
    weights = np.zeros(n + 1)
    if n >= 3:
        interior = np.arange(2, n)
        weights[interior] = 1.0 / ((interior - 1) * (n - interior))
    mass = counts * weights
    prefix = np.zeros(n + 1)
    # weights near the rank extremes span ~n^2 in magnitude, so accumulate
    # with compensation rather than a plain cumsum
    prefix[1:] = compensated_cumsum(mass[1:])
    return WeightTable(n=n, weights=weights, prefix=prefix, exact=False)


def weighted_rank_mass(rank_info: RankInfo, lo: int, hi: int) -> float:
    """Sum of weights[R_j] over observations j with lo <= R_j <= hi.

    Convenience wrapper that builds the prefix table; callers issuing many
    queries should build one :class:`WeightTable` and use ``mass``.
    """
    return float(build_weight_table(rank_info).mass(lo, hi))
