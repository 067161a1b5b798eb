"""Exact Euclidean nearest neighbors with seeded uniform tie-breaking.

For every row the table stores the first and second nearest neighbor, so
the nearest neighbor of i excluding any single index j is available in
O(1): it is nn1(i) unless j happens to be nn1(i), in which case it is
nn2(i).

Ties are detected by exact equality of squared distances (no epsilon) and
resolved uniformly at random from a seeded generator, which makes every
downstream coefficient value reproducible.  A k-d tree accelerates the
common low-dimensional case; rows that show any near-tie ambiguity fall
back to exact candidate enumeration, and the brute-force scan path used
for small n or high p consumes the tie-break stream identically, so both
backends return the same table for the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientSampleError, InvalidInputError
from .util import STREAM_TIEBREAK, as_float_matrix, rng_from

# Fast-path guard: gaps below this relative margin are treated as potential
# ties and re-examined exactly.  Well above accumulated ulp noise, well
# below any genuine data separation.
_GAP_MARGIN = 1e-9


@dataclass(frozen=True)
class NeighborTable:
    """First and second nearest neighbors (0-based indices) per row."""

    nn1: np.ndarray
    nn2: np.ndarray
    tie_events: int
    seed: int

    def __post_init__(self):
        self.nn1.setflags(write=False)
        self.nn2.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.nn1)


def _row_sq_dists(x: np.ndarray, i: int, cands: np.ndarray) -> np.ndarray:
    """Squared distances from row i to ``cands``, dimension-major order.

    The same accumulation order is used everywhere, so equal inputs give
    bit-identical values and exact tie detection is backend independent.
    """
    diff = x[cands] - x[i]
    out = np.zeros(len(cands))
    for d in range(x.shape[1]):
        out += diff[:, d] * diff[:, d]
    return out


def _pick(cands: np.ndarray, d2: np.ndarray, rng) -> tuple[int, bool]:
    """Uniform pick among the exact minimizers; cands must be ascending."""
    tie_set = cands[d2 == d2.min()]
    if len(tie_set) == 1:
        return int(tie_set[0]), False
    return int(tie_set[rng.integers(len(tie_set))]), True


def _pick_two(cands: np.ndarray, d2: np.ndarray, rng) -> tuple[int, int, int]:
    first, tied1 = _pick(cands, d2, rng)
    keep = cands != first
    second, tied2 = _pick(cands[keep], d2[keep], rng)
    return first, second, int(tied1) + int(tied2)


def build_neighbor_table(
    x,
    seed: int,
    *,
    tree_dim_cutoff: int = 8,
    tree_min_n: int = 64,
) -> NeighborTable:
    """Exact nn1/nn2 for every row of ``x`` under the Euclidean metric.

    Uses a k-d tree when p <= tree_dim_cutoff and n >= tree_min_n, otherwise
    an exhaustive scan; both cutoffs are overridable.  Requires n >= 3 so a
    second neighbor exists even after one exclusion.
    """
    x = as_float_matrix(x, "x")
    x = np.ascontiguousarray(x)
    n = x.shape[0]
    if n < 3:
        raise InsufficientSampleError(f"need at least 3 rows, got {n}")
    rng = rng_from(seed, STREAM_TIEBREAK)

    nn1 = np.full(n, -1, dtype=np.int64)
    nn2 = np.full(n, -1, dtype=np.int64)
    tie_events = 0

    use_tree = x.shape[1] <= tree_dim_cutoff and n >= tree_min_n
    if use_tree:
        tree = cKDTree(x)
        k = min(n, 4)
        dist, idx = tree.query(x, k=k)
        # exact squared distances to the tree's candidates, same accumulation
        # order as _row_sq_dists
        diff = x[idx] - x[:, None, :]
        cand_d2 = np.zeros((n, k))
        for d in range(x.shape[1]):
            cand_d2 += diff[:, :, d] * diff[:, :, d]

        self_first = idx[:, 0] == np.arange(n)
        gaps_ok = (
            (cand_d2[:, 1] > 0)
            & (cand_d2[:, 2] - cand_d2[:, 1] > _GAP_MARGIN * cand_d2[:, 2])
            & (cand_d2[:, 3] - cand_d2[:, 2] > _GAP_MARGIN * cand_d2[:, 3])
        )
        fast = self_first & gaps_ok
        nn1[fast] = idx[fast, 1]
        nn2[fast] = idx[fast, 2]

        for i in np.flatnonzero(~fast):
            radius = float(dist[i, -1]) * (1.0 + 1e-9)
            cands = np.asarray(tree.query_ball_point(x[i], radius), dtype=np.int64)
            cands = np.sort(cands[cands != i])
            if len(cands) < 2:  # degenerate radius (all-coincident rows)
                cands = np.setdiff1d(np.arange(n), [i])
            d2 = _row_sq_dists(x, i, cands)
            nn1[i], nn2[i], tied = _pick_two(cands, d2, rng)
            tie_events += tied
    else:
        others = np.arange(n)
        for i in range(n):
            cands = others[others != i]
            d2 = _row_sq_dists(x, i, cands)
            nn1[i], nn2[i], tied = _pick_two(cands, d2, rng)
            tie_events += tied

    return NeighborTable(nn1=nn1, nn2=nn2, tie_events=tie_events, seed=int(seed))


def resolve_excluded_neighbor(table: NeighborTable, i: int, j: int) -> int:
    """Nearest neighbor of i among rows other than i and j."""
    if i == j:
        raise InvalidInputError("i and j must differ")
    n = table.n
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"indices must lie in [0, {n})")
    first = int(table.nn1[i])
    return first if first != j else int(table.nn2[i])
