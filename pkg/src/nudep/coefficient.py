"""The dependence coefficient nu, its 1-d variant, and the xi comparator.

``nu_general`` estimates how strongly a response depends on a covariate
vector: 0 near independence, 1 when the response is a function of the
covariates.  It combines response ranks with covariate nearest neighbors.
For every ordered pair (j, i) the rank of observation j either falls inside
the rank interval spanned by observation i and its nearest neighbor
excluding j, or it does not; interior ranks are weighted by
1/((r-1)(n-r)).  The fast path groups the double sum by i: the interval
endpoints depend on j only through whether j is nn1(i), so one weighted
rank-mass query per i plus explicit endpoint corrections covers all j at
once, giving O(n log n) total.

``nu_general_oracle`` evaluates the same double sum literally, recomputing
each excluded-neighbor by exhaustive scan, in O(n^2 p).  Both paths accept
``exact=True`` to run in rational arithmetic, in which case equal results
are exact rather than within float tolerance.

``nu_1dim`` is the scalar-covariate variant built from consecutive ranks
after sorting by x, and ``xi_coefficient`` is the uniform-weight rank
correlation it is usually compared against.  Values are reported raw and
may fall outside [0, 1] at small n; they are never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateResponseError,
    InsufficientSampleError,
    InvalidInputError,
)
from .neighbors import NeighborTable, _row_sq_dists, build_neighbor_table
from .ranks import RankInfo, build_weight_table, compute_ranks, rank_weight
from .sample import Sample
from .util import DEFAULT_SEED, STREAM_TIEBREAK, as_float_vector, rng_from


@dataclass(frozen=True)
class CoefficientResult:
    """A coefficient value plus everything needed to reproduce it."""

    value: float
    method: str          # "nu", "nu1d", or "xi"
    n: int
    n0: int | None       # tie correction; only meaningful for method="nu"
    seed: int
    oracle_checked: bool = False


def _replicate_seeds(seed: int, m: int) -> list[int]:
    # replicate k reruns with seed + k, so each run is reproducible on its own
    return [int(seed) + k for k in range(m)]


# ---------------------------------------------------------------------------
# general estimator
# ---------------------------------------------------------------------------

def _check_nu_sample(rank_info: RankInfo):
    if rank_info.n < 3:
        raise InsufficientSampleError(f"need n >= 3, got n={rank_info.n}")
    if rank_info.n0 >= rank_info.n:
        raise DegenerateResponseError(
            "response ties are total (n0 == n); no coefficient value is defined"
        )


def _nu_value_fast(rank_info: RankInfo, table: NeighborTable, exact: bool):
    """Grouped-by-i evaluation of the double sum; see module docstring."""
    n = rank_info.n
    ranks = rank_info.ranks
    r1 = ranks[table.nn1]
    r2 = ranks[table.nn2]
    lo = np.minimum(ranks, r1)
    hi = np.maximum(ranks, r1)
    lo2 = np.minimum(ranks, r2)
    hi2 = np.maximum(ranks, r2)
    second_hit = (lo2 <= r1) & (r1 <= hi2)

    wt = build_weight_table(rank_info, exact=exact)
    if exact:
        total = Fraction(0)
        for i in range(n):
            term = wt.mass(int(lo[i]), int(hi[i]))
            term -= wt.weight(int(ranks[i])) + wt.weight(int(r1[i]))
            if second_hit[i]:
                term += wt.weight(int(r1[i]))
            total += term
        value = 1 - Fraction(1, 2) * Fraction(n - 1, n - rank_info.n0) * total
        return float(value)
    mass = wt.prefix[hi] - wt.prefix[lo - 1]
    w_self = wt.weights[ranks]
    w_first = wt.weights[r1]
    terms = mass - w_self - w_first + np.where(second_hit, w_first, 0.0)
    total = math.fsum(terms)
    return 1.0 - 0.5 * ((n - 1) / (n - rank_info.n0)) * total


def nu_general(
    sample: Sample,
    seed: int = DEFAULT_SEED,
    *,
    neighbor_table: NeighborTable | None = None,
    exact: bool = False,
    tie_replicates: int = 1,
    check_oracle: bool = False,
) -> CoefficientResult:
    """Dependence of sample.y on the rows of sample.x.

    Requires n >= 3 and a non-degenerate response (n0 < n).  With covariate
    ties the value is a randomized estimate; ``tie_replicates=m`` averages m
    runs seeded seed, seed+1, ..., seed+m-1.
    """
    if tie_replicates < 1:
        raise InvalidInputError("tie_replicates must be >= 1")
    if tie_replicates > 1:
        if neighbor_table is not None:
            raise InvalidInputError("tie_replicates conflicts with a fixed neighbor_table")
        runs = [
            nu_general(sample, s, exact=exact, check_oracle=check_oracle)
            for s in _replicate_seeds(seed, tie_replicates)
        ]
        return CoefficientResult(
            value=math.fsum(r.value for r in runs) / tie_replicates,
            method="nu",
            n=runs[0].n,
            n0=runs[0].n0,
            seed=int(seed),
            oracle_checked=all(r.oracle_checked for r in runs),
        )

    rank_info = compute_ranks(sample.y)
    _check_nu_sample(rank_info)
    table = neighbor_table if neighbor_table is not None else build_neighbor_table(sample.x, seed)
    value = _nu_value_fast(rank_info, table, exact)
    checked = False
    if check_oracle:
        ref = nu_general_oracle(sample, seed, neighbor_table=table, exact=exact)
        if exact:
            agreed = ref.value == value
        else:
            agreed = math.isclose(ref.value, value, rel_tol=1e-12, abs_tol=1e-12)
        if not agreed:
            raise RuntimeError(
                f"fast path {value!r} disagrees with brute-force value {ref.value!r}"
            )
        checked = True
    return CoefficientResult(
        value=float(value),
        method="nu",
        n=rank_info.n,
        n0=rank_info.n0,
        seed=int(seed),
        oracle_checked=checked,
    )


def nu_general_oracle(
    sample: Sample,
    seed: int = DEFAULT_SEED,
    *,
    neighbor_table: NeighborTable | None = None,
    exact: bool = False,
) -> CoefficientResult:
    """Literal double-loop evaluation with exhaustively scanned neighbors.

    Rebuilds every excluded-neighbor from raw pairwise distances, verifying
    along the way that the table's tie-broken picks lie in the scanned
    minimizer set.  O(n^2 p); intended as an independent cross-check.
    """
    rank_info = compute_ranks(sample.y)
    _check_nu_sample(rank_info)
    x = sample.x
    n = rank_info.n
    ranks = rank_info.ranks
    table = neighbor_table if neighbor_table is not None else build_neighbor_table(x, seed)

    everything = np.arange(n)
    d2 = np.empty((n, n))
    for i in range(n):
        d2[i] = _row_sq_dists(x, i, everything)
    np.fill_diagonal(d2, np.inf)

    contributions = []
    total_exact = Fraction(0)
    for j in range(n):
        rj = int(ranks[j])
        if rj == 1 or rj == n:
            continue
        hits = 0
        for i in range(n):
            if i == j:
                continue
            row = d2[i].copy()
            row[j] = np.inf
            tie_set = np.flatnonzero(row == row.min())
            pick = int(table.nn1[i]) if table.nn1[i] != j else int(table.nn2[i])
            if pick not in tie_set:
                raise RuntimeError(
                    "neighbor table disagrees with exhaustive scan "
                    f"at i={i}, j={j}"
                )
            lo_n, hi_n = sorted((int(ranks[i]), int(ranks[pick])))
            if lo_n <= rj <= hi_n:
                hits += 1
        if exact:
            total_exact += hits * Fraction(1, (rj - 1) * (n - rj))
        else:
            contributions.append(rank_weight(rj, n) * hits)
    if exact:
        value = 1 - Fraction(1, 2) * Fraction(n - 1, n - rank_info.n0) * total_exact
        value = float(value)
    else:
        value = 1.0 - 0.5 * ((n - 1) / (n - rank_info.n0)) * math.fsum(contributions)
    return CoefficientResult(
        value=value,
        method="nu",
        n=n,
        n0=rank_info.n0,
        seed=int(seed),
        oracle_checked=True,
    )


# ---------------------------------------------------------------------------
# 1-d estimator and xi
# ---------------------------------------------------------------------------

def x_sort_order(x, seed: int) -> np.ndarray:
    """Indices sorting x ascending, ties broken uniformly at random."""
    x = as_float_vector(x, "x")
    rng = rng_from(seed, STREAM_TIEBREAK)
    shuffled = rng.permutation(len(x))
    return shuffled[np.argsort(x[shuffled], kind="stable")]


def _arranged_ranks(y_arranged: np.ndarray) -> np.ndarray:
    ordered = np.sort(y_arranged)
    if ordered[0] == ordered[-1]:
        raise DegenerateResponseError("all response values are equal")
    return np.searchsorted(ordered, y_arranged, side="right").astype(np.int64)


def _interval_counts(r: np.ndarray) -> np.ndarray:
    """counts[v] = number of consecutive-rank intervals [min,max] containing v."""
    n = len(r)
    lo = np.minimum(r[:-1], r[1:])
    hi = np.maximum(r[:-1], r[1:])
    delta = np.zeros(n + 2, dtype=np.int64)
    np.add.at(delta, lo, 1)
    np.add.at(delta, hi + 1, -1)
    return np.cumsum(delta)


def nu1d_from_arranged(y_arranged) -> float:
    """Value of the 1-d estimator given responses already arranged by x."""
    y_arranged = np.asarray(y_arranged, dtype=float)
    n = len(y_arranged)
    if n < 4:
        raise InsufficientSampleError(f"need n >= 4, got n={n}")
    r = _arranged_ranks(y_arranged)
    counts = _interval_counts(r)
    # intervals i=j and i=j-1 always contain r_j as an endpoint; remove them
    own = counts[r] - 2
    own[0] += 1
    own[-1] += 1
    weights = np.zeros(n + 1)
    interior = np.arange(2, n)
    weights[interior] = 1.0 / ((interior - 1) * (n - interior))
    return 1.0 - 0.5 * math.fsum(weights[r] * own)


def nu_1dim(
    y,
    x,
    seed: int = DEFAULT_SEED,
    *,
    tie_replicates: int = 1,
    check_oracle: bool = False,
) -> CoefficientResult:
    """The 1-d estimator: sort pairs by x, then weigh consecutive-rank spans."""
    if tie_replicates < 1:
        raise InvalidInputError("tie_replicates must be >= 1")
    y = as_float_vector(y, "y")
    x = as_float_vector(x, "x")
    if len(y) != len(x):
        raise InvalidInputError("y and x must have equal length")
    if tie_replicates > 1:
        runs = [
            nu_1dim(y, x, s, check_oracle=check_oracle)
            for s in _replicate_seeds(seed, tie_replicates)
        ]
        return CoefficientResult(
            value=math.fsum(r.value for r in runs) / tie_replicates,
            method="nu1d",
            n=len(y),
            n0=None,
            seed=int(seed),
            oracle_checked=all(r.oracle_checked for r in runs),
        )
    order = x_sort_order(x, seed)
    value = nu1d_from_arranged(y[order])
    checked = False
    if check_oracle:
        ref = nu_1dim_oracle(y, x, seed)
        if ref.value != value:
            raise RuntimeError(
                f"fast path {value!r} disagrees with double-loop value {ref.value!r}"
            )
        checked = True
    return CoefficientResult(
        value=value, method="nu1d", n=len(y), n0=None, seed=int(seed),
        oracle_checked=checked,
    )


def nu_1dim_oracle(y, x, seed: int = DEFAULT_SEED) -> CoefficientResult:
    """Literal double loop over positions j and interval indices i."""
    y = as_float_vector(y, "y")
    x = as_float_vector(x, "x")
    n = len(y)
    if n < 4:
        raise InsufficientSampleError(f"need n >= 4, got n={n}")
    order = x_sort_order(x, seed)
    r = _arranged_ranks(y[order])
    products = []
    for j in range(n):  # position of the probed rank
        rj = int(r[j])
        if rj == 1 or rj == n:
            continue
        hits = 0
        for i in range(n - 1):  # interval index; i == n-1 excluded by range
            if i == j or i == j - 1:
                continue
            lo, hi = sorted((int(r[i]), int(r[i + 1])))
            if lo <= rj <= hi:
                hits += 1
        products.append(rank_weight(rj, n) * hits)
    return CoefficientResult(
        value=1.0 - 0.5 * math.fsum(products),
        method="nu1d",
        n=n,
        n0=None,
        seed=int(seed),
        oracle_checked=True,
    )


def xi_from_arranged(y_arranged) -> float:
    """Interval-form xi given responses already arranged by x."""
    y_arranged = np.asarray(y_arranged, dtype=float)
    n = len(y_arranged)
    if n < 2:
        raise InsufficientSampleError(f"need n >= 2, got n={n}")
    r = _arranged_ranks(y_arranged)
    rank_counts = np.bincount(r, minlength=n + 2)
    prefix = np.cumsum(rank_counts)
    lo = np.minimum(r[:-1], r[1:])
    hi = np.maximum(r[:-1], r[1:])
    inside = prefix[hi] - prefix[lo - 1]  # observations with rank in [lo, hi]
    total = int(inside.sum()) - (n - 1)   # drop the j=i term of each interval
    return 1.0 - 3.0 * total / (n * n - 1.0)


def xi_coefficient(
    y,
    x,
    seed: int = DEFAULT_SEED,
    *,
    tie_replicates: int = 1,
) -> CoefficientResult:
    """Uniform-weight rank correlation (interval form, weight 3/(n^2-1))."""
    if tie_replicates < 1:
        raise InvalidInputError("tie_replicates must be >= 1")
    y = as_float_vector(y, "y")
    x = as_float_vector(x, "x")
    if len(y) != len(x):
        raise InvalidInputError("y and x must have equal length")
    if tie_replicates > 1:
        runs = [xi_coefficient(y, x, s) for s in _replicate_seeds(seed, tie_replicates)]
        return CoefficientResult(
            value=math.fsum(r.value for r in runs) / tie_replicates,
            method="xi",
            n=len(y),
            n0=None,
            seed=int(seed),
        )
    order = x_sort_order(x, seed)
    return CoefficientResult(
        value=xi_from_arranged(y[order]),
        method="xi",
        n=len(y),
        n0=None,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# weight comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightComparison:
    """Per-rank weights of the two 1-d statistics at sample size n."""

    w_nu: float
    w_xi: float
    in_ln: bool  # True where xi penalizes the rank at least as heavily


def weight_comparison(n: int, r: int) -> WeightComparison:
    """Compare the interior-rank weight of nu1d with xi's flat weight."""
    if n < 5:
        raise InvalidInputError(f"need n >= 5, got n={n}")
    if not 1 < r < n:
        raise InvalidInputError(f"rank must satisfy 1 < r < n, got r={r}")
    w_nu = 1.0 / (2.0 * (r - 1) * (n - r))
    w_xi = 3.0 / (n * n - 1.0)
    return WeightComparison(w_nu=w_nu, w_xi=w_xi, in_ln=w_xi >= w_nu)
