"""Independence testing and multiple-testing adjustment.

The workhorse is a right-tailed permutation test: the response is permuted
against the fixed covariates B times and the p-value uses the add-one
convention (1 + #{permuted >= observed}) / (B + 1), which can never be
zero.  Covariate-side structure (neighbor tables, sort orders) is built
once and reused across permutations, so a test costs B + 1 statistic
evaluations.

Under independence the 1-d coefficient has exact mean 2/n and limiting
variance (pi^2/3 - 3)/n; a z-test against a normal with those parameters is
provided for convenience but its limiting normality is conjectured, not
proven, so results carry mode="asymptotic_conjectured" and the permutation
test remains the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .coefficient import (
    _nu_value_fast,
    nu1d_from_arranged,
    x_sort_order,
    xi_from_arranged,
)
from .errors import InsufficientSampleError, InvalidInputError
from .neighbors import build_neighbor_table
from .ranks import compute_ranks
from .sample import Sample
from .util import (
    DEFAULT_SEED,
    STREAM_PERMUTE,
    as_float_matrix,
    as_float_vector,
    rng_from,
)

METHODS = ("nu", "nu1d", "xi")

NULL_VARIANCE_LIMIT = math.pi ** 2 / 3 - 3  # of sqrt(n) * nu1d under the null


@dataclass(frozen=True)
class PermutationTestResult:
    statistic: float
    method: str
    p_value: float
    permutations: int
    seed: int
    null_mean_theoretical: float | None  # 2/n for method="nu1d", else None
    mode: str  # "permutation" or "asymptotic_conjectured"


@dataclass(frozen=True)
class NullParams:
    mean: float
    variance: float


def asymptotic_null_params(n: int) -> NullParams:
    """Exact null mean 2/n and the limiting variance (pi^2/3 - 3)/n."""
    if n < 4:
        raise InvalidInputError(f"need n >= 4, got n={n}")
    return NullParams(mean=2.0 / n, variance=NULL_VARIANCE_LIMIT / n)


def _statistic_factory(y: np.ndarray, x, method: str, seed: int):
    """Observed statistic plus a fast evaluator for permuted responses."""
    if method == "nu":
        xm = as_float_matrix(x, "x")
        table = build_neighbor_table(xm, seed)

        def evaluate(y_perm):
            info = compute_ranks(y_perm)
            if info.n0 >= info.n:
                raise InvalidInputError("degenerate response")
            return _nu_value_fast(info, table, exact=False)

        return evaluate
    xv = as_float_vector(np.asarray(x).ravel(), "x")
    order = x_sort_order(xv, seed)
    if method == "nu1d":
        return lambda y_perm: nu1d_from_arranged(y_perm[order])
    if method == "xi":
        return lambda y_perm: xi_from_arranged(y_perm[order])
    raise InvalidInputError(f"unknown method {method!r}; choose from {METHODS}")


def permutation_test(
    y,
    x,
    method: str = "nu1d",
    B: int = 1000,
    seed: int = DEFAULT_SEED,
) -> PermutationTestResult:
    """Right-tailed permutation test of independence between y and x.

    Permutation b draws from the (seed, b)-derived stream, so replicates
    are reproducible and order-independent; a parallel caller can evaluate
    them in any order and reduce deterministically.
    """
    if B < 1:
        raise InvalidInputError(f"need B >= 1 permutations, got {B}")
    y = as_float_vector(y, "y")
    evaluate = _statistic_factory(y, x, method, seed)
    observed = evaluate(y)
    n = len(y)
    exceed = 0
    for b in range(B):
        perm = rng_from(seed, STREAM_PERMUTE, b).permutation(n)
        if evaluate(y[perm]) >= observed:
            exceed += 1
    return PermutationTestResult(
        statistic=float(observed),
        method=method,
        p_value=(1 + exceed) / (B + 1),
        permutations=B,
        seed=int(seed),
        null_mean_theoretical=2.0 / n if method == "nu1d" else None,
        mode="permutation",
    )


def asymptotic_test(y, x, seed: int = DEFAULT_SEED) -> PermutationTestResult:
    """Upper-tail z-test of the 1-d statistic against its conjectured null law.

    Refuses n < 20, where the normal approximation is unsupported.  The
    permutation test is the default; use this only when its B evaluations
    are too expensive.
    """
    y = as_float_vector(y, "y")
    if len(y) < 20:
        raise InsufficientSampleError(
            f"asymptotic test needs n >= 20, got n={len(y)}"
        )
    xv = as_float_vector(np.asarray(x).ravel(), "x")
    order = x_sort_order(xv, seed)
    statistic = nu1d_from_arranged(y[order])
    params = asymptotic_null_params(len(y))
    z = (statistic - params.mean) / math.sqrt(params.variance)
    return PermutationTestResult(
        statistic=float(statistic),
        method="nu1d",
        p_value=float(norm.sf(z)),
        permutations=0,
        seed=int(seed),
        null_mean_theoretical=params.mean,
        mode="asymptotic_conjectured",
    )


def bh_adjust(p_values) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values (q-values).

    Output order matches input order; values are clipped to <= 1.
    """
    p = np.asarray(p_values, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError("p_values must be a non-empty 1-d sequence")
    if np.any((p < 0) | (p > 1)) or not np.isfinite(p).all():
        raise InvalidInputError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted = np.minimum(adjusted, 1.0)
    out = np.empty(m)
    out[order] = adjusted
    return out
