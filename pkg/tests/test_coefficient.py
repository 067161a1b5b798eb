import itertools
import math

import numpy as np
import pytest

from nudep import (
    DegenerateResponseError,
    InsufficientSampleError,
    InvalidInputError,
    Sample,
    build_neighbor_table,
    nu_1dim,
    nu_1dim_oracle,
    nu_general,
    nu_general_oracle,
    weight_comparison,
    xi_coefficient,
)
from nudep.coefficient import nu1d_from_arranged, xi_from_arranged
from conftest import random_covariates, random_response


# ---------------------------------------------------------------------------
# general estimator
# ---------------------------------------------------------------------------

def test_three_point_hand_value():
    sample = Sample([1.0, 2.0, 3.0], [[0.0], [1.0], [3.0]])
    for fn in (nu_general, nu_general_oracle):
        result = fn(sample, seed=4)
        assert result.value == -1.0  # small-n values may leave [0, 1]
        assert result.n0 == 2
    assert nu_general(sample, seed=4, exact=True).value == -1.0


def test_monotone_on_evenly_spaced_grid_closed_form():
    # interior intervals have rank-adjacent endpoints and contribute
    # nothing, but each boundary point's second neighbor sits two ranks
    # inward, leaving exactly two terms of weight 1/(n-2):
    # value = 1 - (n-1)/(n-2)^2.  Monotone data therefore scores close to,
    # but deliberately not exactly, 1 under the general estimator.
    for n in (10, 25, 64, 100):
        x = np.arange(n, dtype=float)[:, None]
        y = np.arange(n, dtype=float) ** 3 + 1.0
        result = nu_general(Sample(y, x), seed=0, check_oracle=(n <= 32))
        expected = 1.0 - (n - 1) / (n - 2) ** 2
        assert result.value == pytest.approx(expected, abs=1e-14)
        assert result.value < 1.0


def test_noiseless_linear_band_at_n100(rng):
    values = []
    for seed in range(20):
        x = rng.uniform(-1, 1, 100)
        values.append(nu_general(Sample(x.copy(), x[:, None]), seed=seed).value)
    assert all(0.95 <= v <= 1.0 for v in values)


def test_degenerate_and_small_sample_errors(rng):
    x = rng.normal(size=(8, 1))
    with pytest.raises(DegenerateResponseError):
        nu_general(Sample(np.full(8, 2.0), x), seed=0)
    with pytest.raises(InsufficientSampleError):
        nu_general(Sample([1.0, 2.0], [[0.0], [1.0]]), seed=0)


def test_fast_equals_oracle_exact_mode(rng):
    for trial in range(30):
        n = int(rng.integers(5, 40))
        p = int(rng.integers(1, 4))
        x = random_covariates(rng, n, p, tied=bool(trial % 2))
        y = random_response(rng, n, tied=trial % 3 == 0)
        try:
            fast = nu_general(Sample(y, x), seed=trial, exact=True)
        except DegenerateResponseError:
            continue
        oracle = nu_general_oracle(Sample(y, x), seed=trial, exact=True)
        assert fast.value == oracle.value
        # shared neighbor table keeps tie resolution common to both paths
        table = build_neighbor_table(x, seed=trial)
        assert (
            nu_general(Sample(y, x), neighbor_table=table).value
            == pytest.approx(fast.value, rel=1e-12, abs=1e-12)
        )


def test_float_path_tracks_exact_path(rng):
    for trial in range(25):
        n = int(rng.integers(10, 80))
        x = random_covariates(rng, n, 2, tied=False)
        y = random_response(rng, n, tied=False)
        approx = nu_general(Sample(y, x), seed=trial).value
        exact = nu_general(Sample(y, x), seed=trial, exact=True).value
        assert approx == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_functional_relationship_limit(rng):
    x = rng.uniform(-1, 1, 1000)
    for f in (lambda v: v, lambda v: v ** 3):
        value = nu_general(Sample(f(x), x[:, None]), seed=1).value
        assert value >= 0.95


def test_tie_replicates_average_single_runs(rng):
    x = rng.integers(0, 3, size=(30, 2)).astype(float)
    y = rng.normal(size=30)
    sample = Sample(y, x)
    averaged = nu_general(sample, seed=11, tie_replicates=8)
    singles = [nu_general(sample, seed=11 + k).value for k in range(8)]
    assert averaged.value == pytest.approx(math.fsum(singles) / 8, abs=1e-15)
    with pytest.raises(InvalidInputError):
        nu_general(sample, seed=1, tie_replicates=0)


# ---------------------------------------------------------------------------
# 1-d estimator
# ---------------------------------------------------------------------------

def test_nu1d_hand_example():
    y = [1.0, 3.0, 2.0, 4.0]
    x = [1.0, 2.0, 3.0, 4.0]
    assert nu_1dim(y, x, seed=0, check_oracle=True).value == 0.5
    assert nu_1dim_oracle(y, x, seed=0).value == 0.5


def test_nu1d_monotone_exactness_sampled():
    for n in (4, 9, 33, 128):
        x = np.arange(n, dtype=float)
        assert nu_1dim(x, x, seed=0, check_oracle=(n <= 40)).value == 1.0
        assert nu_1dim(-x, x, seed=0, check_oracle=(n <= 40)).value == 1.0


def test_nu1d_matches_double_loop_bitwise(rng):
    for trial in range(40):
        n = int(rng.integers(4, 50))
        x = random_covariates(rng, n, 1, tied=bool(trial % 2))[:, 0]
        y = random_response(rng, n, tied=trial % 3 == 0)
        try:
            fast = nu_1dim(y, x, seed=trial).value
        except DegenerateResponseError:
            continue
        assert fast == nu_1dim_oracle(y, x, seed=trial).value


def test_nu1d_errors():
    with pytest.raises(InsufficientSampleError):
        nu_1dim([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], seed=0)
    with pytest.raises(DegenerateResponseError):
        nu_1dim([5.0] * 6, np.arange(6.0), seed=0)


def test_nu1d_exact_null_mean_small_n():
    for n in (4, 5, 6):
        values = [
            nu1d_from_arranged(np.asarray(perm, dtype=float))
            for perm in itertools.permutations(range(1, n + 1))
        ]
        mean = math.fsum(values) / math.factorial(n)
        assert mean == pytest.approx(2.0 / n, abs=1e-12)


# ---------------------------------------------------------------------------
# xi
# ---------------------------------------------------------------------------

def test_xi_closed_form_on_sorted_data():
    y = np.arange(10, dtype=float)
    assert xi_coefficient(y, y, seed=0).value == pytest.approx(1 - 3 * 9 / 99, abs=1e-15)


def test_xi_interval_form_equals_rank_difference_form(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        y = rng.normal(size=n)
        x = rng.normal(size=n)
        order = np.argsort(x)
        r = np.argsort(np.argsort(y[order])) + 1
        rank_difference_form = 1.0 - 3.0 * np.abs(np.diff(r)).sum() / (n * n - 1.0)
        assert xi_from_arranged(y[order]) == rank_difference_form


def test_xi_centered_under_independence(rng):
    reps = 10000
    values = np.empty(reps)
    for rep in range(reps):
        values[rep] = xi_from_arranged(rng.normal(size=100))
    assert abs(values.mean()) <= 0.01


def test_xi_degenerate_error():
    with pytest.raises(DegenerateResponseError):
        xi_coefficient([2.0, 2.0, 2.0], [1.0, 2.0, 3.0], seed=0)


# ---------------------------------------------------------------------------
# invariance and weight comparison
# ---------------------------------------------------------------------------

def test_monotone_transform_invariance(rng):
    y = rng.normal(size=60)
    x = rng.normal(size=(60, 2))
    base = (
        nu_general(Sample(y, x), seed=3).value,
        nu_1dim(y, x[:, 0], seed=3).value,
        xi_coefficient(y, x[:, 0], seed=3).value,
    )
    for transform in (lambda v: np.exp(v), lambda v: 5 * v - 2, np.arctan):
        got = (
            nu_general(Sample(transform(y), x), seed=3).value,
            nu_1dim(transform(y), x[:, 0], seed=3).value,
            xi_coefficient(transform(y), x[:, 0], seed=3).value,
        )
        assert got == base


def test_weight_comparison_examples():
    for n in (5, 6, 17, 100):
        mid = weight_comparison(n, (n + 1) // 2)
        assert mid.in_ln
    for n in (7, 20, 101):
        low = weight_comparison(n, 2)
        assert not low.in_ln
        assert low.w_nu == pytest.approx(1 / (2 * (n - 2)))
        assert low.w_xi == pytest.approx(3 / (n * n - 1))
    with pytest.raises(InvalidInputError):
        weight_comparison(4, 2)
    with pytest.raises(InvalidInputError):
        weight_comparison(10, 1)
    with pytest.raises(InvalidInputError):
        weight_comparison(10, 10)


def test_result_metadata(rng):
    y = rng.normal(size=12)
    x = rng.normal(size=(12, 1))
    r_nu = nu_general(Sample(y, x), seed=9)
    r_1d = nu_1dim(y, x[:, 0], seed=9)
    r_xi = xi_coefficient(y, x[:, 0], seed=9)
    assert (r_nu.method, r_1d.method, r_xi.method) == ("nu", "nu1d", "xi")
    assert r_nu.n0 == 2 and r_1d.n0 is None and r_xi.n0 is None
    assert r_nu.seed == r_1d.seed == r_xi.seed == 9
    assert all(math.isfinite(r.value) for r in (r_nu, r_1d, r_xi))
