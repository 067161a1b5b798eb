import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import norm

from nudep import (
    DegenerateResponseError,
    InsufficientSampleError,
    InvalidInputError,
    asymptotic_null_params,
    asymptotic_test,
    bh_adjust,
    generate,
    ModelSpec,
    permutation_test,
)
from nudep.coefficient import nu1d_from_arranged
from nudep.inference import NULL_VARIANCE_LIMIT
from nudep.util import derive_seed, rng_from


def test_perfect_dependence_gives_minimal_p_value():
    y = np.arange(100.0)
    result = permutation_test(y, y, method="nu1d", B=200, seed=1)
    assert result.p_value == 1 / 201
    assert result.statistic == 1.0
    assert result.mode == "permutation"
    assert result.null_mean_theoretical == pytest.approx(0.02)


def test_permutation_count_must_be_positive(rng):
    y = rng.normal(size=20)
    with pytest.raises(InvalidInputError):
        permutation_test(y, y, method="nu1d", B=0, seed=1)


def test_unknown_method_and_degenerate_response(rng):
    y = rng.normal(size=20)
    with pytest.raises(InvalidInputError):
        permutation_test(y, y, method="pearson", B=10, seed=1)
    with pytest.raises(DegenerateResponseError):
        permutation_test(np.full(20, 1.0), y, method="nu1d", B=10, seed=1)


def test_method_nu_reuses_fixed_covariate_structure(rng):
    x = rng.normal(size=(60, 2))
    y = x[:, 0] + 0.1 * rng.normal(size=60)
    result = permutation_test(y, x, method="nu", B=99, seed=5)
    assert result.p_value == 1 / 100  # strong signal beats every permutation
    assert result.null_mean_theoretical is None


def test_calibration_at_paper_protocol():
    # independent uniforms, n=100, B=1000, 500 replications, level 5%
    rejections = 0
    reps = 500
    for rep in range(reps):
        child = derive_seed(42, 3, rep)
        sample = generate(ModelSpec(name="independent_uniform", n=100, seed=child))
        result = permutation_test(sample.y, sample.x[:, 0], "nu1d", B=1000, seed=child)
        rejections += result.p_value <= 0.05
    assert 0.03 <= rejections / reps <= 0.07


def test_permutation_p_values_super_uniform_under_null():
    reps = 2000
    p_values = np.empty(reps)
    for rep in range(reps):
        child = derive_seed(17, 3, rep)
        rng = rng_from(child, 5)
        y = rng.uniform(0, 1, 50)
        x = rng.uniform(0, 1, 50)
        p_values[rep] = permutation_test(y, x, "nu1d", B=199, seed=child).p_value
    for alpha in (0.01, 0.05, 0.1):
        assert (p_values <= alpha).mean() <= alpha + 0.02


def test_asymptotic_null_params_values():
    params = asymptotic_null_params(20)
    assert params.mean == pytest.approx(0.1)
    assert asymptotic_null_params(1000).variance == pytest.approx(2.8987e-4, rel=1e-3)
    big = asymptotic_null_params(10 ** 7)
    assert big.mean < 1e-6 and big.variance < 1e-7
    with pytest.raises(InvalidInputError):
        asymptotic_null_params(3)


def test_exact_enumeration_cross_validates_null_mean():
    for n in (4, 5, 6, 7):
        values = [
            nu1d_from_arranged(np.asarray(perm, dtype=float))
            for perm in itertools.permutations(range(1, n + 1))
        ]
        mean = math.fsum(values) / math.factorial(n)
        assert mean == pytest.approx(asymptotic_null_params(n).mean, abs=1e-12)


def test_null_variance_approaches_limit(rng):
    def n_var(n, reps):
        vals = np.empty(reps)
        for rep in range(reps):
            child = rng_from(23, 3, n, rep)
            vals[rep] = nu1d_from_arranged(child.uniform(0, 1, n)[np.argsort(child.uniform(0, 1, n))])
        return n * vals.var(ddof=1)

    gap_small = abs(n_var(100, 3000) - NULL_VARIANCE_LIMIT)
    gap_large = abs(n_var(1000, 3000) - NULL_VARIANCE_LIMIT)
    assert gap_large < gap_small + 0.02  # monotone-ish approach


def test_asymptotic_test_matches_its_formula(rng):
    y = rng.normal(size=200)
    x = rng.normal(size=200)
    result = asymptotic_test(y, x, seed=3)
    params = asymptotic_null_params(200)
    z = (result.statistic - params.mean) / math.sqrt(params.variance)
    assert result.p_value == pytest.approx(float(norm.sf(z)), abs=1e-15)
    assert result.mode == "asymptotic_conjectured"
    assert result.permutations == 0
    # a statistic at the exact null mean would sit at z = 0, p = 1/2
    assert norm.sf(0.0) == 0.5


def test_asymptotic_test_calibration(rng):
    rejections = 0
    reps = 500
    for rep in range(reps):
        child = rng_from(31, 3, rep)
        y = child.uniform(0, 1, 1000)
        x = child.uniform(0, 1, 1000)
        rejections += asymptotic_test(y, x, seed=rep).p_value <= 0.05
    assert 0.03 <= rejections / reps <= 0.07


def test_asymptotic_test_refuses_small_samples(rng):
    with pytest.raises(InsufficientSampleError):
        asymptotic_test(rng.normal(size=10), rng.normal(size=10), seed=1)


def test_bh_adjust_examples():
    assert list(bh_adjust([0.01, 0.02, 0.03])) == pytest.approx([0.03, 0.03, 0.03])
    assert list(bh_adjust([1.0, 1.0, 1.0])) == [1.0, 1.0, 1.0]
    assert list(bh_adjust([0.2])) == [0.2]
    with pytest.raises(InvalidInputError):
        bh_adjust([0.5, 1.5])
    with pytest.raises(InvalidInputError):
        bh_adjust([-0.1])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=40), st.randoms())
def test_bh_adjust_is_order_equivariant(p_values, pyrandom):
    p = np.asarray(p_values)
    base = bh_adjust(p)
    order = list(range(len(p)))
    pyrandom.shuffle(order)
    shuffled = bh_adjust(p[order])
    assert np.allclose(shuffled, base[order], atol=1e-15)
    assert np.all(base <= 1.0)
