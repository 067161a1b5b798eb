import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nudep import (
    DegenerateResponseError,
    InvalidInputError,
    Sample,
    build_weight_table,
    compute_ranks,
    ford_select,
    nu_1dim,
    nu_general,
    weighted_rank_mass,
)
from nudep.ranks import rank_weight


def test_distinct_sorted_values():
    info = compute_ranks([10, 20, 30])
    assert list(info.ranks) == [1, 2, 3]
    assert (info.n_max, info.c_min, info.n0) == (1, 1, 2)


def test_tied_maximum():
    info = compute_ranks([5, 5, 1])
    assert list(info.ranks) == [3, 3, 1]
    assert (info.n_max, info.c_min, info.n0) == (2, 1, 3)


def test_all_equal_is_fully_degenerate():
    info = compute_ranks([7, 7, 7])
    assert list(info.ranks) == [3, 3, 3]
    assert (info.n_max, info.c_min, info.n0) == (3, 0, 3)
    assert info.n0 == info.n


def test_rank_definition_matches_counting(rng):
    y = rng.integers(0, 6, size=40).astype(float)
    info = compute_ranks(y)
    for i in range(40):
        assert info.ranks[i] == np.sum(y <= y[i])


def test_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        compute_ranks([1.0, np.nan, 2.0])
    with pytest.raises(InvalidInputError):
        compute_ranks([1.0, np.inf])


def test_distinct_values_give_permutation(rng):
    y = rng.normal(size=25)
    info = compute_ranks(y)
    assert sorted(info.ranks) == list(range(1, 26))
    assert info.n0 == 2


@given(
    st.lists(
        st.floats(-50, 50).map(lambda v: round(v, 3)),  # keep gaps transform-safe
        min_size=1,
        max_size=60,
    )
)
def test_rank_invariance_under_increasing_transforms(values):
    base = compute_ranks(values)
    for transform in (lambda v: 3.0 * v + 7.0, np.arctan, lambda v: v ** 3):
        transformed = compute_ranks(transform(np.asarray(values)))
        assert np.array_equal(base.ranks, transformed.ranks)
        assert base.n0 == transformed.n0


def test_weighted_rank_mass_examples():
    info = compute_ranks([1, 2, 3, 4])
    assert weighted_rank_mass(info, 2, 3) == pytest.approx(1.0, abs=1e-15)
    assert weighted_rank_mass(info, 1, 1) == 0.0
    assert weighted_rank_mass(info, 1, 4) == pytest.approx(1.0, abs=1e-15)


def test_weighted_rank_mass_rejects_bad_interval():
    info = compute_ranks([1, 2, 3, 4])
    with pytest.raises(InvalidInputError):
        weighted_rank_mass(info, 3, 2)
    with pytest.raises(InvalidInputError):
        weighted_rank_mass(info, 0, 2)
    with pytest.raises(InvalidInputError):
        weighted_rank_mass(info, 1, 5)


def test_mass_matches_brute_force_on_random_inputs(rng):
    for trial in range(1000):
        n = int(rng.integers(2, 50))
        y = rng.integers(0, 8, size=n).astype(float) if trial % 2 else rng.normal(size=n)
        info = compute_ranks(y)
        table = build_weight_table(info)
        lo = int(rng.integers(1, n + 1))
        hi = int(rng.integers(lo, n + 1))
        brute = math.fsum(
            rank_weight(int(r), n) for r in info.ranks if lo <= r <= hi
        )
        got = table.mass(lo, hi)
        assert got == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_prefix_table_shape(rng):
    y = rng.integers(0, 5, size=30).astype(float)
    info = compute_ranks(y)
    table = build_weight_table(info)
    assert np.all(np.diff(table.prefix) >= 0)
    total = math.fsum(rank_weight(int(r), 30) for r in info.ranks)
    assert table.prefix[30] == pytest.approx(total, rel=1e-12)
    assert table.weights[1] == 0.0 and table.weights[30] == 0.0
    assert all(table.weights[r] > 0 for r in range(2, 30))


def test_exact_table_agrees_with_float(rng):
    y = rng.integers(0, 5, size=20).astype(float)
    info = compute_ranks(y)
    ft = build_weight_table(info)
    et = build_weight_table(info, exact=True)
    for lo, hi in [(1, 20), (2, 19), (5, 5), (3, 12)]:
        assert float(et.mass(lo, hi)) == pytest.approx(ft.mass(lo, hi), rel=1e-12, abs=1e-15)


def test_degenerate_samples_are_rejected_by_estimators(rng):
    x = rng.normal(size=(6, 2))
    all_equal = np.full(6, 3.0)
    # n0 == n also occurs without all values equal: a unique minimum with
    # every other value at the maximum
    tricky = np.array([1.0, 9.0, 9.0, 9.0, 9.0, 9.0])
    assert compute_ranks(tricky).n0 == 6
    for y in (all_equal, tricky):
        with pytest.raises(DegenerateResponseError):
            nu_general(Sample(y, x), seed=1)
        with pytest.raises(DegenerateResponseError):
            ford_select(Sample(y, x), seed=1)
    with pytest.raises(DegenerateResponseError):
        nu_1dim(all_equal, x[:, 0], seed=1)


def test_rank_info_is_immutable():
    info = compute_ranks([1, 2, 3])
    with pytest.raises(ValueError):
        info.ranks[0] = 5
