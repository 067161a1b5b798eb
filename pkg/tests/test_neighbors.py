import numpy as np
import pytest

from nudep import (
    InsufficientSampleError,
    InvalidInputError,
    build_neighbor_table,
    resolve_excluded_neighbor,
)
from conftest import random_covariates


def _scan_sq_dists(x):
    """Independent all-pairs squared distances (dimension-major order)."""
    n, p = x.shape
    d2 = np.zeros((n, n))
    for d in range(p):
        diff = x[:, d][:, None] - x[:, d][None, :]
        d2 += diff * diff
    np.fill_diagonal(d2, np.inf)
    return d2


def test_three_point_line():
    table = build_neighbor_table([[0.0], [1.0], [3.0]], seed=0)
    assert list(table.nn1) == [1, 0, 1]
    assert list(table.nn2) == [2, 2, 0]
    assert table.tie_events == 0


def test_duplicate_rows_pair_up_regardless_of_seed():
    x = [[5.0, 1.0], [5.0, 1.0], [100.0, 4.0]]
    for seed in range(50):
        table = build_neighbor_table(x, seed=seed)
        assert table.nn1[0] == 1 and table.nn1[1] == 0


def test_equidistant_tie_break_is_uniform():
    hits = 0
    trials = 10000
    for seed in range(trials):
        table = build_neighbor_table([[0.0], [1.0], [2.0]], seed=seed)
        assert table.nn1[1] in (0, 2)
        assert table.tie_events >= 1
        hits += table.nn1[1] == 0
    assert abs(hits / trials - 0.5) <= 0.05


def test_errors():
    with pytest.raises(InsufficientSampleError):
        build_neighbor_table([[0.0], [1.0]], seed=0)
    with pytest.raises(InvalidInputError):
        build_neighbor_table([[0.0], [np.nan], [1.0]], seed=0)
    table = build_neighbor_table([[0.0], [1.0], [3.0]], seed=0)
    with pytest.raises(InvalidInputError):
        resolve_excluded_neighbor(table, 1, 1)


def test_resolve_excluded_neighbor_examples():
    table = build_neighbor_table([[0.0], [1.0], [3.0]], seed=0)
    assert resolve_excluded_neighbor(table, 0, 2) == 1  # j is not nn1(i)
    assert resolve_excluded_neighbor(table, 0, 1) == 2  # j is nn1(i)


def test_against_independent_scan_corpus(rng):
    """nn1/nn2 and the excluded-neighbor rule versus raw distance scans."""
    for trial in range(500):
        n = int(rng.integers(3, 201))
        p = int(rng.choice([1, 2, 5]))
        x = random_covariates(rng, n, p, tied=bool(trial % 2))
        table = build_neighbor_table(x, seed=trial)
        d2 = _scan_sq_dists(x)

        best = d2.min(axis=1)
        for i in range(n):
            assert d2[i, table.nn1[i]] == best[i]
            rest = d2[i].copy()
            rest[table.nn1[i]] = np.inf
            assert d2[i, table.nn2[i]] == rest.min()
            assert table.nn1[i] != i
            assert table.nn2[i] not in (i, table.nn1[i])

        if n <= 50:  # exhaustive excluded-neighbor check over all (i, j)
            for j in range(n):
                masked = d2.copy()
                masked[:, j] = np.inf
                row_best = masked.min(axis=1)
                for i in range(n):
                    if i == j:
                        continue
                    pick = resolve_excluded_neighbor(table, i, j)
                    assert masked[i, pick] == row_best[i]


def test_tree_and_scan_paths_agree_exactly(rng):
    for trial in range(120):
        n = int(rng.integers(64, 160))
        p = int(rng.integers(1, 4))
        x = random_covariates(rng, n, p, tied=bool(trial % 2))
        tree = build_neighbor_table(x, seed=trial)
        scan = build_neighbor_table(x, seed=trial, tree_min_n=10 ** 9)
        assert np.array_equal(tree.nn1, scan.nn1)
        assert np.array_equal(tree.nn2, scan.nn2)
        assert tree.tie_events == scan.tie_events


def test_row_permutation_equivariance_without_ties(rng):
    x = rng.normal(size=(80, 2))
    base = build_neighbor_table(x, seed=3)
    perm = rng.permutation(80)
    permuted = build_neighbor_table(x[perm], seed=9)
    # row k of the permuted data is original row perm[k]
    assert np.array_equal(perm[permuted.nn1], base.nn1[perm])
    assert np.array_equal(perm[permuted.nn2], base.nn2[perm])


def test_high_dimensional_scan_path(rng):
    x = rng.normal(size=(70, 12))  # p above the tree cutoff
    table = build_neighbor_table(x, seed=0)
    d2 = _scan_sq_dists(x)
    assert np.array_equal(table.nn1, d2.argmin(axis=1))
