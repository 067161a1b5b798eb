"""Discrepancy measures on permutations.

``d_nu`` is the discrepancy induced by the 1-d dependence coefficient: with
rho = sigma^{-1} pi, every interior value strictly between consecutive
entries rho(i), rho(i+1) contributes 1/((l-1)(n-l)), halved.  "Strictly
between" (endpoints excluded) is the reading under which the identity
``nu1d = 1 - d_nu`` holds for distinct data and d_nu(sigma, sigma) = 0:
with endpoints included every adjacent pair would contribute its own
endpoints and the self-discrepancy would be positive.

The discrepancy is left-invariant (it depends only on sigma^{-1} pi) and
generally asymmetric; ``d_nu_symmetric`` averages the two orientations.
Note d_nu also vanishes when sigma^{-1} pi is the reversal, mirroring the
coefficient's value of 1 for both monotone directions, so a zero value
identifies sigma = pi only up to that reversal.

``classical_metric`` provides six standard permutation distances for
comparison: footrule, squared Spearman rho, Kendall (adjacent
transpositions), Cayley (arbitrary transpositions), Hamming, and Ulam.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError

CLASSICAL_METRICS = ("footrule", "spearman_rho_sq", "kendall", "cayley", "hamming", "ulam")


def as_permutation(values, name: str = "permutation") -> np.ndarray:
    """Validate a 1-based permutation of 1..n; returns it 0-based."""
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"{name} must be a non-empty 1-d sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise InvalidInputError(f"{name} must contain integers")
        arr = arr.astype(np.int64)
    n = arr.size
    seen = np.zeros(n, dtype=bool)
    for v in arr:
        if not 1 <= v <= n or seen[v - 1]:
            raise InvalidInputError(f"{name} is not a bijection of 1..{n}")
        seen[v - 1] = True
    return arr.astype(np.int64) - 1


def _pair(sigma, pi):
    s = as_permutation(sigma, "sigma")
    p = as_permutation(pi, "pi")
    if len(s) != len(p):
        raise InvalidInputError("permutations must have equal length")
    return s, p


def _compose_inverse_left(s: np.ndarray, p: np.ndarray) -> np.ndarray:
    """sigma^{-1} pi, everything 0-based."""
    inv = np.empty_like(s)
    inv[s] = np.arange(len(s))
    return inv[p]


def d_nu(sigma, pi, *, exact: bool = False) -> float:
    """Position-weighted oscillation discrepancy between two permutations."""
    s, p = _pair(sigma, pi)
    n = len(s)
    rho = _compose_inverse_left(s, p)  # 0-based values
    # count, for each 0-based value v, how many consecutive pairs strictly
    # straddle it (difference array over [lo+1, hi-1])
    lo = np.minimum(rho[:-1], rho[1:])
    hi = np.maximum(rho[:-1], rho[1:])
    wide = hi - lo >= 2
    delta = np.zeros(n + 1, dtype=np.int64)
    np.add.at(delta, lo[wide] + 1, 1)
    np.add.at(delta, hi[wide], -1)
    counts = np.cumsum(delta)[:n]
    if exact:
        total = Fraction(0)
        for v in range(1, n - 1):
            if counts[v]:
                total += int(counts[v]) * Fraction(1, v * (n - 1 - v))
        return float(total / 2)
    interior = np.arange(1, max(n - 1, 1))
    if len(interior) == 0:
        return 0.0
    weights = 1.0 / (interior * (n - 1.0 - interior))
    return 0.5 * math.fsum(counts[interior] * weights)


def _d_nu_double_loop(sigma, pi) -> float:
    """Literal double-loop evaluation, used as an independent cross-check."""
    s, p = _pair(sigma, pi)
    n = len(s)
    rho = _compose_inverse_left(s, p) + 1  # 1-based values
    terms = []
    for ell in range(2, n):
        w = 1.0 / ((ell - 1) * (n - ell))
        for i in range(n - 1):
            a, b = rho[i], rho[i + 1]
            if min(a, b) < ell < max(a, b):
                terms.append(w)
    return 0.5 * math.fsum(terms)


def d_nu_symmetric(sigma, pi) -> float:
    """Mean of the two orientations; symmetric by construction."""
    return 0.5 * (d_nu(sigma, pi) + d_nu(pi, sigma))


def _count_inversions(seq: np.ndarray) -> int:
    """Merge-count of inversions, O(n log n)."""
    seq = list(seq)
    buffer = seq[:]

    def sort(lo, hi):
        if hi - lo <= 1:
            return 0
        mid = (lo + hi) // 2
        inv = sort(lo, mid) + sort(mid, hi)
        a, b = lo, mid
        out = []
        while a < mid and b < hi:
            if seq[a] <= seq[b]:
                out.append(seq[a])
                a += 1
            else:
                out.append(seq[b])
                inv += mid - a
                b += 1
        out.extend(seq[a:mid])
        out.extend(seq[b:hi])
        seq[lo:hi] = out
        return inv

    result = sort(0, len(buffer))
    return result


def _lis_length(seq: np.ndarray) -> int:
    """Longest strictly increasing subsequence length (patience piles)."""
    tails: list[int] = []
    for v in seq:
        pos = bisect_left(tails, v)
        if pos == len(tails):
            tails.append(v)
        else:
            tails[pos] = v
    return len(tails)


def _cycle_count(rho: np.ndarray) -> int:
    seen = np.zeros(len(rho), dtype=bool)
    cycles = 0
    for start in range(len(rho)):
        if seen[start]:
            continue
        cycles += 1
        k = start
        while not seen[k]:
            seen[k] = True
            k = rho[k]
    return cycles


def classical_metric(name: str, sigma, pi) -> float:
    """One of the six classical permutation distances, by name."""
    if name not in CLASSICAL_METRICS:
        raise InvalidInputError(
            f"unknown metric {name!r}; choose from {CLASSICAL_METRICS}"
        )
    s, p = _pair(sigma, pi)
    if name == "footrule":
        return float(np.abs(s - p).sum())
    if name == "spearman_rho_sq":
        return float(((s - p) ** 2).sum())
    inv_p = np.empty_like(p)
    inv_p[p] = np.arange(len(p))
    rho = s[inv_p]  # sigma pi^{-1}
    if name == "kendall":
        return float(_count_inversions(rho))
    if name == "cayley":
        return float(len(rho) - _cycle_count(rho))
    if name == "hamming":
        return float(np.count_nonzero(s != p))
    return float(len(rho) - _lis_length(rho))  # ulam
