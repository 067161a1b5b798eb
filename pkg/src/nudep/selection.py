"""Forward variable ordering by dependence (FORD).

Greedy forward selection: at each step, evaluate the coefficient of the
response on every not-yet-chosen covariate appended to the current subset,
and accept the best candidate.  Selection stops when the first candidate
scores non-positive (empty choice), when the best extension fails to
improve on the current score, or when all covariates are in.  Because each
accepted score must strictly exceed the previous one, an accepted path has
strictly increasing scores and its length is a data-driven model size --
no tuning parameter.

Every candidate evaluation draws its tie-break seed from (seed, step,
candidate), so results do not depend on evaluation order and candidates
may be scored concurrently; ties in the argmax go to the lowest column
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficient import nu_general
from .errors import DegenerateResponseError, InvalidInputError
from .ranks import compute_ranks
from .sample import Sample
from .util import DEFAULT_SEED, STREAM_CANDIDATE, derive_seed, standardize_columns

STOP_REASONS = (
    "nonpositive_first_score",
    "no_improvement",
    "exhausted_all",
    "max_steps_reached",  # budget cap; not part of the stopping rule proper
)


@dataclass(frozen=True)
class SelectionPath:
    """Ordered chosen columns with the score after each accepted step."""

    chosen: tuple[int, ...]
    scores: tuple[float, ...]
    stop_reason: str
    seed: int


def _validate(sample: Sample):
    if sample.p < 1:
        raise InvalidInputError("need at least one candidate covariate")
    info = compute_ranks(sample.y)
    if info.n < 3:
        raise InvalidInputError(f"need n >= 3, got n={info.n}")
    if info.n0 >= info.n:
        raise DegenerateResponseError(
            "response ties are total (n0 == n); selection is undefined"
        )


def _greedy(
    sample: Sample,
    seed: int,
    max_steps: int | None,
    apply_stopping: bool,
    standardize: bool,
) -> SelectionPath:
    _validate(sample)
    if standardize:
        sample = Sample(sample.y, standardize_columns(sample.x), sample.columns)
    p = sample.p
    limit = p if max_steps is None else min(int(max_steps), p)
    if limit < 1:
        raise InvalidInputError("max_steps must be >= 1")

    chosen: list[int] = []
    scores: list[float] = []
    remaining = list(range(p))
    for step in range(p):
        if len(chosen) >= limit:
            return SelectionPath(tuple(chosen), tuple(scores), "max_steps_reached", int(seed))
        candidate_scores = np.empty(len(remaining))
        for k, j in enumerate(remaining):
            candidate_seed = derive_seed(seed, STREAM_CANDIDATE, step, j)
            candidate_scores[k] = nu_general(
                sample.select(chosen + [j]), candidate_seed
            ).value
        best_k = int(np.argmax(candidate_scores))  # first max = lowest index
        best_score = float(candidate_scores[best_k])
        if apply_stopping:
            if step == 0 and best_score <= 0:
                return SelectionPath((), (), "nonpositive_first_score", int(seed))
            if step > 0 and best_score <= scores[-1]:
                return SelectionPath(tuple(chosen), tuple(scores), "no_improvement", int(seed))
        chosen.append(remaining.pop(best_k))
        scores.append(best_score)
    return SelectionPath(tuple(chosen), tuple(scores), "exhausted_all", int(seed))


def ford_select(
    sample: Sample,
    seed: int = DEFAULT_SEED,
    max_steps: int | None = None,
    *,
    standardize: bool = False,
) -> SelectionPath:
    """Forward selection with the stopping rule.

    ``max_steps`` caps the path length for budget control; hitting the cap
    is reported as stop_reason="max_steps_reached" to distinguish it from a
    rule-based stop.
    """
    return _greedy(sample, seed, max_steps, apply_stopping=True, standardize=standardize)


def ford_full_ordering(
    sample: Sample,
    seed: int = DEFAULT_SEED,
    *,
    standardize: bool = False,
) -> SelectionPath:
    """The same greedy sequence, run to exhaustion over all covariates."""
    return _greedy(sample, seed, None, apply_stopping=False, standardize=standardize)
