"""Paired response/covariate container used by the estimators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .util import as_float_matrix, as_float_vector


@dataclass(frozen=True)
class Sample:
    """A response vector ``y`` of length n with an (n, p) covariate matrix ``x``.

    Immutable after construction; safe to share across workers.
    """

    y: np.ndarray
    x: np.ndarray
    columns: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        y = as_float_vector(self.y, "y")
        x = as_float_matrix(self.x, "x")
        if len(y) != x.shape[0]:
            raise InvalidInputError(
                f"y has length {len(y)} but x has {x.shape[0]} rows"
            )
        if self.columns is not None and len(self.columns) != x.shape[1]:
            raise InvalidInputError("columns must name every covariate")
        y.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def select(self, indices) -> "Sample":
        """Sample restricted to the covariate columns ``indices`` (in order)."""
        idx = list(indices)
        if not idx:
            raise InvalidInputError("at least one covariate column is required")
        cols = None
        if self.columns is not None:
            cols = tuple(self.columns[i] for i in idx)
        return Sample(self.y, self.x[:, idx], cols)
