"""Linear templates p(x) = W x, their regions p(x) <= c and induced index sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import DEFAULT_TOL, DataSet, IndexSet
from .errors import DimensionMismatch, EmptyIndexSet

KINDS = ("rectangular", "octagon", "custom")


@dataclass(frozen=True, eq=False)
class TemplateSpec:
    """A template given by an ``h x d`` matrix of linear functionals.

    Row ``s`` of ``weights`` is the functional ``p^s(x) = w_s . x``.
    """

    kind: str
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"template kind must be one of {KINDS}")
        W = np.atleast_2d(np.array(self.weights, dtype=float))
        if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
            raise ValueError("template weights must be a non-empty h x d matrix")
        if not np.all(np.isfinite(W)):
            raise ValueError("template weights must be finite")
        W.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @classmethod
    def rectangular(cls, d: int) -> TemplateSpec:
        eye = np.eye(d)
        return cls("rectangular", np.vstack([eye, -eye]))

    @classmethod
    def octagon(cls, d: int) -> TemplateSpec:
        """Box components followed by +-x_i +-x_j for every pair i < j."""
        eye = np.eye(d)
        rows = [eye, -eye]
        for i, j in combinations(range(d), 2):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                row = np.zeros(d)
                row[i], row[j] = si, sj
                rows.append(row[None, :])
        return cls("octagon", np.vstack(rows))

    @classmethod
    def custom(cls, weights) -> TemplateSpec:
        return cls("custom", weights)

    @property
    def h(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    def values(self, data: DataSet) -> np.ndarray:
        """``K x h`` matrix of template values at every data input."""
        if data.d != self.d:
            raise DimensionMismatch(f"template has d={self.d}, data has d={data.d}")
        return data.X @ self.weights.T

    def __eq__(self, other):
        return (
            isinstance(other, TemplateSpec)
            and self.kind == other.kind
            and self.weights.shape == other.weights.shape
            and bool(np.all(self.weights == other.weights))
        )

    __hash__ = None


def eval_template(t: TemplateSpec, x) -> np.ndarray:
    x = np.ravel(np.asarray(x, dtype=float))
    if x.shape[0] != t.d:
        raise DimensionMismatch(f"template has d={t.d}, point has length {x.shape[0]}")
    return t.weights @ x


def _check_offset(t: TemplateSpec, c) -> np.ndarray:
    c = np.ravel(np.asarray(c, dtype=float))
    if c.shape[0] != t.h:
        raise DimensionMismatch(f"offset has length {c.shape[0]}, template has h={t.h}")
    return c


def induced_index_set(t: TemplateSpec, data: DataSet, c, tol: float = DEFAULT_TOL) -> IndexSet:
    """All k with p(x_k) <= c + tol component-wise. ``inf`` entries never bind."""
    c = _check_offset(t, c)
    inside = np.all(t.values(data) <= c + tol, axis=1)
    return IndexSet(np.flatnonzero(inside) + 1)


def canonical_offset(t: TemplateSpec, data: DataSet, I) -> np.ndarray:
    """Tightest offset containing every point of ``I``: the component-wise max of p."""
    I = IndexSet(I)
    if not I:
        raise EmptyIndexSet("canonical offset of an empty index set")
    if I[-1] > data.K:
        raise IndexError(f"index {I[-1]} out of range for K={data.K}")
    return t.values(data)[I.zero_based()].max(axis=0)


def is_inducible(t: TemplateSpec, data: DataSet, I, tol: float = DEFAULT_TOL) -> bool:
    I = IndexSet(I)
    return induced_index_set(t, data, canonical_offset(t, data, I), tol) == I
