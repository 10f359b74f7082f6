"""Data containers, PWA model evaluation and residual checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, OutOfDomain

if TYPE_CHECKING:
    from .template import TemplateSpec

DEFAULT_TOL = 1e-7

POLICIES = ("error", "nearest")


@dataclass(frozen=True)
class DataPoint:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in np.ravel(self.x)))
        object.__setattr__(self, "y", tuple(float(v) for v in np.ravel(self.y)))
        if not self.x or not self.y:
            raise DimensionMismatch("x and y need at least one component")
        if not all(np.isfinite(self.x)) or not all(np.isfinite(self.y)):
            raise ValueError("data point entries must be finite")


@dataclass(frozen=True, eq=False)
class DataSet:
    """K input/output pairs stored row-wise as ``X`` (K x d) and ``Y`` (K x e).

    Indices into a data set are 1-based everywhere in the public API.
    """

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise DimensionMismatch(f"incompatible shapes X{X.shape} Y{Y.shape}")
        if X.shape[0] < 1 or X.shape[1] < 1 or Y.shape[1] < 1:
            raise DimensionMismatch("need K >= 1, d >= 1, e >= 1")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("data entries must be finite")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @classmethod
    def from_points(cls, points: Iterable[DataPoint | tuple]) -> DataSet:
        pts = [p if isinstance(p, DataPoint) else DataPoint(*p) for p in points]
        if not pts:
            raise DimensionMismatch("a data set needs at least one point")
        d, e = len(pts[0].x), len(pts[0].y)
        if any(len(p.x) != d or len(p.y) != e for p in pts):
            raise DimensionMismatch("all points must share d and e")
        return cls(np.array([p.x for p in pts]), np.array([p.y for p in pts]))

    @property
    def K(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def e(self) -> int:
        return self.Y.shape[1]

    @property
    def points(self) -> list[DataPoint]:
        return [DataPoint(x, y) for x, y in zip(self.X, self.Y)]

    def subset(self, indices: Sequence[int]) -> DataSet:
        """New data set made of the given 1-based indices, in the given order."""
        idx = np.asarray(list(indices), dtype=int) - 1
        return DataSet(self.X[idx], self.Y[idx])

    def __len__(self):
        return self.K


class IndexSet(tuple):
    """Sorted, duplicate-free tuple of 1-based data indices.

    Being a tuple, it hashes and compares element-wise, and the natural
    tuple ordering is the lexicographic canonical-key order used for
    deterministic tie-breaking.
    """

    __slots__ = ()

    def __new__(cls, indices: Iterable[int] = ()):
        items = sorted({int(i) for i in indices})
        if items and items[0] < 1:
            raise ValueError("indices are 1-based")
        return super().__new__(cls, items)

    @classmethod
    def full(cls, K: int) -> IndexSet:
        return cls(range(1, K + 1))

    @classmethod
    def from_mask(cls, mask: int) -> IndexSet:
        out = []
        k = 1
        while mask:
            if mask & 1:
                out.append(k)
            mask >>= 1
            k += 1
        return tuple.__new__(cls, out)

    @property
    def mask(self) -> int:
        m = 0
        for k in self:
            m |= 1 << (k - 1)
        return m

    def issubset(self, other: Iterable[int]) -> bool:
        return set(self).issubset(other)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self, dtype=int) - 1

    def __repr__(self):
        return f"IndexSet({list(self)})"


@dataclass(frozen=True, eq=False)
class AffinePiece:
    """One affine map ``A x + b`` valid on the template region ``p(x) <= c``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    support: IndexSet = field(default_factory=IndexSet)

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = np.atleast_1d(np.array(self.b, dtype=float))
        c = np.atleast_1d(np.array(self.c, dtype=float))
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A is {A.shape}, b has length {b.shape[0]}")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "support", IndexSet(self.support))

    def __call__(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.b


@dataclass(frozen=True, eq=False)
class PwaModel:
    pieces: tuple[AffinePiece, ...]
    template: TemplateSpec
    epsilon: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a PWA model needs at least one piece")
        d, h = self.template.d, self.template.h
        e = pieces[0].A.shape[0]
        for piece in pieces:
            if piece.A.shape != (e, d) or piece.c.shape != (h,):
                raise DimensionMismatch("piece shapes disagree with the template")
        object.__setattr__(self, "pieces", pieces)

    @property
    def q(self) -> int:
        return len(self.pieces)

    @property
    def d(self) -> int:
        return self.template.d

    @property
    def e(self) -> int:
        return self.pieces[0].A.shape[0]

    def containing(self, x) -> list[int]:
        """0-based positions of every piece whose region contains ``x``."""
        p = self.template.weights @ _as_query(x, self.d)
        return [i for i, piece in enumerate(self.pieces) if np.all(p <= piece.c + self.tol)]


@dataclass(frozen=True)
class FitConfig:
    epsilon: float
    tol: float = DEFAULT_TOL
    cover_period: int = 1
    out_of_domain_policy: str = "error"

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if not self.tol > 0:
            raise ValueError("tolerance must be > 0")
        if int(self.cover_period) != self.cover_period or self.cover_period < 1:
            raise ValueError("cover_period must be a positive integer")
        if self.out_of_domain_policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")


def _as_query(x, d: int) -> np.ndarray:
    x = np.ravel(np.asarray(x, dtype=float))
    if x.shape[0] != d:
        raise DimensionMismatch(f"expected a point of dimension {d}, got {x.shape[0]}")
    return x


def select_piece(model: PwaModel, x, policy: str = "error") -> int:
    """0-based index of the piece used to evaluate ``x``.

    The smallest index whose region contains ``x`` wins. Under the
    ``"nearest"`` policy a point outside every region goes to the piece with
    the smallest worst-case template violation (ties to the smallest index).
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    x = _as_query(x, model.d)
    p = model.template.weights @ x
    violations = np.array([np.max(p - piece.c) for piece in model.pieces])
    inside = np.flatnonzero(violations <= model.tol)
    if inside.size:
        return int(inside[0])
    if policy == "error":
        raise OutOfDomain(f"point {x.tolist()} lies outside every piece region")
    return int(np.argmin(violations))


def evaluate_model(model: PwaModel, x, policy: str = "error") -> np.ndarray:
    x = _as_query(x, model.d)
    return model.pieces[select_piece(model, x, policy)](x)


def max_residual(model: PwaModel, data: DataSet, policy: str = "error") -> float:
    """Largest infinity-norm residual of the model over the data set."""
    if data.d != model.d or data.e != model.e:
        raise DimensionMismatch("model and data dimensions differ")
    worst = 0.0
    for x, y in zip(data.X, data.Y):
        worst = max(worst, float(np.max(np.abs(y - evaluate_model(model, x, policy)))))
    return worst


def assign_points(model: PwaModel, data: DataSet, policy: str = "error") -> list[IndexSet]:
    """Partition the data among pieces by the min-index tie-break.

    Entry ``i`` holds the indices evaluated by piece ``i``; overlapping
    supports are thereby de-duplicated into a partition.
    """
    groups: list[list[int]] = [[] for _ in model.pieces]
    for k, x in enumerate(data.X, start=1):
        groups[select_piece(model, x, policy)].append(k)
    return [IndexSet(g) for g in groups]
