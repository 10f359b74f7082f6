"""Brute-force baselines for cross-checking the top-down search.

These enumerate explicitly and are meant for small instances only. Budgets
are hard caps: exceeding one raises BudgetExceeded instead of truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Optional

import numpy as np

from .affine_fit import is_compatible
from .core import DEFAULT_TOL, DataSet, FitConfig, IndexSet, PwaModel
from .errors import BudgetExceeded, InfeasibleInstance
from .template import TemplateSpec
from .topdown import build_model

DEFAULT_BUDGET = 10**6


def enumerate_index_sets(
    t: TemplateSpec, data: DataSet, budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL
) -> list[IndexSet]:
    """Every distinct non-empty index set induced by some offset.

    Each offset component only needs to range over the distinct values of
    that component on the data; anything in between induces the same set.
    """
    P = t.values(data)
    levels = []
    for s in range(t.h):
        vals = np.unique(P[:, s])
        masks = []
        for v in vals:
            m = 0
            for k in np.flatnonzero(P[:, s] <= v + tol):
                m |= 1 << int(k)
            masks.append(m)
        levels.append(sorted(set(masks)))
    n_offsets = int(np.prod([len(ms) for ms in levels], dtype=object))
    if n_offsets > budget:
        raise BudgetExceeded(f"{n_offsets} candidate offsets exceed the budget of {budget}")
    found = set()
    full = (1 << data.K) - 1
    for combo in product(*levels):
        m = full
        for part in combo:
            m &= part
            if not m:
                break
        if m:
            found.add(m)
    return sorted(IndexSet.from_mask(m) for m in found)


def compatible_index_sets(
    t: TemplateSpec, data: DataSet, epsilon: float, budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL
) -> list[IndexSet]:
    return [I for I in enumerate_index_sets(t, data, budget, tol) if is_compatible(data, I, epsilon, tol)]


def _maximal(sets: list[IndexSet]) -> list[IndexSet]:
    as_sets = [set(I) for I in sets]
    return sorted(
        I for I, a in zip(sets, as_sets) if not any(a < b for b in as_sets)
    )


def maximal_compatible_sets(
    t: TemplateSpec, data: DataSet, epsilon: float, budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL
) -> list[IndexSet]:
    """Inclusion-maximal compatible index sets by exhaustive filtering."""
    return _maximal(compatible_index_sets(t, data, epsilon, budget, tol))


def optimal_covers(
    t: TemplateSpec,
    data: DataSet,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
) -> list[tuple[IndexSet, ...]]:
    """All minimum-size covers of 1..K drawn from the maximal compatible sets.

    Covers are found by trying every q-combination for q = 1, 2, ... ;
    restricting to maximal sets loses no optimum because any compatible set
    in a cover can be enlarged to a maximal one.
    """
    candidates = maximal_compatible_sets(t, data, epsilon, budget, tol)
    full = (1 << data.K) - 1
    union = 0
    masks = [I.mask for I in candidates]
    for m in masks:
        union |= m
    if union != full:
        uncovered = IndexSet.from_mask(full & ~union)
        raise InfeasibleInstance(uncovered)
    spent = 0
    for q in range(1, len(candidates) + 1):
        covers = []
        for combo in combinations(range(len(candidates)), q):
            spent += 1
            if spent > budget:
                raise BudgetExceeded(f"more than {budget} cover combinations tried")
            m = 0
            for i in combo:
                m |= masks[i]
            if m == full:
                covers.append(tuple(candidates[i] for i in combo))
        if covers:
            return covers
    raise AssertionError("unreachable: the union of candidates covers everything")


def naive_optimal(
    t: TemplateSpec,
    data: DataSet,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
) -> PwaModel:
    """Minimum-piece model by exhaustive enumeration (first optimal cover found)."""
    cover = optimal_covers(t, data, epsilon, budget, tol)[0]
    return build_model(t, data, cover, FitConfig(epsilon, tol))


@dataclass(frozen=True)
class SAResult:
    feasible: bool
    assignment: Optional[tuple[int, ...]] = None  # 1-based group label per point


def sa_bruteforce(
    data: DataSet, epsilon: float, q: int, max_points: int = 12, tol: float = DEFAULT_TOL
) -> SAResult:
    """Switched affine regression by enumerating point-to-group assignments.

    No region structure is imposed: any grouping whose groups each admit an
    epsilon-fit is accepted. Groups are opened in order, which removes label
    permutations, and a partial group that is already incompatible prunes the
    branch.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if data.K > max_points:
        raise BudgetExceeded(f"K={data.K} exceeds the switched-affine budget of {max_points} points")
    memo: dict[tuple[int, ...], bool] = {}

    def ok(group: list[int]) -> bool:
        key = tuple(group)
        if key not in memo:
            memo[key] = is_compatible(data, [k + 1 for k in group], epsilon, tol)
        return memo[key]

    groups: list[list[int]] = []
    labels = [0] * data.K

    def place(k: int) -> bool:
        if k == data.K:
            return True
        for g, members in enumerate(groups):
            members.append(k)
            if ok(members):
                labels[k] = g + 1
                if place(k + 1):
                    return True
            members.pop()
        if len(groups) < q:
            groups.append([k])
            labels[k] = len(groups)
            if place(k + 1):
                return True
            groups.pop()
        return False

    if place(0):
        return SAResult(True, tuple(labels))
    return SAResult(False)


def check_consistency(
    t: TemplateSpec,
    data: DataSet,
    I,
    subsets,
    epsilon: float,
    budget: int = DEFAULT_BUDGET,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Whether ``subsets`` is a consistent split of ``I``.

    Every subset must be a strict subset of ``I``, and every compatible
    inducible ``J`` contained in ``I`` must lie inside some subset.
    """
    I = set(IndexSet(I))
    subs = [set(IndexSet(s)) for s in subsets]
    if any(not s < I for s in subs):
        return False
    inside = [J for J in enumerate_index_sets(t, data, budget, tol) if set(J) <= I]
    for J in inside:
        Js = set(J)
        if any(Js <= s for s in subs):
            continue
        if is_compatible(data, J, epsilon, tol):
            return False
    return True


def residual_ok(model: PwaModel, data: DataSet) -> bool:
    """Every piece fits its own support within epsilon + tol."""
    for piece in model.pieces:
        idx = piece.support.zero_based()
        pred = data.X[idx] @ piece.A.T + piece.b
        if np.max(np.abs(data.Y[idx] - pred)) > model.epsilon + model.tol:
            return False
    return True
