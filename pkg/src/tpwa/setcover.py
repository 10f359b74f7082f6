"""Exact minimum set cover and the early-stop test of the top-down search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import IndexSet

INF = math.inf


@dataclass(frozen=True)
class CoverProblem:
    universe_size: int
    sets: tuple[IndexSet, ...]

    def __post_init__(self):
        sets = tuple(IndexSet(s) for s in self.sets)
        for s in sets:
            if s and (s[0] < 1 or s[-1] > self.universe_size):
                raise ValueError(f"{s} is not a subset of 1..{self.universe_size}")
        object.__setattr__(self, "sets", sets)


@dataclass(frozen=True)
class CoverResult:
    status: str  # "feasible" | "infeasible"
    size: float  # cover size, inf when infeasible
    chosen: tuple[IndexSet, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def _popcount(m: int) -> int:
    return m.bit_count()


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _prune(masks: Iterable[int]) -> list[int]:
    """Drop empty, duplicate and dominated masks."""
    uniq = sorted(set(m for m in masks if m), key=_popcount, reverse=True)
    kept: list[int] = []
    for m in uniq:
        if not any(m & ~k == 0 for k in kept):
            kept.append(m)
    return kept


def _greedy(universe: int, masks: Sequence[int]) -> Optional[list[int]]:
    chosen, left = [], universe
    while left:
        best = max(masks, key=lambda m: _popcount(m & left), default=0)
        if not best & left:
            return None
        chosen.append(best)
        left &= ~best
    return chosen


def _smallest_cover(universe: int, masks: Sequence[int], limit: float = INF) -> Optional[list[int]]:
    """Minimum cover of ``universe`` with fewer than ``limit`` masks, else None.

    Depth-first branch and bound: branch on the uncovered element contained in
    the fewest masks, bound with max(ceil(|U| / best gain), size of a greedy
    packing of elements no two of which share a mask).
    """
    masks = _prune(m & universe for m in masks)
    if universe == 0:
        return [] if limit > 0 else None
    union = 0
    for m in masks:
        union |= m
    if universe & ~union:
        return None
    holders: dict[int, list[int]] = {}
    for m in masks:
        for e in _bits(m):
            holders.setdefault(e, []).append(m)

    best: list = [None]
    bound = [limit]
    greedy = _greedy(universe, masks)
    if greedy is not None and len(greedy) < bound[0]:
        best[0], bound[0] = greedy, len(greedy)

    def lower_bound(left: int) -> int:
        gain = max(_popcount(m & left) for m in masks)
        lb = -(-_popcount(left) // gain)
        packed, blocked = 0, 0
        for e in sorted(_bits(left), key=lambda e: len(holders[e])):
            if not (blocked >> e) & 1:
                packed += 1
                for m in holders[e]:
                    blocked |= m
        return max(lb, packed)

    def dfs(left: int, chosen: list[int]):
        if not left:
            if len(chosen) < bound[0]:
                best[0], bound[0] = list(chosen), len(chosen)
            return
        if len(chosen) + lower_bound(left) >= bound[0]:
            return
        pivot = min(_bits(left), key=lambda e: (len(holders[e]), e))
        for m in sorted(holders[pivot], key=lambda m: -_popcount(m & left)):
            chosen.append(m)
            dfs(left & ~m, chosen)
            chosen.pop()

    dfs(universe, [])
    return best[0]


def cover_size(K: int, sets: Iterable[IndexSet], limit: float = INF) -> float:
    """Size of an optimal cover of 1..K, or inf if none uses fewer than ``limit`` sets."""
    universe = (1 << K) - 1
    found = _smallest_cover(universe, [IndexSet(s).mask for s in sets], limit)
    return INF if found is None else len(found)


def _lexicographic_cover(K: int, ordered: Sequence[IndexSet], size: int) -> list[IndexSet]:
    """Lexicographically smallest sequence of ``size`` sets (in the given order) covering 1..K."""
    masks = [s.mask for s in ordered]
    universe = (1 << K) - 1
    chosen: list[IndexSet] = []
    covered, start = 0, 0
    for slot in range(size):
        for i in range(start, len(masks)):
            if not masks[i] & ~covered & universe:
                continue
            left = universe & ~(covered | masks[i])
            rest = size - slot - 1
            if _smallest_cover(left, masks[i + 1 :], rest + 1) is not None:
                chosen.append(ordered[i])
                covered |= masks[i]
                start = i + 1
                break
        else:
            raise AssertionError("no cover of the announced optimal size")
        if not universe & ~covered:
            break
    return chosen


def min_cover(problem: CoverProblem) -> CoverResult:
    """Provably minimum cover; ties go to the lexicographically smallest set sequence."""
    ordered = sorted(set(problem.sets))
    size = cover_size(problem.universe_size, ordered)
    if size == INF:
        return CoverResult("infeasible", INF)
    chosen = _lexicographic_cover(problem.universe_size, ordered, int(size))
    return CoverResult("feasible", len(chosen), tuple(chosen))


@dataclass(frozen=True)
class EarlyStop:
    stop: bool
    alpha: float
    beta: Optional[float]
    cover: tuple[IndexSet, ...] = ()


def early_stop_check(
    S: Iterable[IndexSet],
    frontier: Iterable[IndexSet],
    K: int,
    need_beta: bool = True,
    alpha: Optional[float] = None,
) -> EarlyStop:
    """Compare alpha (best cover from S) with beta (best cover from S plus frontier).

    Stops iff alpha is finite and alpha <= beta. Since S is part of the
    larger collection, beta <= alpha always, so beta is only searched below
    alpha. When alpha is infinite the answer is "continue" whatever beta is;
    beta is then computed only if ``need_beta`` (otherwise reported as None).
    A caller that already knows alpha for this S may pass it in.
    """
    S = [IndexSet(s) for s in S]
    frontier = [IndexSet(s) for s in frontier]
    if alpha is None:
        alpha = cover_size(K, S)
    if alpha == INF:
        beta = cover_size(K, S + frontier) if need_beta else None
        return EarlyStop(False, INF, beta)
    better = cover_size(K, S + frontier, limit=alpha)
    if better < alpha:
        return EarlyStop(False, alpha, better)
    cover = min_cover(CoverProblem(K, tuple(S))).chosen
    return EarlyStop(True, alpha, alpha, cover)
