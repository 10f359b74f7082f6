"""Top-down lattice search for maximal compatible index sets and optimal fits.

The search starts from the full index set. A compatible set is recorded; an
incompatible one is split around a small infeasibility certificate into
subsets that keep every compatible subset inside at least one child. With
early stopping enabled, the search ends as soon as a minimum cover using the
compatible sets found so far can be proven optimal.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .affine_fit import chebyshev_fit
from .certificate import Certificate, extract_certificate
from .core import DEFAULT_TOL, AffinePiece, DataSet, FitConfig, IndexSet, PwaModel
from .errors import InfeasibleInstance, InvalidCertificate
from .setcover import cover_size, early_stop_check
from .template import TemplateSpec, canonical_offset, induced_index_set

log = logging.getLogger(__name__)


def find_subsets(
    t: TemplateSpec,
    data: DataSet,
    I,
    c,
    C,
    tol: float = DEFAULT_TOL,
) -> list[tuple[IndexSet, np.ndarray]]:
    """Split ``I = I(c)`` around certificate ``C`` by tightening one component at a time.

    For component s the new offset is the largest p^s value in ``I`` strictly
    below the largest p^s value in ``C``; components with no such value are
    skipped. Returns the distinct non-empty children with their canonical
    offsets.
    """
    I, C = IndexSet(I), IndexSet(C)
    if not C or not C.issubset(I):
        raise InvalidCertificate("certificate must be a non-empty subset of I")
    c = np.asarray(c, dtype=float)
    P = t.values(data)
    PI = P[I.zero_based()]
    cert_max = P[C.zero_based()].max(axis=0)
    children: list[tuple[IndexSet, np.ndarray]] = []
    seen: set[IndexSet] = set()
    for s in range(t.h):
        below = PI[:, s][PI[:, s] < cert_max[s] - tol]
        if below.size == 0:
            continue
        tightened = c.copy()
        tightened[s] = min(c[s], below.max())
        child = induced_index_set(t, data, tightened, tol)
        if child and child not in seen:
            seen.add(child)
            children.append((child, canonical_offset(t, data, child)))
    return children


@dataclass
class SplitRecord:
    parent: IndexSet
    offset: np.ndarray
    certificate: Certificate
    children: list[IndexSet]


@dataclass
class SearchState:
    """Mutable state of one search, owned by a single :class:`TopDownSearch`."""

    compatible: list[IndexSet] = field(default_factory=list)  # S, in discovery order
    pending: dict[IndexSet, np.ndarray] = field(default_factory=dict)  # U minus V
    visited: set[IndexSet] = field(default_factory=set)  # V (explicit part)
    iteration: int = 0


class TopDownSearch:
    """One run of the top-down search over a data set and template.

    ``progress`` is called with a dict (iteration, n_compatible, n_frontier,
    alpha, beta) every time the early-stop check runs. Computing beta while
    alpha is still infinite costs an extra cover search that only the hook
    needs, so it is skipped when no hook is installed.
    """

    def __init__(
        self,
        template: TemplateSpec,
        data: DataSet,
        config: FitConfig,
        progress: Optional[Callable[[dict], None]] = None,
        record_splits: bool = False,
    ):
        if template.d != data.d:
            raise ValueError(f"template has d={template.d}, data has d={data.d}")
        self.template = template
        self.data = data
        self.config = config
        self.progress = progress
        self.splits: list[SplitRecord] | None = [] if record_splits else None
        self.state = SearchState()
        self._heap: list = []
        self._masks: dict[IndexSet, int] = {}
        root = IndexSet.full(data.K)
        self._push(root, np.full(template.h, np.inf))
        self.n_fits = 0
        self.n_certificates = 0
        self.alpha = math.inf
        self.beta: Optional[float] = math.inf
        self._alpha_key: Optional[tuple] = None
        self._alpha = math.inf

    def _mask(self, I: IndexSet) -> int:
        m = self._masks.get(I)
        if m is None:
            m = self._masks[I] = I.mask
        return m

    def _dominated(self, I: IndexSet) -> bool:
        m = self._mask(I)
        return any(m & ~self._mask(S) == 0 for S in self.state.compatible)

    def _push(self, I: IndexSet, offset: np.ndarray):
        st = self.state
        if I in st.visited or I in st.pending or self._dominated(I):
            return
        st.pending[I] = offset
        heapq.heappush(self._heap, (-len(I), I))

    def _pick(self) -> Optional[IndexSet]:
        # largest cardinality first, ties to the lexicographically smallest key
        while self._heap:
            _, I = heapq.heappop(self._heap)
            if I in self.state.pending:
                return I
        return None

    @property
    def frontier(self) -> list[IndexSet]:
        return list(self.state.pending)

    @property
    def iterations(self) -> int:
        return self.state.iteration

    def step(self) -> bool:
        """Process one index set. Returns False when nothing is left to explore."""
        st = self.state
        I = self._pick()
        if I is None:
            return False
        offset = st.pending.pop(I)
        st.visited.add(I)
        st.iteration += 1
        eps, tol = self.config.epsilon, self.config.tol
        fit = chebyshev_fit(self.data, I)
        self.n_fits += 1
        if fit.t_min <= eps + tol:
            m = self._mask(I)
            st.compatible = [S for S in st.compatible if self._mask(S) & ~m != 0]
            st.compatible.append(I)
            # subsets of I are implicitly visited
            for J in [J for J in st.pending if self._mask(J) & ~m == 0]:
                del st.pending[J]
                st.visited.add(J)
            log.debug("iter %d: %s compatible (t=%.3g)", st.iteration, list(I), fit.t_min)
            return True
        cert = extract_certificate(self.data, I, eps, tol, fit=fit)
        self.n_certificates += 1
        children = find_subsets(self.template, self.data, I, offset, cert.indices, tol)
        if self.splits is not None:
            self.splits.append(SplitRecord(I, offset, cert, [J for J, _ in children]))
        log.debug(
            "iter %d: %s split by %s into %d",
            st.iteration, list(I), list(cert.indices), len(children),
        )
        for J, cJ in children:
            self._push(J, cJ)
        return True

    def _covered(self) -> IndexSet:
        m = 0
        for S in self.state.compatible:
            m |= self._mask(S)
        return IndexSet.from_mask(m)

    def _raise_if_uncovered(self):
        covered = set(self._covered())
        uncovered = [k for k in range(1, self.data.K + 1) if k not in covered]
        if uncovered:
            raise InfeasibleInstance(uncovered)

    def run_maximal(self) -> list[IndexSet]:
        """Exhaust the search; the result is every maximal compatible set."""
        while self.step():
            pass
        self._raise_if_uncovered()
        return sorted(self.state.compatible)

    def check_early_stop(self):
        st = self.state
        key = tuple(st.compatible)
        if self._alpha_key != key:
            self._alpha_key, self._alpha = key, cover_size(self.data.K, st.compatible)
        res = early_stop_check(
            st.compatible,
            self.frontier,
            self.data.K,
            need_beta=self.progress is not None,
            alpha=self._alpha,
        )
        self.alpha, self.beta = res.alpha, res.beta
        if self.progress is not None:
            self.progress(
                {
                    "iteration": st.iteration,
                    "n_compatible": len(st.compatible),
                    "n_frontier": len(st.pending),
                    "alpha": res.alpha,
                    "beta": res.beta,
                }
            )
        return res

    def run_optimal(self) -> list[IndexSet]:
        """Minimum cover by compatible sets, in discovery order."""
        period = self.config.cover_period
        while True:
            exhausted = not self.state.pending
            if exhausted or self.state.iteration % period == 0:
                res = self.check_early_stop()
                if res.stop:
                    order = {S: i for i, S in enumerate(self.state.compatible)}
                    return sorted(res.cover, key=order.__getitem__)
                if exhausted:
                    self._raise_if_uncovered()
                    raise AssertionError("search exhausted with a cover but no stop")
            self.step()

    def fit_optimal(self) -> PwaModel:
        return build_model(self.template, self.data, self.run_optimal(), self.config)


def build_model(t: TemplateSpec, data: DataSet, sets, config: FitConfig) -> PwaModel:
    """PWA model with one piece per index set: canonical offset plus minimax fit."""
    pieces = []
    for I in sets:
        fit = chebyshev_fit(data, I)
        pieces.append(AffinePiece(fit.A, fit.b, canonical_offset(t, data, I), I))
    return PwaModel(tuple(pieces), t, config.epsilon, config.tol)


def enumerate_maximal_compatible(
    t: TemplateSpec, data: DataSet, epsilon: float, tol: float = DEFAULT_TOL
) -> list[IndexSet]:
    return TopDownSearch(t, data, FitConfig(epsilon, tol)).run_maximal()


def fit_optimal(
    t: TemplateSpec,
    data: DataSet,
    config: FitConfig,
    progress: Optional[Callable[[dict], None]] = None,
) -> PwaModel:
    """PWA model with the minimum number of template-shaped pieces."""
    return TopDownSearch(t, data, config, progress).fit_optimal()
