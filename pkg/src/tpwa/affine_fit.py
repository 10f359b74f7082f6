"""Chebyshev (L-infinity) affine regression over an index set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, DataSet, IndexSet
from .errors import EmptyIndexSet, SolverFailure
from .lp import solve_lp


@dataclass(frozen=True, eq=False)
class FitResult:
    A: np.ndarray
    b: np.ndarray
    t_min: float
    row_t: np.ndarray  # per-output-row optimum; t_min is their max
    # per row: multipliers (lambda_k over I) of the alternation set, or None
    row_duals: tuple = ()


def fit_row(X: np.ndarray, y: np.ndarray):
    """Minimax line for one output row.

    Returns ``(a, b, t, lam)`` where ``lam`` holds the signed LP multipliers
    per point; they satisfy ``sum lam [x; 1] = 0``, ``sum |lam| = 1`` and
    ``sum lam y = t`` at the optimum.
    """
    n, d = X.shape
    if n == 1:
        return np.zeros(d), float(y[0]), 0.0, np.zeros(1)
    # centring keeps the LP well conditioned for inputs far from the origin
    center = X.mean(axis=0)
    Xc = X - center
    ones = np.ones((n, 1))
    # variables: a (d), b, t
    A_ub = np.vstack([np.hstack([-Xc, -ones, -ones]), np.hstack([Xc, ones, -ones])])
    b_ub = np.concatenate([-y, y])
    cost = np.zeros(d + 2)
    cost[-1] = 1.0
    bounds = [(None, None)] * (d + 1) + [(0, None)]
    res = solve_lp(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds)
    if res.status != "optimal":
        raise SolverFailure(f"Chebyshev LP ended {res.status}")
    a = res.x[:d]
    b = float(res.x[d] - a @ center)
    t = float(np.max(np.abs(y - X @ a - b)))
    lam = None
    if res.ineq_duals is not None:
        mu = -res.ineq_duals
        # first block: y_k - f(x_k) <= t, second block: f(x_k) - y_k <= t
        lam = mu[:n] - mu[n:]
    return a, b, t, lam


def chebyshev_fit(data: DataSet, I) -> FitResult:
    I = IndexSet(I)
    if not I:
        raise EmptyIndexSet("cannot fit an empty index set")
    idx = I.zero_based()
    X, Y = data.X[idx], data.Y[idx]
    A = np.zeros((data.e, data.d))
    b = np.zeros(data.e)
    row_t = np.zeros(data.e)
    duals = []
    for j in range(data.e):
        A[j], b[j], row_t[j], lam = fit_row(X, Y[:, j])
        duals.append(lam)
    return FitResult(A, b, float(row_t.max()), row_t, tuple(duals))


def is_compatible(data: DataSet, I, epsilon: float, tol: float = DEFAULT_TOL) -> bool:
    """Whether one affine function fits every point of ``I`` within ``epsilon``."""
    return chebyshev_fit(data, I).t_min <= epsilon + tol
