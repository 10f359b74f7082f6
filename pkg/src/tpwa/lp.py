"""Thin linear-programming interface.

Everything in tpwa that solves an LP goes through :func:`solve_lp`, so the
backend can be swapped with :func:`set_backend`. The default uses HiGHS dual
simplex through scipy, which returns basic (vertex) solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog

from .errors import SolverFailure


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray] = None
    fun: Optional[float] = None
    # duals of the inequality rows, sign convention of scipy (<= 0 at optimum)
    ineq_duals: Optional[np.ndarray] = None


Backend = Callable[..., LPResult]


def highs_backend(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None) -> LPResult:
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs-ds"
    )
    if res.status == 0:
        duals = None
        if A_ub is not None and getattr(res, "ineqlin", None) is not None:
            duals = np.asarray(res.ineqlin.marginals)
        return LPResult("optimal", np.asarray(res.x), float(res.fun), duals)
    if res.status == 2:
        return LPResult("infeasible")
    if res.status == 3:
        return LPResult("unbounded")
    raise SolverFailure(f"LP solver stopped with status {res.status}: {res.message}")


_backend: Backend = highs_backend


def set_backend(backend: Backend) -> Backend:
    """Install ``backend`` and return the previous one."""
    global _backend
    previous, _backend = _backend, backend
    return previous


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None) -> LPResult:
    """minimize c.x s.t. A_ub x <= b_ub, A_eq x == b_eq, bounds."""
    return _backend(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds)
