"""Small, spatially concentrated infeasibility certificates.

An index set C is a certificate when no affine function fits its points
within epsilon. By Farkas' lemma this is witnessed by multipliers lambda_k
with ``sum lambda_k [x_k; 1] = 0`` and ``sum lambda_k y_k^j > eps sum |lambda_k|``
for some output row j. Among such multipliers, scaled to unit L1 mass, we
minimise the mean squared distance to the centre of the index set, which
favours sparse supports made of points near the centre.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .affine_fit import FitResult, chebyshev_fit, fit_row
from .core import DEFAULT_TOL, DataSet, IndexSet
from .errors import NotIncompatible, SolverFailure
from .lp import solve_lp

DISTANCES = ("sqeuclidean", "chebyshev")
NORMALIZATIONS = ("unit-mass", "violation")
# share of the best achievable violation demanded under "unit-mass"
MARGIN_FRACTION = 0.1


@dataclass(frozen=True, eq=False)
class Certificate:
    indices: IndexSet
    row: int  # 1-based output row whose scalar system is infeasible
    weights: dict[int, float]
    center: np.ndarray
    method: str = field(default="weighted-l1", compare=False)

    def __len__(self):
        return len(self.indices)


def _distance_weights(X: np.ndarray, center: np.ndarray, distance: str) -> np.ndarray:
    diff = X - center
    if distance == "sqeuclidean":
        return np.einsum("ij,ij->i", diff, diff)
    if distance == "chebyshev":
        return np.abs(diff).max(axis=1)
    raise ValueError(f"distance must be one of {DISTANCES}")


def _farkas_lp(Xc: np.ndarray, y: np.ndarray, weights: np.ndarray, eps: float, margin: float | None):
    """Solve the weighted-L1 Farkas LP; return signed multipliers or None if infeasible.

    With a ``margin`` the multipliers are normalised to ``sum |lam| = 1`` and
    must beat epsilon by that margin; the objective is then a weighted mean
    distance, so central points win whenever they can carry the violation.
    Without one the violation itself is normalised to 1, which minimises
    weighted distance per unit of violation and tends to pick wide supports.
    """
    n, d = Xc.shape
    M = np.vstack([Xc.T, np.ones((1, n))])
    A_eq = np.hstack([M, -M])
    b_eq = np.zeros(d + 1)
    if margin is not None:
        A_eq = np.vstack([A_eq, np.ones((1, 2 * n))])
        b_eq = np.append(b_eq, 1.0)
    # sum lam+ (y - eps) + lam- (-y - eps) >= margin (or 1)
    A_ub = -np.concatenate([y - eps, -y - eps])[None, :]
    b_ub = np.array([-(1.0 if margin is None else margin)])
    cost = np.concatenate([weights, weights])
    res = solve_lp(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None))
    if res.status == "infeasible":
        return None
    if res.status != "optimal":
        raise SolverFailure(f"certificate LP ended {res.status}")
    return res.x[:n] - res.x[n:]


def _support(lam: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    if scale == 0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(np.abs(lam) > 1e-9 * scale)


def _polish(X: np.ndarray, y: np.ndarray, lam: np.ndarray, eps: float) -> np.ndarray | None:
    """Project multipliers onto the null space of [x; 1] and renormalise the violation to 1."""
    M = np.vstack([X.T, np.ones((1, X.shape[0]))])
    lam = lam - M.T @ np.linalg.lstsq(M @ M.T, M @ lam, rcond=None)[0]
    viol = lam @ y - eps * np.abs(lam).sum()
    if not viol > 0:
        return None
    return lam / viol


def extract_certificate(
    data: DataSet,
    I,
    epsilon: float,
    tol: float = DEFAULT_TOL,
    distance: str = "sqeuclidean",
    fit: FitResult | None = None,
    normalization: str = "unit-mass",
) -> Certificate:
    """Certificate C contained in ``I`` with at most d + 2 points.

    ``fit`` may pass in an already computed minimax fit of ``I``.
    ``normalization`` picks how the homogeneous Farkas system is scaled:
    ``"unit-mass"`` (sum |lam| = 1, violation at least a fixed share of the
    best one) or ``"violation"`` (violation >= 1). Raises NotIncompatible
    when ``I`` can be fitted within ``epsilon + tol``.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    I = IndexSet(I)
    if fit is None:
        fit = chebyshev_fit(data, I)
    if fit.t_min <= epsilon + tol:
        raise NotIncompatible(f"t_min = {fit.t_min:.3g} <= epsilon; nothing to certify")
    j = int(np.argmax(fit.row_t))
    idx = I.zero_based()
    X, y = data.X[idx], data.Y[idx, j]
    center = X.mean(axis=0)
    w = _distance_weights(X, center, distance)
    # certify infeasibility at epsilon + tol so that C is incompatible in the
    # same sense used by is_compatible
    eps = epsilon + tol
    Xc = X - center
    d = data.d

    # the minimax fit attains violation t_min - eps per unit of |lam|; asking
    # for a fraction of it leaves room for subsets of central points
    margin = MARGIN_FRACTION * (fit.row_t[j] - eps) if normalization == "unit-mass" else None
    lam = _farkas_lp(Xc, y, w, eps, margin)
    if lam is not None:
        supp = _support(lam)
        if supp.size > d + 2:
            # the support is itself infeasible; the alternation set of its
            # own minimax fit is a basic certificate with <= d + 2 points
            _, _, t_sub, sub = fit_row(X[supp], y[supp])
            if t_sub > eps and sub is not None:
                lam = np.zeros_like(lam)
                lam[supp] = sub
                supp = _support(lam)
        cert = _finish(data, I, supp, lam[supp], X, y, eps, epsilon, tol, j, center, "weighted-l1")
        if cert is not None:
            return cert

    # Numerically marginal instance: fall back on the alternation set of the
    # minimax fit, which is a basic dual solution and so has <= d + 2 points.
    lam = fit.row_duals[j]
    if lam is None:
        raise SolverFailure("LP backend returned no dual values for the minimax fit")
    supp = _support(lam)
    cert = _finish(data, I, supp, lam[supp], X, y, eps, epsilon, tol, j, center, "alternation")
    if cert is None:
        raise SolverFailure("could not extract a valid infeasibility certificate")
    return cert


def _finish(data, I, supp, lam_s, X, y, eps, epsilon, tol, j, center, method):
    if supp.size == 0 or supp.size > data.d + 2:
        return None
    lam_s = _polish(X[supp], y[supp], lam_s, eps)
    if lam_s is None:
        return None
    members = [I[i] for i in supp]
    cert = Certificate(
        IndexSet(members),
        j + 1,
        {k: float(v) for k, v in zip(members, lam_s) if v != 0},
        center,
        method,
    )
    # valid multipliers at epsilon + tol already imply t_min(C) > epsilon + tol
    if not _multipliers_ok(data, cert, epsilon, tol):
        return None
    return cert


def farkas_residuals(data: DataSet, cert: Certificate, epsilon: float) -> tuple[np.ndarray, float]:
    """``(sum lam [x; 1], sum lam y_j - eps sum |lam|)`` for the stored weights."""
    keys = sorted(cert.weights)
    lam = np.array([cert.weights[k] for k in keys])
    idx = np.asarray(keys, dtype=int) - 1
    X = data.X[idx]
    M = np.vstack([X.T, np.ones((1, len(keys)))])
    y = data.Y[idx, cert.row - 1]
    return M @ lam, float(lam @ y - epsilon * np.abs(lam).sum())


def verify_certificate(data: DataSet, cert: Certificate, epsilon: float, tol: float = DEFAULT_TOL) -> bool:
    """Check both that C has no epsilon-fit and that the stored multipliers prove it."""
    try:
        C = IndexSet(cert.indices)
        if not C or C[-1] > data.K or not 1 <= cert.row <= data.e:
            return False
        if not cert.weights or not set(cert.weights).issubset(C):
            return False
        if chebyshev_fit(data, C).t_min <= epsilon + tol:
            return False
        return _multipliers_ok(data, cert, epsilon, tol)
    except Exception:
        return False


def _multipliers_ok(data: DataSet, cert: Certificate, epsilon: float, tol: float) -> bool:
    eq_res, viol = farkas_residuals(data, cert, epsilon)
    C = IndexSet(cert.indices)
    lam_norm = sum(abs(v) for v in cert.weights.values())
    x_scale = 1.0 + float(np.max(np.abs(data.X[C.zero_based()])))
    # identities are checked relative to the size of the multipliers
    if np.max(np.abs(eq_res)) > tol * max(1.0, lam_norm * x_scale):
        return False
    return viol > tol * max(1.0, lam_norm)
