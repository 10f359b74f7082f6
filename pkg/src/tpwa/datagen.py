"""Synthetic data sets: the 1-D arctan curve, the U_id surface and gridded PWA functions."""

from __future__ import annotations

from itertools import product

import numpy as np

from .core import AffinePiece, DataSet, IndexSet, PwaModel, evaluate_model, select_piece
from .errors import SingularDenominator
from .template import TemplateSpec

UID_POLE = -253.52


def arctan_curve(x):
    return np.arctan(10.0 * np.asarray(x, dtype=float)) * np.exp(-np.abs(x))


def gen_arctan_1d(K: int = 11) -> DataSet:
    """K samples of arctan(10 x) exp(-|x|) on a uniform grid over [-1, 1]."""
    if K < 2:
        raise ValueError("K must be >= 2")
    x = np.linspace(-1.0, 1.0, K)
    return DataSet(x[:, None], arctan_curve(x)[:, None])


def uid(x1, x2):
    """Insulin-dependent glucose utilisation (3.2667 + 0.0313 x1) x2 / (253.52 + x2)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    return (3.2667 + 0.0313 * x1) * x2 / (253.52 + x2)


def gen_uid_grid(
    n_per_axis: int = 10,
    x1_range: tuple[float, float] = (0.0, 200.0),
    x2_range: tuple[float, float] = (0.0, 400.0),
    scale: float = 1.0,
) -> DataSet:
    """U_id sampled on an ``n x n`` grid (x1 varies slowest), outputs times ``scale``."""
    if n_per_axis < 2:
        raise ValueError("n_per_axis must be >= 2")
    lo, hi = sorted(x2_range)
    if lo <= UID_POLE:
        raise SingularDenominator(f"x2 range {x2_range} reaches the pole at x2 = {UID_POLE}")
    g1 = np.linspace(*x1_range, n_per_axis)
    g2 = np.linspace(*x2_range, n_per_axis)
    X = np.array(list(product(g1, g2)))
    return DataSet(X, scale * uid(X[:, 0], X[:, 1])[:, None])


def gen_grid_pwa(
    d: int,
    cells_per_axis: int,
    noise: float = 0.0,
    seed: int = 0,
    n_per_axis: int = 7,
    e: int = 1,
) -> tuple[DataSet, PwaModel]:
    """Random PWA function on a regular grid of boxes over [0, 1]^d, sampled on a grid.

    Returns the noisy samples and the ground-truth model. Boundary samples
    belong to the lowest-numbered cell, and each piece's support is the set
    of samples it evaluates.
    """
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    if cells_per_axis < 1 or n_per_axis < 2:
        raise ValueError("need cells_per_axis >= 1 and n_per_axis >= 2")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    template = TemplateSpec.rectangular(d)
    edges = np.linspace(0.0, 1.0, cells_per_axis + 1)
    cells = []
    for cell in product(range(cells_per_axis), repeat=d):
        lo = edges[list(cell)]
        hi = edges[[i + 1 for i in cell]]
        A = rng.uniform(-1.0, 1.0, size=(e, d))
        b = rng.uniform(-1.0, 1.0, size=e)
        cells.append((A, b, np.concatenate([hi, -lo])))
    grid = np.linspace(0.0, 1.0, n_per_axis)
    X = np.array(list(product(grid, repeat=d)))

    shell = PwaModel(tuple(AffinePiece(A, b, c) for A, b, c in cells), template, float(noise))
    owner = [select_piece(shell, x) for x in X]
    Y = np.array([evaluate_model(shell, x) for x in X])
    if noise > 0:
        Y = Y + rng.uniform(-noise, noise, size=Y.shape)
    pieces = tuple(
        AffinePiece(A, b, c, IndexSet(k + 1 for k, o in enumerate(owner) if o == i))
        for i, (A, b, c) in enumerate(cells)
    )
    return DataSet(X, Y), PwaModel(pieces, template, float(noise))
