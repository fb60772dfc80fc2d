"""Probability mass functions as diagonal density matrices."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InvalidDistribution
from .sets import CredalSet


def classical_embed(model, n: int | None = None) -> CredalSet:
    """Embed a classical belief model as a set of diagonal density matrices.

    Parameters
    ----------
    model : array_like or sequence of (f, b) pairs
        Either a probability vector (giving a singleton), a 2-D array whose
        rows are probability vectors (their convex hull), or linear
        inequalities ``f . p >= b`` over the simplex.
    n : int, optional
        Number of outcomes; required for an empty inequality list.
    """
    if isinstance(model, (list, tuple)) and model and isinstance(model[0], tuple):
        cons = []
        for f, b in model:
            f = np.asarray(f, dtype=float)
            cons.append(np.diag(f - float(b)))
        return CredalSet.from_constraints(cons, n=n, classical=True)
    if isinstance(model, (list, tuple)) and not model:
        if n is None:
            raise ValueError("number of outcomes required")
        return CredalSet.vacuous(n, classical=True)
    p = np.asarray(model, dtype=float)
    rows = p.reshape(1, -1) if p.ndim == 1 else p
    for row in rows:
        _check_distribution(row)
    return CredalSet.from_extreme_points([np.diag(r) for r in rows], classical=True)


def _check_distribution(p: np.ndarray) -> None:
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities must be finite")
    if np.any(p < -1e-12):
        raise InvalidDistribution(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {p.sum():.12g}")


def interval_on_outcome(index: int, lower: float, upper: float, n: int) -> CredalSet:
    """All distributions with ``lower <= p[index] <= upper``."""
    e = np.zeros(n)
    e[index] = 1.0
    return classical_embed([(e, lower), (-e, -upper)], n=n)


def classical_project(M: CredalSet) -> np.ndarray:
    """Extreme probability vectors of a diagonal credal set, one per row."""
    if M.kind == "V":
        pts = np.array([np.diagonal(p).real for p in M.points])
    else:
        verts = M.vertices()
        if verts is None:
            raise ValueError("credal set is not a diagonal polytope")
        pts = verts
    return pts
