"""Updating credal sets on measurement outcomes."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .. import optim
from ..errors import DimensionMismatch, UndefinedConditioning
from ..linalg import as_hermitian, validate_hermitian
from ..measurement import Projector, ProjectiveMeasurement
from .sets import BeliefModel, CredalSet, dephase, is_diagonal

ZERO_PROBABILITY = 1e-9


class ConditionalCredalSet(BeliefModel):
    """Constraint-described credal set updated on an event, queried lazily.

    Lower previsions solve the fractional program
    ``min Tr(map(G) rho) / Tr(map(I) rho)`` over the base set, with
    ``map(X) = sum_j P_j X P_j``, by :func:`optim.conditional_bisection`.
    """

    def __init__(self, base: CredalSet, projectors: Sequence[np.ndarray], p_lower: float, p_upper: float):
        self.base = base
        self.dim = base.dim
        self.classical = base.classical
        self.projectors = tuple(as_hermitian(P) for P in projectors)
        self.p_lower = float(p_lower)
        self.p_upper = float(p_upper)

    def __repr__(self):
        return f"ConditionalCredalSet(dim={self.dim}, event rank {self.event_rank}, base={self.base!r})"

    @property
    def event_rank(self) -> int:
        return int(round(sum(np.trace(P).real for P in self.projectors)))

    def lower_prevision(self, G) -> float:
        G = self._check_gamble(G)
        if self.classical:
            G = dephase(G)

        def minimize(C):
            sol = optim._minimize_homogeneous(C, list(self.base.constraints))
            if sol.status is not optim.Status.OPTIMAL:
                raise optim.MaxIterations("conditional prevision solve did not converge",
                                          {"gap": sol.gap, **sol.info})
            return sol.value, sol.optimizer

        return optim.conditional_bisection(self.base.constraints, self.projectors, G,
                                           p_lower=self.p_lower, p_upper=self.p_upper,
                                           minimize=minimize)


def _projector_matrices(event, n: int) -> list[np.ndarray]:
    if isinstance(event, Projector):
        mats = [event.matrix]
    elif isinstance(event, ProjectiveMeasurement):
        mats = event.matrices()
    else:
        mats = [as_hermitian(P.matrix if isinstance(P, Projector) else P) for P in event]
    for P in mats:
        if P.shape[0] != n:
            raise DimensionMismatch(f"projector of size {P.shape[0]} for a model on dimension {n}")
    return mats


def _condition(M: BeliefModel, projectors: list[np.ndarray]):
    n = M.dim
    mI = validate_hermitian(optim.apply_map(projectors, np.eye(n)))
    upper = M.upper_prevision(mI)
    diagonal_event = all(is_diagonal(P, 1e-12) for P in projectors)
    if upper <= ZERO_PROBABILITY:
        return CredalSet.vacuous(n, classical=M.classical and diagonal_event)
    lower = M.lower_prevision(mI)
    if lower <= ZERO_PROBABILITY:
        raise UndefinedConditioning(lower, upper)
    if not isinstance(M, CredalSet):
        raise TypeError("conditioning is implemented for credal sets")
    if M.classical and not diagonal_event:
        M = M.as_quantum()
    if M.kind == "H" and M.classical:
        verts = M.vertices()
        if verts is not None:
            M = M.to_vrep()
    if M.kind == "V":
        pts = []
        for rho in M.points:
            r = optim.apply_map(projectors, rho)
            r = r / np.trace(r).real
            pts.append(dephase(r) if M.classical else r)
        return CredalSet(n, points=pts, classical=M.classical)
    return ConditionalCredalSet(M, projectors, lower, upper)


def condition_selective(M: BeliefModel, projector):
    """Update on the outcome ``projector`` (Lüders rule).

    Returns the vacuous set when the event has zero upper probability.

    Raises
    ------
    UndefinedConditioning
        when the event has zero lower but positive upper probability.
    """
    if not isinstance(projector, Projector):
        projector = Projector.from_matrix(projector)
    return _condition(M, _projector_matrices(projector, M.dim))


def condition_nonselective(M: BeliefModel, measurement: ProjectiveMeasurement, indices: Sequence[int]):
    """Update on "one of the outcomes in ``indices`` occurred".

    States map to ``sum_J P_j rho P_j`` renormalized; gambles to
    ``sum_J P_j G P_j``.
    """
    idx = list(indices)
    if not idx:
        raise ValueError("index set must be non-empty")
    if len(set(idx)) != len(idx) or min(idx) < 0 or max(idx) >= len(measurement):
        raise ValueError(f"invalid outcome indices {idx} for a measurement with {len(measurement)} outcomes")
    mats = [measurement[i].matrix for i in idx]
    return _condition(M, _projector_matrices(mats, M.dim))
