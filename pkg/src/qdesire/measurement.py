"""Projective measurements, payoffs of gambles and Born probabilities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (DimensionMismatch, NotComplete, NotDensityMatrix, NotOrthogonal,
                     NotProjector, RankNotOne)
from .linalg import Definiteness, as_hermitian, classify, eig, max_abs, validate_hermitian

TOL_PROJ = 1e-10
TOL_TRACE = 1e-9
TOL_BORN_CLAMP = 1e-12


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, m, index=None) -> "Projector":
        where = "" if index is None else f" at index {index}"
        p = as_hermitian(m)
        dev = max_abs(p @ p - p)
        if dev > TOL_PROJ:
            raise NotProjector(f"matrix{where} is not idempotent (deviation {dev:.3g})")
        if classify(p) not in (Definiteness.PD, Definiteness.PSDNZ):
            raise NotProjector(f"matrix{where} is not a non-zero positive semidefinite projector")
        tr = float(np.trace(p).real)
        rank = int(round(tr))
        if abs(tr - rank) > TOL_TRACE:
            raise NotProjector(f"trace {tr:.12g} of projector{where} is not an integer")
        return cls(p, rank)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ProjectiveMeasurement:
    projectors: tuple

    def __len__(self) -> int:
        return len(self.projectors)

    def __iter__(self):
        return iter(self.projectors)

    def __getitem__(self, i) -> Projector:
        return self.projectors[i]

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    def matrices(self) -> list[np.ndarray]:
        return [p.matrix for p in self.projectors]


def make_measurement(projectors: Sequence) -> ProjectiveMeasurement:
    """Validate a complete family of mutually orthogonal projectors.

    Raises
    ------
    NotProjector, NotOrthogonal, NotComplete, DimensionMismatch
    """
    if len(projectors) == 0:
        raise NotComplete("a measurement needs at least one projector")
    ps = [p if isinstance(p, Projector) else Projector.from_matrix(p, i) for i, p in enumerate(projectors)]
    n = ps[0].dim
    for i, p in enumerate(ps):
        if p.dim != n:
            raise DimensionMismatch(f"projector {i} has size {p.dim}, expected {n}")
    for i in range(len(ps)):
        for k in range(i + 1, len(ps)):
            dev = max_abs(ps[i].matrix @ ps[k].matrix)
            if dev > TOL_PROJ:
                raise NotOrthogonal(f"projectors ({i}, {k}) are not orthogonal (deviation {dev:.3g})")
    total = sum(p.matrix for p in ps)
    dev = max_abs(total - np.eye(n))
    if dev > TOL_PROJ:
        raise NotComplete(f"projectors do not sum to the identity (deviation {dev:.3g})")
    return ProjectiveMeasurement(tuple(ps))


def canonical_measurement(n: int) -> ProjectiveMeasurement:
    """Projectors onto the standard basis vectors."""
    eye = np.eye(n)
    return make_measurement([np.outer(eye[i], eye[i]) for i in range(n)])


def rank_one(v) -> np.ndarray:
    """Projector ``v v^H / |v|^2``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return validate_hermitian(np.outer(v, v.conj()))


def payoff(G, projector) -> float:
    """Scalar payoff of gamble ``G`` when the rank-one outcome ``projector`` occurs."""
    p = projector if isinstance(projector, Projector) else Projector.from_matrix(projector)
    if p.rank != 1:
        raise RankNotOne(f"payoff needs a rank-one projector, got rank {p.rank}")
    G = as_hermitian(G)
    if G.shape != p.matrix.shape:
        raise DimensionMismatch(f"gamble of size {G.shape[0]} and projector of size {p.dim}")
    pgp = p.matrix @ G @ p.matrix
    gamma = float(np.trace(pgp).real)
    resid = max_abs(pgp - gamma * p.matrix)
    assert resid <= TOL_PROJ * max(1.0, max_abs(G)), f"PGP is not a multiple of P (residual {resid:.3g})"
    return gamma


def validate_density(rho) -> np.ndarray:
    """Check ``rho`` is positive semidefinite, non-zero and has unit trace."""
    r = as_hermitian(rho)
    if classify(r) not in (Definiteness.PD, Definiteness.PSDNZ):
        raise NotDensityMatrix("matrix is not positive semidefinite and non-zero")
    tr = float(np.trace(r).real)
    if abs(tr - 1.0) > TOL_TRACE:
        raise NotDensityMatrix(f"trace {tr:.12g} differs from 1")
    return r


def born_probabilities(rho, m: ProjectiveMeasurement) -> np.ndarray:
    """Outcome probabilities ``Tr(P_i rho P_i)`` in projector order."""
    rho = validate_density(rho)
    if rho.shape[0] != m.dim:
        raise DimensionMismatch(f"state of size {rho.shape[0]} and measurement of size {m.dim}")
    p = np.array([np.trace(P.matrix @ rho @ P.matrix).real for P in m.projectors])
    if np.any(p < -TOL_BORN_CLAMP):
        raise NotDensityMatrix(f"negative outcome probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > TOL_TRACE:
        raise NotComplete(f"probabilities sum to {s:.12g}")
    return p / s


def eigenmeasurement(rho) -> ProjectiveMeasurement:
    """Rank-one projectors onto the eigenvectors of ``rho``, ascending eigenvalue order."""
    r = validate_density(rho)
    v = eig(r).eigenvectors
    return make_measurement([rank_one(v[:, k]) for k in range(v.shape[1])])
