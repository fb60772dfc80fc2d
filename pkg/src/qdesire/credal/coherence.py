"""Assessments of desirable gambles and their coherence."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import optim
from ..errors import DimensionMismatch, Incoherent
from ..linalg import Definiteness, as_hermitian, classify
from .sets import CredalSet, is_diagonal

COHERENCE_TOL = 1e-9


class Strictness(enum.Enum):
    STRICT = "strict"
    BORDER = "border"


@dataclass(frozen=True)
class Assessment:
    """An accepted gamble, tagged strict or border."""

    gamble: np.ndarray
    strictness: Strictness = Strictness.STRICT

    def __post_init__(self):
        object.__setattr__(self, "gamble", as_hermitian(self.gamble))
        if not isinstance(self.strictness, Strictness):
            object.__setattr__(self, "strictness", Strictness(self.strictness))


def strict(G) -> Assessment:
    return Assessment(G, Strictness.STRICT)


def border(G) -> Assessment:
    return Assessment(G, Strictness.BORDER)


class CoherenceStatus(enum.Enum):
    COHERENT = "Coherent"
    INCURS_PARTIAL_LOSS = "IncursPartialLoss"


@dataclass
class CoherenceReport:
    """Verdict of :func:`check_coherence`.

    ``certificate.alpha`` has one weight per input assessment (zero for the
    ones that were not needed).
    """

    status: CoherenceStatus
    margin: float
    witness: np.ndarray | None = None
    certificate: optim.Certificate | None = None

    @property
    def coherent(self) -> bool:
        return self.status is CoherenceStatus.COHERENT

    @property
    def boundary(self) -> bool:
        return self.certificate is not None and self.certificate.boundary


def _dimension(assessments: Sequence[Assessment], n: int | None) -> int:
    dims = {a.gamble.shape[0] for a in assessments}
    if n is not None:
        dims.add(int(n))
    if not dims:
        raise ValueError("dimension required when there are no assessments")
    if len(dims) > 1:
        raise DimensionMismatch(f"assessments mix dimensions {sorted(dims)}")
    return dims.pop()


def _as_assessments(items) -> list[Assessment]:
    return [a if isinstance(a, Assessment) else Assessment(*a) if isinstance(a, tuple) else Assessment(a)
            for a in items]


def check_coherence(assessments: Sequence, n: int | None = None,
                    tol: float = COHERENCE_TOL) -> CoherenceReport:
    """Decide whether a list of assessments avoids partial loss.

    Strict gambles must admit a common positive margin on some density matrix
    that satisfies all border gambles. Gambles that are positive semidefinite
    and non-zero are always acceptable and are set aside. On failure the
    report carries nonnegative weights whose combination of gambles is
    negative semidefinite, verified by an eigenvalue check.
    """
    items = _as_assessments(assessments)
    n = _dimension(items, n)
    informative = []
    for k, a in enumerate(items):
        cls = classify(a.gamble)
        if cls in (Definiteness.PD, Definiteness.PSDNZ):
            continue
        if cls is Definiteness.ZERO and a.strictness is Strictness.BORDER:
            continue
        informative.append(k)
    gambles = [items[k].gamble for k in informative]
    strict_pos = [i for i, k in enumerate(informative) if items[k].strictness is Strictness.STRICT]
    rep = optim.feasibility_margin(gambles, strict_subset=strict_pos, n=n, tol=tol)
    if rep.feasible:
        return CoherenceReport(CoherenceStatus.COHERENT, rep.margin, rep.witness)
    alpha = np.zeros(len(items))
    for i, k in enumerate(informative):
        alpha[k] = rep.certificate.alpha[i]
    cert = optim.Certificate(alpha, rep.certificate.beta, rep.certificate.boundary)
    return CoherenceReport(CoherenceStatus.INCURS_PARTIAL_LOSS, rep.margin, rep.witness, cert)


def credal_from_assessments(assessments: Sequence, n: int | None = None,
                            classical: bool = False) -> CredalSet:
    """The set of density matrices under which every assessed gamble has
    nonnegative expectation.

    Raises
    ------
    Incoherent
        when the assessments incur partial loss.
    """
    items = _as_assessments(assessments)
    n = _dimension(items, n)
    if classical and not all(is_diagonal(a.gamble, 1e-12) for a in items):
        raise ValueError("classical assessments must be diagonal gambles")
    report = check_coherence(items, n)
    if not report.coherent:
        raise Incoherent(report)
    return CredalSet(n, constraints=[a.gamble for a in items], classical=classical, _verified=True)

