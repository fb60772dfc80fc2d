"""Monte Carlo simulation of the betting protocol and Dutch-book demonstrations.

Outcomes are sampled with numpy's Philox counter-based generator seeded by
the scenario seed: one uniform double per trial, mapped to an outcome by
inverse CDF over the Born probabilities in projector order (the first index
``i`` with ``u < cdf[i]``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _backend
from .credal.coherence import check_coherence
from .errors import DimensionMismatch, NotIncoherent, RankNotOne
from .linalg import as_hermitian
from .measurement import (ProjectiveMeasurement, born_probabilities, eigenmeasurement, payoff,
                          validate_density)

DUTCH_BOOK_TOL = 1e-8


@dataclass(frozen=True)
class Scenario:
    """One bookmaker state, one measurement, gambles held for ``trials`` rounds."""

    bookmaker_state: np.ndarray
    accepted_gambles: tuple
    trials: int
    seed: int = 0
    measurement: ProjectiveMeasurement | None = None

    def __post_init__(self):
        rho = validate_density(self.bookmaker_state)
        object.__setattr__(self, "bookmaker_state", rho)
        gambles = tuple(as_hermitian(g) for g in self.accepted_gambles)
        for g in gambles:
            if g.shape != rho.shape:
                raise DimensionMismatch(f"gamble of size {g.shape[0]} for a state of size {rho.shape[0]}")
        object.__setattr__(self, "accepted_gambles", gambles)
        if int(self.trials) < 1:
            raise ValueError("trials must be positive")
        object.__setattr__(self, "trials", int(self.trials))
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))
        m = self.measurement if self.measurement is not None else eigenmeasurement(rho)
        if m.dim != rho.shape[0]:
            raise DimensionMismatch(f"measurement of size {m.dim} for a state of size {rho.shape[0]}")
        for i, p in enumerate(m.projectors):
            if p.rank != 1:
                raise RankNotOne(f"projector {i} has rank {p.rank}; payoffs need rank-one outcomes")
        object.__setattr__(self, "measurement", m)


@dataclass
class Ledger:
    totals: np.ndarray
    outcomes: np.ndarray
    means: np.ndarray
    expectations: np.ndarray
    sigmas: np.ndarray
    payoffs: np.ndarray
    probabilities: np.ndarray
    trials: int

    def deviation_bounds(self, k: float = 4.0) -> np.ndarray:
        """``k`` standard errors of the empirical mean, per gamble."""
        return k * self.sigmas / np.sqrt(self.trials)


def _draws(seed: int, trials: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.random(trials)


def run_simulation(s: Scenario) -> Ledger:
    """Play ``s.trials`` rounds and record outcomes and payoffs."""
    probs = born_probabilities(s.bookmaker_state, s.measurement)
    table = np.array([[payoff(G, P) for P in s.measurement.projectors] for G in s.accepted_gambles],
                     dtype=float).reshape(len(s.accepted_gambles), len(s.measurement))
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    outcomes, totals = _backend.accumulate_payoffs(np.ascontiguousarray(cdf), np.ascontiguousarray(table),
                                                   _draws(s.seed, s.trials))
    expectations = np.array([np.vdot(G, s.bookmaker_state).real for G in s.accepted_gambles])
    second = table ** 2 @ probs
    var = np.clip(second - (table @ probs) ** 2, 0.0, None)
    return Ledger(totals, outcomes, totals / s.trials, expectations, np.sqrt(var), table, probs, s.trials)


@dataclass
class DutchBookReport:
    weights: np.ndarray
    beta: float
    combined: np.ndarray
    outcome_payoffs: np.ndarray
    ledger: Ledger
    worst_payoff: float
    sure_loss: bool
    boundary: bool
    notes: list = field(default_factory=list)


def dutch_book_demo(assessments: Sequence, skeleton: Scenario) -> DutchBookReport:
    """Play the loss-making combination found by the coherence check.

    The combined gamble ``sum_k alpha_k G_k`` is held for every trial of the
    skeleton scenario (its own accepted gambles are ignored). Every outcome
    pays at most ``-beta``; a zero-margin certificate is reported as a
    boundary Dutch book.
    """
    report = check_coherence(assessments, skeleton.bookmaker_state.shape[0])
    if report.coherent:
        raise NotIncoherent("assessments avoid partial loss; there is no Dutch book")
    cert = report.certificate
    gambles = [a.gamble if hasattr(a, "gamble") else as_hermitian(a[0] if isinstance(a, tuple) else a)
               for a in assessments]
    combined = as_hermitian(0.5 * (cert.combination(gambles) + cert.combination(gambles).conj().T))
    s = Scenario(skeleton.bookmaker_state, (combined,), skeleton.trials, skeleton.seed, skeleton.measurement)
    ledger = run_simulation(s)
    outcome_payoffs = ledger.payoffs[0]
    worst = float(np.max(outcome_payoffs))
    sure_loss = bool(worst <= -cert.beta + DUTCH_BOOK_TOL
                     and np.linalg.eigvalsh(combined).max() <= -cert.beta + DUTCH_BOOK_TOL)
    notes = []
    if cert.boundary:
        notes.append("boundary Dutch book (zero-margin): the combination never gains but need not lose")
    return DutchBookReport(cert.alpha, cert.beta, combined, outcome_payoffs, ledger, worst, sure_loss,
                           cert.boundary, notes)
