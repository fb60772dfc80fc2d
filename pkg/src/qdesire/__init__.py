"""Desirable gambles over Hermitian matrices.

Gambles are Hermitian matrices, belief models are credal sets of density
matrices, and coherence is checked by semidefinite programming.
"""
__version__ = "0.1.0"

from . import credal, game, linalg, measurement, optim
from ._backend import COMPILED
from .credal import (Assessment, CredalSet, border, check_coherence, condition_nonselective,
                     condition_selective, credal_from_assessments, evolve, marginal, natural_extension,
                     strict)
from .errors import QDesireError
from .game import Scenario, dutch_book_demo, run_simulation
from .linalg import UnitaryMap, classify, eig, pauli_build, pauli_coords
from .measurement import born_probabilities, make_measurement, payoff

__all__ = [
    "COMPILED", "Assessment", "CredalSet", "QDesireError", "Scenario", "UnitaryMap", "border",
    "born_probabilities", "check_coherence", "classify", "condition_nonselective", "condition_selective",
    "credal", "credal_from_assessments", "dutch_book_demo", "eig", "evolve", "game", "linalg",
    "make_measurement", "marginal", "measurement", "natural_extension", "optim", "pauli_build",
    "pauli_coords", "payoff", "run_simulation", "strict",
]
