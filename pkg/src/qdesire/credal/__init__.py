"""Belief models over density matrices: coherence, previsions, updating,
evolution and composite systems."""
from .classical import classical_embed, classical_project, interval_on_outcome
from .coherence import (Assessment, CoherenceReport, CoherenceStatus, Strictness, border,
                        check_coherence, credal_from_assessments, strict)
from .composite import (FrechetReport, IndependenceReport, IrrelevanceReport, MarginalCredalSet,
                        check_independence, check_irrelevance_probe, frechet_check, marginal,
                        natural_extension, random_measurements)
from .conditioning import ConditionalCredalSet, condition_nonselective, condition_selective
from .sets import (BeliefModel, CredalSet, PrevisionInterval, evolve, extract_state, is_desirable,
                   is_maximal, lower_prevision, upper_prevision)

__all__ = [
    "Assessment", "BeliefModel", "CoherenceReport", "CoherenceStatus", "ConditionalCredalSet",
    "CredalSet", "FrechetReport", "IndependenceReport", "IrrelevanceReport", "MarginalCredalSet",
    "PrevisionInterval", "Strictness", "border", "check_coherence", "check_independence",
    "check_irrelevance_probe", "classical_embed", "classical_project", "condition_nonselective",
    "condition_selective", "credal_from_assessments", "evolve", "extract_state", "frechet_check",
    "interval_on_outcome", "is_desirable", "is_maximal", "lower_prevision", "marginal",
    "natural_extension", "random_measurements", "strict", "upper_prevision",
]
