"""Bipartite systems: marginals, natural extension, independence and
reduction-criterion bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import optim
from ..errors import DimensionMismatch, UndefinedConditioning
from ..linalg import (Definiteness, as_hermitian, classify, eig, embed, haar_unitary, max_abs,
                      partial_trace, psd_tolerance, tensor, validate_hermitian)
from ..measurement import ProjectiveMeasurement, make_measurement, rank_one, validate_density
from .conditioning import condition_selective
from .sets import BeliefModel, CredalSet, basis, hull_distance, traceless_basis

INDEPENDENCE_TOL = 1e-8
IRRELEVANCE_TOL = 1e-6
MARGINAL_MEMBERSHIP_TOL = 1e-7


def _dims(M: BeliefModel, dims) -> tuple[int, int]:
    n, m = int(dims[0]), int(dims[1])
    if n < 1 or m < 1 or n * m != M.dim:
        raise DimensionMismatch(f"dims {(n, m)} do not factor dimension {M.dim}")
    return n, m


class MarginalCredalSet(BeliefModel):
    """Marginal of a joint model on one factor, queried through the joint."""

    def __init__(self, joint: BeliefModel, dims, keep: str = "A"):
        n, m = _dims(joint, dims)
        if keep not in ("A", "B"):
            raise ValueError("keep must be 'A' or 'B'")
        self.joint = joint
        self.dims = (n, m)
        self.keep = keep
        self.dim = n if keep == "A" else m
        self.classical = joint.classical

    def __repr__(self):
        return f"MarginalCredalSet(keep={self.keep}, dims={self.dims}, joint={self.joint!r})"

    def lift(self, G) -> np.ndarray:
        return embed(G, self.dims, self.keep)

    def lower_prevision(self, G) -> float:
        return self.joint.lower_prevision(self.lift(self._check_gamble(G)))

    def membership(self, sigma, tol: float = MARGINAL_MEMBERSHIP_TOL) -> bool:
        return self.distance(sigma) <= tol

    def distance(self, sigma) -> float:
        """L1 distance, in basis coordinates, from ``sigma`` to the marginal set."""
        sigma = validate_density(sigma)
        if sigma.shape[0] != self.dim:
            raise DimensionMismatch(f"state of size {sigma.shape[0]} for marginal of dimension {self.dim}")
        joint = self.joint
        if not isinstance(joint, CredalSet):
            raise TypeError("membership needs an explicit joint credal set")
        if joint.kind == "V":
            pts = [partial_trace(p, self.dims, "B" if self.keep == "A" else "A") for p in joint.points]
            return hull_distance(np.array(pts), sigma)
        B = traceless_basis(self.dim)
        lifted = [self.lift(E) for E in B]
        target = np.einsum("kij,ji->k", B, sigma).real
        H = list(joint.as_quantum().constraints)
        ineq_idx, pairs = optim.split_equalities(H)
        ineq = [H[j] for j in ineq_idx]
        eqs = [H[j] for j, _ in pairs]
        N = joint.dim
        d = len(B)
        mi = len(ineq)
        mats = [np.eye(N, dtype=complex)] + ineq + lifted
        keep = optim._independent_rows([optim._vec_real(e) for e in [np.eye(N)] + eqs], keep_first=1)
        mats += [eqs[i - 1] for i in keep if i > 0]
        rows = len(mats)
        a = np.zeros((rows, mi + 2 * d))
        for j in range(mi):
            a[1 + j, j] = -1.0
        for k in range(d):
            a[1 + mi + k, mi + k] = 1.0
            a[1 + mi + k, mi + d + k] = -1.0
        b = np.zeros(rows)
        b[0] = 1.0
        b[1 + mi:1 + mi + d] = target
        c = np.concatenate([np.zeros(mi), np.ones(2 * d)])
        res = optim.solve_cone(np.zeros((N, N), dtype=complex), c, np.array(mats), a, b)
        if not res.converged:
            raise optim.SolverFailure("marginal membership solve did not converge")
        return max(0.0, float(res.pobj))


def marginal(M: BeliefModel, dims, keep: str = "A") -> BeliefModel:
    """Marginal model on factor ``keep``.

    Extreme-point sets are marginalized exactly by partial-tracing their
    points; other models return a lazily evaluated :class:`MarginalCredalSet`.
    """
    n, m = _dims(M, dims)
    if isinstance(M, CredalSet) and M.kind == "V":
        over = "B" if keep == "A" else "A"
        pts = [partial_trace(p, (n, m), over) for p in M.points]
        return CredalSet(n if keep == "A" else m, points=pts, classical=M.classical)
    return MarginalCredalSet(M, (n, m), keep)


def natural_extension(MA: CredalSet, MB: CredalSet) -> CredalSet:
    """Least committal joint credal set whose marginals lie in ``MA`` and ``MB``.

    Constraints ``A_j ⊗ I`` and ``I ⊗ B_k`` from the operands' constraint
    descriptions; extreme-point operands are converted first.
    """
    classical = MA.classical and MB.classical
    A = MA.to_hrep()
    B = MB.to_hrep()
    if not classical:
        A, B = A.as_quantum(), B.as_quantum()
    n, m = A.dim, B.dim
    cons = [tensor(a, np.eye(m)) for a in A.constraints] + [tensor(np.eye(n), b) for b in B.constraints]
    return CredalSet(n * m, constraints=cons, classical=classical, _verified=True)


@dataclass
class IndependenceReport:
    independent: bool
    rho_A: np.ndarray
    rho_B: np.ndarray
    residual: float


def check_independence(rho, dims) -> IndependenceReport:
    """Whether a joint state equals the product of its marginals."""
    rho = validate_density(rho)
    n, m = int(dims[0]), int(dims[1])
    if n * m != rho.shape[0]:
        raise DimensionMismatch(f"dims {(n, m)} do not factor a state of size {rho.shape[0]}")
    ra = partial_trace(rho, (n, m), "B")
    rb = partial_trace(rho, (n, m), "A")
    resid = max_abs(rho - np.kron(ra, rb))
    return IndependenceReport(resid <= INDEPENDENCE_TOL, ra, rb, resid)


@dataclass
class FrechetReport:
    """Reduction-criterion tests; each entry pairs a verdict with a minimum eigenvalue."""

    passed: tuple
    min_eigenvalues: tuple
    labels: tuple = ("rhoA⊗I - rho >= 0", "I⊗rhoB - rho >= 0",
                     "rho - (rhoA⊗I + I⊗rhoB - I) >= 0", "rho >= 0, rho != 0")

    @property
    def all_pass(self) -> bool:
        return all(self.passed)


def frechet_check(rho, dims) -> FrechetReport:
    """Necessary conditions for a separable joint state."""
    rho = validate_density(rho)
    n, m = int(dims[0]), int(dims[1])
    if n * m != rho.shape[0]:
        raise DimensionMismatch(f"dims {(n, m)} do not factor a state of size {rho.shape[0]}")
    ra = partial_trace(rho, (n, m), "B")
    rb = partial_trace(rho, (n, m), "A")
    upper_a = np.kron(ra, np.eye(m))
    upper_b = np.kron(np.eye(n), rb)
    tests = [upper_a - rho, upper_b - rho, rho - (upper_a + upper_b - np.eye(n * m)), rho]
    passed, mins = [], []
    for k, T in enumerate(tests):
        T = validate_hermitian(0.5 * (T + T.conj().T))
        lam = eig(T).eigenvalues[0]
        mins.append(float(lam))
        ok = lam >= -psd_tolerance(T)
        if k == 3:
            ok = classify(T) in (Definiteness.PD, Definiteness.PSDNZ)
        passed.append(bool(ok))
    return FrechetReport(tuple(passed), tuple(mins))


def random_measurements(n: int, count: int, seed: int = 0) -> list[ProjectiveMeasurement]:
    """Rank-one measurements along the columns of seeded Haar unitaries."""
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    for _ in range(count):
        u = haar_unitary(n, rng)
        out.append(make_measurement([rank_one(u[:, k]) for k in range(n)]))
    return out


@dataclass
class IrrelevanceReport:
    max_discrepancy: float
    holds: bool
    tested: int
    skipped: list = field(default_factory=list)
    undefined: list = field(default_factory=list)
    per_measurement: list = field(default_factory=list)


def check_irrelevance_probe(M: BeliefModel, dims, direction: str = "AtoB",
                            measurements: Sequence[ProjectiveMeasurement] = (),
                            probes: Sequence | None = None, n_random: int = 20,
                            seed: int = 0, tol: float = IRRELEVANCE_TOL) -> IrrelevanceReport:
    """Compare marginal previsions before and after learning a measurement
    outcome on the other factor.

    ``direction='AtoB'`` measures factor B and probes the marginal on A;
    ``'BtoA'`` measures A and probes B. The tested measurements are the given
    ones followed by ``n_random`` seeded Haar-random rank-one measurements.
    Probes default to the orthonormal basis of the probed factor and its
    negatives, so both lower and upper previsions are compared.
    Outcomes of zero upper probability are skipped; outcomes with undefined
    conditioning are recorded.
    """
    n, m = _dims(M, dims)
    if direction == "AtoB":
        keep, cond_dim = "A", m
    elif direction == "BtoA":
        keep, cond_dim = "B", n
    else:
        raise ValueError("direction must be 'AtoB' or 'BtoA'")
    kept_dim = n if keep == "A" else m
    if probes is None:
        B = basis(kept_dim)
        probes = [E for E in B] + [validate_hermitian(-E) for E in B]
    probes = [as_hermitian(p) for p in probes]
    for p in probes:
        if p.shape[0] != kept_dim:
            raise DimensionMismatch(f"probe of size {p.shape[0]} for factor of dimension {kept_dim}")
    family = list(measurements) + random_measurements(cond_dim, n_random, seed)
    for meas in family:
        if meas.dim != cond_dim:
            raise DimensionMismatch(f"measurement of size {meas.dim} on factor of dimension {cond_dim}")
    base = marginal(M, (n, m), keep)
    base_vals = np.array([base.lower_prevision(p) for p in probes])
    worst = 0.0
    report = IrrelevanceReport(0.0, True, 0)
    for mi, meas in enumerate(family):
        meas_worst = 0.0
        for pi, P in enumerate(meas.matrices()):
            lifted = embed(P, (n, m), "B" if keep == "A" else "A")
            upper = M.upper_prevision(lifted)
            if upper <= 1e-9:
                report.skipped.append((mi, pi))
                continue
            try:
                cond = condition_selective(M, lifted)
            except UndefinedConditioning as exc:
                report.undefined.append((mi, pi, exc.lower, exc.upper))
                continue
            cm = marginal(cond, (n, m), keep)
            vals = np.array([cm.lower_prevision(p) for p in probes])
            d = float(np.max(np.abs(vals - base_vals)))
            meas_worst = max(meas_worst, d)
            report.tested += 1
        report.per_measurement.append(meas_worst)
        worst = max(worst, meas_worst)
    report.max_discrepancy = worst
    report.holds = worst <= tol
    return report
