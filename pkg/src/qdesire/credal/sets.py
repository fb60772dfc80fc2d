"""Credal sets of density matrices and the belief-model interface."""
from __future__ import annotations

import functools
import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .. import optim
from ..errors import (DimensionMismatch, EmptyCredalSet, NotDensityMatrix, NotMaximal,
                      SolverFailure)
from ..linalg import (Definiteness, UnitaryMap, as_hermitian, classify, conjugate,
                      gell_mann_basis, max_abs, validate_hermitian)
from ..measurement import validate_density

PREVISION_TOL = 1e-7
DESIRABILITY_TOL = 1e-9
MAXIMALITY_TOL = 1e-7
MEMBERSHIP_TOL = 1e-8


@functools.lru_cache(maxsize=None)
def basis(n: int) -> np.ndarray:
    return gell_mann_basis(n)


def traceless_basis(n: int, classical: bool = False) -> np.ndarray:
    """Orthonormal traceless Hermitian basis; diagonal elements only when classical."""
    b = basis(n)[1:]
    if classical:
        return b[n * (n - 1):]
    return b


def off_diagonal_basis(n: int) -> np.ndarray:
    return basis(n)[1:1 + n * (n - 1)]


def dephase(G: np.ndarray) -> np.ndarray:
    return validate_hermitian(np.diag(np.diagonal(G).real))


def is_diagonal(G, tol: float = 0.0) -> bool:
    G = np.asarray(G)
    return max_abs(G - np.diag(np.diagonal(G))) <= tol


class PrevisionInterval(NamedTuple):
    lower: float
    upper: float


class BeliefModel:
    """Anything that can price gambles by a lower prevision.

    Subclasses implement :meth:`lower_prevision`; the rest follows.
    """

    dim: int
    classical: bool = False

    def _check_gamble(self, G) -> np.ndarray:
        G = as_hermitian(G)
        if G.shape[0] != self.dim:
            raise DimensionMismatch(f"gamble of size {G.shape[0]} for a model on dimension {self.dim}")
        return G

    def lower_prevision(self, G) -> float:
        raise NotImplementedError

    def upper_prevision(self, G) -> float:
        return -self.lower_prevision(validate_hermitian(-self._check_gamble(G)))

    def prevision(self, G) -> PrevisionInterval:
        return PrevisionInterval(self.lower_prevision(G), self.upper_prevision(G))

    def is_desirable(self, G) -> bool:
        G = self._check_gamble(G)
        if classify(G) in (Definiteness.PD, Definiteness.PSDNZ):
            return True
        return self.lower_prevision(G) > DESIRABILITY_TOL

    def is_maximal(self, tol: float = MAXIMALITY_TOL) -> bool:
        for E in basis(self.dim)[1:]:
            lo, hi = self.prevision(E)
            if hi - lo > tol:
                return False
        return True

    def extract_state(self, tol: float = MAXIMALITY_TOL) -> np.ndarray:
        """The single density matrix of a maximal model."""
        B = basis(self.dim)
        coords = np.empty(len(B))
        coords[0] = 1.0 / math.sqrt(self.dim)
        for k in range(1, len(B)):
            lo, hi = self.prevision(B[k])
            if hi - lo > tol:
                raise NotMaximal(f"prevision of basis element {k} spans [{lo:.6g}, {hi:.6g}]")
            coords[k] = 0.5 * (lo + hi)
        rho = np.einsum("k,kij->ij", coords, B)
        try:
            return validate_density(0.5 * (rho + rho.conj().T))
        except NotDensityMatrix as exc:
            raise NotMaximal(f"reconstructed matrix is not a state: {exc}") from None


class CredalSet(BeliefModel):
    """Closed convex set of density matrices.

    Two representations are supported:

    * constraints (``kind == 'H'``): ``{rho : Tr(A_j rho) >= 0}``;
    * extreme points (``kind == 'V'``): the convex hull of given states.

    With ``classical=True`` the set contains only diagonal density matrices,
    i.e. probability mass functions on ``n`` outcomes.
    """

    def __init__(self, dim: int, *, constraints=None, points=None, classical: bool = False,
                 _verified: bool = False):
        self.dim = int(dim)
        self.classical = bool(classical)
        self._vertices = None
        if (constraints is None) == (points is None):
            raise ValueError("give exactly one of constraints or points")
        if points is not None:
            self.kind = "V"
            pts = [validate_density(p) for p in points]
            if not pts:
                raise EmptyCredalSet("no extreme points")
            for p in pts:
                if p.shape[0] != self.dim:
                    raise DimensionMismatch(f"extreme point of size {p.shape[0]} in dimension {self.dim}")
                if self.classical and not is_diagonal(p, 1e-12):
                    raise ValueError("classical credal sets hold diagonal states only")
            self.points = np.array(pts)
            self.points.setflags(write=False)
            self.constraints = None
        else:
            self.kind = "H"
            cons = []
            for A in constraints:
                A = as_hermitian(A)
                if A.shape[0] != self.dim:
                    raise DimensionMismatch(f"constraint of size {A.shape[0]} in dimension {self.dim}")
                if self.classical:
                    if not is_diagonal(A, 1e-12):
                        raise ValueError("classical credal sets take diagonal constraints only")
                    A = dephase(A)
                if classify(A) in (Definiteness.PD, Definiteness.PSDNZ, Definiteness.ZERO):
                    continue  # satisfied by every state
                cons.append(A)
            self.constraints = tuple(cons)
            self.points = None
            if cons and not _verified:
                rep = optim.feasibility_margin(cons, n=self.dim)
                if not rep.feasible:
                    raise EmptyCredalSet(f"constraints admit no density matrix (margin {rep.margin:.3g})")

    # construction helpers -------------------------------------------------

    @classmethod
    def vacuous(cls, n: int, classical: bool = False) -> "CredalSet":
        return cls(n, constraints=(), classical=classical)

    @classmethod
    def from_constraints(cls, gambles: Sequence, n: int | None = None, classical: bool = False) -> "CredalSet":
        gambles = list(gambles)
        if n is None:
            if not gambles:
                raise ValueError("dimension needed for an empty constraint list")
            n = np.asarray(gambles[0]).shape[0]
        return cls(n, constraints=gambles, classical=classical)

    @classmethod
    def from_extreme_points(cls, points: Sequence, classical: bool = False) -> "CredalSet":
        points = list(points)
        if not points:
            raise EmptyCredalSet("no extreme points")
        return cls(np.asarray(points[0]).shape[0], points=points, classical=classical)

    @classmethod
    def singleton(cls, rho, classical: bool = False) -> "CredalSet":
        return cls.from_extreme_points([rho], classical=classical)

    @property
    def is_vacuous_hrep(self) -> bool:
        return self.kind == "H" and not self.constraints

    def __repr__(self):
        if self.kind == "H":
            body = f"{len(self.constraints)} constraints"
        else:
            body = f"{len(self.points)} extreme points"
        tag = ", classical" if self.classical else ""
        return f"CredalSet(dim={self.dim}, {body}{tag})"

    # previsions -----------------------------------------------------------

    def vertices(self) -> np.ndarray | None:
        """Probability vectors of the extreme points for diagonal instances, else None."""
        if self.kind == "V":
            if self.classical or all(is_diagonal(p) for p in self.points):
                return np.array([np.diagonal(p).real for p in self.points])
            return None
        if self._vertices is None:
            if self.dim > optim.FAST_PATH_MAX_DIM or not all(is_diagonal(A) for A in self.constraints):
                return None
            Hd = np.array([np.diagonal(A).real for A in self.constraints]).reshape(-1, self.dim)
            try:
                self._vertices = optim.simplex_vertices(Hd)
            except Exception:  # noqa: BLE001  enumeration too large
                return None
        return self._vertices

    def lower_prevision(self, G) -> float:
        G = self._check_gamble(G)
        if self.classical:
            G = dephase(G)
        if self.kind == "V":
            return float(np.min(np.einsum("ij,kji->k", G, self.points).real))
        if is_diagonal(G):
            verts = self.vertices()
            if verts is not None and len(verts):
                return float(np.min(verts @ np.diagonal(G).real))
        sol = optim._minimize_homogeneous(G, list(self.constraints))
        if sol.status is not optim.Status.OPTIMAL:
            raise SolverFailure("prevision solve did not converge",
                                {"iterations": sol.iterations, "gap": sol.gap, **sol.info})
        return sol.value

    def minimizer(self, G) -> np.ndarray:
        """A density matrix attaining the lower prevision of ``G``."""
        G = self._check_gamble(G)
        if self.classical:
            G = dephase(G)
        if self.kind == "V":
            vals = np.einsum("ij,kji->k", G, self.points).real
            return self.points[int(np.argmin(vals))]
        return optim._minimize_homogeneous(G, list(self.constraints)).optimizer

    # membership -----------------------------------------------------------

    def contains(self, rho, tol: float = MEMBERSHIP_TOL) -> bool:
        rho = validate_density(rho)
        if rho.shape[0] != self.dim:
            raise DimensionMismatch(f"state of size {rho.shape[0]} for a set of dimension {self.dim}")
        if self.classical and not is_diagonal(rho, tol):
            return False
        if self.kind == "H":
            return all(np.vdot(A, rho).real >= -tol * max(1.0, max_abs(A)) for A in self.constraints)
        return hull_distance(self.points, rho) <= tol

    # conversions ----------------------------------------------------------

    def as_quantum(self) -> "CredalSet":
        """Equivalent set without the diagonal restriction encoded in a flag."""
        if not self.classical:
            return self
        if self.kind == "V":
            return CredalSet(self.dim, points=self.points, _verified=True)
        extra = []
        for E in off_diagonal_basis(self.dim):
            extra += [E, validate_hermitian(-E)]
        return CredalSet(self.dim, constraints=list(self.constraints) + extra, _verified=True)

    def to_hrep(self) -> "CredalSet":
        """Constraint description of a polytope given by extreme points."""
        if self.kind == "H":
            return self
        cons = polytope_constraints(self.points, classical=self.classical)
        return CredalSet(self.dim, constraints=cons, classical=self.classical, _verified=True)

    def to_vrep(self) -> "CredalSet":
        """Extreme points of a diagonal polytope (classical or diagonal constraints)."""
        if self.kind == "V":
            return self
        verts = self.vertices()
        if verts is None:
            raise ValueError("extreme points are only available for diagonal polytopes")
        return CredalSet(self.dim, points=[np.diag(v) for v in verts], classical=self.classical)

    def evolve(self, u) -> "CredalSet":
        return evolve(self, u)


def hull_distance(points: np.ndarray, rho) -> float:
    """L1 distance in real coordinates from ``rho`` to the hull of ``points``."""
    n = points.shape[1]
    B = basis(n)
    V = np.einsum("kij,pji->kp", B, points).real  # coordinates of points as columns
    t = np.einsum("kij,ji->k", B, np.asarray(rho, dtype=complex)).real
    d, k = V.shape
    # variables: w (k), u (d), v (d);  V w + u - v = t,  sum w = 1
    A_eq = np.zeros((d + 1, k + 2 * d))
    A_eq[:d, :k] = V
    A_eq[:d, k:k + d] = np.eye(d)
    A_eq[:d, k + d:] = -np.eye(d)
    A_eq[d, :k] = 1.0
    b_eq = np.concatenate([t, [1.0]])
    cost = np.concatenate([np.zeros(k), np.ones(2 * d)])
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverFailure(f"hull membership linear program failed: {res.message}")
    return float(res.fun)


def polytope_constraints(points: np.ndarray, classical: bool = False, tol: float = 1e-10) -> list[np.ndarray]:
    """Gambles ``A_j`` with ``{rho : Tr(A_j rho) >= 0} = conv(points)`` on states.

    The affine hull contributes opposite pairs (equalities); facets of the
    hull inside it come from Qhull.
    """
    points = np.asarray(points, dtype=complex)
    n = points.shape[1]
    B = traceless_basis(n, classical)
    X = np.einsum("kij,pji->pk", B, points).real
    c = X.mean(axis=0)
    D = X - c
    _, s, vt = np.linalg.svd(D, full_matrices=True)
    r = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 0.0)))
    U = vt[:r].T
    N = vt[r:]
    eye = np.eye(n)

    def gamble(w, w0):
        # Tr(A rho) = w . x(rho) + w0 with x the coordinates in B
        A = np.einsum("k,kij->ij", w, B) + w0 * eye
        return validate_hermitian(0.5 * (A + A.conj().T))

    cons = []
    for nv in N:
        E = gamble(nv, -nv @ c)
        cons += [E, validate_hermitian(-E)]
    if r == 0:
        return cons
    Y = D @ U
    if r == 1:
        lo, hi = Y[:, 0].min(), Y[:, 0].max()
        u = U[:, 0]
        cons.append(gamble(u, -u @ c - lo))
        cons.append(gamble(-u, u @ c + hi))
        return cons
    try:
        hull = ConvexHull(Y)
    except QhullError as exc:
        raise ValueError(f"convex hull computation failed: {exc}") from None
    eqs = hull.equations  # normal . y + offset <= 0 inside
    keyed = np.round(eqs / 1e-9).astype(np.int64)
    _, first = np.unique(keyed, axis=0, return_index=True)
    for row in eqs[np.sort(first)]:
        nrm, off = row[:-1], row[-1]
        w = -(U @ nrm)
        cons.append(gamble(w, -(w @ c) - off))
    return cons


def _is_monomial(u: np.ndarray, tol: float = 1e-12) -> bool:
    nz = np.abs(u) > tol
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


def evolve(M: CredalSet, u) -> CredalSet:
    """Push a credal set forward through a unitary or antiunitary map."""
    if not isinstance(u, UnitaryMap):
        u = UnitaryMap(u)
    if u.dim != M.dim:
        raise DimensionMismatch(f"unitary of size {u.dim} on a set of dimension {M.dim}")
    if M.classical and not _is_monomial(u.matrix):
        M = M.as_quantum()
    if M.kind == "V":
        pts = [conjugate(u, p, "state") for p in M.points]
        if M.classical:
            pts = [dephase(p) for p in pts]
        return CredalSet(M.dim, points=pts, classical=M.classical)
    cons = [conjugate(u, A, "state") for A in M.constraints]
    if M.classical:
        cons = [dephase(A) for A in cons]
    return CredalSet(M.dim, constraints=cons, classical=M.classical, _verified=True)


def lower_prevision(M: BeliefModel, G) -> float:
    return M.lower_prevision(G)


def upper_prevision(M: BeliefModel, G) -> float:
    return M.upper_prevision(G)


def is_desirable(M: BeliefModel, G) -> bool:
    return M.is_desirable(G)


def is_maximal(M: BeliefModel) -> bool:
    return M.is_maximal()


def extract_state(M: BeliefModel) -> np.ndarray:
    return M.extract_state()
