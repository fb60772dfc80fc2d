"""Small dense conic optimization over density matrices.

The core is an infeasible-start primal-dual interior-point method (HKM
search direction, Mehrotra predictor-corrector) for problems of the form

    min  Re Tr(C X) + c.x
    s.t. Re Tr(A_i X) + a_i.x = b_i,   X Hermitian PSD,  x >= 0.

Everything else in this module builds such problems: previsions over a set of
density matrices cut out by linear inequalities, feasibility margins with
infeasibility certificates, and conditional (fractional) previsions.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import BracketFailure, DimensionMismatch, DimensionTooLarge, MaxIterations, SolverFailure
from .linalg import as_hermitian, max_abs

SOLVER_TOL = 1e-10
ACCEPT_TOL = 1e-8
MAX_ITER = 100
MARGIN_TOL = 1e-9
BISECTION_TOL = 1e-9
FAST_PATH_MAX_DIM = 8
FAST_PATH_MAX_COMBOS = 200_000


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class Certificate:
    """Nonnegative weights with ``sum_k alpha_k A_k <= -beta I``.

    ``boundary`` marks a zero-margin certificate (``beta == 0``): the
    combination is negative semidefinite but gains nothing strictly.
    """

    alpha: np.ndarray
    beta: float
    boundary: bool = False

    def combination(self, gambles) -> np.ndarray:
        return np.einsum("k,kij->ij", self.alpha, np.asarray(gambles, dtype=complex))

    def verify(self, gambles, tol: float = 1e-8) -> bool:
        if np.any(self.alpha < 0) or not np.any(self.alpha > 0):
            return False
        top = np.linalg.eigvalsh(self.combination(gambles)).max()
        return bool(top <= -self.beta + tol)


@dataclass(frozen=True)
class SdpProblem:
    """Minimize ``Tr(C rho)`` over density matrices with ``Tr(A_j rho) >= b_j``."""

    objective: np.ndarray
    constraints: tuple = ()

    def __post_init__(self):
        c = as_hermitian(self.objective)
        cons = []
        for a, b in self.constraints:
            a = as_hermitian(a)
            if a.shape != c.shape:
                raise DimensionMismatch(f"constraint of size {a.shape[0]} in problem of size {c.shape[0]}")
            if not math.isfinite(b):
                raise ValueError("constraint offsets must be finite")
            cons.append((a, float(b)))
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    def homogeneous(self) -> list[np.ndarray]:
        """Constraints rewritten as ``Tr(H rho) >= 0`` using ``Tr rho = 1``."""
        n = self.dim
        return [a - b * np.eye(n) for a, b in self.constraints]


@dataclass
class SdpSolution:
    status: Status
    value: float
    optimizer: np.ndarray | None = None
    gap: float = math.nan
    iterations: int = 0
    certificate: Certificate | None = None
    multipliers: np.ndarray | None = None
    info: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# generic primal-dual solver


@dataclass
class ConeResult:
    converged: bool
    X: np.ndarray
    x: np.ndarray
    y: np.ndarray
    Z: np.ndarray
    z: np.ndarray
    pobj: float
    dobj: float
    pinf: float
    dinf: float
    relgap: float
    iterations: int


def _max_step_psd(X, dX) -> float:
    lam = sla.eigh(dX, X, eigvals_only=True, subset_by_index=[0, 0])[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx) -> float:
    neg = dx < 0
    if not neg.any():
        return math.inf
    return float(np.min(-x[neg] / dx[neg]))


def solve_cone(C, c, A, a, b, tol: float = SOLVER_TOL, max_iter: int = MAX_ITER) -> ConeResult:
    """Solve the standard-form problem described in the module docstring.

    ``A`` has shape (m, n, n) with Hermitian slices, ``a`` shape (m, q).
    Rows must be linearly independent.
    """
    C = np.asarray(C, dtype=complex)
    A = np.asarray(A, dtype=complex)
    n = C.shape[0]
    m = A.shape[0]
    c = np.asarray(c, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(m, -1)
    b = np.asarray(b, dtype=float).reshape(m)
    q = c.shape[0]

    # row scaling keeps the Schur complement well conditioned
    rn = np.sqrt(np.einsum("kij,kij->k", A.conj(), A).real + np.einsum("kj,kj->k", a, a))
    rn = np.where(rn > 0, rn, 1.0)
    A = A / rn[:, None, None]
    a = a / rn[:, None]
    b = b / rn
    Abar = A.conj().reshape(m, n * n)

    def op(W):
        return (Abar @ W.reshape(-1)).real

    def adj(y):
        return np.tensordot(y, A, axes=1)

    normb = 1.0 + np.linalg.norm(b)
    normC = 1.0 + math.sqrt(np.linalg.norm(C) ** 2 + np.linalg.norm(c) ** 2)
    N = n + q
    xi = max(10.0, math.sqrt(n), float(n * np.max((1.0 + np.abs(b)))))
    eta = max(10.0, math.sqrt(n), normC)
    I = np.eye(n)
    X = xi * I.astype(complex)
    x = np.full(q, xi)
    Z = eta * I.astype(complex)
    z = np.full(q, eta)
    y = np.zeros(m)

    best = None
    for it in range(max_iter + 1):
        rp = b - op(X) - a @ x
        Rd = C - adj(y) - Z
        Rd = 0.5 * (Rd + Rd.conj().T)
        rd = c - a.T @ y - z
        pobj = float(np.vdot(C, X).real + c @ x)  # vdot conj(C) = C^T; Tr(CX) real for Hermitian
        dobj = float(b @ y)
        pinf = np.linalg.norm(rp) / normb
        dinf = math.sqrt(np.linalg.norm(Rd) ** 2 + np.linalg.norm(rd) ** 2) / normC
        compl = float(np.vdot(X, Z).real + x @ z)
        relgap = max(abs(pobj - dobj), abs(compl)) / (1.0 + abs(pobj) + abs(dobj))
        err = max(pinf, dinf, relgap)
        if best is None or err < best[0]:
            best = (err, it, X, x, y, Z, z, pobj, dobj, pinf, dinf, relgap)
        if err <= tol:
            break
        if it == max_iter:
            break
        mu = compl / N
        try:
            Zinv = np.linalg.inv(Z)
            Zinv = 0.5 * (Zinv + Zinv.conj().T)
            G = (X @ A) @ Zinv
            M = (Abar @ G.reshape(m, -1).T).real
            if q:
                M += (a * (x / z)) @ a.T
            M = 0.5 * (M + M.T)
            cho = sla.cho_factor(M, check_finite=False)
            solveM = lambda r: sla.cho_solve(cho, r, check_finite=False)  # noqa: E731
        except (np.linalg.LinAlgError, sla.LinAlgError, ValueError):
            try:
                Mp = np.linalg.pinv(M, rcond=1e-14)
            except Exception:  # noqa: BLE001
                break
            solveM = lambda r: Mp @ r  # noqa: E731

        XZ = X @ Z

        def direction(Rc, rc):
            W = (Rc - X @ Rd) @ Zinv
            rhs = rp - op(W)
            if q:
                rhs = rhs - a @ ((rc - x * rd) / z)
            dy = solveM(rhs)
            dZ = Rd - adj(dy)
            dX = (Rc - X @ dZ) @ Zinv
            dX = 0.5 * (dX + dX.conj().T)
            dz = rd - a.T @ dy
            dx = (rc - x * dz) / z if q else np.zeros(0)
            return dX, dx, dy, dZ, dz

        try:
            dXa, dxa, dya, dZa, dza = direction(-XZ, -x * z)
            ap = min(1.0, _max_step_psd(X, dXa), _max_step_lp(x, dxa))
            ad = min(1.0, _max_step_psd(Z, dZa), _max_step_lp(z, dza))
            mu_aff = (np.vdot(X + ap * dXa, Z + ad * dZa).real + (x + ap * dxa) @ (z + ad * dza)) / N
            sigma = min(1.0, max(0.0, mu_aff / mu) ** 3) if mu > 0 else 0.0
            Rc = sigma * mu * I - XZ - dXa @ dZa
            rc = sigma * mu - x * z - dxa * dza
            dX, dx, dy, dZ, dz = direction(Rc, rc)
            gamma = 0.9 + 0.09 * min(ap, ad)
            ap = min(1.0, gamma * _max_step_psd(X, dX), gamma * _max_step_lp(x, dx))
            ad = min(1.0, gamma * _max_step_psd(Z, dZ), gamma * _max_step_lp(z, dz))
        except (np.linalg.LinAlgError, sla.LinAlgError, ValueError):
            break
        X = X + ap * dX
        X = 0.5 * (X + X.conj().T)
        x = x + ap * dx
        y = y + ad * dy
        Z = Z + ad * dZ
        Z = 0.5 * (Z + Z.conj().T)
        z = z + ad * dz
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            break
        if max_abs(X) > 1e14 or np.abs(y).max(initial=0) > 1e14:
            break

    err, it, X, x, y, Z, z, pobj, dobj, pinf, dinf, relgap = best
    return ConeResult(err <= ACCEPT_TOL, X, x, y / rn, Z, z, pobj, dobj, pinf, dinf, relgap, it)


# --------------------------------------------------------------------------
# problems over density matrices


def _vec_real(H: np.ndarray) -> np.ndarray:
    return np.concatenate([H.real.reshape(-1), H.imag.reshape(-1)])


def split_equalities(H: Sequence[np.ndarray], tol: float = 1e-9):
    """Separate opposite pairs ``(H, -cH)`` from genuine inequalities.

    Returns ``(ineq_idx, eq_pairs)``; each pair ``(j, k)`` pins ``Tr(H_j rho) = 0``.
    """
    vecs = []
    for h in H:
        v = _vec_real(np.asarray(h, dtype=complex))
        nv = np.linalg.norm(v)
        vecs.append(v / nv if nv > 0 else v)
    used = set()
    pairs = []
    for j in range(len(H)):
        if j in used:
            continue
        for k in range(j + 1, len(H)):
            if k in used:
                continue
            if np.linalg.norm(vecs[j] + vecs[k]) <= tol:
                pairs.append((j, k))
                used.update((j, k))
                break
    ineq = [j for j in range(len(H)) if j not in used]
    return ineq, pairs


def _independent_rows(rows: list[np.ndarray], keep_first: int, tol: float = 1e-10) -> list[int]:
    """Greedy selection of linearly independent rows, the first ``keep_first`` forced."""
    if not rows:
        return []
    basis = np.zeros((0, rows[0].shape[0]))
    chosen = []
    for i, r in enumerate(rows):
        nr = np.linalg.norm(r)
        if nr == 0:
            continue
        u = r / nr
        if basis.shape[0]:
            u = u - basis.T @ (basis @ u)
            u = u - basis.T @ (basis @ u)
        nu = np.linalg.norm(u)
        if nu > tol or i < keep_first:
            basis = np.vstack([basis, u / max(nu, 1e-300)])
            chosen.append(i)
    return chosen


@dataclass
class _Built:
    C: np.ndarray
    c: np.ndarray
    A: np.ndarray
    a: np.ndarray
    b: np.ndarray
    ineq_rows: list
    eq_rows: list  # (row index, original equality index)


def _assemble(C, ineq, eqs, extra_lp=None):
    """Rows: trace, one per inequality (with its own slack), independent equalities.

    ``extra_lp`` optionally supplies (c_extra, coeff) to append LP variables with
    coefficient matrix ``coeff`` of shape (len(ineq), k) in the inequality rows.
    """
    n = C.shape[0]
    mi = len(ineq)
    eye = np.eye(n, dtype=complex)
    eq_cand = [eye] + list(eqs)
    keep = _independent_rows([_vec_real(e) for e in eq_cand], keep_first=1)
    eq_keep = [i - 1 for i in keep if i > 0]
    mats = [eye] + list(ineq) + [eqs[i] for i in eq_keep]
    m = len(mats)
    k_extra = 0 if extra_lp is None else extra_lp[1].shape[1]
    q = mi + k_extra
    a = np.zeros((m, q))
    for j in range(mi):
        a[1 + j, j] = -1.0
    c = np.zeros(q)
    if extra_lp is not None:
        c[mi:] = extra_lp[0]
        a[1:1 + mi, mi:] = extra_lp[1]
    b = np.zeros(m)
    b[0] = 1.0
    return _Built(np.asarray(C, dtype=complex), c, np.array(mats), a, b,
                  list(range(1, 1 + mi)), [(1 + mi + t, i) for t, i in enumerate(eq_keep)])


def _finish_state(X):
    X = 0.5 * (X + X.conj().T)
    tr = np.trace(X).real
    if tr > 0:
        X = X / tr
    return X


def _minimize_homogeneous(C, H, tol=SOLVER_TOL) -> SdpSolution:
    """Minimize ``Tr(C rho)`` over density matrices with ``Tr(H_j rho) >= 0``.

    Opposite pairs in ``H`` are treated as equalities. Feasibility is assumed.
    """
    C = np.asarray(C, dtype=complex)
    ineq_idx, pairs = split_equalities(H)
    ineq = [H[j] for j in ineq_idx]
    eqs = [H[j] for j, _ in pairs]
    built = _assemble(C, ineq, eqs)
    res = solve_cone(built.C, built.c, built.A, built.a, built.b, tol=tol)
    rho = _finish_state(res.X)
    value = float(np.vdot(C, rho).real)
    status = Status.OPTIMAL if res.converged else Status.MAX_ITERATIONS
    mult = np.zeros(len(H))
    for t, j in enumerate(ineq_idx):
        mult[j] = res.y[built.ineq_rows[t]]
    for row, i in built.eq_rows:
        j, k = pairs[i]
        mult[j] = res.y[row]
    return SdpSolution(status, value, rho, abs(res.pobj - res.dobj), res.iterations,
                       multipliers=mult,
                       info={"pinf": res.pinf, "dinf": res.dinf, "relgap": res.relgap,
                             "dual_value": float(res.y[0])})


@dataclass
class MarginResult:
    """Outcome of a margin maximization.

    ``margin`` is ``t*``; ``weights`` are nonnegative multipliers, one per input
    gamble (border first, then strict), with ``sum w_k G_k <= margin * I``.
    """

    margin: float
    witness: np.ndarray
    weights: np.ndarray
    converged: bool
    iterations: int = 0

    def certificate(self, gambles, tol: float = 1e-8) -> Certificate | None:
        """Normalized, eigenvalue-verified certificate when ``margin <= 0``."""
        w = np.clip(self.weights, 0.0, None)
        if not np.any(w > 0):
            return None
        w = w / w.max()
        w[w < 1e-12] = 0.0
        combo = np.einsum("k,kij->ij", w, np.asarray(gambles, dtype=complex))
        top = float(np.linalg.eigvalsh(0.5 * (combo + combo.conj().T)).max())
        beta = max(0.0, -top)
        cert = Certificate(w, beta, boundary=beta <= MARGIN_TOL)
        return cert if cert.verify(gambles, tol) else None


def maximize_margin(border: Sequence[np.ndarray], strict: Sequence[np.ndarray], n: int,
                    tol: float = SOLVER_TOL) -> MarginResult:
    """``max t`` over density matrices with border ``>= 0`` and strict ``>= t``.

    Opposite pairs among the border gambles become equalities. The border
    system must be feasible; strict must be non-empty.
    """
    border = [np.asarray(g, dtype=complex) for g in border]
    strict = [np.asarray(g, dtype=complex) for g in strict]
    if not strict:
        raise ValueError("maximize_margin needs at least one strict gamble")
    ineq_idx, pairs = split_equalities(border)
    ineq = [border[j] for j in ineq_idx] + strict
    eqs = [border[j] for j, _ in pairs]
    low = min(float(np.linalg.eigvalsh(g).min()) for g in strict)
    shift = 1.0 + max(0.0, -low)
    # extra LP variable tau = t + shift >= 0 enters every strict row
    coeff = np.zeros((len(ineq), 1))
    coeff[len(ineq_idx):, 0] = -1.0
    built = _assemble(np.zeros((n, n), dtype=complex), ineq, eqs, extra_lp=(np.array([-1.0]), coeff))
    for t in range(len(ineq_idx), len(ineq)):
        built.b[built.ineq_rows[t]] = -shift
    res = solve_cone(built.C, built.c, built.A, built.a, built.b, tol=tol)
    tau = float(res.x[-1])
    margin = tau - shift
    rho = _finish_state(res.X)
    # recompute the margin at the returned state for consistency
    vals = [float(np.vdot(g, rho).real) for g in strict]
    margin = min(vals) if res.converged else margin
    w = np.zeros(len(border) + len(strict))
    nb = len(ineq_idx)
    for t, j in enumerate(ineq_idx):
        w[j] = res.y[built.ineq_rows[t]]
    for t in range(len(strict)):
        w[len(border) + t] = res.y[built.ineq_rows[nb + t]]
    for row, i in built.eq_rows:
        j, k = pairs[i]
        u = res.y[row]
        if u >= 0:
            w[j] += u
        else:
            # -u * H_j = |u| * (-H_j) and H_k is a positive multiple of -H_j
            ratio = np.linalg.norm(border[j]) / np.linalg.norm(border[k])
            w[k] += -u * ratio
    # the solver's multipliers satisfy sum w G + ... = -Z - y0 I; clip tiny negatives
    return MarginResult(margin, rho, np.clip(w, 0.0, None), res.converged, res.iterations)


@dataclass
class FeasibilityReport:
    feasible: bool
    margin: float
    witness: np.ndarray | None
    certificate: Certificate | None
    boundary: bool = False


def feasibility_margin(constraints: Sequence, strict_subset: Sequence[int] = (), n: int | None = None,
                       tol: float = MARGIN_TOL) -> FeasibilityReport:
    """Largest uniform margin for the strict constraints.

    Parameters
    ----------
    constraints : sequence of Hermitian matrices ``A_j`` meaning ``Tr(A_j rho) >= 0``
    strict_subset : indices of constraints that must hold with margin ``t``
    n : dimension, needed only when ``constraints`` is empty

    Returns
    -------
    FeasibilityReport
        ``feasible`` is True when the system holds with ``t = 0`` and, if
        strict constraints are present, ``t* > tol``. The certificate, when
        present, has one weight per constraint in input order.
    """
    cons = [as_hermitian(g) for g in constraints]
    if n is None:
        if not cons:
            raise ValueError("dimension required when there are no constraints")
        n = cons[0].shape[0]
    for g in cons:
        if g.shape[0] != n:
            raise DimensionMismatch("constraints must share one dimension")
    strict_set = set(int(i) for i in strict_subset)
    b_idx = [j for j in range(len(cons)) if j not in strict_set]
    s_idx = sorted(strict_set)
    if not cons:
        return FeasibilityReport(True, math.inf, np.eye(n, dtype=complex) / n, None)
    order = b_idx + s_idx

    def reorder(w):
        out = np.zeros(len(cons))
        for pos, j in enumerate(order):
            out[j] = w[pos]
        return out

    border = [cons[j] for j in b_idx]
    strict = [cons[j] for j in s_idx]
    witness = None
    margin = math.inf
    if border:
        # stage 1: the border system on its own, all with a common margin
        r1 = maximize_margin([], border, n)
        if not r1.converged:
            raise MaxIterations("border feasibility solve did not converge",
                                {"iterations": r1.iterations})
        if r1.margin < -tol:
            w = np.zeros(len(cons))
            for pos, j in enumerate(b_idx):
                w[j] = r1.weights[pos]
            cert = MarginResult(r1.margin, r1.witness, w, True).certificate(cons)
            if cert is None:
                raise SolverFailure("could not verify infeasibility certificate")
            return FeasibilityReport(False, r1.margin, None, cert)
        witness, margin = r1.witness, r1.margin
    if strict:
        r2 = maximize_margin(border, strict, n)
        if not r2.converged:
            raise MaxIterations("margin solve did not converge", {"iterations": r2.iterations})
        if r2.margin > tol:
            return FeasibilityReport(True, r2.margin, r2.witness, None)
        cert = MarginResult(r2.margin, r2.witness, reorder(r2.weights), True).certificate(cons)
        if cert is None:
            raise SolverFailure("could not verify infeasibility certificate",
                                {"margin": r2.margin})
        return FeasibilityReport(False, r2.margin, r2.witness, cert, boundary=cert.boundary)
    return FeasibilityReport(True, margin, witness, None)


def sdp_minimize(problem: SdpProblem, check_feasibility: bool = True, fast_path: bool = True) -> SdpSolution:
    """Minimize ``Tr(C rho)`` over density matrices satisfying the constraints.

    Diagonal instances of size at most 8 are routed to
    :func:`diagonal_fast_path`. Infeasible constraint systems return status
    ``Infeasible`` with a verified certificate.
    """
    H = problem.homogeneous()
    n = problem.dim
    if check_feasibility and H:
        rep = feasibility_margin(H, strict_subset=range(len(H)), n=n, tol=-MARGIN_TOL)
        if not rep.feasible:
            return SdpSolution(Status.INFEASIBLE, math.nan, certificate=rep.certificate,
                               info={"margin": rep.margin})
    if fast_path and n <= FAST_PATH_MAX_DIM and _all_diagonal([problem.objective] + H):
        try:
            return diagonal_fast_path(problem)
        except DimensionTooLarge:
            pass
    sol = _minimize_homogeneous(problem.objective, H)
    if sol.status is not Status.OPTIMAL:
        raise MaxIterations("semidefinite solve did not reach the requested accuracy",
                            {"iterations": sol.iterations, "gap": sol.gap, **sol.info})
    return sol


# --------------------------------------------------------------------------
# diagonal (classical) instances


def _all_diagonal(mats, tol: float = 0.0) -> bool:
    for m in mats:
        off = m - np.diag(np.diagonal(m))
        if max_abs(off) > tol:
            return False
    return True


def simplex_vertices(H_diag: np.ndarray, max_combos: int = FAST_PATH_MAX_COMBOS) -> np.ndarray:
    """Vertices of ``{p >= 0, sum p = 1, H p >= 0}`` by active-set enumeration.

    ``H_diag`` has one constraint per row. Returns an array of shape (k, n).
    """
    H_diag = np.asarray(H_diag, dtype=float).reshape(-1, H_diag.shape[-1] if np.ndim(H_diag) > 1 else 0)
    n = H_diag.shape[1]
    rows = np.vstack([np.eye(n), H_diag])
    scale = np.maximum(np.abs(rows).max(axis=1), 1e-300)
    rows = rows / scale[:, None]
    total = rows.shape[0]
    if n == 1:
        p = np.ones((1, 1))
        return p if np.all(rows @ p[0] >= -1e-10) else np.zeros((0, 1))
    ncomb = math.comb(total, n - 1)
    if ncomb > max_combos:
        raise DimensionTooLarge(f"{ncomb} active sets exceed the enumeration limit")
    combos = np.array(list(itertools.combinations(range(total), n - 1)), dtype=int)
    mats = np.empty((len(combos), n, n))
    mats[:, :n - 1, :] = rows[combos]
    mats[:, n - 1, :] = 1.0
    det = np.linalg.det(mats)
    ok = np.abs(det) > 1e-12
    mats = mats[ok]
    rhs = np.zeros((len(mats), n))
    rhs[:, -1] = 1.0
    if not len(mats):
        return np.zeros((0, n))
    pts = np.linalg.solve(mats, rhs[..., None])[..., 0]
    feas = np.all(pts @ rows.T >= -1e-10, axis=1)
    pts = pts[feas]
    pts = np.clip(pts, 0.0, None)
    pts = pts / pts.sum(axis=1, keepdims=True)
    if not len(pts):
        return pts
    # deduplicate on a 1e-10 grid
    keyed = np.round(pts / 1e-10).astype(np.int64)
    _, first = np.unique(keyed, axis=0, return_index=True)
    return pts[np.sort(first)]


def diagonal_fast_path(problem: SdpProblem, vertices: np.ndarray | None = None) -> SdpSolution:
    """Solve a diagonal instance as a linear program over the simplex.

    The optimum of a linear objective over the constraint polytope is attained
    at a vertex, so enumerating vertices gives the exact value.
    """
    n = problem.dim
    H = problem.homogeneous()
    if not _all_diagonal([problem.objective] + H):
        raise ValueError("diagonal_fast_path requires diagonal objective and constraints")
    if n > FAST_PATH_MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} exceeds {FAST_PATH_MAX_DIM}")
    if vertices is None:
        Hd = np.array([np.diagonal(h).real for h in H]).reshape(len(H), n)
        vertices = simplex_vertices(Hd)
    if not len(vertices):
        return SdpSolution(Status.INFEASIBLE, math.nan)
    g = np.diagonal(problem.objective).real
    vals = vertices @ g
    k = int(np.argmin(vals))
    rho = np.diag(vertices[k]).astype(complex)
    return SdpSolution(Status.OPTIMAL, float(vals[k]), rho, 0.0, 0, info={"method": "vertex enumeration"})


# --------------------------------------------------------------------------
# conditional previsions


def apply_map(projectors: Sequence[np.ndarray], G) -> np.ndarray:
    """``sum_j P_j G P_j`` for a family of projectors."""
    G = np.asarray(G, dtype=complex)
    out = np.zeros_like(G)
    for P in projectors:
        out = out + P @ G @ P
    return 0.5 * (out + out.conj().T)


def conditional_bisection(constraints: Sequence[np.ndarray], projectors: Sequence[np.ndarray], G,
                          tol: float = BISECTION_TOL, p_lower: float | None = None,
                          p_upper: float | None = None, minimize=None) -> float:
    """Lower conditional prevision as the root of a decreasing function.

    Finds ``mu`` with ``min_rho Tr(map(G - mu I) rho) = 0`` where
    ``map(X) = sum_j P_j X P_j``. Each evaluation is one semidefinite solve.
    The root is kept inside a verified bracket ``[lo, hi]`` that starts at
    ``[lambda_min(G), lambda_max(G)]``; new trial points are the fractional
    (Dinkelbach) update when it falls inside the bracket, else the midpoint.
    Every evaluation also yields a bracket from the event probability bounds.

    ``minimize(C)`` may be supplied to reuse a caller's solver; it must return
    ``(value, rho)``.
    """
    G = as_hermitian(G)
    n = G.shape[0]
    mG = apply_map(projectors, G)
    mI = apply_map(projectors, np.eye(n))
    if minimize is None:
        H = [np.asarray(h, dtype=complex) for h in constraints]

        def minimize(Cm):
            s = _minimize_homogeneous(Cm, H)
            if s.status is not Status.OPTIMAL:
                raise MaxIterations("semidefinite solve did not converge", {"gap": s.gap})
            return s.value, s.optimizer

    lam = np.linalg.eigvalsh(G)
    lo, hi = float(lam[0]), float(lam[-1])
    if hi - lo <= tol:
        return 0.5 * (lo + hi)

    def h(mu):
        val, rho = minimize(mG - mu * mI)
        return val, rho

    h_lo, _ = h(lo)
    h_hi, rho_hi = h(hi)
    slack = 1e-8 * max(1.0, abs(lo), abs(hi))
    if h_lo < -slack or h_hi > slack:
        raise BracketFailure(f"root not bracketed: h({lo:.6g})={h_lo:.3g}, h({hi:.6g})={h_hi:.3g}")
    pl = p_lower if p_lower and p_lower > 0 else None
    pu = p_upper if p_upper and p_upper > 0 else None

    def tighten(mu, val, rho):
        nonlocal lo, hi
        den = float(np.vdot(mI, rho).real)
        if den > 1e-12:
            ratio = float(np.vdot(mG, rho).real) / den
            hi = min(hi, ratio)
        if val >= 0:
            lo = max(lo, mu)
            if pu is not None:
                lo = max(lo, mu + val / pu)
            if pl is not None:
                hi = min(hi, mu + val / pl)
        else:
            hi = min(hi, mu)
            if pl is not None:
                lo = max(lo, mu + val / pl)
            if pu is not None:
                hi = min(hi, mu + val / pu)
        return ratio if den > 1e-12 else None

    cand = tighten(hi, h_hi, rho_hi)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        mu = cand if cand is not None and lo < cand < hi else mid
        val, rho = h(mu)
        before = hi - lo
        cand = tighten(mu, val, rho)
        if hi - lo > 0.5 * before and mu != mid:
            # fractional step did not halve the bracket; force a bisection
            val, rho = h(mid)
            cand = tighten(mid, val, rho)
        if hi < lo:
            # solver noise crossed the bounds; they agree to solver accuracy
            lo, hi = hi, lo
            break
    return 0.5 * (lo + hi)


def conditional_charnes_cooper(constraints: Sequence[np.ndarray], projectors: Sequence[np.ndarray], G) -> float:
    """Lower conditional prevision as a single homogenized semidefinite program.

    Solves ``min Tr(map(G) X)`` over ``X >= 0`` with ``Tr(map(I) X) = 1`` and
    ``Tr(H_j X) >= 0``. Used as an independent check of the bisection.
    """
    G = as_hermitian(G)
    n = G.shape[0]
    H = [np.asarray(h, dtype=complex) for h in constraints]
    mG = apply_map(projectors, G)
    mI = apply_map(projectors, np.eye(n))
    ineq_idx, pairs = split_equalities(H)
    ineq = [H[j] for j in ineq_idx]
    eqs = [H[j] for j, _ in pairs]
    keep = _independent_rows([_vec_real(mI)] + [_vec_real(e) for e in eqs], keep_first=1)
    eqs = [eqs[i - 1] for i in keep if i > 0]
    mats = [mI] + ineq + eqs
    m = len(mats)
    a = np.zeros((m, len(ineq)))
    for j in range(len(ineq)):
        a[1 + j, j] = -1.0
    b = np.zeros(m)
    b[0] = 1.0
    res = solve_cone(mG, np.zeros(len(ineq)), np.array(mats), a, b)
    if not res.converged:
        raise MaxIterations("homogenized conditional solve did not converge")
    return float(res.pobj)
