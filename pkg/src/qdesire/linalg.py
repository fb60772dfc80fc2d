"""Hermitian matrix algebra: validation, eigendecomposition, definiteness,
Pauli coordinates, tensor products, partial traces and unitary conjugation.

Hermitian matrices are plain ``complex128`` numpy arrays. Validated arrays are
returned read-only so they can be shared freely.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DimensionMismatch, NoConvergence, NonFinite, NotHermitian, NotSquare

TOL_HERM = 1e-12
TOL_PSD_REL = 1e-10
JACOBI_MAX_SWEEPS = 100
JACOBI_REL_THRESHOLD = 1e-13

SIGMA_I = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


def max_abs(a) -> float:
    """Largest entry modulus (the entrywise infinity norm)."""
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def psd_tolerance(a) -> float:
    return TOL_PSD_REL * max(1.0, max_abs(a))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def validate_hermitian(raw, tol: float = TOL_HERM) -> np.ndarray:
    """Check a square grid is Hermitian and return its symmetrized copy.

    The result is ``(A + A^H) / 2`` with exactly real diagonal, as a read-only
    ``complex128`` array.

    Raises
    ------
    NotSquare, NonFinite, NotHermitian
    """
    try:
        a = np.array(raw, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise NotSquare(f"not a numeric matrix: {exc}") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or infinite entries")
    dev = max_abs(a - a.conj().T)
    if dev > tol:
        raise NotHermitian(f"deviation from Hermitian {dev:.3g} exceeds tol_herm={tol:g}")
    h = 0.5 * (a + a.conj().T)
    h[np.diag_indices_from(h)] = h.diagonal().real
    return _frozen(h)


def as_hermitian(a) -> np.ndarray:
    """Validate unless ``a`` is already a read-only complex square array."""
    if isinstance(a, np.ndarray) and a.dtype == complex and not a.flags.writeable \
            and a.ndim == 2 and a.shape[0] == a.shape[1]:
        return a
    return validate_hermitian(a)


class Eigendecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig(a) -> Eigendecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues come back ascending. Each eigenvector column is rescaled by a
    phase so that its first non-negligible component is real and positive.
    """
    a = as_hermitian(a)
    n = a.shape[0]
    work = np.array(a, dtype=complex, order="C")
    v = np.eye(n, dtype=complex)
    scale = max_abs(a)
    if scale > 0.0:
        sweeps = _backend.jacobi_sweeps(work, v, JACOBI_REL_THRESHOLD * scale, JACOBI_MAX_SWEEPS)
        if sweeps < 0:
            raise NoConvergence(f"Jacobi diagonalization did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    lam = work.diagonal().real.copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    for k in range(n):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)[0]
        col *= abs(col[idx]) / col[idx]
    return Eigendecomposition(_frozen(lam), _frozen(v))


def eigvals(a) -> np.ndarray:
    return eig(a).eigenvalues


class Definiteness(enum.Enum):
    PD = "PD"
    PSDNZ = "PSDNZ"
    ZERO = "Zero"
    INDEFINITE = "Indefinite"
    NSDNZ = "NSDNZ"
    ND = "ND"


def classify(a) -> Definiteness:
    """Definiteness label from eigenvalue signs with a scale-relative cutoff."""
    a = as_hermitian(a)
    tol = psd_tolerance(a)
    if max_abs(a) <= tol:
        return Definiteness.ZERO
    lam = eig(a).eigenvalues
    pos = lam > tol
    neg = lam < -tol
    if not neg.any():
        return Definiteness.PD if pos.all() else Definiteness.PSDNZ
    if not pos.any():
        return Definiteness.ND if neg.all() else Definiteness.NSDNZ
    return Definiteness.INDEFINITE


def is_psd(a) -> bool:
    """True for PSD matrices including zero."""
    return classify(a) in (Definiteness.PD, Definiteness.PSDNZ, Definiteness.ZERO)


def is_psdnz(a) -> bool:
    return classify(a) in (Definiteness.PD, Definiteness.PSDNZ)


def pauli_coords(a) -> tuple[float, float, float, float]:
    """Coordinates ``(v, x, y, z)`` with ``A = v I + x X + y Y + z Z``."""
    a = as_hermitian(a)
    if a.shape != (2, 2):
        raise DimensionMismatch(f"Pauli coordinates need a 2x2 matrix, got {a.shape}")
    v = 0.5 * (a[0, 0].real + a[1, 1].real)
    z = 0.5 * (a[0, 0].real - a[1, 1].real)
    return float(v), float(a[1, 0].real), float(a[1, 0].imag), float(z)


def pauli_build(v: float, x: float, y: float, z: float) -> np.ndarray:
    return validate_hermitian([[v + z, complex(x, -y)], [complex(x, y), v - z]])


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the first factor's index major."""
    return _frozen(np.kron(as_hermitian(a), as_hermitian(b)))


def _split(m: np.ndarray, dims) -> tuple[int, int]:
    n, k = int(dims[0]), int(dims[1])
    if n < 1 or k < 1 or n * k != m.shape[0]:
        raise DimensionMismatch(f"dims {tuple(dims)} do not factor a {m.shape[0]}x{m.shape[0]} matrix")
    return n, k


def partial_trace(m, dims, over: str = "B") -> np.ndarray:
    """Trace out subsystem ``over`` ('A' or 'B') of a bipartite matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    n, k = _split(m, dims)
    t = m.reshape(n, k, n, k)
    if over == "B":
        r = np.einsum("ajbj->ab", t)
    elif over == "A":
        r = np.einsum("iaib->ab", t)
    else:
        raise ValueError("over must be 'A' or 'B'")
    r = 0.5 * (r + r.conj().T)
    return _frozen(r)


def embed(g, dims, side: str = "A") -> np.ndarray:
    """Lift a gamble on one subsystem to the composite: ``G⊗I`` or ``I⊗G``."""
    n, k = int(dims[0]), int(dims[1])
    g = as_hermitian(g)
    if side == "A":
        if g.shape[0] != n:
            raise DimensionMismatch(f"gamble of size {g.shape[0]} does not act on A (dim {n})")
        return tensor(g, np.eye(k))
    if side == "B":
        if g.shape[0] != k:
            raise DimensionMismatch(f"gamble of size {g.shape[0]} does not act on B (dim {k})")
        return tensor(np.eye(n), g)
    raise ValueError("side must be 'A' or 'B'")


@dataclass(frozen=True)
class UnitaryMap:
    """A unitary, or with ``antiunitary=True`` the map ``A -> U conj(A) U^H``."""

    matrix: np.ndarray
    antiunitary: bool = False

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise NotSquare(f"unitary must be square, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise NonFinite("unitary has NaN or infinite entries")
        dev = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
        if dev > 1e-10:
            raise ValueError(f"matrix is not unitary (deviation {dev:.3g})")
        object.__setattr__(self, "matrix", _frozen(u))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def conjugate(u: UnitaryMap, a, direction: str = "gamble") -> np.ndarray:
    """Transport a gamble backwards (``U^H A U``) or a state forwards (``U A U^H``).

    For an antiunitary map the state goes to ``U conj(A) U^H`` and the gamble
    to ``conj(U^H A U)``, so that payoffs are preserved.
    """
    if not isinstance(u, UnitaryMap):
        u = UnitaryMap(u)
    a = as_hermitian(a)
    if a.shape[0] != u.dim:
        raise DimensionMismatch(f"unitary of size {u.dim} applied to matrix of size {a.shape[0]}")
    um = u.matrix
    if direction == "gamble":
        r = um.conj().T @ a @ um
        if u.antiunitary:
            r = r.conj()
    elif direction == "state":
        r = um @ (a.conj() if u.antiunitary else a) @ um.conj().T
    else:
        raise ValueError("direction must be 'gamble' or 'state'")
    return validate_hermitian(0.5 * (r + r.conj().T))


def inner(a, b) -> float:
    """Real trace inner product ``Re Tr(A^H B)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    val = np.vdot(a, b)  # sum conj(a_ij) b_ij = Tr(A^H B)
    scale = max(1.0, abs(val))
    assert abs(val.imag) <= 1e-10 * scale, "inner product of Hermitian matrices should be real"
    return float(val.real)


def gell_mann_basis(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis of size n*n, identity direction first.

    Order: ``I/sqrt(n)``, then for each pair j<k the symmetric and
    antisymmetric off-diagonal elements, then the traceless diagonal ones.
    """
    basis = [np.eye(n, dtype=complex) / np.sqrt(n)]
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            basis.append(s)
            t = np.zeros((n, n), dtype=complex)
            t[j, k] = -1j / np.sqrt(2)
            t[k, j] = 1j / np.sqrt(2)
            basis.append(t)
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        basis.append(np.diag(d / np.sqrt(l * (l + 1))).astype(complex))
    out = np.array(basis)
    out.setflags(write=False)
    return out


def hermitian_coords(a, basis=None) -> np.ndarray:
    """Real coordinates of Hermitian ``a`` in an orthonormal Hermitian basis."""
    a = np.asarray(a, dtype=complex)
    if basis is None:
        basis = gell_mann_basis(a.shape[0])
    return np.einsum("kij,ji->k", basis, a).real


def from_coords(c, basis) -> np.ndarray:
    return validate_hermitian(np.einsum("k,kij->ij", np.asarray(c, dtype=float), basis))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return validate_hermitian(scale * 0.5 * (z + z.conj().T))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre factor of the given rank."""
    rank = n if rank is None else rank
    z = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    r = z @ z.conj().T
    r = r / np.trace(r).real
    return validate_hermitian(0.5 * (r + r.conj().T))
