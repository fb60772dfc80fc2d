import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog, minimize_scalar

from qdesire import linalg, optim
from qdesire.optim import SdpProblem, Status

seeds = st.integers(0, 2**32 - 1)
G1 = np.array([[1, -1j], [1j, -2]])
G2 = np.array([[-2, 1j], [-1j, 1]])


def lp_oracle(g, H):
    """Minimum of g.p over the simplex cut by H p >= 0, via scipy's LP solver."""
    n = len(g)
    res = linprog(g, A_ub=-np.atleast_2d(H) if len(H) else None, b_ub=np.zeros(len(H)) if len(H) else None,
                  A_eq=np.ones((1, n)), b_eq=[1.0], bounds=[(0, None)] * n, method="highs")
    return res.fun if res.status == 0 else None


def one_constraint_dual(G, A):
    """max over lam >= 0 of lambda_min(G - lam A): the Lagrangian dual of
    min Tr(G rho) s.t. Tr(A rho) >= 0, concave in lam."""
    f = lambda lam: -np.linalg.eigvalsh(G - lam * A)[0]
    hi = 1.0
    while f(hi) < f(hi / 2) and hi < 1e6:
        hi *= 2
    r = minimize_scalar(f, bounds=(0.0, 2 * hi), method="bounded", options={"xatol": 1e-12})
    return max(-r.fun, -f(0.0))


def test_vacuous_g2_is_eigenvalue():
    sol = optim.sdp_minimize(SdpProblem(G1))
    assert sol.status is Status.OPTIMAL
    assert sol.value == pytest.approx(-(1 + math.sqrt(13)) / 2, abs=1e-9)
    assert np.trace(sol.optimizer).real == pytest.approx(1.0)


@settings(max_examples=25)
@given(seeds, st.sampled_from([2, 3, 4, 8]))
def test_vacuous_minimum_matches_lapack(seed, n):
    G = linalg.random_hermitian(n, np.random.default_rng(seed))
    sol = optim.sdp_minimize(SdpProblem(G))
    assert sol.value == pytest.approx(np.linalg.eigvalsh(G)[0], abs=1e-7)


@settings(max_examples=25)
@given(seeds, st.integers(2, 5))
def test_one_constraint_matches_lagrangian_dual(seed, n):
    rng = np.random.default_rng(seed)
    G = linalg.random_hermitian(n, rng)
    rho0 = linalg.random_density(n, rng)
    A = linalg.random_hermitian(n, rng)
    A = A - (np.trace(A @ rho0).real - 0.1) * np.eye(n)  # rho0 satisfies Tr(A rho0) = 0.1
    sol = optim.sdp_minimize(SdpProblem(G, ((A, 0.0),)))
    assert sol.value == pytest.approx(one_constraint_dual(G, A), abs=1e-6)
    assert np.trace(A @ sol.optimizer).real >= -1e-8


@given(seeds, st.integers(2, 6), st.integers(0, 4))
def test_diagonal_fast_path_matches_lp(seed, n, m):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=n)
    p0 = rng.dirichlet(np.ones(n))
    H = rng.normal(size=(m, n))
    H = H - (H @ p0)[:, None] + 0.05  # p0 strictly feasible
    prob = SdpProblem(np.diag(g), tuple((np.diag(h), 0.0) for h in H))
    fast = optim.diagonal_fast_path(prob)
    assert fast.value == pytest.approx(lp_oracle(g, H), abs=1e-9)
    sdp = optim.sdp_minimize(prob, fast_path=False)
    assert sdp.value == pytest.approx(fast.value, abs=1e-6)


def test_simplex_vertices_interval():
    # P(head) in [0.2, 0.6]
    H = np.array([[0.8, -0.2], [-0.4, 0.6]])
    v = optim.simplex_vertices(H)
    assert sorted(map(tuple, np.round(v, 12))) == [(0.2, 0.8), (0.6, 0.4)]


def test_case4_infeasible_with_certificate():
    rep = optim.feasibility_margin([G1, G2], strict_subset=[0, 1])
    assert not rep.feasible
    cert = rep.certificate
    assert np.allclose(cert.alpha, [1.0, 1.0], atol=1e-7)
    assert cert.beta == pytest.approx(1.0, abs=1e-8)
    assert cert.verify([G1, G2])
    assert np.allclose(cert.combination([G1, G2]), -np.eye(2), atol=1e-7)


def test_classical_strict_pair_is_boundary():
    f, h = np.diag([2.0, -1.0]), np.diag([-2.0, 1.0])
    rep = optim.feasibility_margin([f, h], strict_subset=[0, 1])
    assert not rep.feasible
    assert rep.margin <= 1e-9
    assert rep.certificate.boundary and rep.certificate.beta == 0.0
    assert np.allclose(rep.certificate.alpha, [1.0, 1.0], atol=1e-7)
    # the only state balancing both gambles is diag(1/3, 2/3)
    assert np.allclose(rep.witness, np.diag([1 / 3, 2 / 3]), atol=1e-6)


def test_border_infeasible_system():
    # Tr(rho diag(-1,-1)) >= 0 is impossible
    rep = optim.feasibility_margin([-np.eye(2)])
    assert not rep.feasible
    assert rep.certificate.beta == pytest.approx(1.0)


def test_no_constraints_margin_is_infinite():
    rep = optim.feasibility_margin([], n=3)
    assert rep.feasible and math.isinf(rep.margin)


def test_infeasible_sdp_reports_status():
    sol = optim.sdp_minimize(SdpProblem(np.eye(2), ((G1, 0.0), (G2, 0.0))))
    assert sol.status is Status.INFEASIBLE
    assert sol.certificate.verify([G1, G2])


@given(seeds, st.integers(2, 4))
def test_certificates_verify_by_eigenvalues(seed, n):
    # gambles whose nonnegative combination is negative definite
    rng = np.random.default_rng(seed)
    k = 3
    gs = [linalg.random_hermitian(n, rng) for _ in range(k - 1)]
    w = rng.uniform(0.5, 2.0, size=k)
    last = (-np.eye(n) - sum(wi * g for wi, g in zip(w, gs))) / w[-1]
    gs.append(0.5 * (last + last.conj().T))
    rep = optim.feasibility_margin(gs, strict_subset=range(k))
    assert not rep.feasible
    top = np.linalg.eigvalsh(rep.certificate.combination(gs)).max()
    assert top <= -rep.certificate.beta + 1e-8
    assert rep.certificate.beta > 0


def test_split_equalities_detects_opposite_pairs():
    a = np.diag([1.0, -1.0])
    ineq, pairs = optim.split_equalities([a, np.eye(2), -2 * a])
    assert ineq == [1]
    assert pairs == [(0, 2)]


@settings(max_examples=15)
@given(seeds, st.integers(2, 4))
def test_conditional_oracles_agree(seed, n):
    rng = np.random.default_rng(seed)
    rho0 = linalg.random_density(n, rng)
    A = linalg.random_hermitian(n, rng)
    A = A - (np.trace(A @ rho0).real - 0.2) * np.eye(n)
    P = [np.diag([1.0] * (n - 1) + [0.0]).astype(complex)]
    G = linalg.random_hermitian(n, rng)
    a = optim.conditional_bisection([A], P, G)
    b = optim.conditional_charnes_cooper([A], P, G)
    assert a == pytest.approx(b, abs=1e-6)


def test_conditional_vacuous_is_block_eigenvalue():
    G = np.array([[1, 2, 0], [2, -1, 5], [0, 5, 3]], dtype=complex)
    P = [np.diag([1.0, 1.0, 0.0]).astype(complex)]
    expected = np.linalg.eigvalsh(G[:2, :2])[0]
    assert optim.conditional_bisection([], P, G) == pytest.approx(expected, abs=1e-8)
    assert optim.conditional_charnes_cooper([], P, G) == pytest.approx(expected, abs=1e-8)


def grid_minimum(g, H, step=1e-3):
    """Brute force over a regular grid on the 3-outcome simplex."""
    k = int(round(1 / step))
    i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
    mask = i + j <= k
    p = np.stack([i[mask], j[mask], k - i[mask] - j[mask]], axis=1) / k
    ok = np.all(p @ H.T >= -1e-12, axis=1) if len(H) else np.ones(len(p), bool)
    return (p[ok] @ g).min() if ok.any() else None


@settings(max_examples=20)
@given(seeds, st.integers(0, 4))
def test_fast_path_matches_grid_search(seed, m):
    rng = np.random.default_rng(seed)
    g = rng.uniform(-1, 1, size=3)
    p0 = rng.dirichlet(np.ones(3))
    H = rng.uniform(-1, 1, size=(m, 3))
    H = H - (H @ p0)[:, None] + 0.2
    prob = SdpProblem(np.diag(g), tuple((np.diag(h), 0.0) for h in H))
    grid = grid_minimum(g, H)
    assert grid is not None
    fast = optim.diagonal_fast_path(prob).value
    assert fast <= grid + 1e-12
    # Grid points near the optimal vertex may be infeasible; walking towards p0
    # (slack 0.2) finds a feasible grid point within step * (1 + |H| * diam / 0.2).
    step = 1e-3
    reach = step * (1 + 3 * (np.abs(H).sum(axis=1).max() if m else 0) * np.sqrt(2) / 0.2)
    assert grid - fast <= (g.max() - g.min()) * reach


def test_bisection_function_decreasing():
    rng = np.random.default_rng(5)
    G = linalg.random_hermitian(3, rng)
    P = [np.diag([1.0, 1.0, 0.0]).astype(complex)]
    mG, mI = optim.apply_map(P, G), optim.apply_map(P, np.eye(3))
    # the event has probability at least 1/2 on this set
    cons = ((P[0], 0.5),)
    mus = np.linspace(-4, 4, 9)
    vals = [optim.sdp_minimize(SdpProblem(mG - mu * mI, cons)).value for mu in mus]
    assert np.all(np.diff(vals) < 0)
