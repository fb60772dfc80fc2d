"""Acceptance checks, one test per criterion.

Each test prints a single ``criterion k: PASS|FAIL`` line with the measured
error and runtime, then asserts.
"""
import math
import time

import numpy as np
import pytest

from qdesire import linalg, optim
from qdesire.credal import (CredalSet, border, check_coherence, check_independence,
                            check_irrelevance_probe, classical_embed, condition_selective,
                            credal_from_assessments, evolve, frechet_check, natural_extension, strict)
from qdesire.game import Scenario, dutch_book_demo, run_simulation
from qdesire.optim import SdpProblem

from conftest import bell_state, random_coherent_gambles

G1 = np.array([[1, -1j], [1j, -2]])
G2 = np.array([[-2, 1j], [-1j, 1]])
HEAD = np.diag([1.0, 0.0])
FAIR = [border(np.diag([1.0, -1.0])), border(np.diag([-1.0, 1.0]))]


def report(capsys, k, ok, detail, elapsed):
    with capsys.disabled():
        print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'}  {detail}  ({elapsed:.2f} s)")


def test_criterion_01_full_ignorance(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for n in [2, 3, 4, 8] * 25:
        G = linalg.random_hermitian(n, rng)
        M = CredalSet.vacuous(n)
        w = np.linalg.eigvalsh(G)
        lo, hi = M.prevision(G)
        worst = max(worst, abs(lo - w[0]), abs(hi - w[-1]))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30
    report(capsys, 1, ok, f"100 vacuous previsions vs eigenvalues, max error {worst:.2e}", dt)
    assert ok


def test_criterion_02_classical_coin(capsys):
    t0 = time.perf_counter()
    fair = credal_from_assessments(FAIR, 2, classical=True)
    state_err = np.abs(fair.extract_state() - np.eye(2) / 2).max()
    # case 2: probability of head between 0.2 and 0.6
    interval = credal_from_assessments([border(np.diag([0.8, -0.2])), border(np.diag([-0.4, 0.6]))],
                                       2, classical=True)
    lo, hi = interval.prevision(HEAD)
    interval_err = max(abs(lo - 0.2), abs(hi - 0.6))
    rng = np.random.default_rng(202)
    gap = 0.0
    for _ in range(30):
        n = int(rng.integers(2, 7))
        p0 = rng.dirichlet(np.ones(n))
        H = rng.uniform(-1, 1, size=(int(rng.integers(0, 6)), n))
        H = H - (H @ p0)[:, None] + 0.1
        prob = SdpProblem(np.diag(rng.normal(size=n)), tuple((np.diag(h), 0.0) for h in H))
        gap = max(gap, abs(optim.diagonal_fast_path(prob).value
                           - optim.sdp_minimize(prob, fast_path=False).value))
    sdp_lo = interval.as_quantum().lower_prevision(HEAD)
    gap = max(gap, abs(sdp_lo - lo))
    dt = time.perf_counter() - t0
    ok = fair.is_maximal() and state_err <= 1e-8 and interval_err <= 1e-7 and gap <= 1e-6
    report(capsys, 2, ok, f"fair state error {state_err:.1e}, interval [{lo:.9f}, {hi:.9f}], "
                          f"fast path vs SDP {gap:.1e}", dt)
    assert ok


def test_criterion_03_incoherence(capsys):
    t0 = time.perf_counter()
    rep = check_coherence([strict(G1), strict(G2)], 2)
    cert = rep.certificate
    verified = cert is not None and cert.verify([G1, G2]) and cert.beta >= 1 - 1e-8
    top = np.linalg.eigvalsh(cert.combination([G1, G2])).max()
    rep2 = check_coherence([strict(np.diag([2.0, -1.0])), strict(np.diag([-2.0, 1.0]))], 2)
    dt = time.perf_counter() - t0
    ok = (not rep.coherent) and verified and top <= -cert.beta + 1e-8 and \
        (not rep2.coherent) and rep2.margin <= 1e-9 and dt < 1
    report(capsys, 3, ok, f"case 4 alpha={np.round(cert.alpha, 9).tolist()} beta={cert.beta:.9f}; "
                          f"classical strict margin {rep2.margin:.1e}", dt)
    assert ok


def test_criterion_04_conditioning(capsys):
    t0 = time.perf_counter()
    fair = credal_from_assessments(FAIR, 2, classical=True)
    head_err = np.abs(condition_selective(fair, HEAD).extract_state() - HEAD).max()
    orth = condition_selective(CredalSet.singleton(HEAD), np.diag([0.0, 1.0]))
    rng = np.random.default_rng(404)
    worst = 0.0
    for k in range(50):
        n = 2 + k % 2
        pts = [linalg.random_density(n, rng) for _ in range(n * n + 1)]
        V = CredalSet.from_extreme_points(pts)
        H = V.to_hrep()
        u = linalg.haar_unitary(n, rng)
        P = sum(np.outer(u[:, j], u[:, j].conj()) for j in range(n - 1))
        G = linalg.random_hermitian(n, rng)
        worst = max(worst, abs(condition_selective(H, P).lower_prevision(G)
                               - condition_selective(V, P).lower_prevision(G)))
    dt = time.perf_counter() - t0
    ok = head_err <= 1e-8 and orth.is_vacuous_hrep and worst <= 1e-6
    report(capsys, 4, ok, f"head error {head_err:.1e}, orthogonal event vacuous={orth.is_vacuous_hrep}, "
                          f"bisection vs Lueders max {worst:.1e} on 50 instances", dt)
    assert ok


def test_criterion_05_evolution(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    worst = 0.0
    for k in range(50):
        n = 2 + k % 3
        gambles, _ = random_coherent_gambles(rng, n)
        M = credal_from_assessments([strict(g) for g in gambles], n)
        U = linalg.haar_unitary(n, rng)
        G = linalg.random_hermitian(n, rng)
        worst = max(worst, abs(evolve(M, U).lower_prevision(U @ G @ U.conj().T) - M.lower_prevision(G)))
    vac = all(evolve(CredalSet.vacuous(n), linalg.haar_unitary(n, rng)).is_vacuous_hrep for n in (2, 3, 4))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and vac
    report(capsys, 5, ok, f"invariance max error {worst:.1e} over 50 unitaries, vacuous preserved={vac}", dt)
    assert ok


def test_criterion_06_composite(capsys):
    t0 = time.perf_counter()
    tr_err = np.abs(linalg.partial_trace(bell_state(), (2, 2), "B") - np.eye(2) / 2).max()
    rep = frechet_check(bell_state(), (2, 2))
    eig_err = max(abs(rep.min_eigenvalues[0] + 0.5), abs(rep.min_eigenvalues[1] + 0.5))
    rng = np.random.default_rng(606)
    products = all(frechet_check(np.kron(linalg.random_density(2, rng), linalg.random_density(3, rng)),
                                 (2, 3)).all_pass for _ in range(20))
    E = natural_extension(classical_embed([0.7, 0.3]), classical_embed([0.6, 0.4]))
    lo, hi = E.prevision(np.diag([1.0, 0.0, 0.0, 0.0]))
    box_err = max(abs(lo - 0.3), abs(hi - 0.6))
    dt = time.perf_counter() - t0
    ok = tr_err <= 1e-12 and eig_err <= 1e-9 and not rep.passed[0] and not rep.passed[1] \
        and products and box_err <= 1e-9
    report(capsys, 6, ok, f"Tr_B(Bell) error {tr_err:.1e}, min eigenvalues {rep.min_eigenvalues[:2]}, "
                          f"products pass={products}, conjunction [{lo:.10f}, {hi:.10f}]", dt)
    assert ok


def test_criterion_07_natural_extension(capsys):
    t0 = time.perf_counter()
    s = 1 / math.sqrt(2)
    listed = [0.5 * np.diag([1, 0, 0, 1]).astype(complex), bell_state(),
              0.5 * np.array([[1, 0, 0, 1j], [0, 0, 0, 0], [0, 0, 0, 0], [-1j, 0, 0, 1]]),
              0.5 * np.array([[1, 0, 0, s * (1 - 1j)], [0, 0, 0, 0], [0, 0, 0, 0], [s * (1 + 1j), 0, 0, 1]])]
    half = np.eye(2) / 2
    MA, MB = CredalSet.singleton(half), CredalSet.singleton(half)
    E = natural_extension(MA, MB)
    members = [E.contains(r, 1e-8) for r in listed]
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(10):
        g = linalg.random_hermitian(2, rng)
        for side, op in (("A", MA), ("B", MB)):
            G = linalg.embed(g, (2, 2), side)
            worst = max(worst, abs(E.lower_prevision(G) - op.lower_prevision(g)),
                        abs(E.upper_prevision(G) - op.upper_prevision(g)))
    dt = time.perf_counter() - t0
    ok = all(members) and worst <= 1e-6
    report(capsys, 7, ok, f"members {members}, marginal prevision max error {worst:.1e}", dt)
    assert ok


def test_criterion_08_independence(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    prods = [np.kron(linalg.random_density(2, rng), linalg.random_density(2, rng)) for _ in range(5)]
    accepted = all(check_independence(r, (2, 2)).independent for r in prods)
    bell = check_independence(bell_state(), (2, 2))
    worst = 0.0
    for k, r in enumerate(prods):
        for direction in ("AtoB", "BtoA"):
            rep = check_irrelevance_probe(CredalSet.singleton(r), (2, 2), direction, n_random=20, seed=k)
            worst = max(worst, rep.max_discrepancy)
    dt = time.perf_counter() - t0
    ok = accepted and not bell.independent and abs(bell.residual - 0.5) <= 1e-9 and worst <= 1e-6
    report(capsys, 8, ok, f"products accepted={accepted}, Bell residual {bell.residual:.12f}, "
                          f"irrelevance discrepancy {worst:.1e}", dt)
    assert ok


def test_criterion_09_property_suite(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    fails = {k: 0 for k in ("conjugacy", "shift", "homogeneity", "superadditivity", "dominance", "round trip")}
    for k in range(50):
        n = 2 + k % 3
        gambles, _ = random_coherent_gambles(rng, n)
        M = credal_from_assessments([strict(g) for g in gambles], n)
        G, F = linalg.random_hermitian(n, rng), linalg.random_hermitian(n, rng)
        c, nu = rng.normal(), rng.uniform(0.1, 5)
        lo, up = M.lower_prevision(G), M.upper_prevision(G)
        fails["conjugacy"] += not (up == -M.lower_prevision(-G) and lo <= up + 1e-9)
        fails["shift"] += abs(M.lower_prevision(G + c * np.eye(n)) - lo - c) > 1e-7
        fails["homogeneity"] += abs(M.lower_prevision(nu * G) - nu * lo) > 1e-7 * max(1, abs(nu * lo))
        fails["superadditivity"] += M.lower_prevision(G + F) < lo + M.lower_prevision(F) - 1e-7
        w = np.linalg.eigvalsh(G)
        fails["dominance"] += not (w[0] - 1e-7 <= lo <= up <= w[-1] + 1e-7)
        # rebuild a classical polytope from its own dual description
        V = classical_embed(rng.dirichlet(np.ones(n), size=n + 2))
        H = V.to_hrep()
        for _ in range(100):
            g = np.diag(rng.normal(size=n))
            lv = V.lower_prevision(g)
            if abs(lv) > 1e-9 and V.is_desirable(g) != H.is_desirable(g):
                fails["round trip"] += 1
                break
    dt = time.perf_counter() - t0
    ok = not any(fails.values())
    report(capsys, 9, ok, "failures per property over 50 sets: " + ", ".join(f"{k}={v}" for k, v in fails.items()), dt)
    assert ok


def test_criterion_10_simulator(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1010)
    rho = linalg.random_density(3, rng)
    gs = tuple(linalg.random_hermitian(3, rng) for _ in range(3))
    expected = np.array([np.trace(g.conj().T @ rho).real for g in gs])
    inside = 0
    for seed in range(20):
        led = run_simulation(Scenario(rho, gs, 10_000, seed=seed))
        inside += bool(np.all(np.abs(led.means - expected) <= led.deviation_bounds(4.0)))
    demo = dutch_book_demo([strict(G1), strict(G2)], Scenario(np.eye(2) / 2, (), 10_000, seed=1))
    pay_err = np.abs(demo.outcome_payoffs + 1.0).max()
    dt = time.perf_counter() - t0
    ok = inside == 20 and pay_err <= 1e-8 and demo.sure_loss and dt < 30
    report(capsys, 10, ok, f"{inside}/20 seeds within 4 sigma/sqrt(N); Dutch book payoffs "
                           f"{np.round(demo.outcome_payoffs, 12).tolist()}", dt)
    assert ok
