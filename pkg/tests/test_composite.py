import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdesire import linalg
from qdesire.credal import (CredalSet, check_independence, check_irrelevance_probe, classical_embed,
                            credal_from_assessments, frechet_check, marginal, natural_extension,
                            strict)
from qdesire.credal.composite import MarginalCredalSet
from qdesire.measurement import canonical_measurement

from conftest import bell_state, random_coherent_gambles

seeds = st.integers(0, 2**32 - 1)
S = 1 / np.sqrt(2)
LISTED = [
    0.5 * np.diag([1, 0, 0, 1]).astype(complex),
    bell_state(),
    0.5 * np.array([[1, 0, 0, 1j], [0, 0, 0, 0], [0, 0, 0, 0], [-1j, 0, 0, 1]]),
    0.5 * np.array([[1, 0, 0, S * (1 - 1j)], [0, 0, 0, 0], [0, 0, 0, 0], [S * (1 + 1j), 0, 0, 1]]),
]


def test_bell_marginal():
    M = marginal(CredalSet.singleton(bell_state()), (2, 2), "A")
    assert np.allclose(M.extract_state(), np.eye(2) / 2, atol=1e-12)


def test_frechet_on_bell():
    rep = frechet_check(bell_state(), (2, 2))
    assert rep.passed == (False, False, True, True)
    assert rep.min_eigenvalues[0] == pytest.approx(-0.5, abs=1e-9)
    assert rep.min_eigenvalues[1] == pytest.approx(-0.5, abs=1e-9)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_frechet_passes_on_products(seed, n, m):
    rng = np.random.default_rng(seed)
    rho = np.kron(linalg.random_density(n, rng), linalg.random_density(m, rng))
    assert frechet_check(rho, (n, m)).all_pass


def test_classical_frechet_box():
    MA = classical_embed([0.7, 0.3])
    MB = classical_embed([0.6, 0.4])
    E = natural_extension(MA, MB)
    both = np.diag([1.0, 0.0, 0.0, 0.0])
    lo, hi = E.prevision(both)
    assert lo == pytest.approx(0.3, abs=1e-9)
    assert hi == pytest.approx(0.6, abs=1e-9)


def test_two_coins_extension_members():
    half = np.eye(2) / 2
    E = natural_extension(CredalSet.singleton(half), CredalSet.singleton(half))
    for rho in LISTED:
        assert E.contains(rho, 1e-8)
    assert not E.contains(np.diag([1.0, 0, 0, 0]), 1e-8)
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = linalg.random_hermitian(2, rng)
        expected = np.trace(g @ half).real
        for side in "AB":
            lo, hi = E.prevision(linalg.embed(g, (2, 2), side))
            assert lo == pytest.approx(expected, abs=1e-6)
            assert hi == pytest.approx(expected, abs=1e-6)


@settings(max_examples=10)
@given(seeds)
def test_extension_marginals_match_operands(seed):
    rng = np.random.default_rng(seed)
    ga, _ = random_coherent_gambles(rng, 2)
    gb, _ = random_coherent_gambles(rng, 2)
    MA = credal_from_assessments([strict(g) for g in ga], 2)
    MB = credal_from_assessments([strict(g) for g in gb], 2)
    E = natural_extension(MA, MB)
    g = linalg.random_hermitian(2, rng)
    assert E.lower_prevision(linalg.embed(g, (2, 2), "A")) == pytest.approx(MA.lower_prevision(g), abs=1e-6)
    assert E.lower_prevision(linalg.embed(g, (2, 2), "B")) == pytest.approx(MB.lower_prevision(g), abs=1e-6)


@settings(max_examples=10)
@given(seeds)
def test_implicit_marginal_is_lifted_prevision(seed):
    rng = np.random.default_rng(seed)
    gs, _ = random_coherent_gambles(rng, 4)
    M = credal_from_assessments([strict(g) for g in gs], 4)
    Mm = marginal(M, (2, 2), "B")
    assert isinstance(Mm, MarginalCredalSet)
    g = linalg.random_hermitian(2, rng)
    assert Mm.lower_prevision(g) == M.lower_prevision(np.kron(np.eye(2), g))


def test_marginal_membership_of_implicit_set():
    half = np.eye(2) / 2
    E = natural_extension(CredalSet.singleton(half), CredalSet.singleton(np.diag([0.2, 0.8])))
    Mm = marginal(E, (2, 2), "B")
    assert Mm.membership(np.diag([0.2, 0.8]))
    assert not Mm.membership(half)
    assert Mm.distance(half) == pytest.approx(0.3 * np.sqrt(2), abs=1e-6)


@given(seeds)
def test_marginal_of_maximal_is_maximal(seed):
    rng = np.random.default_rng(seed)
    M = CredalSet.singleton(linalg.random_density(6, rng))
    assert marginal(M, (2, 3), "A").is_maximal()
    assert marginal(M, (2, 3), "B").is_maximal()


def test_independence():
    prod = np.kron(np.diag([0.2, 0.8]), np.diag([0.6, 0.4]))
    assert check_independence(prod, (2, 2)).independent
    rep = check_independence(bell_state(), (2, 2))
    assert not rep.independent
    assert rep.residual == pytest.approx(0.5, abs=1e-9)


def test_probe_irrelevance_product_state():
    rng = np.random.default_rng(11)
    rho = np.kron(linalg.random_density(2, rng), linalg.random_density(2, rng))
    rep = check_irrelevance_probe(CredalSet.singleton(rho), (2, 2), "AtoB", n_random=20, seed=1)
    assert rep.holds and rep.max_discrepancy <= 1e-6
    assert rep.tested == 40


def test_probe_irrelevance_bell_state():
    M = CredalSet.singleton(bell_state())
    z_only = check_irrelevance_probe(M, (2, 2), "AtoB", probes=[linalg.SIGMA_Z], n_random=0,
                                     measurements=[canonical_measurement(2)])
    assert z_only.max_discrepancy == pytest.approx(1.0, abs=1e-9)
    x_only = check_irrelevance_probe(M, (2, 2), "AtoB", probes=[linalg.SIGMA_X], n_random=0,
                                     measurements=[canonical_measurement(2)])
    assert x_only.max_discrepancy == pytest.approx(0.0, abs=1e-9)
