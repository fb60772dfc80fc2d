import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdesire import _fallback, linalg
from qdesire.credal import border, strict
from qdesire.errors import NotIncoherent, RankNotOne
from qdesire.game import Scenario, dutch_book_demo, run_simulation
from qdesire.measurement import make_measurement

G1 = np.array([[1, -1j], [1j, -2]])
G2 = np.array([[-2, 1j], [-1j, 1]])


def test_bernoulli_coin():
    rho = np.diag([0.2, 0.8])
    led = run_simulation(Scenario(rho, (np.diag([1.0, 0.0]),), 10_000, seed=1))
    assert led.expectations[0] == pytest.approx(0.2)
    assert led.sigmas[0] == pytest.approx(0.4)
    assert abs(led.means[0] - 0.2) <= 4 * 0.4 / 100


def test_inverse_cdf_sampling_rule():
    rho = np.diag([0.2, 0.8])
    s = Scenario(rho, (np.diag([1.0, 0.0]),), 1000, seed=42)
    led = run_simulation(s)
    u = np.random.Generator(np.random.Philox(42)).random(1000)
    assert np.array_equal(led.outcomes, (u >= 0.2).astype(led.outcomes.dtype))
    assert led.totals[0] == np.sum(u < 0.2)


@settings(max_examples=20)
@given(st.integers(0, 2**64 - 1), st.integers(2, 4))
def test_empirical_mean_within_four_sigma(seed, n):
    rng = np.random.default_rng(seed % 2**32)
    rho = linalg.random_density(n, rng)
    gs = tuple(linalg.random_hermitian(n, rng) for _ in range(2))
    led = run_simulation(Scenario(rho, gs, 10_000, seed=seed))
    expected = np.array([np.trace(g @ rho).real for g in gs])
    assert np.allclose(led.expectations, expected)
    assert np.all(np.abs(led.means - expected) <= led.deviation_bounds(4.0) + 1e-12)


def test_reproducible():
    rho = linalg.random_density(3, np.random.default_rng(0))
    s = Scenario(rho, (np.eye(3), np.diag([1.0, -1.0, 0.0])), 5000, seed=9)
    a, b = run_simulation(s), run_simulation(s)
    assert a.outcomes.tobytes() == b.outcomes.tobytes()
    assert a.totals.tobytes() == b.totals.tobytes()


def test_compiled_and_fallback_ledgers_identical():
    rng = np.random.default_rng(1)
    probs = rng.dirichlet(np.ones(5))
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    table = rng.normal(size=(3, 5))
    draws = rng.random(20_000)
    from qdesire import _backend
    o1, t1 = _backend.accumulate_payoffs(cdf, table, draws)
    o2, t2 = _fallback.accumulate_payoffs(cdf, table, draws)
    assert np.array_equal(o1, o2)
    assert t1.tobytes() == t2.tobytes()


def test_rank_one_required():
    m = make_measurement([np.diag([1.0, 1.0, 0.0]), np.diag([0.0, 0.0, 1.0])])
    with pytest.raises(RankNotOne):
        Scenario(np.eye(3) / 3, (np.eye(3),), 10, measurement=m)


def test_dutch_book_case4():
    skeleton = Scenario(0.5 * np.array([[1, -1j], [1j, 1]]), (), 1000, seed=3)
    rep = dutch_book_demo([strict(G1), strict(G2)], skeleton)
    assert np.allclose(rep.outcome_payoffs, [-1.0, -1.0], atol=1e-7)
    assert rep.sure_loss and not rep.boundary
    assert rep.ledger.totals[0] == pytest.approx(-1000, abs=1e-4)


def test_dutch_book_boundary_and_coherent():
    skeleton = Scenario(np.eye(2) / 2, (), 100)
    rep = dutch_book_demo([strict(np.diag([2.0, -1.0])), strict(np.diag([-2.0, 1.0]))], skeleton)
    assert rep.boundary
    assert np.allclose(rep.outcome_payoffs, 0.0, atol=1e-7)
    assert any("boundary" in note for note in rep.notes)
    with pytest.raises(NotIncoherent):
        dutch_book_demo([border(np.diag([1.0, -1.0])), border(np.diag([-1.0, 1.0]))], skeleton)
