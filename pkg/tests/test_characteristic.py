import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from chaosprobe.characteristic import (
    ObservableWeights, boltzmann, evaluate_curve, partition_sum, spectral_distribution, thermal_state,
    thermal_weights, time_grid, weights_from_state,
)
from chaosprobe.ensembles import goe_matrix
from chaosprobe.linalg import DimensionError
from conftest import random_hermitian

seeds = st.integers(0, 2**32 - 1)


def _pair(seed, d=6, real=False):
    rng = np.random.default_rng(seed)
    return random_hermitian(rng, d, real), random_hermitian(rng, d, real)


def test_infinite_temperature_is_uniform(rng):
    h, x = random_hermitian(rng, 7), random_hermitian(rng, 7)
    w = thermal_weights(h, x, 0.0)
    assert np.allclose(w.weights, 1 / 7, atol=1e-15)
    assert np.allclose(w.eigenvalues, np.linalg.eigvalsh(x))


def test_observable_equal_to_hamiltonian(rng):
    h = random_hermitian(rng, 9)
    e = np.linalg.eigvalsh(h)
    w = thermal_weights(h, None, 0.7)
    p = np.exp(-0.7 * e)
    assert np.allclose(w.weights, p / p.sum(), atol=1e-14)
    assert w.log_partition == pytest.approx(np.log(p.sum()), rel=1e-12)
    w2 = thermal_weights(h, h, 0.7)
    assert np.array_equal(w.weights, w2.weights)


@pytest.mark.parametrize("seed", range(5))
def test_weights_match_matrix_exponential(seed):
    # brute-force <x_n| e^{-beta H} |x_n> / Z with a scaling-and-squaring expm
    h, x = _pair(seed)
    beta = 0.9
    rho = scipy.linalg.expm(-beta * h)
    rho /= np.trace(rho).real
    xe, xv = np.linalg.eigh(x)
    expected = np.real(np.einsum("in,ij,jn->n", xv.conj(), rho, xv))
    w = thermal_weights(h, x, beta)
    assert abs(w.weights.sum() - 1) <= 1e-10
    assert np.abs(w.weights - expected).max() <= 1e-12
    assert np.allclose(w.eigenvalues, xe)


def test_thermal_state_partition_value(rng):
    h = random_hermitian(rng, 10)
    st_ = thermal_state(h, 0.3)
    z = np.exp(-0.3 * np.linalg.eigvalsh(h)).sum()
    assert st_.partition_value == pytest.approx(z, rel=1e-10)
    assert st_.populations.sum() == pytest.approx(1, abs=1e-12)
    x = random_hermitian(rng, 10)
    assert np.allclose(weights_from_state(st_, x).weights, thermal_weights(h, x, 0.3).weights, atol=1e-14)


def test_large_beta_does_not_overflow():
    e = np.array([-1e4, 0.0, 1e4])
    p, logz = boltzmann(e, 10.0)
    assert np.all(np.isfinite(p)) and p[0] == 1.0
    assert logz == pytest.approx(1e5)


@pytest.mark.parametrize("beta", [-0.1, np.inf, np.nan])
def test_bad_beta(beta, rng):
    h = random_hermitian(rng, 3)
    with pytest.raises(ValueError):
        thermal_weights(h, None, beta)


def test_dimension_mismatch(rng):
    with pytest.raises(DimensionError):
        thermal_weights(random_hermitian(rng, 3), random_hermitian(rng, 4), 0.1)


def test_t_zero_and_pure_phase():
    w = ObservableWeights(np.array([1.0, 2.0, 5.0]), np.array([0.2, 0.3, 0.5]))
    c = evaluate_curve(w, [0.0, 1.0])
    assert c.g_values[0] == pytest.approx(1.0, abs=1e-15)
    assert c.G_values[0] == pytest.approx(1.0, abs=1e-10)
    t = np.linspace(0, 50, 11)
    one = evaluate_curve(ObservableWeights(np.array([2.5]), np.array([1.0])), t)
    assert np.allclose(one.g_values, np.exp(2.5j * t), atol=1e-14)
    assert np.allclose(one.G_values, 1.0, atol=1e-14)


def test_sff_identity(rng):
    # X = H: G(t) = |Z(beta+it)|^2 / Z(beta)^2 summed directly over eigenvalues
    t = time_grid(1e-2, 1e3, 200)
    for k in range(10):
        d = int(rng.integers(2, 129))
        beta = float(rng.uniform(0, 2))
        h = random_hermitian(rng, d, real=bool(k % 2))
        e = np.linalg.eigvalsh(h)
        direct = np.abs(partition_sum(e, beta + 1j * t)) ** 2 / partition_sum(e, beta).real ** 2
        got = evaluate_curve(thermal_weights(h, None, beta), t).G_values
        assert np.abs(got - direct).max() <= 1e-10


def test_chunked_evaluation_matches_direct(monkeypatch, rng):
    import chaosprobe.characteristic as ch
    w = thermal_weights(random_hermitian(rng, 30), None, 0.2)
    t = np.linspace(0, 20, 101)
    full = evaluate_curve(w, t).g_values
    monkeypatch.setattr(ch, "_CHUNK", 64)
    assert np.allclose(evaluate_curve(w, t).g_values, full, rtol=0, atol=1e-15)


def test_invalid_times():
    w = ObservableWeights(np.array([0.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        evaluate_curve(w, [0.0, np.nan])


@settings(max_examples=40, deadline=None)
@given(seed=seeds, beta=st.floats(0, 3), real=st.booleans())
def test_weights_form_distribution(seed, beta, real):
    h, x = _pair(seed, 8, real)
    w = thermal_weights(h, x, beta)
    assert abs(w.weights.sum() - 1) <= 1e-10
    assert np.all(w.weights >= 0)
    g = evaluate_curve(w, np.linspace(-30, 30, 61))
    assert np.all(g.G_values <= 1 + 1e-12) and np.all(g.G_values >= 0)
    assert np.allclose(g.G_values, np.abs(g.g_values) ** 2, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, t=st.floats(0, 100))
def test_conjugate_symmetry(seed, t):
    h, x = _pair(seed)
    w = thermal_weights(h, x, 0.5)
    gp, gm = evaluate_curve(w, [t, -t]).g_values
    assert abs(gm - np.conj(gp)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=seeds, c=st.floats(-50, 50))
def test_shift_invariance(seed, c):
    h, x = _pair(seed)
    t = np.linspace(0, 10, 21)
    a = evaluate_curve(thermal_weights(h, x, 0.5), t)
    b = evaluate_curve(thermal_weights(h, x + c * np.eye(6), 0.5), t)
    assert np.abs(b.G_values - a.G_values).max() <= 1e-12
    assert np.allclose(b.g_values, a.g_values * np.exp(1j * t * c), atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, c=st.floats(0.1, 10))
def test_scale_covariance(seed, c):
    h, x = _pair(seed)
    t = np.linspace(0, 10, 21)
    a = evaluate_curve(thermal_weights(h, c * x, 0.5), t).G_values
    b = evaluate_curve(thermal_weights(h, x, 0.5), c * t).G_values
    assert np.abs(a - b).max() <= 1e-10


def test_late_time_average_plateau():
    # time average of G for X = H approaches Z(2 beta) / Z(beta)^2
    h = goe_matrix(64, 1.0, np.random.default_rng(3))
    e = np.linalg.eigvalsh(h)
    beta = 0.05
    t = np.random.default_rng(4).uniform(1e4, 1e7, 20000)
    G = evaluate_curve(thermal_weights(h, None, beta), t).G_values
    target = partition_sum(e, 2 * beta).real / partition_sum(e, beta).real ** 2
    assert abs(G.mean() / target - 1) < 0.05


def test_histogram_examples(rng):
    w = thermal_weights(np.diag([1.0, -1.0]), None, 0.0)
    edges, mass = spectral_distribution(w, 2, (-1, 1))
    assert np.allclose(edges, [-1, 0, 1])
    assert np.allclose(mass, [0.5, 0.5])
    w = thermal_weights(random_hermitian(rng, 50), None, 0.3)
    for bins in (1, 7, 50, 333):
        assert spectral_distribution(w, bins)[1].sum() == pytest.approx(1, abs=1e-10)


def test_histogram_errors():
    w = ObservableWeights(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        spectral_distribution(w, 3, (5, 6))
    with pytest.raises(ValueError):
        spectral_distribution(w, 0)
    with pytest.raises(ValueError):
        spectral_distribution(w, 3, (1, 1))


def test_time_grid_defaults():
    t = time_grid()
    assert t[0] == 0 and t.size == 401
    assert t[1] == pytest.approx(1e-2) and t[-1] == pytest.approx(1e4)
    assert np.allclose(np.diff(np.log(t[1:])), np.log(1e6) / 399)
    with pytest.raises(ValueError):
        time_grid(1.0, 0.5)
