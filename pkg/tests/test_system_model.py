import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from switchsynth import (
    ConfigurationError,
    GaussianBelief,
    InputError,
    JumpSystem,
    PlantWithControllers,
    build_closed_loop,
    propagate,
    simulate_schedule,
)
from switchsynth.synthesis import SwitchingSchedule

from conftest import random_contractive_system, random_schur_system


def elementwise_matmul(X, Y):
    rows, inner, cols = len(X), len(Y), len(Y[0])
    return [[sum(X[i][k] * Y[k][j] for k in range(inner)) for j in range(cols)] for i in range(rows)]


def transpose(X):
    return [list(r) for r in zip(*X)]


# --- build_closed_loop ---------------------------------------------------

def test_zero_input_gives_plant_matrix():
    system = build_closed_loop(PlantWithControllers(np.eye(2), np.zeros((2, 1)), ([[0.0, 0.0]],)))
    assert system.m == 1
    np.testing.assert_array_equal(system.modes[0], np.eye(2))


def test_exact_cancellation():
    A = np.array([[0.3, -1.2], [2.0, 0.7]])
    system = build_closed_loop(PlantWithControllers(A, np.eye(2), (-A,)))
    np.testing.assert_array_equal(system.modes[0], np.zeros((2, 2)))


def test_closed_loop_matches_hand_arithmetic():
    rng = np.random.default_rng(11)
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 2))
    gains = (rng.normal(size=(2, 3)), rng.normal(size=(2, 3)))
    system = build_closed_loop(PlantWithControllers(A, B, gains))
    assert system.m == 2 and system.n == 3
    for K, mode in zip(gains, system.modes):
        BK = elementwise_matmul(B.tolist(), K.tolist())
        expected = [[A[i][j] + BK[i][j] for j in range(3)] for i in range(3)]
        np.testing.assert_allclose(mode, expected, rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize(
    "A, B, gains, culprit",
    [
        (np.ones((2, 3)), np.ones((2, 1)), (np.ones((1, 3)),), "A"),
        (np.eye(2), np.ones((3, 1)), (np.ones((1, 2)),), "B"),
        (np.eye(2), np.ones((2, 1)), (np.ones((1, 2)), np.ones((2, 2))), "gain 2"),
    ],
)
def test_dimension_mismatch_names_matrix(A, B, gains, culprit):
    with pytest.raises(ConfigurationError, match=culprit):
        PlantWithControllers(A, B, gains)


def test_jump_system_rejects_bad_modes():
    with pytest.raises(ConfigurationError, match="mode 2"):
        JumpSystem([np.eye(2), np.ones((2, 3))])
    with pytest.raises(ConfigurationError, match="mode 2"):
        JumpSystem([np.eye(2), np.eye(3)])
    with pytest.raises(ConfigurationError):
        JumpSystem([])


def test_jump_system_is_immutable(example1):
    with pytest.raises(ValueError):
        example1.modes[0][0, 0] = 1.0
    with pytest.raises(InputError):
        example1.mode(5)


# --- GaussianBelief ------------------------------------------------------

def test_belief_symmetrised_and_clamped():
    sigma = np.array([[1.0, 0.5 + 1e-13], [0.5, 0.25]])  # rank one, slightly asymmetric
    belief = GaussianBelief([0.0, 0.0], sigma)
    np.testing.assert_array_equal(belief.sigma, belief.sigma.T)
    assert np.linalg.eigvalsh(belief.sigma)[0] >= -1e-15


def test_belief_rejects_indefinite_sigma():
    with pytest.raises(ConfigurationError, match="positive semidefinite"):
        GaussianBelief([0.0, 0.0], [[1.0, 0.0], [0.0, -0.1]])


def test_belief_rejects_shape_mismatch():
    with pytest.raises(ConfigurationError, match="sigma"):
        GaussianBelief([0.0, 0.0, 0.0], np.eye(2))


# --- propagate -----------------------------------------------------------

def test_identity_mode_keeps_belief(example1_initial):
    assert propagate(example1_initial, np.eye(2)) == example1_initial


def test_annihilating_mode(example1_initial):
    out = propagate(example1_initial, np.zeros((2, 2)))
    np.testing.assert_array_equal(out.mu, 0.0)
    np.testing.assert_array_equal(out.sigma, 0.0)


def test_propagate_example1_mode3_by_hand(example1, example1_initial):
    A3 = example1.modes[2].tolist()
    mu = [[5.0], [5.0]]
    sigma = (2.25 * np.eye(2)).tolist()
    expected_mu = [r[0] for r in elementwise_matmul(A3, mu)]
    expected_sigma = elementwise_matmul(elementwise_matmul(A3, sigma), transpose(A3))
    out = propagate(example1_initial, example1.modes[2])
    np.testing.assert_allclose(out.mu, expected_mu, rtol=1e-15)
    np.testing.assert_allclose(out.sigma, expected_sigma, rtol=1e-14)
    np.testing.assert_allclose(out.mu, [6.0, 2.75])


def test_propagate_dimension_mismatch(example1_initial):
    with pytest.raises(ConfigurationError):
        propagate(example1_initial, np.eye(3))


# --- simulate_schedule ---------------------------------------------------

def test_simulate_zero_steps(example1, example1_initial):
    assert simulate_schedule(example1, example1_initial, [], 0) == [example1_initial]


def test_simulate_constant_is_repeated_propagate(example1, example1_initial):
    beliefs = simulate_schedule(example1, example1_initial, SwitchingSchedule.constant(2, 2), 2)
    twice = propagate(propagate(example1_initial, example1.modes[2]), example1.modes[2])
    assert len(beliefs) == 3
    np.testing.assert_allclose(beliefs[2].mu, twice.mu, rtol=1e-15)
    np.testing.assert_allclose(beliefs[2].sigma, twice.sigma, rtol=1e-15)


def test_simulate_alternating_final_mean(example1, example1_initial):
    beliefs = simulate_schedule(example1, example1_initial, [0, 1], 2)
    A1, A2 = example1.modes[0], example1.modes[1]
    np.testing.assert_allclose(beliefs[-1].mu, A2 @ A1 @ np.array([5.0, 5.0]), rtol=1e-14)


def test_simulate_short_schedule_rejected(example1, example1_initial):
    with pytest.raises(InputError, match="covers 3 steps"):
        simulate_schedule(example1, example1_initial, [0, 1, 2], 4)
    with pytest.raises(InputError):
        simulate_schedule(example1, example1_initial, [0, 7], 2)


# --- properties ----------------------------------------------------------

mats = arrays(np.float64, (3, 3), elements=st.floats(-2, 2))


@given(mats, mats, st.floats(0.1, 10))
def test_linearity_in_scale(A, L, c):
    mu = np.array([1.0, -0.5, 2.0])
    base = GaussianBelief(mu, L @ L.T)
    out = propagate(base, A)
    scaled = propagate(base.scaled(c), A)
    np.testing.assert_allclose(scaled.mu, c * out.mu, rtol=1e-12, atol=1e-12 * c * (1 + abs(out.mu).max()))
    np.testing.assert_allclose(scaled.sigma, c * c * out.sigma, rtol=1e-12,
                               atol=1e-12 * c * c * (1 + abs(out.sigma).max()))


@pytest.mark.parametrize("switching", [False, True])
def test_symmetry_and_psd_over_long_trajectories(switching):
    # arbitrary switching among Schur modes can diverge; switch among contractions
    rng = np.random.default_rng(5)
    for _ in range(5):
        if switching:
            system = random_contractive_system(rng, 4, 3)
            seq = rng.integers(0, 3, 1000)
        else:
            system = random_schur_system(rng, 4, 3)
            seq = np.full(1000, rng.integers(0, 3))
        L = rng.normal(size=(4, 4))
        belief = GaussianBelief(rng.normal(size=4), L @ L.T)
        for b in simulate_schedule(system, belief, seq, 1000):
            assert np.abs(b.sigma - b.sigma.T).max() <= 1e-10
            assert np.linalg.eigvalsh(b.sigma)[0] >= -1e-8


def test_point_mass_matches_state_recursion():
    rng = np.random.default_rng(9)
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 2))
    K = rng.normal(size=(2, 3))
    mode = build_closed_loop(PlantWithControllers(A, B, (K,))).modes[0]
    for _ in range(100):
        x = rng.normal(size=3)
        out = propagate(GaussianBelief(x, np.zeros((3, 3))), mode)
        expected = A @ x + B @ (K @ x)
        np.testing.assert_allclose(out.mu, expected, rtol=1e-12, atol=1e-12 * np.abs(expected).max())
        np.testing.assert_array_equal(out.sigma, 0.0)
