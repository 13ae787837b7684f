from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchsynth import (
    GaussianBelief,
    InputError,
    JumpSystem,
    W2Trace,
    propagate,
    simulate_schedule,
    w2_gaussian_dirac,
    w2_kron_form,
    w2_trajectory,
)
from switchsynth.synthesis import SwitchingSchedule

from conftest import random_belief, random_contractive_system, random_schur_system


def exact_w2(mu, sigma_diag):
    return float(sum(Fraction(str(x)) ** 2 for x in mu) + sum(Fraction(str(s)) for s in sigma_diag))


def test_dirac_at_origin_is_zero():
    assert w2_gaussian_dirac(GaussianBelief([0.0, 0.0], np.zeros((2, 2)))) == 0.0


def test_example1_initial_w2(example1_initial):
    assert exact_w2([5, 5], [2.25, 2.25]) == 54.5
    assert w2_gaussian_dirac(example1_initial) == 54.5


def test_example2_initial_w2():
    mu = [0.5, -1.5, -5, 0.1, 0.2, 0.1]
    expected = exact_w2(mu, [0.0225] * 6)
    assert expected == pytest.approx(27.695, abs=1e-12)
    assert w2_gaussian_dirac(GaussianBelief(mu, 0.0225 * np.eye(6))) == pytest.approx(expected, abs=1e-12)


# --- Kronecker form ------------------------------------------------------

@pytest.mark.parametrize("method", ["auto", "dense", "congruence"])
def test_kron_empty_sequence(example1, example1_initial, method):
    assert w2_kron_form(example1, example1_initial, [], method) == pytest.approx(54.5, rel=1e-15)


@pytest.mark.parametrize("method", ["dense", "congruence"])
def test_kron_one_step_matches_propagation(example1, example1_initial, method):
    expected = w2_gaussian_dirac(propagate(example1_initial, example1.modes[2]))
    assert w2_kron_form(example1, example1_initial, [2], method) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("method", ["dense", "congruence"])
def test_kron_annihilating_mode(example1_initial, method):
    system = JumpSystem([0.9 * np.eye(2), np.zeros((2, 2)), [[0.5, 2.0], [-1.0, 0.3]]])
    assert w2_kron_form(system, example1_initial, [0, 1], method) == 0.0
    assert w2_kron_form(system, example1_initial, [0, 1, 2, 0, 2], method) == 0.0


def test_kron_first_entry_acts_first():
    # non-commuting modes: order matters, first entry applied first
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[1.0, 0.0], [0.0, 0.0]])
    system = JumpSystem([A, B])
    belief = GaussianBelief([0.0, 1.0], np.zeros((2, 2)))
    # A then B: [0,1] -> [1,0] -> [1,0]; B then A: [0,1] -> [0,0]
    assert w2_kron_form(system, belief, [0, 1], "dense") == 1.0
    assert w2_kron_form(system, belief, [1, 0], "dense") == 0.0


def test_kron_rejects_bad_index(example1, example1_initial):
    with pytest.raises(InputError):
        w2_kron_form(example1, example1_initial, [0, 5])


def test_dense_kron_size_limit():
    system = JumpSystem([0.5 * np.eye(9)])
    belief = GaussianBelief(np.ones(9), np.eye(9))
    with pytest.raises(InputError, match="n <= 8"):
        w2_kron_form(system, belief, [0], "dense")
    assert w2_kron_form(system, belief, [0]) == pytest.approx(0.25 * 18)


def test_kron_equivalence_random():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n, m = rng.integers(1, 5), rng.integers(1, 4)
        system = JumpSystem([rng.uniform(-1, 1, (n, n)) for _ in range(m)])
        belief = random_belief(rng, n)
        seq = rng.integers(0, m, rng.integers(0, 31)).tolist()
        direct = w2_gaussian_dirac(simulate_schedule(system, belief, seq, len(seq))[-1])
        for method in ("dense", "congruence"):
            value = w2_kron_form(system, belief, seq, method)
            assert abs(value - direct) <= 1e-9 * max(1.0, direct)


# --- trajectories --------------------------------------------------------

def test_trajectory_zero_steps(example1, example1_initial, backend):
    trace = w2_trajectory(example1, example1_initial, [], 0, dk=0.5)
    assert trace.values.tolist() == [54.5]
    assert trace.area == 0.5 * 54.5


def test_constant_mode3_decays(example1, example1_initial, backend):
    trace = w2_trajectory(example1, example1_initial, SwitchingSchedule.constant(2, 50), 50)
    v = trace.values
    assert v[-1] < 1e-3 * v[0]
    diffs = np.diff(v)
    first_decrease = int(np.argmax(diffs < 0))
    assert np.all(diffs[first_decrease:] < 0)


def test_trajectory_matches_kron_prefixes(example1, example1_initial, backend):
    rng = np.random.default_rng(1)
    seq = rng.integers(0, 5, 40).tolist()
    trace = w2_trajectory(example1, example1_initial, seq, 40, dk=0.1)
    for k in range(41):
        ref = w2_kron_form(example1, example1_initial, seq[:k], "dense")
        assert trace.values[k] == pytest.approx(ref, rel=1e-9, abs=1e-300)


def test_trace_invariants():
    trace = W2Trace([3.0, 2.0, 1.0], dk=0.25)
    assert trace.area == pytest.approx(1.5, rel=1e-12)
    assert trace.steps == 2
    with pytest.raises(InputError):
        W2Trace([1.0, -1.0])
    with pytest.raises(InputError):
        W2Trace([1.0], dk=0.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    system = random_schur_system(rng, 3, 2)
    belief = random_belief(rng, 3)
    seq = rng.integers(0, 2, 20)
    base = w2_trajectory(system, belief, seq, 20, dk=0.3)
    scaled = w2_trajectory(system, belief.scaled(c), seq, 20, dk=0.3)
    np.testing.assert_allclose(scaled.values, c * c * base.values, rtol=1e-10, atol=0)
    assert scaled.area == pytest.approx(c * c * base.area, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nonnegative_and_dirac_fixed_point(seed):
    rng = np.random.default_rng(seed)
    system = random_contractive_system(rng, 3, 3)
    system = JumpSystem(list(system.modes) + [np.zeros((3, 3))])
    belief = random_belief(rng, 3)
    seq = rng.integers(0, 4, 25)
    values = w2_trajectory(system, belief, seq, 25).values
    assert np.all(values >= 0)
    hits = np.flatnonzero(values == 0.0)
    if hits.size:
        assert np.all(values[hits[0]:] == 0.0)
