import numpy as np
import pytest

from switchsynth import GaussianBelief, JumpSystem, _kernels

EXAMPLE1_MODES = [
    [[1.01, -0.17], [0.32, -0.48]],
    [[0.06, 0.80], [0.01, -0.77]],
    [[0.72, 0.48], [0.0, 0.55]],
    [[-0.33, -0.65], [-0.46, 0.69]],
    [[-0.13, 0.12], [-1.33, -1.05]],
]


@pytest.fixture
def example1():
    return JumpSystem(EXAMPLE1_MODES)


@pytest.fixture
def example1_initial():
    return GaussianBelief([5.0, 5.0], 2.25 * np.eye(2))


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _kernels.BACKEND
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


def random_schur_system(rng, n, m, rho_max=0.95):
    """Random modes with entries in [-1, 1], rescaled to spectral radius <= rho_max."""
    modes = []
    for _ in range(m):
        A = rng.uniform(-1.0, 1.0, (n, n))
        rho = max(abs(np.linalg.eigvals(A)))
        if rho > rho_max:
            A *= rho_max / rho
        modes.append(A)
    return JumpSystem(modes)


def random_belief(rng, n):
    L = rng.normal(size=(n, n))
    return GaussianBelief(rng.normal(size=n), 0.5 * L @ L.T)


def random_contractive_system(rng, n, m, norm_max=0.95):
    """Random modes with spectral norm <= norm_max; stable under any switching."""
    modes = []
    for _ in range(m):
        A = rng.uniform(-1.0, 1.0, (n, n))
        A *= norm_max / max(norm_max, np.linalg.norm(A, 2))
        modes.append(A)
    return JumpSystem(modes)


# --- acceptance verdict lines --------------------------------------------

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
