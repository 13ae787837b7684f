"""Squared Wasserstein distance from a Gaussian belief to the Dirac at 0.

For ``N(mu, sigma)`` against the point mass at the origin,
``W2^2 = |mu|^2 + trace(sigma) = trace(mu mu^T + sigma)``. Along a jump
trajectory the second moment evolves linearly, which gives the Kronecker
form ``vec(I)^T (A_K (x) A_K) ... (A_1 (x) A_1) vec(mu0 mu0^T + sigma0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigurationError, InputError
from .system_model import GaussianBelief, JumpSystem, mode_sequence

# The dense (A (x) A) chain is n^2 x n^2; refuse it beyond this size.
DENSE_KRON_MAX_N = 8


@dataclass(frozen=True, eq=False)
class W2Trace:
    """Per-step ``W2^2(k)`` for ``k = 0..K`` and its area ``dk * sum``."""

    values: np.ndarray
    dk: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise InputError("W2Trace needs at least one value")
        if not self.dk > 0:
            raise InputError(f"dk must be positive, got {self.dk}")
        if np.any(values < 0):
            # trace of a PSD matrix; negatives are round-off only
            if values.min() < -1e-12 * max(1.0, values.max()):
                raise InputError(f"W2 values must be non-negative, got min {values.min():.3g}")
            values = np.clip(values, 0.0, None)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dk", float(self.dk))

    @property
    def area(self) -> float:
        return self.dk * float(np.sum(self.values))

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)


def w2_gaussian_dirac(belief: GaussianBelief) -> float:
    return float(belief.mu @ belief.mu + np.trace(belief.sigma))


def w2_kron_form(system: JumpSystem, initial: GaussianBelief, sequence, method: str = "auto") -> float:
    """``W2^2`` after applying ``sequence`` via the vectorised product form.

    The factor for ``sequence[0]`` acts first on ``vec(mu0 mu0^T + sigma0)``.
    ``method="dense"`` builds each ``A (x) A`` explicitly (``n <= 8``);
    ``"congruence"`` uses ``(A (x) A) vec(X) = vec(A X A^T)`` instead.
    ``"auto"`` picks the congruence path.
    """
    if initial.n != system.n:
        raise ConfigurationError(f"initial belief has dimension {initial.n}, system has {system.n}")
    seq = [system.check_index(i) for i in sequence]
    n = system.n
    X = initial.second_moment
    if method == "dense":
        if n > DENSE_KRON_MAX_N:
            raise InputError(f"dense Kronecker form limited to n <= {DENSE_KRON_MAX_N}, got n={n}")
        v = X.reshape(-1, order="F")
        for i in seq:
            A = system.modes[i]
            v = np.kron(A, A) @ v
        vec_identity = np.eye(n).reshape(-1, order="F")
        return max(float(vec_identity @ v), 0.0)
    if method not in ("auto", "congruence"):
        raise InputError(f"unknown method {method!r}")
    for i in seq:
        A = system.modes[i]
        X = A @ X @ A.T
    return max(float(np.trace(X)), 0.0)


def w2_trajectory(system: JumpSystem, initial: GaussianBelief, schedule, steps: int, dk: float = 1.0) -> W2Trace:
    if initial.n != system.n:
        raise ConfigurationError(f"initial belief has dimension {initial.n}, system has {system.n}")
    seq = mode_sequence(schedule, steps, system.m)
    values = _kernels.sequence_traces(initial.second_moment, system.stacked, seq)
    return W2Trace(values, dk)
