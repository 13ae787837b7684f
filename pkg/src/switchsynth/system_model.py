"""Jump linear systems and Gaussian belief propagation.

A jump linear system evolves as ``x(k+1) = A[s_k] x(k)`` where the mode
``s_k`` is picked from a finite family. With a Gaussian initial state and no
process noise the state stays Gaussian, so a belief is just ``(mu, sigma)``.

Mode indices are 0-based throughout the library. Reports, configs and the
CLI present them 1-based.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, InputError

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


def _as_matrix(value, name):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name}: not a numeric matrix ({exc})") from None
    if arr.ndim != 2:
        raise ConfigurationError(f"{name}: expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name}: contains non-finite entries")
    return arr


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GaussianBelief:
    """Gaussian state PDF ``N(mu, sigma)``.

    ``sigma`` is symmetrised on construction. Eigenvalues down to ``-1e-10``
    are treated as round-off and clamped to zero; anything more negative is
    rejected.
    """

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        sigma = _as_matrix(self.sigma, "sigma")
        n = mu.shape[0]
        if n == 0:
            raise ConfigurationError("mu: empty mean vector")
        if sigma.shape != (n, n):
            raise ConfigurationError(f"sigma: expected {n}x{n} to match mu, got {sigma.shape[0]}x{sigma.shape[1]}")
        if not np.all(np.isfinite(mu)):
            raise ConfigurationError("mu: contains non-finite entries")
        sigma = 0.5 * (sigma + sigma.T)
        eigvals, eigvecs = np.linalg.eigh(sigma)
        if eigvals[0] < -PSD_TOL * max(1.0, abs(eigvals[-1])):
            raise ConfigurationError(f"sigma: not positive semidefinite (smallest eigenvalue {eigvals[0]:.3g})")
        if eigvals[0] < 0.0:
            sigma = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
            sigma = 0.5 * (sigma + sigma.T)
        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "sigma", _frozen(sigma))

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @property
    def second_moment(self) -> np.ndarray:
        """``E[x x^T] = mu mu^T + sigma``."""
        return np.outer(self.mu, self.mu) + self.sigma

    def scaled(self, c: float) -> GaussianBelief:
        """Belief of ``c * x``: ``(c mu, c^2 sigma)``."""
        return GaussianBelief(c * self.mu, (c * c) * self.sigma)

    def __eq__(self, other):
        if not isinstance(other, GaussianBelief):
            return NotImplemented
        return np.array_equal(self.mu, other.mu) and np.array_equal(self.sigma, other.sigma)

    __hash__ = None


class JumpSystem:
    """An ordered family of ``m`` square ``n x n`` mode matrices."""

    def __init__(self, modes: Sequence):
        if len(modes) == 0:
            raise ConfigurationError("modes: at least one mode matrix is required")
        mats = []
        for i, mode in enumerate(modes):
            arr = _as_matrix(mode, f"mode {i + 1}")
            if arr.shape[0] != arr.shape[1]:
                raise ConfigurationError(f"mode {i + 1}: expected a square matrix, got {arr.shape[0]}x{arr.shape[1]}")
            if mats and arr.shape != mats[0].shape:
                raise ConfigurationError(
                    f"mode {i + 1}: dimension {arr.shape[0]} differs from mode 1 dimension {mats[0].shape[0]}"
                )
            mats.append(_frozen(arr))
        self._modes = tuple(mats)

    @property
    def modes(self) -> tuple[np.ndarray, ...]:
        return self._modes

    @property
    def n(self) -> int:
        return self._modes[0].shape[0]

    @property
    def m(self) -> int:
        return len(self._modes)

    @cached_property
    def stacked(self) -> np.ndarray:
        """Modes as one contiguous ``(m, n, n)`` array."""
        return _frozen(np.ascontiguousarray(np.stack(self._modes)))

    def mode(self, index: int) -> np.ndarray:
        self.check_index(index)
        return self._modes[index]

    def check_index(self, index) -> int:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index < self.m:
            raise InputError(f"mode index {index!r} out of range 0..{self.m - 1}")
        return int(index)

    def __repr__(self):
        return f"JumpSystem(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class PlantWithControllers:
    """Plant ``(A, B)`` and a bank of state-feedback gains ``u = K_i x``."""

    A: np.ndarray
    B: np.ndarray
    gains: tuple

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        if A.shape[0] != A.shape[1]:
            raise ConfigurationError(f"A: expected a square matrix, got {A.shape[0]}x{A.shape[1]}")
        n = A.shape[0]
        if B.shape[0] != n:
            raise ConfigurationError(f"B: expected {n} rows to match A, got {B.shape[0]}")
        p = B.shape[1]
        if len(self.gains) == 0:
            raise ConfigurationError("gains: at least one gain is required")
        gains = []
        for i, K in enumerate(self.gains):
            K = _as_matrix(K, f"gain {i + 1}")
            if K.shape != (p, n):
                raise ConfigurationError(f"gain {i + 1}: expected {p}x{n}, got {K.shape[0]}x{K.shape[1]}")
            gains.append(_frozen(K))
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "gains", tuple(gains))


def build_closed_loop(plant: PlantWithControllers) -> JumpSystem:
    """One mode ``A + B K_i`` per gain, in gain order."""
    return JumpSystem([plant.A + plant.B @ K for K in plant.gains])


def propagate(belief: GaussianBelief, mode_matrix) -> GaussianBelief:
    A = np.asarray(mode_matrix, dtype=float)
    if A.shape != (belief.n, belief.n):
        raise ConfigurationError(f"mode matrix: expected {belief.n}x{belief.n}, got shape {A.shape}")
    sigma = A @ belief.sigma @ A.T
    return GaussianBelief(A @ belief.mu, 0.5 * (sigma + sigma.T))


def mode_sequence(schedule, steps: int, m: int | None = None) -> np.ndarray:
    """Per-step 0-based modes for the first ``steps`` steps of ``schedule``.

    ``schedule`` is a :class:`~switchsynth.synthesis.SwitchingSchedule` or any
    integer sequence.
    """
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    if hasattr(schedule, "modes_per_step"):
        seq = schedule.modes_per_step()
    else:
        seq = np.asarray(schedule, dtype=np.intp).reshape(-1)
    if len(seq) < steps:
        raise InputError(f"schedule covers {len(seq)} steps but {steps} were requested")
    seq = np.ascontiguousarray(seq[:steps], dtype=np.intp)
    if m is not None and steps and (seq.min() < 0 or seq.max() >= m):
        raise InputError(f"schedule contains a mode index outside 0..{m - 1}")
    return seq


def simulate_schedule(system: JumpSystem, initial: GaussianBelief, schedule, steps: int) -> list[GaussianBelief]:
    """Beliefs at ``k = 0..steps``; element 0 is ``initial``."""
    if initial.n != system.n:
        raise ConfigurationError(f"initial belief has dimension {initial.n}, system has {system.n}")
    seq = mode_sequence(schedule, steps, system.m)
    beliefs = [initial]
    for i in seq:
        beliefs.append(propagate(beliefs[-1], system.modes[i]))
    return beliefs
