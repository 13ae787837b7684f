"""Stability and performance checks on jump systems and realised traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, qmc

from .errors import InputError, NumericalError
from .system_model import JumpSystem
from .wasserstein import W2Trace

DEFAULT_MS_THRESHOLD = 1e-6


def spectral_radius(matrix) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"spectral_radius needs a square matrix, got shape {A.shape}")
    try:
        eigvals = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation did not converge for matrix\n{A}") from exc
    return float(np.max(np.abs(eigvals)))


def spectral_radii(system: JumpSystem) -> list[float]:
    return [spectral_radius(A) for A in system.modes]


@dataclass(frozen=True)
class MSVerdict:
    """Outcome of :func:`verify_ms_stability`.

    ``violating_index`` is the step index of the first jump time that broke
    the decrease condition, or ``None``.
    """

    stable: bool
    terminal_w2: float
    initial_w2: float
    threshold: float
    violating_index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.stable


@dataclass(frozen=True)
class StabilityReport:
    per_mode_spectral_radius: dict
    all_schur: bool
    ms_verdict: MSVerdict | None = None


def verify_ms_stability(
    trace: W2Trace, jump_times, threshold: float = DEFAULT_MS_THRESHOLD, gamma: float = 0.0
) -> MSVerdict:
    """Runtime mean-square stability certificate for a realised ``W2^2`` trace.

    Passes when, over the jump times inside the trace,

    * ``W2(t_j)`` never increases from one jump time to the next,
    * ``W2(t_{j+1}) - W2(t_{j-1}) <= -gamma * W2(t_{j-1})`` for ``j >= 1``,

    and the terminal value satisfies ``W2(K) < threshold * W2(0)`` (or is
    exactly zero).
    """
    values = trace.values
    w0 = float(values[0])
    final = float(values[-1])
    times = sorted(int(t) for t in jump_times if 0 <= int(t) < len(values))
    w = [float(values[t]) for t in times]

    for j in range(1, len(times)):
        if w[j] > w[j - 1]:
            return MSVerdict(False, final, w0, threshold, times[j],
                             f"W2 increased at jump time {times[j]}: {w[j - 1]:.6g} -> {w[j]:.6g}")
    for j in range(1, len(times) - 1):
        if w[j + 1] - w[j - 1] > -gamma * w[j - 1]:
            return MSVerdict(False, final, w0, threshold, times[j + 1],
                             f"decrease margin violated between jump times {times[j - 1]} and {times[j + 1]}")
    if not (final < threshold * w0 or final == 0.0):
        return MSVerdict(False, final, w0, threshold, None,
                         f"terminal W2 {final:.6g} not below {threshold:g} * W2(0)")
    return MSVerdict(True, final, w0, threshold)


def stability_report(system: JumpSystem, trace: W2Trace | None = None, jump_times=(),
                     threshold: float = DEFAULT_MS_THRESHOLD, gamma: float = 0.0) -> StabilityReport:
    radii = spectral_radii(system)
    verdict = verify_ms_stability(trace, jump_times, threshold, gamma) if trace is not None else None
    return StabilityReport(dict(enumerate(radii)), all(r < 1.0 for r in radii), verdict)


def sphere_directions(n: int, samples: int, seed: int = 0) -> np.ndarray:
    """``samples`` quasi-uniform unit vectors in ``R^n``, rows of the result.

    Evenly spaced angles for ``n == 2``; scrambled Sobol points pushed through
    the normal inverse CDF otherwise. Fixed by ``seed``.
    """
    if n == 1:
        return np.resize(np.array([[1.0], [-1.0]]), (samples, 1))
    if n == 2:
        theta = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
        return np.column_stack([np.cos(theta), np.sin(theta)])
    # draw a power-of-two block and keep the leading points
    m = max(0, int(np.ceil(np.log2(samples))))
    u = qmc.Sobol(d=n, scramble=True, seed=seed).random_base2(m)[:samples]
    z = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def dominance_check(system: JumpSystem, samples: int = 1000, radius: float = 1.0, seed: int = 0) -> int | None:
    """Sampled screen for a mode that makes switching pointless.

    Returns the 0-based index of a mode ``i`` with ``|A_i x| < |A_j x|`` for
    every other mode and every sampled ``x``, and strictly the smallest
    spectral radius. ``None`` is inconclusive: a dominant mode may still
    exist between the samples.
    """
    if system.m < 2:
        raise InputError("dominance_check needs at least two modes")
    if not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    X = radius * sphere_directions(system.n, samples, seed)
    norms = np.linalg.norm(np.einsum("aij,sj->asi", system.stacked, X), axis=2)
    radii = np.array(spectral_radii(system))
    for i in range(system.m):
        others = np.delete(np.arange(system.m), i)
        if np.all(norms[i] < norms[others]) and np.all(radii[i] < radii[others]):
            return i
    return None


@dataclass(frozen=True)
class AreaComparison:
    best_mode: int
    best_constant_area: float
    switched_area: float

    @property
    def ratio(self) -> float | None:
        """Best constant-mode area over switched area."""
        return self.best_constant_area / self.switched_area if self.switched_area > 0 else None

    @property
    def switching_wins(self) -> bool:
        return self.switched_area < self.best_constant_area


def compare_areas(per_mode_areas: dict, switched_area: float) -> AreaComparison:
    best = min(per_mode_areas, key=lambda i: (per_mode_areas[i], i))
    return AreaComparison(best, per_mode_areas[best], switched_area)
