"""Switching-schedule synthesis.

Four strategies share one report type:

``receding_horizon``
    At each decision time hold every candidate mode for ``T`` steps, score it
    by the summed ``W2^2`` over the horizon, and pick the cheapest mode that
    also meets the piecewise-decrease stability constraint. When no mode
    meets it the horizon grows one step at a time.
``pointwise``
    Greedy one-step minimisation of ``W2^2`` (no constraint, no look-ahead).
``infinite_horizon``
    The single constant mode with the smallest area.
``exact_tree``
    Brute force over all ``m**steps`` per-step sequences; an optimality
    oracle for small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .analysis import spectral_radius
from .errors import ConfigurationError, InputError, PreconditionError, SynthesisError
from .system_model import GaussianBelief, JumpSystem
from .wasserstein import W2Trace

STRATEGIES = ("receding_horizon", "pointwise", "infinite_horizon", "exact_tree")

# exact_tree enumerates at most 2**24 sequences
EXACT_TREE_LOG2_CAP = 24

# infinite-horizon truncation is trusted once W2 has fallen this far
TRUNCATION_TOL = 1e-9


@dataclass(frozen=True)
class SynthesisConfig:
    horizon_T: int = 5
    dk: float = 1.0
    epsilon_gamma: float = 0.01
    max_horizon_growth: int = 50
    total_steps: int = 60
    strategy: str = "receding_horizon"

    def __post_init__(self):
        for name in ("horizon_T", "max_horizon_growth", "total_steps"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigurationError(f"{name}: expected an integer, got {value!r}")
        if self.horizon_T < 1:
            raise ConfigurationError(f"horizon_T: must be >= 1, got {self.horizon_T}")
        if self.max_horizon_growth < 0:
            raise ConfigurationError(f"max_horizon_growth: must be >= 0, got {self.max_horizon_growth}")
        if self.total_steps < 0:
            raise ConfigurationError(f"total_steps: must be >= 0, got {self.total_steps}")
        if not (isinstance(self.dk, (int, float)) and math.isfinite(self.dk) and self.dk > 0):
            raise ConfigurationError(f"dk: must be a positive number, got {self.dk!r}")
        if not 0.0 < self.epsilon_gamma < 1.0:
            raise ConfigurationError(f"epsilon_gamma: must lie in (0, 1), got {self.epsilon_gamma!r}")
        if self.strategy not in STRATEGIES:
            raise ConfigurationError(f"strategy: must be one of {', '.join(STRATEGIES)}, got {self.strategy!r}")

    def with_overrides(self, **changes) -> SynthesisConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass(frozen=True)
class SwitchingSchedule:
    """Decision times and the mode applied from each one.

    ``entries`` holds ``(jump_time, mode)`` pairs; each mode runs until the
    next entry's jump time or ``total_steps``. Consecutive entries may carry
    the same mode: an entry marks a decision, not necessarily a change.
    """

    entries: tuple
    total_steps: int

    def __post_init__(self):
        entries = tuple((int(t), int(i)) for t, i in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.total_steps < 0:
            raise InputError(f"total_steps must be non-negative, got {self.total_steps}")
        if self.total_steps == 0:
            return
        if not entries or entries[0][0] != 0:
            raise InputError("schedule must start with an entry at step 0")
        times = [t for t, _ in entries]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InputError("schedule jump times must be strictly increasing")
        if times[-1] >= self.total_steps:
            raise InputError(f"jump time {times[-1]} lies outside 0..{self.total_steps - 1}")

    @classmethod
    def constant(cls, mode: int, total_steps: int) -> SwitchingSchedule:
        return cls(((0, mode),) if total_steps else (), total_steps)

    @classmethod
    def from_sequence(cls, sequence) -> SwitchingSchedule:
        """Schedule with an entry wherever the per-step mode changes."""
        seq = [int(i) for i in sequence]
        entries = [(k, i) for k, i in enumerate(seq) if k == 0 or seq[k - 1] != i]
        return cls(tuple(entries), len(seq))

    @property
    def jump_times(self) -> list[int]:
        return [t for t, _ in self.entries]

    def modes_per_step(self) -> np.ndarray:
        out = np.empty(self.total_steps, dtype=np.intp)
        bounds = self.jump_times[1:] + [self.total_steps]
        for (start, mode), stop in zip(self.entries, bounds):
            out[start:stop] = mode
        return out

    @property
    def is_constant(self) -> bool:
        return len({i for _, i in self.entries}) <= 1


@dataclass(frozen=True)
class DecisionRecord:
    """One horizon evaluation at a decision time.

    ``reference_w2`` is ``W2^2`` at the previous decision time (``None`` at
    the first decision, where the constraint is waived) and ``margin`` the
    required decrease ``gamma * reference_w2``. ``chosen_mode`` is ``None``
    for an evaluation that found no admissible mode and triggered a horizon
    extension.
    """

    jump_time: int
    horizon: int
    costs: tuple
    end_w2: tuple
    feasible: tuple
    reference_w2: float | None
    margin: float | None
    chosen_mode: int | None

    @property
    def satisfied(self) -> bool:
        return self.chosen_mode is not None


@dataclass
class SynthesisReport:
    strategy: str
    schedule: SwitchingSchedule
    trace: W2Trace
    per_mode_areas: dict
    constraint_log: list = field(default_factory=list)
    truncation_converged: bool | None = None

    @property
    def switched_area(self) -> float:
        return self.trace.area

    @property
    def best_constant_mode(self) -> int:
        return min(self.per_mode_areas, key=lambda i: (self.per_mode_areas[i], i))


def require_schur(system: JumpSystem) -> None:
    for i, A in enumerate(system.modes):
        rho = spectral_radius(A)
        if rho >= 1.0:
            raise PreconditionError(f"mode {i + 1} is not Schur stable (spectral radius {rho:.6g} >= 1)")


def constant_mode_areas(system: JumpSystem, initial: GaussianBelief, steps: int, dk: float) -> dict:
    """Area ``dk * sum_{k=0}^{steps} W2^2(k)`` of each constant-mode schedule."""
    M0 = initial.second_moment
    return {i: dk * float(np.sum(_kernels.propagate_moment(M0, A, steps)[0])) for i, A in enumerate(system.modes)}


def _check_dims(system, initial):
    if initial.n != system.n:
        raise ConfigurationError(f"initial belief has dimension {initial.n}, system has {system.n}")


def _argmin_lowest(costs, admissible):
    best = None
    for i, (c, ok) in enumerate(zip(costs, admissible)):
        if ok and (best is None or c < costs[best]):
            best = i
    return best


def synthesize_receding_horizon(system: JumpSystem, initial: GaussianBelief, config: SynthesisConfig) -> SynthesisReport:
    """Receding-horizon switching with the piecewise-decrease constraint.

    Decision ``j`` happens at ``t_j``; a mode is admissible when holding it
    until ``t_{j+1}`` gives ``W2(t_{j+1}) - W2(t_{j-1}) <= -gamma W2(t_{j-1})``.
    The first decision has no ``t_{j-1}`` and accepts every mode.
    """
    _check_dims(system, initial)
    require_schur(system)
    dk, gamma, N = config.dk, config.epsilon_gamma, config.total_steps
    modes = system.stacked
    M = initial.second_moment
    values = [float(np.trace(M))]
    entries, log = [], []
    per_mode = constant_mode_areas(system, initial, N, dk)
    t, prev_w2 = 0, None

    while t < N:
        horizon = config.horizon_T
        while True:
            sums, end = _kernels.horizon_costs(M, modes, horizon)
            costs = tuple(float(c) * dk for c in sums)
            end = tuple(float(e) for e in end)
            if prev_w2 is None:
                margin = None
                feasible = (True,) * system.m
            else:
                margin = gamma * prev_w2
                feasible = tuple(e - prev_w2 <= -margin for e in end)
            choice = _argmin_lowest(costs, feasible)
            log.append(DecisionRecord(t, horizon, costs, end, feasible, prev_w2, margin, choice))
            if choice is not None:
                break
            if horizon >= config.horizon_T + config.max_horizon_growth:
                partial = SynthesisReport(
                    "receding_horizon",
                    SwitchingSchedule(tuple(entries), t),
                    W2Trace(values, dk),
                    per_mode,
                    log,
                )
                raise SynthesisError(
                    f"no mode satisfies the stability constraint at step {t} "
                    f"even with horizon {horizon}",
                    partial,
                )
            horizon += 1

        span = min(horizon, N - t)
        traces, M = _kernels.propagate_moment(M, modes[choice], span)
        entries.append((t, choice))
        prev_w2 = values[-1]
        values.extend(float(v) for v in traces[1:])
        t += span

    return SynthesisReport(
        "receding_horizon", SwitchingSchedule(tuple(entries), N), W2Trace(values, dk), per_mode, log
    )


def synthesize_pointwise(system: JumpSystem, initial: GaussianBelief, config: SynthesisConfig) -> SynthesisReport:
    """Greedy choice of the mode with the smallest next-step ``W2^2``."""
    _check_dims(system, initial)
    require_schur(system)
    modes = system.stacked
    M = initial.second_moment
    seq = []
    for _ in range(config.total_steps):
        _, end = _kernels.horizon_costs(M, modes, 1)
        i = int(np.argmin(end))
        seq.append(i)
        M = modes[i] @ M @ modes[i].T
    values = _kernels.sequence_traces(initial.second_moment, modes, np.array(seq, dtype=np.intp))
    schedule = SwitchingSchedule(tuple(enumerate(seq)), config.total_steps)
    per_mode = constant_mode_areas(system, initial, config.total_steps, config.dk)
    return SynthesisReport("pointwise", schedule, W2Trace(values, config.dk), per_mode)


def synthesize_infinite_horizon(system: JumpSystem, initial: GaussianBelief, config: SynthesisConfig) -> SynthesisReport:
    """Best single mode by area, truncating the infinite sum at ``total_steps``.

    ``truncation_converged`` reports whether the winning trajectory has
    decayed below ``1e-9 * W2(0)`` by the truncation point.
    """
    _check_dims(system, initial)
    require_schur(system)
    N, dk = config.total_steps, config.dk
    M0 = initial.second_moment
    traces = [_kernels.propagate_moment(M0, A, N)[0] for A in system.stacked]
    per_mode = {i: dk * float(np.sum(tr)) for i, tr in enumerate(traces)}
    best = min(per_mode, key=lambda i: (per_mode[i], i))
    values = traces[best]
    converged = bool(values[-1] < TRUNCATION_TOL * values[0] or values[-1] == 0.0)
    return SynthesisReport(
        "infinite_horizon",
        SwitchingSchedule.constant(best, N),
        W2Trace(values, dk),
        per_mode,
        truncation_converged=converged,
    )


def solve_exact_tree(system: JumpSystem, initial: GaussianBelief, steps: int, dk: float = 1.0) -> SynthesisReport:
    """Exhaustive search over every per-step mode sequence of length ``steps``.

    Returns the minimiser of ``dk * sum_{k=0}^{steps} W2^2(k)``, ties going to
    the lexicographically smallest sequence.
    """
    _check_dims(system, initial)
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    if steps * math.log2(system.m) > EXACT_TREE_LOG2_CAP:
        raise InputError(
            f"exact tree search over {system.m}^{steps} sequences exceeds the 2^{EXACT_TREE_LOG2_CAP} cap; "
            "use the receding_horizon strategy instead"
        )
    M0 = initial.second_moment
    _, seq = _kernels.exhaustive_search(M0, system.stacked, steps)
    values = _kernels.sequence_traces(M0, system.stacked, seq)
    return SynthesisReport(
        "exact_tree",
        SwitchingSchedule.from_sequence(seq),
        W2Trace(values, dk),
        constant_mode_areas(system, initial, steps, dk),
    )


def synthesize(system: JumpSystem, initial: GaussianBelief, config: SynthesisConfig) -> SynthesisReport:
    """Dispatch on ``config.strategy``."""
    if config.strategy == "receding_horizon":
        return synthesize_receding_horizon(system, initial, config)
    if config.strategy == "pointwise":
        return synthesize_pointwise(system, initial, config)
    if config.strategy == "infinite_horizon":
        return synthesize_infinite_horizon(system, initial, config)
    return solve_exact_tree(system, initial, config.total_steps, config.dk)
