"""Optimal mode-switching synthesis for jump linear systems.

Performance is the area under the squared Wasserstein distance between the
Gaussian state PDF and the Dirac measure at the origin.
"""

from . import _kernels
from .analysis import (
    AreaComparison,
    MSVerdict,
    StabilityReport,
    compare_areas,
    dominance_check,
    spectral_radius,
    stability_report,
    verify_ms_stability,
)
from .errors import (
    ConfigurationError,
    DomainError,
    InputError,
    NumericalError,
    PreconditionError,
    SwitchSynthError,
    SynthesisError,
)
from .synthesis import (
    DecisionRecord,
    SwitchingSchedule,
    SynthesisConfig,
    SynthesisReport,
    constant_mode_areas,
    solve_exact_tree,
    synthesize,
    synthesize_infinite_horizon,
    synthesize_pointwise,
    synthesize_receding_horizon,
)
from .system_model import (
    GaussianBelief,
    JumpSystem,
    PlantWithControllers,
    build_closed_loop,
    propagate,
    simulate_schedule,
)
from .wasserstein import W2Trace, w2_gaussian_dirac, w2_kron_form, w2_trajectory

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel backend, ``"cython"`` or ``"python"``."""
    return _kernels.BACKEND
