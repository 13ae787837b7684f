"""Hot-loop kernels with a compiled core and a NumPy fallback.

The compiled extension ``_ckernels`` is used when it was built; otherwise
the pure NumPy module ``_pykernels`` is loaded. Setting the environment
variable ``SWITCHSYNTH_PURE_PYTHON=1`` forces the fallback. Callers must look
kernels up through this module at call time (``_kernels.horizon_costs``) so
that :func:`set_backend` takes effect everywhere.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

KERNELS = ("propagate_moment", "sequence_traces", "horizon_costs", "exhaustive_search")

BACKEND = None


def available_backends():
    return tuple(_BACKENDS)


def set_backend(name):
    """Route every kernel through backend ``name`` ("cython" or "python")."""
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} is not available; have {available_backends()}")
    module = _BACKENDS[name]
    for kernel in KERNELS:
        globals()[kernel] = getattr(module, kernel)
    BACKEND = name


def _default_backend():
    if os.environ.get("SWITCHSYNTH_PURE_PYTHON", "").strip() not in ("", "0"):
        return "python"
    return "cython" if _ckernels is not None else "python"


set_backend(_default_backend())
