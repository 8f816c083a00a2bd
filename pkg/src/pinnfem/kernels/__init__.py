"""Kernel backend selection.

Two interchangeable implementations of the jet-propagation kernels exist: the
compiled extension (`_fast`, Cython) and the pure-numpy fallback
(`reference`).  The fastest available one is picked at import time; set
``PINNFEM_KERNELS=python`` or ``PINNFEM_KERNELS=compiled`` to force a choice
(the latter raises if the extension was not built).

``benchmarks/bench_kernels.py`` compares the two end to end.
"""

import os

from . import reference

_FORCE = os.environ.get("PINNFEM_KERNELS", "auto").lower()

if _FORCE not in ("auto", "python", "compiled"):
    raise ValueError(f"PINNFEM_KERNELS must be auto|python|compiled, got {_FORCE!r}")

_compiled = None
if _FORCE in ("auto", "compiled"):
    try:
        from . import _fast as _compiled
    except ImportError:
        if _FORCE == "compiled":
            raise
        _compiled = None

backend = _compiled if _compiled is not None else reference


def available_backends():
    """Mapping of backend name to module, for tests and benchmarks."""
    out = {"python": reference}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def backend_name():
    return backend.BACKEND_NAME
