"""Pointwise kernels with a compiled fast path and a NumPy fallback.

The compiled extension (``_core``, built from Cython) is optional: if it
failed to build or the environment variable ``DENDRIX_KERNELS=numpy`` is
set, the NumPy reference implementation is used instead. Both backends
expose identical signatures and agree to machine precision.
"""

import os

from . import _ref

__all__ = ["aniso_2d", "aniso_3d", "double_well", "BACKEND", "use_backend", "available_backends"]

_BACKENDS = {"numpy": _ref}
try:
    from . import _core

    _BACKENDS["cython"] = _core
except ImportError:
    _core = None

BACKEND = "numpy"
aniso_2d = _ref.aniso_2d
aniso_3d = _ref.aniso_3d
double_well = _ref.double_well


def available_backends():
    return sorted(_BACKENDS)


def use_backend(name):
    """Select the kernel backend by name ('cython' or 'numpy')."""
    global BACKEND, aniso_2d, aniso_3d, double_well
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}")
    impl = _BACKENDS[name]
    BACKEND = name
    aniso_2d = impl.aniso_2d
    aniso_3d = impl.aniso_3d
    double_well = impl.double_well
    return BACKEND


_env = os.environ.get("DENDRIX_KERNELS", "").strip().lower()
if _env in ("numpy", "ref", "python"):
    use_backend("numpy")
elif "cython" in _BACKENDS:
    use_backend("cython")
