"""Pick the numerical kernel implementation once, at import.

The compiled ``_ckernels`` extension is used when it imports; otherwise (or
when ``KTT_PURE_PYTHON`` is set to a non-empty value other than ``0``) the
NumPy twin in ``_pykernels`` is used.
"""
import os

from . import _pykernels

_force_pure = os.environ.get("KTT_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

BACKEND = kernels.NAME
