"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``GROTH_LHV_PURE`` is set to a non-empty value other
than ``0``, the numpy fallback is used. ``BACKEND`` names the active one.
"""
import os

from . import _fallback

_force_pure = os.environ.get("GROTH_LHV_PURE", "") not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure backend forced")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

local_bound_signs = _impl.local_bound_signs
seesaw_run = _impl.seesaw_run


def backends():
    """Mapping of every importable backend name to its module."""
    out = {"python": _fallback}
    try:
        from . import _kernels
        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
