"""Kernel backend selection.

The compiled extension is used when it imports; otherwise (or when the
environment variable ``NETWORKED_PURE_PYTHON`` is set to a non-empty value
other than ``0``) the numpy fallback is used.
"""

import os

from . import _fallback

_force_pure = os.environ.get("NETWORKED_PURE_PYTHON", "") not in ("", "0")

compiled = None
if not _force_pure:
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else _fallback
BACKEND = "compiled" if compiled is not None else "python"

simplex_iterate = kernels.simplex_iterate
trial_sums = kernels.trial_sums


def get(name: str):
    """Kernel module by name: ``"compiled"``, ``"python"`` or ``"auto"``."""
    if name == "auto":
        return kernels
    if name == "python":
        return _fallback
    if name == "compiled":
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
