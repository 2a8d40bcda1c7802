"""Backend selection for the integrator loops.

The compiled extension is used when importable unless the environment
variable ``SLEEPING_TOP_PURE_PYTHON`` is set to a non-empty value other than
``0``.
"""

import os

from . import _kernels_py

_force_pure = os.environ.get("SLEEPING_TOP_PURE_PYTHON", "") not in ("", "0")

compiled = None
if not _force_pure:
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

python = _kernels_py
active = compiled if compiled is not None else python
BACKEND = active.BACKEND


def get_backend(name=None):
    """Return a backend module by name (``"cython"``/``"python"``), default active."""
    if name is None:
        return active
    if name == "python":
        return python
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernel is not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
