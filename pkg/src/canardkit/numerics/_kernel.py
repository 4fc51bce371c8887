"""Kernel selection: the compiled stepper when it imports, else pure Python.

Set ``CANARDKIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from canardkit.numerics import _dopri_py

integrate_py = _dopri_py.integrate

try:
    from canardkit.numerics._dopri_c import integrate as integrate_c
except ImportError:  # pragma: no cover - depends on the build
    integrate_c = None

if integrate_c is not None and not os.environ.get("CANARDKIT_PURE_PYTHON"):
    integrate = integrate_c
    KERNEL = "compiled"
else:
    integrate = integrate_py
    KERNEL = "python"
