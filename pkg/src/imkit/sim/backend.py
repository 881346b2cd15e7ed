"""Select the integrator kernel at import time.

The compiled extension is preferred when it built; the pure-Python kernel is
a drop-in replacement (same tape, same algorithm). Set IMK_BACKEND=python to
force the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os

from . import _rk45_py


def _select():
    if os.environ.get("IMK_BACKEND", "").strip().lower() == "python":
        return _rk45_py
    try:
        from .. import _rk45  # compiled extension

        return _rk45
    except ImportError:
        return _rk45_py


_kernel = _select()

BACKEND = _kernel.KERNEL_NAME
integrate_tape_kernel = _kernel.integrate_tape


def available_backends():
    out = {"python": _rk45_py.integrate_tape}
    try:
        from .. import _rk45

        out["compiled"] = _rk45.integrate_tape
    except ImportError:
        pass
    return out
