"""Hot per-symbol kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``smccm._kernels._ext``, Cython) is selected at
import when present; otherwise the numpy implementation is used. Set the
environment variable ``SMCCM_BACKEND`` to ``py`` or ``c`` to force a
backend (forcing ``c`` raises if the extension was not built).

Both backends implement the same four entry points with identical
semantics; ``tests/test_kernels.py`` asserts their numerical parity.
"""

import os

from . import _py

_ENV = "SMCCM_BACKEND"


def available_backends():
    out = {"python": _py}
    try:
        from . import _ext

        out["compiled"] = _ext
    except ImportError:
        pass
    return out


def _select():
    choice = os.environ.get(_ENV, "").strip().lower()
    backends = available_backends()
    if choice in ("py", "python", "fallback"):
        return backends["python"], "python"
    if choice in ("c", "ext", "compiled"):
        if "compiled" not in backends:
            raise ImportError(f"{_ENV}={choice} but the compiled extension is not built")
        return backends["compiled"], "compiled"
    if "compiled" in backends:
        return backends["compiled"], "compiled"
    return backends["python"], "python"


_impl, BACKEND_NAME = _select()

sg_step = _impl.sg_step
rls_step = _impl.rls_step
clarke_step = _impl.clarke_step
spread_channels = _impl.spread_channels
