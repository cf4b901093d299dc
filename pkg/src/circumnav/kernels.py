"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports; otherwise the pure-Python
twin takes over. Set ``CIRCUMNAV_PURE_PYTHON=1`` to force the fallback.
"""
import importlib
import os

FIT_OK = 0
FIT_NONCONVERGED = 1
FIT_DEGENERATE = 2

_BACKENDS = {"compiled": "circumnav._ckernels", "python": "circumnav._pykernels"}


def load_backend(name):
    """Import a kernel backend by name (``"compiled"`` or ``"python"``)."""
    return importlib.import_module(_BACKENDS[name])


def compiled_available():
    try:
        load_backend("compiled")
    except ImportError:
        return False
    return True


def _select():
    if os.environ.get("CIRCUMNAV_PURE_PYTHON", "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "compiled", load_backend("compiled")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()

fit_circle_lm = _impl.fit_circle_lm
control_law = _impl.control_law
min_singular_centered = _impl.min_singular_centered
