"""Backend selection for the dense kernels.

The compiled extension is used when it was built; otherwise (or when
``POSTSELECT_SQUEEZE_BACKEND=numpy`` is set) the NumPy implementation is used.
Both expose ``apply_site_sum(M, a, b, c)`` and ``trace_site_sum(M, a, b, c)``.
"""
import os

from . import _kernels_py

try:
    from . import _ext
except ImportError:  # extension not built
    _ext = None

BACKENDS = {"numpy": _kernels_py}
if _ext is not None:
    BACKENDS["cython"] = _ext


def _select():
    wanted = os.environ.get("POSTSELECT_SQUEEZE_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in BACKENDS:
            raise ImportError(
                f"backend {wanted!r} requested but only {sorted(BACKENDS)} are available"
            )
        return wanted
    return "cython" if "cython" in BACKENDS else "numpy"


BACKEND = _select()
apply_site_sum = BACKENDS[BACKEND].apply_site_sum
trace_site_sum = BACKENDS[BACKEND].trace_site_sum
