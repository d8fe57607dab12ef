"""Hot inner loops, compiled when available.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
pure-Python module ``_pykernels`` is used.  Setting ``ORBITREL_PURE_PYTHON=1``
forces the fallback.  ``BACKEND`` records which one was selected.
"""
import os

from orbitrel.kernels import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("ORBITREL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from orbitrel.kernels import _ckernels
    except ImportError:
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"

conv_trunc = _impl.conv_trunc
mann_box_search = _impl.mann_box_search
box_points = _impl.box_points


def implementations():
    """All importable kernel modules keyed by name (used by tests and benchmarks)."""
    impls = {"python": _pykernels}
    try:
        from orbitrel.kernels import _ckernels
    except ImportError:
        pass
    else:
        impls["cython"] = _ckernels
    return impls
