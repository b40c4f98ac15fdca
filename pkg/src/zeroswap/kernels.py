"""Backend selection for the geometric kernels.

The compiled extension ``zeroswap._ckernels`` is used when it was built;
otherwise, or when ``ZEROSWAP_PURE_PYTHON=1`` is set, the numpy versions
in ``zeroswap._kernels_py`` are used. Both expose identical functions.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ZEROSWAP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

anneal_objective = _impl.anneal_objective
max_mst_edge = _impl.max_mst_edge
segment_clearance = _impl.segment_clearance
blockade_hit = _impl.blockade_hit
nearest_free_site = _impl.nearest_free_site


def backends():
    """Map of available backend name -> kernel module (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
