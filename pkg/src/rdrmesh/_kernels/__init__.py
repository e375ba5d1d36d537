"""Hot loops, compiled when possible.

The Cython extension is imported if it was built; otherwise, or when
``RDRMESH_PURE_PYTHON=1`` is set, the pure-Python module is used. Both
expose ``reuse_distances``, ``jacobi_sweep`` and ``gauss_seidel_sweep``.
"""
import os

from . import _fallback as fallback

try:
    from . import _ckernels as compiled
except ImportError:
    compiled = None

if compiled is not None and os.environ.get("RDRMESH_PURE_PYTHON", "") not in ("1", "true"):
    active = compiled
    BACKEND = "cython"
else:
    active = fallback
    BACKEND = "python"

reuse_distances = active.reuse_distances
jacobi_sweep = active.jacobi_sweep
gauss_seidel_sweep = active.gauss_seidel_sweep

__all__ = ["BACKEND", "active", "compiled", "fallback",
           "reuse_distances", "jacobi_sweep", "gauss_seidel_sweep"]
