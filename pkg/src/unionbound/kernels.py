"""Kernel selection.

The compiled extension ``unionbound._core`` is used when it was built;
otherwise the numpy twin in ``unionbound._core_py`` is loaded.  Setting
``UNIONBOUND_PURE=1`` in the environment forces the fallback.
"""

import os

if os.environ.get("UNIONBOUND_PURE", "") not in ("", "0"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        from . import _core_py as _impl

BACKEND = "compiled" if _impl.__name__.endswith("._core") else "python"

OPTIMAL, UNBOUNDED, ITERATION_LIMIT, INFEASIBLE = 0, 1, 2, 3
# pricing rules for run_simplex
BLAND, DANTZIG = 0, 1

pivot = _impl.pivot
run_simplex = _impl.run_simplex
run_dual_simplex = _impl.run_dual_simplex
qpbf_min = _impl.qpbf_min

__all__ = ["BACKEND", "pivot", "run_simplex", "run_dual_simplex", "qpbf_min",
           "OPTIMAL", "UNBOUNDED", "ITERATION_LIMIT", "INFEASIBLE", "BLAND", "DANTZIG"]
