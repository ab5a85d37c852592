"""Kernel backend selection.

SFAST_BACKEND picks the implementation of the hot kernels:

  auto (default)  numba if importable, else pure numpy
  numba           require the numba backend, fail if unavailable
  numpy           force the pure numpy fallback

See benchmarks/bench_backends.py for a side-by-side comparison.
"""

import os

_requested = os.environ.get("SFAST_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import numba_impl as _impl
    except ImportError:
        from . import numpy_impl as _impl
elif _requested == "numba":
    from . import numba_impl as _impl
elif _requested == "numpy":
    from . import numpy_impl as _impl
else:
    raise ValueError(
        f"SFAST_BACKEND={_requested!r}: expected 'auto', 'numba', or 'numpy'"
    )

BACKEND_NAME = _impl.BACKEND_NAME

count_backward_affected = _impl.count_backward_affected
scc_labels = _impl.scc_labels
has_t_cycle_dense = _impl.has_t_cycle_dense
first_t_triangle = _impl.first_t_triangle
best_order = _impl.best_order
find_feedback_subset = _impl.find_feedback_subset
hill_climb = _impl.hill_climb
regularize_order = _impl.regularize_order
