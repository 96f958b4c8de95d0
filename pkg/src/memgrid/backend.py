"""Kernel backend selection.

The hot per-cycle kernels ship in two interchangeable implementations:
jitted loops (`kernels_numba`) and vectorized numpy (`kernels_numpy`).
Selection happens once at import via the MEMGRID_BACKEND environment
variable:

    MEMGRID_BACKEND=numpy   force the pure-numpy path
    MEMGRID_BACKEND=numba   require numba (ImportError if unavailable)
    unset / auto            numba when importable, else numpy

Runs are bit-reproducible within a backend. Across backends the two
paths compute identical arithmetic in the same order; any residual
last-bit divergence on exotic platforms would only show up as
statistically equivalent trajectories (see benchmarks/bench_backends.py,
which checks agreement directly).
"""

import os

from . import kernels_numpy

_requested = os.environ.get("MEMGRID_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numpy", "numba"):
    raise ValueError(
        f"MEMGRID_BACKEND must be 'auto', 'numpy' or 'numba', got {_requested!r}"
    )

if _requested == "numpy":
    impl = kernels_numpy
    USING_NUMBA = False
else:
    try:
        from . import kernels_numba as impl  # noqa: F401

        USING_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        impl = kernels_numpy
        USING_NUMBA = False

BACKEND_NAME = "numba" if USING_NUMBA else "numpy"

local_inputs = impl.local_inputs
activation_scores = impl.activation_scores
fire_mask = impl.fire_mask
content_update = impl.content_update
energy_update = impl.energy_update
anchor_pull = impl.anchor_pull
group_fired_stats = impl.group_fired_stats
group_content_means = impl.group_content_means
