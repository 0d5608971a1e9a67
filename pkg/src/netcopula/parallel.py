"""Resolution of the ncores option and numba thread configuration."""
from __future__ import annotations

import os

import numba

ENV_VAR = "NETCOPULA_NCORES"

# The layer is picked at the first parallel launch; prefer OpenMP so an
# outdated TBB is never probed (it only emits a warning and is skipped).
if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


def resolve_ncores(ncores="all") -> int:
    """Translate an ncores option to a worker count.

    ``"all"`` means the available cores minus one (at least one).  When
    ``ncores`` is None the ``NETCOPULA_NCORES`` environment variable, if set,
    provides the default.
    """
    if ncores is None:
        ncores = os.environ.get(ENV_VAR, "all")
    if isinstance(ncores, str):
        if ncores.lower() == "all":
            return max(1, (os.cpu_count() or 1) - 1)
        ncores = int(ncores)
    ncores = int(ncores)
    if ncores < 1:
        raise ValueError("ncores must be >= 1 or 'all'")
    return ncores


def set_threads(ncores) -> int:
    """Set the numba worker count; capped at the launched thread pool size."""
    k = min(resolve_ncores(ncores), numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(k)
    return k
