"""Statevector bit kernels with a selectable backend.

The hot loops (ladder application, hops, two-level rotations, popcounts)
exist twice: a numba ``@njit`` implementation and a vectorized pure-numpy
fallback with identical semantics.  ``EXCHANGE_LAB_KERNEL`` picks one at
import time:

* ``auto`` (default) -- numba if it imports, numpy otherwise
* ``numba``          -- require the compiled path
* ``numpy``          -- force the fallback

Both backends emit contribution arrays in the same order, so results are
bitwise identical after :func:`coalesce`.
"""

import os

import numpy as np

ENV_KERNEL = "EXCHANGE_LAB_KERNEL"


def _load_backend():
    choice = os.environ.get(ENV_KERNEL, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"unsupported {ENV_KERNEL} value {choice!r}; use auto, numba or numpy"
        )
    if choice in ("auto", "numba"):
        try:
            from . import numba_backend

            return numba_backend, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import numpy_backend

    return numpy_backend, "numpy"


_backend, BACKEND_NAME = _load_backend()

popcount = _backend.popcount
ladder_contributions = _backend.ladder_contributions
hop_contributions = _backend.hop_contributions
rotation_contributions = _backend.rotation_contributions


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND_NAME


def coalesce(indices, amplitudes, prune):
    """Sort contributions by basis index, merge duplicates, drop tiny terms.

    Duplicate indices are summed in their (stable) sorted order, so the
    merge is deterministic and backend independent.
    """
    indices = np.asarray(indices, dtype=np.int64)
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    if indices.shape[0] == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.complex128)
    order = np.argsort(indices, kind="stable")
    idx = indices[order]
    amp = amplitudes[order]
    starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]])
    sums = np.add.reduceat(amp, starts)
    uniq = idx[starts]
    keep = np.abs(sums) >= prune
    return uniq[keep], sums[keep]
