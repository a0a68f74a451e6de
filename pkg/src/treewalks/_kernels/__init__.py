"""Walk kernels: compiled extension when available, pure Python otherwise.

Set the environment variable ``TREEWALKS_PURE_PYTHON=1`` to force the pure
Python backend (used by the benchmark and the cross-backend equality tests).
Both backends draw identically from the supplied generator, so results do
not depend on which one is active.
"""

import os

from . import pykernels

if os.environ.get("TREEWALKS_PURE_PYTHON"):
    BACKEND = "python"
    depth_walk = pykernels.depth_walk
    coupled_shift_walk = pykernels.coupled_shift_walk
else:
    try:
        from ._ckernels import coupled_shift_walk, depth_walk

        BACKEND = "cython"
    except ImportError:  # extension not built
        BACKEND = "python"
        depth_walk = pykernels.depth_walk
        coupled_shift_walk = pykernels.coupled_shift_walk

__all__ = ["BACKEND", "depth_walk", "coupled_shift_walk", "pykernels"]
