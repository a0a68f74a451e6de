"""Pure-Python implementations of the walk kernels.

These mirror the compiled kernels in ``_ckernels`` operation for operation:
both consume exactly one uniform double per time step from the supplied
generator and derive the move (stay / parent / which child) from that single
draw, so traces are bit-identical whichever backend is selected.
"""

from __future__ import annotations

import numpy as np


def depth_walk(gen: np.random.Generator, d: int, gamma: float, steps: int) -> np.ndarray:
    """Depth process of a walk on the d-regular tree, started at the root.

    ``gamma`` is the staying probability (0.0 gives the simple non-lazy
    walk).  Conditioned on moving, the walk picks a uniform neighbor: from
    the root always a child, elsewhere the parent with probability 1/d.
    """
    us = gen.random(steps)
    depths = np.empty(steps + 1, dtype=np.int64)
    depths[0] = 0
    depth = 0
    inv = 1.0 - gamma
    for t in range(steps):
        u = us[t]
        if u >= gamma:
            v = (u - gamma) / inv
            if depth == 0:
                depth = 1
            elif v * d < 1.0:
                depth -= 1
            else:
                depth += 1
        depths[t + 1] = depth
    return depths


def coupled_shift_walk(
    gen: np.random.Generator,
    d: int,
    gamma: float,
    codes: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Walk depths together with the depths of its permuted image.

    ``codes[t]`` encodes the permutation applied at step t+1: -1 for the
    identity, otherwise the root-child label c of an edge-shift automorphism
    (the reflection swapping the root with its child c).  The image depths
    are those of pi_t(...(pi_1(X_t))), evaluated by rewriting the root path
    of X_t through the whole chain.
    """
    codes = np.asarray(codes, dtype=np.int64)
    steps = len(codes)
    us = gen.random(steps)
    depths_x = np.empty(steps + 1, dtype=np.int64)
    depths_y = np.empty(steps + 1, dtype=np.int64)
    depths_x[0] = 0
    depths_y[0] = 0

    path = np.empty(steps + 1, dtype=np.int64)  # root path of X, labels
    depth = 0
    size = 2 * steps + 4
    work = np.empty(size, dtype=np.int64)
    center = steps + 2
    inv = 1.0 - gamma

    for t in range(steps):
        u = us[t]
        if u >= gamma:
            v = (u - gamma) / inv
            if depth == 0:
                k = int(v * d)
                if k >= d:
                    k = d - 1
                path[0] = k
                depth = 1
            elif v * d < 1.0:
                depth -= 1
            else:
                k = int(v * d - 1.0)
                if k >= d - 1:
                    k = d - 2
                path[depth] = k
                depth += 1
        depths_x[t + 1] = depth

        lo = center
        hi = center + depth
        work[lo:hi] = path[:depth]
        for s in range(t + 1):
            c = codes[s]
            if c < 0:
                continue
            if lo == hi:
                lo -= 1
                work[lo] = c
            elif work[lo] == c:
                if hi - lo == 1:
                    lo += 1
                else:
                    a2 = work[lo + 1]
                    lo += 1
                    work[lo] = a2 + 1 if a2 >= c else a2
            else:
                c1 = work[lo]
                work[lo] = c1 - 1 if c1 > c else c1
                lo -= 1
                work[lo] = c
        depths_y[t + 1] = hi - lo
    return depths_x, depths_y
